#include "topo/metrics.hpp"

#include "topo/error.hpp"
#include "topo/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace topo {

namespace {

void check_same_shape(const Field& a, const Field& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "ground truth and prediction shapes differ");
  }
}

Field binarized(const Field& y) { return (y.array() >= 0.5).cast<double>().matrix(); }

double mean_of(const std::vector<SampleMetrics>& v, double SampleMetrics::*member, bool absolute) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const auto& m : v) s += absolute ? std::abs(m.*member) : m.*member;
  return s / static_cast<double>(v.size());
}

}  // namespace

double mae(const Field& y, const Field& y_hat) {
  check_same_shape(y, y_hat);
  return (y - y_hat).cwiseAbs().sum() / static_cast<double>(y.size());
}

double mse(const Field& y, const Field& y_hat) {
  check_same_shape(y, y_hat);
  return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

double volume_fraction(const Field& y) {
  if (y.size() == 0) throw Error(ErrorCode::ShapeMismatch, "empty density field");
  return y.sum() / static_cast<double>(y.size());
}

double re_vf(const Field& y, const Field& y_hat) {
  check_same_shape(y, y_hat);
  const double total = y.sum();
  if (total == 0.0) throw Error(ErrorCode::DegenerateGroundTruth, "ground truth has no material");
  return (y_hat - y).sum() / total;
}

double structure_compliance(const Field& density, const ProblemSpec& spec,
                            const DesignDomain& domain, const ComplianceOptions& options) {
  const Field y = options.binarize ? binarized(density) : density;
  const Eigen::VectorXd U = assemble_and_solve(y, spec, domain, options.penal);
  return compliance(y, U, domain, options.penal);
}

double re_c(const Field& y, const Field& y_hat, const ProblemSpec& spec,
            const DesignDomain& domain, const ComplianceOptions& options) {
  check_same_shape(y, y_hat);
  ElasticSolver solver(domain, resolve_fixity(spec.scenario(), domain));
  const Eigen::VectorXd F = load_vector(spec, domain);
  const auto compliance_of = [&](const Field& d) {
    const Field x = options.binarize ? binarized(d) : d;
    return compliance(x, solver.solve(x, options.penal, F), domain, options.penal);
  };
  const double c_true = compliance_of(y);
  if (!(c_true > 0.0)) {
    throw Error(ErrorCode::DegenerateGroundTruth, "ground-truth compliance is not positive");
  }
  return (compliance_of(y_hat) - c_true) / c_true;
}

Histogram make_histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.origin = std::floor(*lo / bin_width) * bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((*hi - h.origin) / bin_width)) + 1;
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto k = static_cast<std::size_t>(std::floor((v - h.origin) / bin_width));
    h.counts[std::min(k, bins - 1)]++;
  }
  return h;
}

std::vector<double> MetricsReport::sorted_re_vf() const {
  std::vector<double> v;
  for (const auto& s : samples) v.push_back(s.re_vf);
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> MetricsReport::sorted_re_c() const {
  std::vector<double> v;
  for (const auto& s : samples) v.push_back(s.re_c);
  std::sort(v.begin(), v.end());
  return v;
}

MetricsReport evaluate_batch(std::span<const SampleRecord> predictions,
                             std::span<const SampleRecord> ground_truth,
                             const DesignDomain& domain, const EvaluationOptions& options) {
  std::map<std::uint64_t, const SampleRecord*> truth;
  for (const auto& r : ground_truth) {
    if (!truth.emplace(r.meta.id, &r).second) {
      throw Error(ErrorCode::IdMismatch, "duplicate ground-truth id " + std::to_string(r.meta.id));
    }
  }
  std::map<std::uint64_t, const SampleRecord*> pred;
  for (const auto& r : predictions) {
    if (!pred.emplace(r.meta.id, &r).second) {
      throw Error(ErrorCode::IdMismatch, "duplicate prediction id " + std::to_string(r.meta.id));
    }
    if (!truth.count(r.meta.id)) {
      throw Error(ErrorCode::IdMismatch, "prediction id " + std::to_string(r.meta.id) +
                                             " has no ground truth");
    }
  }
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::IdMismatch, "ground-truth samples without a prediction");
  }

  MetricsReport report;
  report.split = options.split;
  for (const auto& [id, gt] : truth) {
    const Field y = to_field(gt->target);
    const Field y_hat = to_field(pred.at(id)->target);
    SampleMetrics m;
    m.id = id;
    m.mae = mae(y, y_hat);
    m.mse = mse(y, y_hat);
    m.re_vf = re_vf(y, y_hat);
    m.re_c = re_c(y, y_hat, gt->meta.spec, domain, options.compliance);
    report.samples.push_back(m);
  }
  report.count = report.samples.size();
  report.mae = mean_of(report.samples, &SampleMetrics::mae, false);
  report.mse = mean_of(report.samples, &SampleMetrics::mse, false);
  report.re_vf = mean_of(report.samples, &SampleMetrics::re_vf, false);
  report.re_c = mean_of(report.samples, &SampleMetrics::re_c, false);
  report.abs_re_vf = mean_of(report.samples, &SampleMetrics::re_vf, true);
  report.abs_re_c = mean_of(report.samples, &SampleMetrics::re_c, true);
  const auto vf_series = report.sorted_re_vf();
  const auto c_series = report.sorted_re_c();
  report.re_vf_histogram = make_histogram(vf_series, options.histogram_bin_width);
  report.re_c_histogram = make_histogram(c_series, options.histogram_bin_width);
  return report;
}

void write_report_csv(std::ostream& out, const MetricsReport& report) {
  out.precision(17);
  out << "id,mae,mse,re_vf,re_c\n";
  for (const auto& s : report.samples) {
    out << s.id << ',' << s.mae << ',' << s.mse << ',' << s.re_vf << ',' << s.re_c << '\n';
  }
}

void write_sorted_series_csv(std::ostream& out, const MetricsReport& report) {
  out.precision(17);
  const auto vf = report.sorted_re_vf();
  const auto c = report.sorted_re_c();
  out << "rank,re_vf,re_c\n";
  for (std::size_t i = 0; i < vf.size(); ++i) out << i << ',' << vf[i] << ',' << c[i] << '\n';
}

nlohmann::json report_summary(const MetricsReport& report) {
  const auto hist = [](const Histogram& h) {
    return nlohmann::json{{"bin_width", h.bin_width}, {"origin", h.origin}, {"counts", h.counts}};
  };
  return nlohmann::json{{"split", report.split},
                        {"count", report.count},
                        {"mae", report.mae},
                        {"mse", report.mse},
                        {"re_vf", report.re_vf},
                        {"abs_re_vf", report.abs_re_vf},
                        {"re_c", report.re_c},
                        {"abs_re_c", report.abs_re_c},
                        {"re_vf_histogram", hist(report.re_vf_histogram)},
                        {"re_c_histogram", hist(report.re_c_histogram)}};
}

}  // namespace topo
