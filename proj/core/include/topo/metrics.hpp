#pragma once

#include "topo/domain.hpp"
#include "topo/problem.hpp"
#include "topo/record.hpp"
#include "topo/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace topo {

[[nodiscard]] double mae(const Field& y, const Field& y_hat);
[[nodiscard]] double mse(const Field& y, const Field& y_hat);
[[nodiscard]] double volume_fraction(const Field& y);

/// sum(y_hat - y) / sum(y), signed. Throws DegenerateGroundTruth if sum(y) == 0.
[[nodiscard]] double re_vf(const Field& y, const Field& y_hat);

struct ComplianceOptions {
  double penal = 2.0;     // the generation penalty
  bool binarize = false;  // threshold both fields at 0.5 before analysis
};

/// Compliance of a density for the problem's supports and load.
[[nodiscard]] double structure_compliance(const Field& density, const ProblemSpec& spec,
                                          const DesignDomain& domain,
                                          const ComplianceOptions& options = {});

/// (C(y_hat) - C(y)) / C(y). Throws DegenerateGroundTruth if C(y) <= 0.
[[nodiscard]] double re_c(const Field& y, const Field& y_hat, const ProblemSpec& spec,
                          const DesignDomain& domain, const ComplianceOptions& options = {});

struct SampleMetrics {
  std::uint64_t id = 0;
  double mae = 0.0;
  double mse = 0.0;
  double re_vf = 0.0;
  double re_c = 0.0;
};

struct Histogram {
  double bin_width = 0.01;
  double origin = 0.0;  // left edge of bin 0
  std::vector<std::size_t> counts;
};

[[nodiscard]] Histogram make_histogram(std::span<const double> values, double bin_width);

struct MetricsReport {
  std::string split;
  std::vector<SampleMetrics> samples;  // ascending id
  std::size_t count = 0;
  double mae = 0.0;
  double mse = 0.0;
  double re_vf = 0.0;
  double re_c = 0.0;
  double abs_re_vf = 0.0;
  double abs_re_c = 0.0;
  Histogram re_vf_histogram;
  Histogram re_c_histogram;

  [[nodiscard]] std::vector<double> sorted_re_vf() const;
  [[nodiscard]] std::vector<double> sorted_re_c() const;
};

struct EvaluationOptions {
  ComplianceOptions compliance;
  double histogram_bin_width = 0.01;
  std::string split;  // label only
};

/// Pairs predictions with ground truth by sample id. The problem is taken
/// from the ground-truth metadata. Throws IdMismatch when the id sets differ.
[[nodiscard]] MetricsReport evaluate_batch(std::span<const SampleRecord> predictions,
                                           std::span<const SampleRecord> ground_truth,
                                           const DesignDomain& domain,
                                           const EvaluationOptions& options = {});

/// "id,mae,mse,re_vf,re_c" rows.
void write_report_csv(std::ostream& out, const MetricsReport& report);
/// "rank,re_vf,re_c" with each column sorted ascending independently.
void write_sorted_series_csv(std::ostream& out, const MetricsReport& report);
[[nodiscard]] nlohmann::json report_summary(const MetricsReport& report);

}  // namespace topo
