#include "topo/simp.hpp"

#include "topo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace topo {

void SimpConfig::validate() const {
  if (!(penal >= 1.0)) throw Error(ErrorCode::InvalidArgument, "penal must be >= 1");
  if (!(filter_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "filter radius must be > 0");
  if (!(move_limit > 0.0 && move_limit <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "move limit must be in (0, 1]");
  }
  if (!(oc_damping > 0.0 && oc_damping <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "OC damping must be in (0, 1]");
  }
  if (max_iters < 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 0");
  if (!(change_tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "change_tol must be >= 0");
  if (!(vf_bisect_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "vf_bisect_tol must be > 0");
  }
}

void OptimizationTrace::write_csv(std::ostream& out) const {
  out.precision(17);
  out << "iteration,compliance,vf,change\n";
  for (std::size_t i = 0; i < compliance.size(); ++i) {
    out << i << ',' << compliance[i] << ',' << volume_fraction[i] << ',' << change[i] << '\n';
  }
}

Field sensitivity(const Field& density, const Eigen::VectorXd& U, const DesignDomain& domain,
                  double penal) {
  const Field energy = element_energy(U, domain);
  if (density.rows() != energy.rows() || density.cols() != energy.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "density must be nely x nelx");
  }
  const double scale = -penal * (domain.youngs_modulus - domain.youngs_min);
  Field dc(density.rows(), density.cols());
  for (Eigen::Index r = 0; r < dc.rows(); ++r) {
    for (Eigen::Index c = 0; c < dc.cols(); ++c) {
      dc(r, c) = scale * std::pow(density(r, c), penal - 1.0) * energy(r, c);
    }
  }
  return dc;
}

Field filter_sensitivity(const Field& dc, const Field& density, double rmin) {
  if (dc.rows() != density.rows() || dc.cols() != density.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "sensitivity and density shapes differ");
  }
  const auto ny = static_cast<int>(dc.rows());
  const auto nx = static_cast<int>(dc.cols());
  const int reach = std::max(0, static_cast<int>(std::ceil(rmin)) - 1);
  Field out(ny, nx);
  for (int r = 0; r < ny; ++r) {
    for (int c = 0; c < nx; ++c) {
      double weight_sum = 0.0;
      double acc = 0.0;
      for (int rr = std::max(0, r - reach); rr <= std::min(ny - 1, r + reach); ++rr) {
        for (int cc = std::max(0, c - reach); cc <= std::min(nx - 1, c + reach); ++cc) {
          const double w = std::max(0.0, rmin - std::hypot(r - rr, c - cc));
          weight_sum += w;
          acc += w * density(rr, cc) * dc(rr, cc);
        }
      }
      out(r, c) = acc / (std::max(1e-3, density(r, c)) * weight_sum);
    }
  }
  return out;
}

namespace {

// y_e (-dc_e / lambda)^eta == grow_e * lambda^-eta with grow_e = y_e (-dc_e)^eta,
// so each bisection trial needs a single pow.
double oc_trial(const Field& y, const Field& grow, double lambda, const SimpConfig& cfg,
                Field& out) {
  const double scale = std::pow(lambda, -cfg.oc_damping);
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double ye = y.data()[i];
    const double lo = std::max(0.0, ye - cfg.move_limit);
    const double hi = std::min(1.0, ye + cfg.move_limit);
    const double v = std::clamp(grow.data()[i] * scale, lo, hi);
    out.data()[i] = v;
    total += v;
  }
  return total / static_cast<double>(y.size());
}

}  // namespace

Field oc_update(const Field& density, const Field& dc, double vf_target,
                const SimpConfig& config) {
  if (dc.rows() != density.rows() || dc.cols() != density.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "sensitivity and density shapes differ");
  }
  if (!dc.allFinite()) throw Error(ErrorCode::NonFiniteInput, "sensitivity contains NaN/Inf");

  double scale = 0.0;
  Field grow(density.rows(), density.cols());
  for (Eigen::Index i = 0; i < dc.size(); ++i) {
    const double g = std::max(0.0, -dc.data()[i]);
    scale += g;
    grow.data()[i] = density.data()[i] * (config.oc_damping == 0.5 ? std::sqrt(g)
                                                                    : std::pow(g, config.oc_damping));
  }
  scale /= static_cast<double>(dc.size());
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::BisectionFailure, "sensitivities are all zero");
  }

  Field trial(density.rows(), density.cols());
  // The mean density decreases monotonically in lambda.
  double lo = scale;
  double hi = scale;
  while (oc_trial(density, grow, lo, config, trial) < vf_target) {
    lo *= 0.25;
    if (lo < 1e-290) throw Error(ErrorCode::BisectionFailure, "volume target unreachable (low)");
  }
  while (oc_trial(density, grow, hi, config, trial) > vf_target) {
    hi *= 4.0;
    if (hi > 1e290) throw Error(ErrorCode::BisectionFailure, "volume target unreachable (high)");
  }

  Field best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    const double vol = oc_trial(density, grow, mid, config, trial);
    const double err = std::abs(vol - vf_target);
    if (err < best_err) {
      best_err = err;
      best = trial;
    }
    if (err <= 1e-2 * config.vf_bisect_tol || !(mid > lo && mid < hi)) break;
    if (vol > vf_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(best_err <= config.vf_bisect_tol)) {
    throw Error(ErrorCode::BisectionFailure, "bisection stalled outside the volume tolerance");
  }
  return best;
}

OptimizationResult optimize(ElasticSolver& solver, const Eigen::VectorXd& F, double vf_target,
                            const SimpConfig& config) {
  config.validate();
  if (!(vf_target > 0.0 && vf_target <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "volume fraction target must be in (0, 1]");
  }
  const DesignDomain& domain = solver.domain();

  OptimizationResult res;
  Field& y = res.density;
  OptimizationTrace& trace = res.trace;
  y = domain.uniform(vf_target);
  trace.volume_fraction.push_back(y.mean());
  trace.change.push_back(0.0);

  for (int it = 0; it < config.max_iters; ++it) {
    const Eigen::VectorXd U = solver.solve(y, config.penal, F);
    trace.compliance.push_back(compliance(y, U, domain, config.penal));

    const Field dc = filter_sensitivity(sensitivity(y, U, domain, config.penal), y,
                                        config.filter_radius);
    Field next = oc_update(y, dc, vf_target, config);
    const double change = (next - y).cwiseAbs().maxCoeff();
    y = std::move(next);
    ++trace.iterations;
    trace.volume_fraction.push_back(y.mean());
    trace.change.push_back(change);
    if (change < config.change_tol) {
      trace.converged = true;
      break;
    }
  }

  const Eigen::VectorXd U = solver.solve(y, config.penal, F);
  trace.compliance.push_back(compliance(y, U, domain, config.penal));
  return res;
}

OptimizationResult optimize(const ProblemSpec& spec, const DesignDomain& domain,
                            const SimpConfig& config) {
  validate(spec, domain);
  ElasticSolver solver(domain, resolve_fixity(spec.scenario(), domain));
  return optimize(solver, load_vector(spec, domain), spec.vf_target, config);
}

void to_json(nlohmann::json& j, const SimpConfig& c) {
  j = nlohmann::json{{"penal", c.penal},
                     {"filter_radius", c.filter_radius},
                     {"move_limit", c.move_limit},
                     {"oc_damping", c.oc_damping},
                     {"max_iters", c.max_iters},
                     {"change_tol", c.change_tol},
                     {"vf_bisect_tol", c.vf_bisect_tol}};
}

void from_json(const nlohmann::json& j, SimpConfig& c) {
  j.at("penal").get_to(c.penal);
  j.at("filter_radius").get_to(c.filter_radius);
  j.at("move_limit").get_to(c.move_limit);
  j.at("oc_damping").get_to(c.oc_damping);
  j.at("max_iters").get_to(c.max_iters);
  j.at("change_tol").get_to(c.change_tol);
  j.at("vf_bisect_tol").get_to(c.vf_bisect_tol);
}

}  // namespace topo
