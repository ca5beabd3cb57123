#pragma once

#include "topo/domain.hpp"
#include "topo/fem.hpp"
#include "topo/problem.hpp"
#include "topo/scenario.hpp"
#include "topo/types.hpp"

#include <iosfwd>
#include <vector>

namespace topo {

struct SimpConfig {
  double penal = 2.0;
  double filter_radius = 1.5;
  double move_limit = 0.2;
  double oc_damping = 0.5;
  int max_iters = 100;
  double change_tol = 0.01;
  double vf_bisect_tol = 1e-4;

  void validate() const;

  friend bool operator==(const SimpConfig&, const SimpConfig&) = default;
};

struct OptimizationTrace {
  // Row i describes iterate i; row 0 is the uniform start.
  std::vector<double> compliance;
  std::vector<double> volume_fraction;
  std::vector<double> change;
  int iterations = 0;
  bool converged = false;

  /// "iteration,compliance,vf,change" header plus one row per iterate.
  void write_csv(std::ostream& out) const;
};

struct OptimizationResult {
  Field density;
  OptimizationTrace trace;
};

/// dc_e = -p y_e^(p-1) (E - Emin) u_e^T k0 u_e, the exact derivative of U^T K U.
[[nodiscard]] Field sensitivity(const Field& density, const Eigen::VectorXd& U,
                                const DesignDomain& domain, double penal);

/// Classic mesh-independent sensitivity filter with cone weights
/// max(0, rmin - dist). The density in the denominator is floored at 1e-3.
[[nodiscard]] Field filter_sensitivity(const Field& dc, const Field& density, double rmin);

/// Optimality-criteria step. Bisects the multiplier in log space until the
/// mean density is within config.vf_bisect_tol of vf_target.
/// Throws BisectionFailure when no multiplier can reach the target.
[[nodiscard]] Field oc_update(const Field& density, const Field& dc, double vf_target,
                              const SimpConfig& config);

/// SIMP loop from a uniform start: solve, sensitivity, filter, OC update,
/// until max|dy| < change_tol or max_iters.
[[nodiscard]] OptimizationResult optimize(ElasticSolver& solver, const Eigen::VectorXd& F,
                                          double vf_target, const SimpConfig& config);

[[nodiscard]] OptimizationResult optimize(const ProblemSpec& spec, const DesignDomain& domain,
                                          const SimpConfig& config);

void to_json(nlohmann::json& j, const SimpConfig& config);
void from_json(const nlohmann::json& j, SimpConfig& config);

}  // namespace topo
