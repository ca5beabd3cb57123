#pragma once

#include "topo/domain.hpp"
#include "topo/problem.hpp"
#include "topo/scenario.hpp"
#include "topo/types.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <memory>
#include <vector>

namespace topo {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Unit-modulus plane-stress stiffness of one square bilinear element,
/// integrated with 2x2 Gauss points and scaled by thickness. Dof order
/// follows DesignDomain::element_dofs: (ux, uy) for LL, LR, UR, UL.
[[nodiscard]] ElementMatrix element_stiffness(const DesignDomain& domain);

/// Emin + y^p (E - Emin).
[[nodiscard]] double penalized_modulus(double density, double penal, const DesignDomain& domain);

[[nodiscard]] Eigen::VectorXd nodal_load(const DesignDomain& domain, int node, double fx,
                                         double fy);
[[nodiscard]] Eigen::VectorXd load_vector(const ProblemSpec& spec, const DesignDomain& domain);

/// Full (unreduced) linear system, kept mainly for inspection and debug dumps.
struct StiffnessSystem {
  SparseMatrix K;
  Eigen::VectorXd F;
  std::vector<int> fixed_dofs;
};

[[nodiscard]] StiffnessSystem assemble(const Field& density, double penal,
                                       const NodeFixity& fixity, const Eigen::VectorXd& F,
                                       const DesignDomain& domain);

/// Direct sparse solver for K(y) U = F with a fixed support layout.
///
/// The sparsity pattern and fill-reducing ordering are computed once, so a
/// SIMP loop only pays for numeric factorization on each call. Fixed dofs are
/// eliminated; force entries on them are treated as reactions and ignored.
/// Not thread-safe; use one instance per thread.
class ElasticSolver {
 public:
  ElasticSolver(const DesignDomain& domain, NodeFixity fixity);
  ~ElasticSolver();
  ElasticSolver(ElasticSolver&&) noexcept;
  ElasticSolver& operator=(ElasticSolver&&) noexcept;

  /// Returns U with fixed dofs exactly zero and free-dof residual
  /// ||K U - F|| <= 1e-8 ||F||. Throws SingularSystem / NonFiniteInput.
  [[nodiscard]] Eigen::VectorXd solve(const Field& density, double penal,
                                      const Eigen::VectorXd& F);

  [[nodiscard]] const DesignDomain& domain() const noexcept { return domain_; }
  [[nodiscard]] const NodeFixity& fixity() const noexcept { return fixity_; }
  [[nodiscard]] double last_relative_residual() const noexcept { return last_residual_; }

  static constexpr double kResidualTolerance = 1e-8;

 private:
  struct Factorization;

  void assemble_reduced(const Field& density, double penal);

  DesignDomain domain_;
  NodeFixity fixity_;
  ElementMatrix ke_;
  Eigen::Matrix<long double, 8, 8> ke_ext_;
  std::vector<int> free_index_;   // dof -> reduced index or -1
  std::vector<int> free_dofs_;    // reduced index -> dof
  std::vector<int> slot_;         // element * 64 + i * 8 + j -> value index or -1
  SparseMatrix reduced_;          // lower triangle of K_ff
  std::unique_ptr<Factorization> factor_;
  double last_residual_ = 0.0;
};

/// One-shot solve for a ProblemSpec.
[[nodiscard]] Eigen::VectorXd assemble_and_solve(const Field& density, const ProblemSpec& spec,
                                                 const DesignDomain& domain, double penal);

/// Element-wise initial fields, centroid-evaluated.
struct FieldBundle {
  Field ux, uy;
  Field s11, s22, s12;
  Field e11, e22, e12;  // e12 is the tensor shear strain (half the engineering strain)
  Field svm;
  Field w;
};

[[nodiscard]] double von_mises(double s11, double s22, double s12) noexcept;
[[nodiscard]] double strain_energy_density(double s11, double s22, double s12, double e11,
                                           double e22, double e12) noexcept;

[[nodiscard]] FieldBundle compute_fields(const Eigen::VectorXd& U, const Field& density,
                                         const DesignDomain& domain, double penal = 1.0);

/// Fields on the solid (y = 1) domain for this problem.
[[nodiscard]] FieldBundle initial_fields(const ProblemSpec& spec, const DesignDomain& domain);

/// u_e^T k0 u_e per element.
[[nodiscard]] Field element_energy(const Eigen::VectorXd& U, const DesignDomain& domain);

/// U^T K U = sum_e E_e(y_e) u_e^T k0 u_e.
[[nodiscard]] double compliance(const Field& density, const Eigen::VectorXd& U,
                                const DesignDomain& domain, double penal);

/// "row col value" lines, 0-based, one per stored nonzero.
void write_triplets(std::ostream& out, const SparseMatrix& K);
/// One value per line.
void write_vector(std::ostream& out, const Eigen::VectorXd& v);

}  // namespace topo
