#include "topo/fem.hpp"

#include "topo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace topo {

namespace {

// Corner natural coordinates in element_nodes() order: LL, LR, UR, UL.
constexpr double kXi[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double kEta[4] = {-1.0, -1.0, 1.0, 1.0};

void check_density(const Field& density, const DesignDomain& domain) {
  if (density.rows() != domain.nely || density.cols() != domain.nelx) {
    throw Error(ErrorCode::ShapeMismatch, "density must be nely x nelx");
  }
  if (!density.allFinite()) throw Error(ErrorCode::NonFiniteInput, "density contains NaN/Inf");
  if (density.minCoeff() < 0.0 || density.maxCoeff() > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "density entries must lie in [0, 1]");
  }
}

ElementVector gather(const Eigen::VectorXd& U, const std::array<int, 8>& dofs) {
  ElementVector ue;
  for (int i = 0; i < 8; ++i) ue(i) = U(dofs[static_cast<std::size_t>(i)]);
  return ue;
}

}  // namespace

namespace {

template <typename T>
Eigen::Matrix<T, 8, 8> q4_stiffness(T nu, T h, T thickness) {
  Eigen::Matrix<T, 3, 3> d;
  d << T(1), nu, T(0),  //
      nu, T(1), T(0),   //
      T(0), T(0), T(0.5) * (T(1) - nu);
  d /= T(1) - nu * nu;
  const T det_j = T(0.25) * h * h;
  const T g = T(1) / std::sqrt(T(3));

  Eigen::Matrix<T, 8, 8> ke = Eigen::Matrix<T, 8, 8>::Zero();
  for (T xi : {-g, g}) {
    for (T eta : {-g, g}) {
      Eigen::Matrix<T, 3, 8> b = Eigen::Matrix<T, 3, 8>::Zero();
      for (int i = 0; i < 4; ++i) {
        const T dx = T(0.25) * T(kXi[i]) * (T(1) + T(kEta[i]) * eta) * (T(2) / h);
        const T dy = T(0.25) * T(kEta[i]) * (T(1) + T(kXi[i]) * xi) * (T(2) / h);
        b(0, 2 * i) = dx;
        b(1, 2 * i + 1) = dy;
        b(2, 2 * i) = dy;
        b(2, 2 * i + 1) = dx;
      }
      ke += b.transpose() * d * b * det_j;
    }
  }
  ke = (T(0.5) * (ke + ke.transpose())).eval();
  return ke * thickness;
}

// Geometric nested dissection of the node grid: both halves first, then the
// separating grid line. Cuts fill against AMD by ~15% on 2D grids.
void dissect(int r0, int r1, int c0, int c1, int cols, std::vector<int>& out) {
  const int h = r1 - r0;
  const int w = c1 - c0;
  if (h <= 0 || w <= 0) return;
  if (h * w <= 4) {
    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) out.push_back(r * cols + c);
    }
    return;
  }
  if (w >= h) {
    const int m = c0 + w / 2;
    dissect(r0, r1, c0, m, cols, out);
    dissect(r0, r1, m + 1, c1, cols, out);
    for (int r = r0; r < r1; ++r) out.push_back(r * cols + m);
  } else {
    const int m = r0 + h / 2;
    dissect(r0, m, c0, c1, cols, out);
    dissect(m + 1, r1, c0, c1, cols, out);
    for (int c = c0; c < c1; ++c) out.push_back(m * cols + c);
  }
}

std::vector<int> dissection_order(const DesignDomain& d) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(d.node_count()));
  dissect(0, d.node_rows(), 0, d.node_cols(), d.node_cols(), order);
  return order;
}

}  // namespace

ElementMatrix element_stiffness(const DesignDomain& domain) {
  return q4_stiffness<double>(domain.poisson, domain.element_size, domain.thickness);
}

double penalized_modulus(double density, double penal, const DesignDomain& domain) {
  return domain.youngs_min +
         std::pow(density, penal) * (domain.youngs_modulus - domain.youngs_min);
}

Eigen::VectorXd nodal_load(const DesignDomain& domain, int node, double fx, double fy) {
  if (node < 0 || node >= domain.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "load node out of range");
  }
  Eigen::VectorXd f = Eigen::VectorXd::Zero(domain.dof_count());
  f(2 * node) = fx;
  f(2 * node + 1) = fy;
  return f;
}

Eigen::VectorXd load_vector(const ProblemSpec& spec, const DesignDomain& domain) {
  return nodal_load(domain, spec.load_node, spec.force_x(), spec.force_y());
}

StiffnessSystem assemble(const Field& density, double penal, const NodeFixity& fixity,
                         const Eigen::VectorXd& F, const DesignDomain& domain) {
  check_density(density, domain);
  const ElementMatrix ke = element_stiffness(domain);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(domain.element_count()) * 64);
  for (int r = 0; r < domain.nely; ++r) {
    for (int c = 0; c < domain.nelx; ++c) {
      const double modulus = penalized_modulus(density(r, c), penal, domain);
      const auto dofs = domain.element_dofs(r, c);
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          triplets.emplace_back(dofs[static_cast<std::size_t>(i)],
                                dofs[static_cast<std::size_t>(j)], modulus * ke(i, j));
        }
      }
    }
  }
  StiffnessSystem sys;
  sys.K.resize(domain.dof_count(), domain.dof_count());
  sys.K.setFromTriplets(triplets.begin(), triplets.end());
  sys.K.makeCompressed();
  sys.F = F;
  sys.fixed_dofs = fixed_dofs(fixity);
  return sys;
}

struct ElasticSolver::Factorization {
  // Free dofs are already numbered in nested-dissection order.
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt;
  bool analyzed = false;
};

ElasticSolver::ElasticSolver(const DesignDomain& domain, NodeFixity fixity)
    : domain_(domain), fixity_(std::move(fixity)), factor_(std::make_unique<Factorization>()) {
  domain_.validate();
  if (fixity_.size() != static_cast<std::size_t>(domain_.node_count())) {
    throw Error(ErrorCode::ShapeMismatch, "fixity mask must have one entry per node");
  }
  if (!removes_rigid_body_modes(fixity_, domain_)) {
    throw Error(ErrorCode::SingularSystem, "supports leave a rigid-body mode free");
  }
  ke_ = element_stiffness(domain_);
  ke_ext_ = q4_stiffness<long double>(domain_.poisson, domain_.element_size, domain_.thickness);

  free_index_.assign(static_cast<std::size_t>(domain_.dof_count()), -1);
  for (int n : dissection_order(domain_)) {
    const auto f = fixity_[static_cast<std::size_t>(n)];
    for (int k = 0; k < 2; ++k) {
      if ((f >> k) & 1u) continue;
      free_index_[static_cast<std::size_t>(2 * n + k)] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(2 * n + k);
    }
  }

  const int nfree = static_cast<int>(free_dofs_.size());
  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(static_cast<std::size_t>(domain_.element_count()) * 36);
  for (int r = 0; r < domain_.nely; ++r) {
    for (int c = 0; c < domain_.nelx; ++c) {
      const auto dofs = domain_.element_dofs(r, c);
      for (int i = 0; i < 8; ++i) {
        const int a = free_index_[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])];
        if (a < 0) continue;
        for (int j = 0; j < 8; ++j) {
          const int b = free_index_[static_cast<std::size_t>(dofs[static_cast<std::size_t>(j)])];
          if (b >= 0 && a >= b) pattern.emplace_back(a, b, 0.0);
        }
      }
    }
  }
  reduced_.resize(nfree, nfree);
  reduced_.setFromTriplets(pattern.begin(), pattern.end());
  reduced_.makeCompressed();

  const int* outer = reduced_.outerIndexPtr();
  const int* inner = reduced_.innerIndexPtr();
  slot_.assign(static_cast<std::size_t>(domain_.element_count()) * 64, -1);
  for (int r = 0; r < domain_.nely; ++r) {
    for (int c = 0; c < domain_.nelx; ++c) {
      const auto e = static_cast<std::size_t>(r * domain_.nelx + c);
      const auto dofs = domain_.element_dofs(r, c);
      for (int i = 0; i < 8; ++i) {
        const int a = free_index_[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])];
        if (a < 0) continue;
        for (int j = 0; j < 8; ++j) {
          const int b = free_index_[static_cast<std::size_t>(dofs[static_cast<std::size_t>(j)])];
          if (b < 0 || a < b) continue;
          const int* pos = std::lower_bound(inner + outer[b], inner + outer[b + 1], a);
          slot_[e * 64 + static_cast<std::size_t>(i * 8 + j)] = static_cast<int>(pos - inner);
        }
      }
    }
  }
}

ElasticSolver::~ElasticSolver() = default;
ElasticSolver::ElasticSolver(ElasticSolver&&) noexcept = default;
ElasticSolver& ElasticSolver::operator=(ElasticSolver&&) noexcept = default;

void ElasticSolver::assemble_reduced(const Field& density, double penal) {
  double* values = reduced_.valuePtr();
  std::fill(values, values + reduced_.nonZeros(), 0.0);
  for (int r = 0; r < domain_.nely; ++r) {
    for (int c = 0; c < domain_.nelx; ++c) {
      const auto e = static_cast<std::size_t>(r * domain_.nelx + c);
      const double modulus = penalized_modulus(density(r, c), penal, domain_);
      const int* slots = slot_.data() + e * 64;
      for (int k = 0; k < 64; ++k) {
        if (slots[k] >= 0) values[slots[k]] += modulus * ke_(k / 8, k % 8);
      }
    }
  }
}

Eigen::VectorXd ElasticSolver::solve(const Field& density, double penal,
                                     const Eigen::VectorXd& F) {
  check_density(density, domain_);
  if (F.size() != domain_.dof_count()) {
    throw Error(ErrorCode::ShapeMismatch, "force vector must have one entry per dof");
  }
  if (!F.allFinite()) throw Error(ErrorCode::NonFiniteInput, "force vector contains NaN/Inf");

  const auto nfree = static_cast<Eigen::Index>(free_dofs_.size());
  Eigen::VectorXd f(nfree);
  for (Eigen::Index k = 0; k < nfree; ++k) f(k) = F(free_dofs_[static_cast<std::size_t>(k)]);

  Eigen::VectorXd U = Eigen::VectorXd::Zero(domain_.dof_count());
  last_residual_ = 0.0;
  const double fnorm = f.norm();
  if (fnorm == 0.0) return U;

  assemble_reduced(density, penal);
  if (!factor_->analyzed) {
    factor_->llt.analyzePattern(reduced_);
    factor_->analyzed = true;
  }
  factor_->llt.factorize(reduced_);
  if (factor_->llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "stiffness matrix is not positive definite");
  }

  // Refinement with the iterate and residual carried in extended precision.
  // The residual applies an extended-precision K, so x converges to the
  // solution of the exact discrete system rather than of the rounded one;
  // near-void (Emin) regions also need the extra bits to meet the bound.
  const auto ny = domain_.nely;
  const auto nx = domain_.nelx;
  std::vector<long double> modulus(static_cast<std::size_t>(ny * nx));
  {
    const long double e0 = domain_.youngs_modulus;
    const long double emin = domain_.youngs_min;
    for (int r = 0; r < ny; ++r) {
      for (int c = 0; c < nx; ++c) {
        const long double y = density(r, c);
        modulus[static_cast<std::size_t>(r * nx + c)] =
            emin + std::pow(y, static_cast<long double>(penal)) * (e0 - emin);
      }
    }
  }
  std::vector<long double> x(static_cast<std::size_t>(nfree));
  std::vector<long double> full(static_cast<std::size_t>(domain_.dof_count()));
  Eigen::VectorXd dx = factor_->llt.solve(f);
  Eigen::VectorXd residual(nfree);
  const auto refresh = [&] {
    std::fill(full.begin(), full.end(), 0.0L);
    for (Eigen::Index k = 0; k < nfree; ++k) {
      full[static_cast<std::size_t>(free_dofs_[static_cast<std::size_t>(k)])] =
          x[static_cast<std::size_t>(k)];
    }
    std::vector<long double> ku(static_cast<std::size_t>(domain_.dof_count()), 0.0L);
    for (int r = 0; r < ny; ++r) {
      for (int c = 0; c < nx; ++c) {
        const auto dofs = domain_.element_dofs(r, c);
        long double ue[8];
        for (int i = 0; i < 8; ++i) ue[i] = full[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])];
        const long double m = modulus[static_cast<std::size_t>(r * nx + c)];
        for (int i = 0; i < 8; ++i) {
          long double acc = 0.0L;
          for (int j = 0; j < 8; ++j) acc += ke_ext_(i, j) * ue[j];
          ku[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] += m * acc;
        }
      }
    }
    long double sq = 0.0L;
    for (Eigen::Index k = 0; k < nfree; ++k) {
      const long double rk = static_cast<long double>(f(k)) -
                             ku[static_cast<std::size_t>(free_dofs_[static_cast<std::size_t>(k)])];
      residual(k) = static_cast<double>(rk);
      sq += rk * rk;
    }
    return static_cast<double>(std::sqrt(sq));
  };
  // Refine to roughly working precision, stopping once progress stalls.
  double rnorm = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 6; ++step) {
    for (Eigen::Index k = 0; k < nfree; ++k) x[static_cast<std::size_t>(k)] += dx(k);
    rnorm = refresh();
    if (!std::isfinite(rnorm) || rnorm <= 1e-15 * fnorm || rnorm > 0.25 * previous) break;
    previous = rnorm;
    dx = factor_->llt.solve(residual);
  }
  last_residual_ = rnorm / fnorm;
  if (!(last_residual_ <= kResidualTolerance)) {
    throw Error(ErrorCode::SingularSystem,
                "solve did not meet the residual bound (relative residual " +
                    std::to_string(last_residual_) + ")");
  }
  for (Eigen::Index k = 0; k < nfree; ++k) {
    U(free_dofs_[static_cast<std::size_t>(k)]) = static_cast<double>(x[static_cast<std::size_t>(k)]);
  }
  return U;
}

Eigen::VectorXd assemble_and_solve(const Field& density, const ProblemSpec& spec,
                                   const DesignDomain& domain, double penal) {
  ElasticSolver solver(domain, resolve_fixity(spec.scenario(), domain));
  return solver.solve(density, penal, load_vector(spec, domain));
}

double von_mises(double s11, double s22, double s12) noexcept {
  return std::sqrt(std::max(0.0, s11 * s11 - s11 * s22 + s22 * s22 + 3.0 * s12 * s12));
}

double strain_energy_density(double s11, double s22, double s12, double e11, double e22,
                             double e12) noexcept {
  return 0.5 * (s11 * e11 + s22 * e22 + 2.0 * s12 * e12);
}

FieldBundle compute_fields(const Eigen::VectorXd& U, const Field& density,
                           const DesignDomain& domain, double penal) {
  check_density(density, domain);
  if (U.size() != domain.dof_count()) {
    throw Error(ErrorCode::ShapeMismatch, "displacement vector must have one entry per dof");
  }
  const int ny = domain.nely;
  const int nx = domain.nelx;
  FieldBundle fb;
  for (Field* f : {&fb.ux, &fb.uy, &fb.s11, &fb.s22, &fb.s12, &fb.e11, &fb.e22, &fb.e12,
                   &fb.svm, &fb.w}) {
    f->resize(ny, nx);
  }

  // Shape-function gradients at the centroid.
  const double g = 0.5 / domain.element_size;
  const double dndx[4] = {-g, g, g, -g};
  const double dndy[4] = {-g, -g, g, g};
  const double nu = domain.poisson;

  for (int r = 0; r < ny; ++r) {
    for (int c = 0; c < nx; ++c) {
      const ElementVector ue = gather(U, domain.element_dofs(r, c));
      double ex = 0.0, ey = 0.0, gxy = 0.0, mx = 0.0, my = 0.0;
      for (int i = 0; i < 4; ++i) {
        ex += dndx[i] * ue(2 * i);
        ey += dndy[i] * ue(2 * i + 1);
        gxy += dndy[i] * ue(2 * i) + dndx[i] * ue(2 * i + 1);
        mx += ue(2 * i);
        my += ue(2 * i + 1);
      }
      const double k = penalized_modulus(density(r, c), penal, domain) / (1.0 - nu * nu);
      const double sx = k * (ex + nu * ey);
      const double sy = k * (nu * ex + ey);
      const double sxy = k * 0.5 * (1.0 - nu) * gxy;
      const double exy = 0.5 * gxy;

      fb.ux(r, c) = 0.25 * mx;
      fb.uy(r, c) = 0.25 * my;
      fb.e11(r, c) = ex;
      fb.e22(r, c) = ey;
      fb.e12(r, c) = exy;
      fb.s11(r, c) = sx;
      fb.s22(r, c) = sy;
      fb.s12(r, c) = sxy;
      fb.svm(r, c) = von_mises(sx, sy, sxy);
      fb.w(r, c) = std::max(0.0, strain_energy_density(sx, sy, sxy, ex, ey, exy));
    }
  }
  return fb;
}

FieldBundle initial_fields(const ProblemSpec& spec, const DesignDomain& domain) {
  const Field solid = domain.uniform(1.0);
  const Eigen::VectorXd U = assemble_and_solve(solid, spec, domain, 1.0);
  return compute_fields(U, solid, domain, 1.0);
}

Field element_energy(const Eigen::VectorXd& U, const DesignDomain& domain) {
  if (U.size() != domain.dof_count()) {
    throw Error(ErrorCode::ShapeMismatch, "displacement vector must have one entry per dof");
  }
  const ElementMatrix ke = element_stiffness(domain);
  // Rigid translation and rotation are in the null space of ke; removing them
  // first avoids cancellation when large rigid motions carry small strains.
  const double half = 0.5 * domain.element_size;
  ElementVector rot;
  for (int i = 0; i < 4; ++i) {
    rot(2 * i) = -kEta[i] * half;
    rot(2 * i + 1) = kXi[i] * half;
  }
  const double rot_sq = rot.squaredNorm();
  Field energy(domain.nely, domain.nelx);
  for (int r = 0; r < domain.nely; ++r) {
    for (int c = 0; c < domain.nelx; ++c) {
      ElementVector ue = gather(U, domain.element_dofs(r, c));
      const double tx = 0.25 * (ue(0) + ue(2) + ue(4) + ue(6));
      const double ty = 0.25 * (ue(1) + ue(3) + ue(5) + ue(7));
      for (int i = 0; i < 4; ++i) {
        ue(2 * i) -= tx;
        ue(2 * i + 1) -= ty;
      }
      ue -= (ue.dot(rot) / rot_sq) * rot;
      energy(r, c) = ue.dot(ke * ue);
    }
  }
  return energy;
}

double compliance(const Field& density, const Eigen::VectorXd& U, const DesignDomain& domain,
                  double penal) {
  check_density(density, domain);
  const Field energy = element_energy(U, domain);
  double total = 0.0;
  for (int r = 0; r < domain.nely; ++r) {
    for (int c = 0; c < domain.nelx; ++c) {
      total += penalized_modulus(density(r, c), penal, domain) * energy(r, c);
    }
  }
  return total;
}

void write_triplets(std::ostream& out, const SparseMatrix& K) {
  out.precision(17);
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

}  // namespace topo
