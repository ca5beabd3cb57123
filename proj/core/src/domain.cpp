#include "topo/domain.hpp"

#include "topo/error.hpp"

#include <cmath>
#include <limits>

namespace topo {

void DesignDomain::validate() const {
  // TOPO1 stores the grid size as u16.
  constexpr int kMaxElements = std::numeric_limits<std::uint16_t>::max();
  if (nelx < 1 || nely < 1 || nelx > kMaxElements || nely > kMaxElements) {
    throw Error(ErrorCode::InvalidArgument, "grid must have 1..65535 elements per side");
  }
  if (!(element_size > 0.0) || !(thickness > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "element size and thickness must be positive");
  }
  if (!(youngs_min > 0.0) || !(youngs_modulus > youngs_min)) {
    throw Error(ErrorCode::InvalidArgument, "moduli must satisfy 0 < Emin < E");
  }
  if (!(poisson >= 0.0 && poisson < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "Poisson ratio must lie in [0, 0.5)");
  }
}

bool DesignDomain::on_boundary(int n) const noexcept {
  const int r = node_row(n);
  const int c = node_col(n);
  return n >= 0 && n < node_count() && (r == 0 || r == nely || c == 0 || c == nelx);
}

std::array<int, 4> DesignDomain::element_nodes(int row, int col) const noexcept {
  return {node(row + 1, col), node(row + 1, col + 1), node(row, col + 1), node(row, col)};
}

std::array<int, 8> DesignDomain::element_dofs(int row, int col) const noexcept {
  const auto n = element_nodes(row, col);
  return {2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1,
          2 * n[2], 2 * n[2] + 1, 2 * n[3], 2 * n[3] + 1};
}

}  // namespace topo
