#pragma once

#include "topo/types.hpp"

#include <array>
#include <cstddef>

namespace topo {

/// Rectangular grid of square plane-stress elements.
///
/// Nodes are numbered row-major over the (nely+1) x (nelx+1) node grid with
/// row 0 at the top. Physical y points up, so node (row, col) sits at
/// x = col * element_size, y = (nely - row) * element_size.
/// Node n owns displacement dofs 2n (x) and 2n+1 (y).
struct DesignDomain {
  int nelx = 128;
  int nely = 64;
  double element_size = 1.0;
  double thickness = 1.0;
  double youngs_modulus = 1.0;
  double youngs_min = 1e-9;
  double poisson = 0.3;

  /// Throws Error(InvalidArgument) when a constant is out of range.
  void validate() const;

  [[nodiscard]] int node_cols() const noexcept { return nelx + 1; }
  [[nodiscard]] int node_rows() const noexcept { return nely + 1; }
  [[nodiscard]] int node_count() const noexcept { return node_cols() * node_rows(); }
  [[nodiscard]] int dof_count() const noexcept { return 2 * node_count(); }
  [[nodiscard]] int element_count() const noexcept { return nelx * nely; }

  [[nodiscard]] int node(int row, int col) const noexcept { return row * node_cols() + col; }
  [[nodiscard]] int node_row(int node) const noexcept { return node / node_cols(); }
  [[nodiscard]] int node_col(int node) const noexcept { return node % node_cols(); }
  [[nodiscard]] double node_x(int node) const noexcept { return node_col(node) * element_size; }
  [[nodiscard]] double node_y(int node) const noexcept {
    return (nely - node_row(node)) * element_size;
  }
  [[nodiscard]] bool on_boundary(int node) const noexcept;

  /// Element nodes counter-clockwise from the lower-left corner.
  [[nodiscard]] std::array<int, 4> element_nodes(int row, int col) const noexcept;
  [[nodiscard]] std::array<int, 8> element_dofs(int row, int col) const noexcept;

  [[nodiscard]] Field uniform(double value) const { return Field::Constant(nely, nelx, value); }

  friend bool operator==(const DesignDomain&, const DesignDomain&) = default;
};

}  // namespace topo
