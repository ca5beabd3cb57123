#include "topo/raster.hpp"

#include <vector>

namespace topo {

CodeImage rasterize_bc(const NodeFixity& fixity, const DesignDomain& domain) {
  CodeImage codes = CodeImage::Zero(domain.nely, domain.nelx);
  for (int r = 0; r < domain.nely; ++r) {
    for (int c = 0; c < domain.nelx; ++c) {
      std::uint8_t bits = 0;
      for (int n : domain.element_nodes(r, c)) bits |= fixity[static_cast<std::size_t>(n)];
      codes(r, c) = bits;  // 1 = ux, 2 = uy, 3 = both
    }
  }
  return codes;
}

CodeImage rasterize_bc(const BcScenario& scenario, const DesignDomain& domain) {
  return rasterize_bc(resolve_fixity(scenario, domain), domain);
}

std::pair<Field, Field> rasterize_load(const ProblemSpec& spec, const DesignDomain& domain) {
  Field fx = Field::Zero(domain.nely, domain.nelx);
  Field fy = Field::Zero(domain.nely, domain.nelx);
  const int row = domain.node_row(spec.load_node);
  const int col = domain.node_col(spec.load_node);

  std::vector<std::pair<int, int>> touching;
  for (int r = row - 1; r <= row; ++r) {
    for (int c = col - 1; c <= col; ++c) {
      if (r >= 0 && r < domain.nely && c >= 0 && c < domain.nelx) touching.emplace_back(r, c);
    }
  }
  const double share = 1.0 / static_cast<double>(touching.size());
  const double px = spec.force_x() * share;
  const double py = spec.force_y() * share;
  for (auto [r, c] : touching) {
    fx(r, c) = px;
    fy(r, c) = py;
  }
  return {std::move(fx), std::move(fy)};
}

}  // namespace topo
