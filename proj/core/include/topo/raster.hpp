#pragma once

#include "topo/domain.hpp"
#include "topo/problem.hpp"
#include "topo/scenario.hpp"
#include "topo/types.hpp"

#include <utility>

namespace topo {

/// Element codes: 0 free, 1 ux=0, 2 uy=0, 3 both. An element takes the union
/// of the fixities of its four nodes.
[[nodiscard]] CodeImage rasterize_bc(const NodeFixity& fixity, const DesignDomain& domain);
[[nodiscard]] CodeImage rasterize_bc(const BcScenario& scenario, const DesignDomain& domain);

/// Load channels (Fx, Fy). The nodal load is split evenly over the elements
/// that touch the load node.
[[nodiscard]] std::pair<Field, Field> rasterize_load(const ProblemSpec& spec,
                                                     const DesignDomain& domain);

}  // namespace topo
