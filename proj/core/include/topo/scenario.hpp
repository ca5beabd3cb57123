#pragma once

#include "topo/domain.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace topo {

/// Bit flags; Pin == (UX | UY).
enum class Fixity : std::uint8_t { UX = 1, UY = 2, Pin = 3 };

enum class Edge : std::uint8_t { Left, Right, Top, Bottom };
enum class Corner : std::uint8_t { TopLeft, TopRight, BottomLeft, BottomRight };

/// Closed segment [from, to] of a node-grid edge, as fractions of the edge
/// length. Left/Right edges run top to bottom, Top/Bottom run left to right.
/// A corner is a degenerate segment.
struct NodeRegion {
  Edge edge = Edge::Left;
  double from = 0.0;
  double to = 1.0;

  static NodeRegion whole(Edge e) { return {e, 0.0, 1.0}; }
  static NodeRegion corner(Corner c);

  [[nodiscard]] std::vector<int> resolve(const DesignDomain& domain) const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const NodeRegion&, const NodeRegion&) = default;
};

struct Constraint {
  NodeRegion region;
  Fixity fixity = Fixity::Pin;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct BcScenario {
  int id = 0;
  std::string name;
  std::vector<Constraint> constraints;

  friend bool operator==(const BcScenario&, const BcScenario&) = default;
};

/// Per-node fixity mask (bit 0: ux fixed, bit 1: uy fixed), one byte per node.
using NodeFixity = std::vector<std::uint8_t>;

inline constexpr int kScenarioCount = 42;

/// The fixed catalog of 42 displacement boundary-condition scenarios.
///
/// Order (ids):
///   0-3    full-edge clamp: left, right, top, bottom
///   4-11   half-edge clamp: each edge, first then second half
///   12-19  normal roller on an edge plus a pin at one of its end corners
///   20-25  pins at two corners (all six pairs)
///   26-33  pin at a corner plus a roller at the other end of the same edge
///   34-35  opposite-edge clamps: left+right, top+bottom
///   36-39  orthogonal normal rollers: (left|right) UX with (top|bottom) UY
///   40-41  middle-half clamp on the left and right edges
const std::vector<BcScenario>& bc_catalog();

/// Copy of bc_catalog(); kept for callers that want ownership.
std::vector<BcScenario> enumerate_bc_scenarios();

/// Looks up a scenario by id; throws Error(InvalidArgument) when out of range.
const BcScenario& scenario_by_id(int id);

[[nodiscard]] NodeFixity resolve_fixity(const BcScenario& scenario, const DesignDomain& domain);

/// True when the fixed dofs pin down both translations and the rotation,
/// i.e. the linearized rigid-motion constraint matrix has rank 3.
[[nodiscard]] bool removes_rigid_body_modes(const NodeFixity& fixity, const DesignDomain& domain);

/// Indices of fixed dofs in ascending order.
[[nodiscard]] std::vector<int> fixed_dofs(const NodeFixity& fixity);

/// Boundary nodes that carry no constraint; loads are drawn from these.
[[nodiscard]] std::vector<int> admissible_load_nodes(const NodeFixity& fixity,
                                                     const DesignDomain& domain);

/// Human-readable catalog dump (pretty JSON, one record per scenario).
[[nodiscard]] std::string catalog_to_text(const std::vector<BcScenario>& catalog);

/// CRC32 of catalog_to_text, as 8 lowercase hex digits.
[[nodiscard]] std::string catalog_hash(const std::vector<BcScenario>& catalog);

std::string_view to_string(Fixity f) noexcept;
std::string_view to_string(Edge e) noexcept;

}  // namespace topo
