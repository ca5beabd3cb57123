#pragma once

#include "topo/domain.hpp"
#include "topo/scenario.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <numbers>

namespace topo {

inline constexpr int kVolumeFractionLevels = 11;  // 0.30, 0.32, ..., 0.50
inline constexpr int kLoadAngleLevels = 7;        // 0, pi/6, ..., pi

[[nodiscard]] double volume_fraction_level(int index);
[[nodiscard]] double load_angle_level(int index);

/// (cos, sin) of load_angle_level(index), exact at the multiples of pi/2.
[[nodiscard]] std::array<double, 2> load_direction(int index);

/// One optimization problem.
struct ProblemSpec {
  double vf_target = 0.5;
  int scenario_id = 0;
  int load_node = 0;
  int angle_index = 0;
  double load_magnitude = 1.0;

  [[nodiscard]] double load_angle() const { return load_angle_level(angle_index); }
  [[nodiscard]] const BcScenario& scenario() const { return scenario_by_id(scenario_id); }
  [[nodiscard]] double force_x() const { return load_direction(angle_index)[0] * load_magnitude; }
  [[nodiscard]] double force_y() const { return load_direction(angle_index)[1] * load_magnitude; }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Throws Error(InvalidArgument) if the spec breaks a ProblemSpec invariant
/// on this domain.
void validate(const ProblemSpec& spec, const DesignDomain& domain);

/// Nearest boundary node to a point given in physical coordinates.
[[nodiscard]] int snap_to_boundary(const DesignDomain& domain, double x, double y);

void to_json(nlohmann::json& j, const ProblemSpec& spec);
void from_json(const nlohmann::json& j, ProblemSpec& spec);

void to_json(nlohmann::json& j, const DesignDomain& domain);
void from_json(const nlohmann::json& j, DesignDomain& domain);

}  // namespace topo
