#include "topo/problem.hpp"

#include "topo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace topo {

double volume_fraction_level(int index) {
  if (index < 0 || index >= kVolumeFractionLevels) {
    throw Error(ErrorCode::InvalidArgument, "volume fraction level out of range");
  }
  return (30.0 + 2.0 * index) / 100.0;
}

double load_angle_level(int index) {
  if (index < 0 || index >= kLoadAngleLevels) {
    throw Error(ErrorCode::InvalidArgument, "load angle index out of range");
  }
  return index * std::numbers::pi / 6.0;
}

std::array<double, 2> load_direction(int index) {
  constexpr double h = 0.5;
  constexpr double r = std::numbers::sqrt3 / 2.0;
  static constexpr std::array<std::array<double, 2>, kLoadAngleLevels> kTable = {{
      {1.0, 0.0}, {r, h}, {h, r}, {0.0, 1.0}, {-h, r}, {-r, h}, {-1.0, 0.0},
  }};
  if (index < 0 || index >= kLoadAngleLevels) {
    throw Error(ErrorCode::InvalidArgument, "load angle index out of range");
  }
  return kTable[static_cast<std::size_t>(index)];
}

void validate(const ProblemSpec& spec, const DesignDomain& domain) {
  bool on_grid = false;
  for (int i = 0; i < kVolumeFractionLevels; ++i) {
    on_grid = on_grid || std::abs(spec.vf_target - volume_fraction_level(i)) < 1e-9;
  }
  if (!on_grid) {
    throw Error(ErrorCode::InvalidArgument,
                "vf_target not on the 0.30:0.02:0.50 grid: " + std::to_string(spec.vf_target));
  }
  if (spec.angle_index < 0 || spec.angle_index >= kLoadAngleLevels) {
    throw Error(ErrorCode::InvalidArgument, "angle_index must be in 0..6");
  }
  if (!std::isfinite(spec.load_magnitude) || spec.load_magnitude <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "load magnitude must be positive and finite");
  }
  const auto fixity = resolve_fixity(spec.scenario(), domain);
  if (!domain.on_boundary(spec.load_node)) {
    throw Error(ErrorCode::InvalidArgument,
                "load node " + std::to_string(spec.load_node) + " is not on the boundary");
  }
  if (fixity[static_cast<std::size_t>(spec.load_node)] != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "load node " + std::to_string(spec.load_node) + " is constrained");
  }
}

int snap_to_boundary(const DesignDomain& domain, double x, double y) {
  const double h = domain.element_size;
  auto clamp_index = [](double v, int hi) {
    return std::clamp(static_cast<int>(std::lround(v)), 0, hi);
  };
  const int col = clamp_index(x / h, domain.nelx);
  const int row = clamp_index(domain.nely - y / h, domain.nely);
  const int candidates[] = {
      domain.node(row, 0),
      domain.node(row, domain.nelx),
      domain.node(0, col),
      domain.node(domain.nely, col),
  };
  int best = candidates[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (int n : candidates) {
    const double d = std::hypot(domain.node_x(n) - x, domain.node_y(n) - y);
    if (d < best_d || (d == best_d && n < best)) {
      best = n;
      best_d = d;
    }
  }
  return best;
}

void to_json(nlohmann::json& j, const ProblemSpec& spec) {
  j = nlohmann::json{{"vf_target", spec.vf_target},
                     {"scenario_id", spec.scenario_id},
                     {"load_node", spec.load_node},
                     {"angle_index", spec.angle_index},
                     {"load_angle", load_angle_level(spec.angle_index)},
                     {"load_magnitude", spec.load_magnitude}};
}

void from_json(const nlohmann::json& j, ProblemSpec& spec) {
  j.at("vf_target").get_to(spec.vf_target);
  j.at("scenario_id").get_to(spec.scenario_id);
  j.at("load_node").get_to(spec.load_node);
  j.at("angle_index").get_to(spec.angle_index);
  j.at("load_magnitude").get_to(spec.load_magnitude);
}

void to_json(nlohmann::json& j, const DesignDomain& d) {
  j = nlohmann::json{{"nelx", d.nelx},
                     {"nely", d.nely},
                     {"element_size", d.element_size},
                     {"thickness", d.thickness},
                     {"youngs_modulus", d.youngs_modulus},
                     {"youngs_min", d.youngs_min},
                     {"poisson", d.poisson}};
}

void from_json(const nlohmann::json& j, DesignDomain& d) {
  j.at("nelx").get_to(d.nelx);
  j.at("nely").get_to(d.nely);
  j.at("element_size").get_to(d.element_size);
  j.at("thickness").get_to(d.thickness);
  j.at("youngs_modulus").get_to(d.youngs_modulus);
  j.at("youngs_min").get_to(d.youngs_min);
  j.at("poisson").get_to(d.poisson);
}

}  // namespace topo
