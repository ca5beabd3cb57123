#pragma once

#include "topo/domain.hpp"
#include "topo/record.hpp"
#include "topo/scenario.hpp"

#include <Eigen/Core>

#include <random>

namespace topo::fixture {

struct LoadCase {
  NodeFixity fixity;
  Eigen::VectorXd F;
  int probe_node = 0;  // node whose displacement the case is about
};

/// Left edge on x-rollers, bottom-left node pinned, consistent nodal forces
/// for a uniform traction on the right edge.
LoadCase uniaxial_tension(const DesignDomain& domain, double traction);

/// Left edge pinned, downward point load at mid-height of the right edge.
LoadCase tip_loaded_cantilever(const DesignDomain& domain, double load);

/// Euler-Bernoulli cantilever tip deflection P L^3 / (3 E I).
double beam_theory_deflection(const DesignDomain& domain, double load);

NodeFixity empty_fixity(const DesignDomain& domain);

/// Arbitrary record: random shape, channel names, raw float bit patterns
/// (NaN payloads and denormals included) and metadata with extra keys.
SampleRecord random_record(std::mt19937_64& rng);

/// Float data compared by bit pattern, metadata by value.
bool bitwise_equal(const SampleRecord& a, const SampleRecord& b);

}  // namespace topo::fixture
