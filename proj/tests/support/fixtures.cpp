#include "support/fixtures.hpp"

namespace topo::fixture {

NodeFixity empty_fixity(const DesignDomain& d) {
  return NodeFixity(static_cast<std::size_t>(d.node_count()), 0);
}

LoadCase uniaxial_tension(const DesignDomain& d, double traction) {
  LoadCase lc;
  lc.fixity = empty_fixity(d);
  for (int r = 0; r <= d.nely; ++r) lc.fixity[static_cast<std::size_t>(d.node(r, 0))] = 1;
  lc.fixity[static_cast<std::size_t>(d.node(d.nely, 0))] = 3;
  lc.F = Eigen::VectorXd::Zero(d.dof_count());
  const double edge_force = traction * d.element_size * d.thickness;
  for (int r = 0; r <= d.nely; ++r) {
    const bool end = r == 0 || r == d.nely;
    lc.F(2 * d.node(r, d.nelx)) = end ? 0.5 * edge_force : edge_force;
  }
  lc.probe_node = d.node(d.nely / 2, d.nelx);
  return lc;
}

LoadCase tip_loaded_cantilever(const DesignDomain& d, double load) {
  LoadCase lc;
  lc.fixity = empty_fixity(d);
  for (int r = 0; r <= d.nely; ++r) lc.fixity[static_cast<std::size_t>(d.node(r, 0))] = 3;
  lc.F = Eigen::VectorXd::Zero(d.dof_count());
  lc.probe_node = d.node(d.nely / 2, d.nelx);
  lc.F(2 * lc.probe_node + 1) = -load;
  return lc;
}

double beam_theory_deflection(const DesignDomain& d, double load) {
  const double length = d.nelx * d.element_size;
  const double height = d.nely * d.element_size;
  const double inertia = d.thickness * height * height * height / 12.0;
  return load * length * length * length / (3.0 * d.youngs_modulus * inertia);
}

}  // namespace topo::fixture

#include <bit>
#include <cstring>

namespace topo::fixture {

namespace {

FloatImage random_bits(std::mt19937_64& rng, int rows, int cols) {
  FloatImage img(rows, cols);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    img.data()[i] = kind(rng) == 0 ? std::bit_cast<float>(static_cast<std::uint32_t>(rng()))
                                   : unit(rng);
  }
  return img;
}

bool same_bits(const FloatImage& a, const FloatImage& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

SampleRecord random_record(std::mt19937_64& rng) {
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int rows = pick(1, 24);
  const int cols = pick(1, 40);
  SampleRecord rec;
  const int nch = pick(0, 16);
  for (int k = 0; k < nch; ++k) {
    std::string name;
    if (pick(0, 1) == 0) {
      name = std::string(kChannelNames[static_cast<std::size_t>(pick(0, 13))]);
    } else {
      const int len = pick(1, 255);
      for (int i = 0; i < len; ++i) name.push_back(static_cast<char>(pick(0x20, 0x7e)));
    }
    rec.channels.push_back({name, random_bits(rng, rows, cols)});
  }
  rec.target = random_bits(rng, rows, cols);
  rec.meta.id = rng();
  rec.meta.seed = rng();
  rec.meta.spec.vf_target = 0.30 + 0.02 * pick(0, 10);
  rec.meta.spec.scenario_id = pick(0, 41);
  rec.meta.spec.load_node = pick(0, 8384);
  rec.meta.spec.angle_index = pick(0, 6);
  rec.meta.split = std::array<const char*, 4>{"", "train", "val", "test"}[static_cast<std::size_t>(pick(0, 3))];
  if (pick(0, 1) == 1) {
    rec.meta.extra["note"] = "random é \"quoted\"";
    rec.meta.extra["score"] = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    rec.meta.extra["nested"] = {{"a", {1, 2, 3}}, {"b", nullptr}};
  }
  return rec;
}

bool bitwise_equal(const SampleRecord& a, const SampleRecord& b) {
  if (a.channels.size() != b.channels.size() || !(a.meta == b.meta)) return false;
  for (std::size_t i = 0; i < a.channels.size(); ++i) {
    if (a.channels[i].name != b.channels[i].name ||
        !same_bits(a.channels[i].data, b.channels[i].data)) {
      return false;
    }
  }
  return same_bits(a.target, b.target);
}

}  // namespace topo::fixture
