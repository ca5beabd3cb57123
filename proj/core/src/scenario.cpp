#include "topo/scenario.hpp"

#include "topo/error.hpp"
#include "topo/topo1.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>

namespace topo {

namespace {

Constraint pin(NodeRegion r) { return {r, Fixity::Pin}; }
Constraint roller_x(NodeRegion r) { return {r, Fixity::UX}; }
Constraint roller_y(NodeRegion r) { return {r, Fixity::UY}; }

std::string_view edge_tag(Edge e) {
  switch (e) {
    case Edge::Left: return "left";
    case Edge::Right: return "right";
    case Edge::Top: return "top";
    case Edge::Bottom: return "bottom";
  }
  return "?";
}

std::string_view corner_tag(Corner c) {
  switch (c) {
    case Corner::TopLeft: return "tl";
    case Corner::TopRight: return "tr";
    case Corner::BottomLeft: return "bl";
    case Corner::BottomRight: return "br";
  }
  return "?";
}

std::vector<BcScenario> build_catalog() {
  std::vector<BcScenario> out;
  auto add = [&out](std::string name, std::vector<Constraint> cs) {
    out.push_back({static_cast<int>(out.size()), std::move(name), std::move(cs)});
  };
  constexpr Edge kEdges[] = {Edge::Left, Edge::Right, Edge::Top, Edge::Bottom};
  constexpr Corner kCorners[] = {Corner::TopLeft, Corner::TopRight, Corner::BottomLeft,
                                 Corner::BottomRight};

  for (Edge e : kEdges) {
    add("clamp-" + std::string(edge_tag(e)), {pin(NodeRegion::whole(e))});
  }
  for (Edge e : kEdges) {
    add("clamp-" + std::string(edge_tag(e)) + "-first-half", {pin({e, 0.0, 0.5})});
    add("clamp-" + std::string(edge_tag(e)) + "-second-half", {pin({e, 0.5, 1.0})});
  }

  struct EdgeEnds {
    Edge edge;
    Fixity normal;
    Corner first;
    Corner second;
  };
  constexpr EdgeEnds kEnds[] = {
      {Edge::Left, Fixity::UX, Corner::TopLeft, Corner::BottomLeft},
      {Edge::Right, Fixity::UX, Corner::TopRight, Corner::BottomRight},
      {Edge::Top, Fixity::UY, Corner::TopLeft, Corner::TopRight},
      {Edge::Bottom, Fixity::UY, Corner::BottomLeft, Corner::BottomRight},
  };
  for (const auto& ee : kEnds) {
    for (Corner c : {ee.first, ee.second}) {
      add("roller-" + std::string(edge_tag(ee.edge)) + "+pin-" + std::string(corner_tag(c)),
          {{NodeRegion::whole(ee.edge), ee.normal}, pin(NodeRegion::corner(c))});
    }
  }

  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      add("pin-" + std::string(corner_tag(kCorners[a])) + "+pin-" +
              std::string(corner_tag(kCorners[b])),
          {pin(NodeRegion::corner(kCorners[a])), pin(NodeRegion::corner(kCorners[b]))});
    }
  }

  // Simply supported spans: pin one end, roll the other. The roller blocks
  // the direction normal to the span.
  struct Span {
    Corner a;
    Corner b;
    Fixity roll;
  };
  constexpr Span kSpans[] = {
      {Corner::BottomLeft, Corner::BottomRight, Fixity::UY},
      {Corner::BottomRight, Corner::BottomLeft, Fixity::UY},
      {Corner::TopLeft, Corner::TopRight, Fixity::UY},
      {Corner::TopRight, Corner::TopLeft, Fixity::UY},
      {Corner::TopLeft, Corner::BottomLeft, Fixity::UX},
      {Corner::BottomLeft, Corner::TopLeft, Fixity::UX},
      {Corner::TopRight, Corner::BottomRight, Fixity::UX},
      {Corner::BottomRight, Corner::TopRight, Fixity::UX},
  };
  for (const auto& s : kSpans) {
    add("pin-" + std::string(corner_tag(s.a)) + "+roller-" + std::string(corner_tag(s.b)),
        {pin(NodeRegion::corner(s.a)), {NodeRegion::corner(s.b), s.roll}});
  }

  add("clamp-left+clamp-right",
      {pin(NodeRegion::whole(Edge::Left)), pin(NodeRegion::whole(Edge::Right))});
  add("clamp-top+clamp-bottom",
      {pin(NodeRegion::whole(Edge::Top)), pin(NodeRegion::whole(Edge::Bottom))});

  for (Edge v : {Edge::Left, Edge::Right}) {
    for (Edge h : {Edge::Top, Edge::Bottom}) {
      add("roller-" + std::string(edge_tag(v)) + "+roller-" + std::string(edge_tag(h)),
          {roller_x(NodeRegion::whole(v)), roller_y(NodeRegion::whole(h))});
    }
  }

  add("clamp-left-middle-half", {pin({Edge::Left, 0.25, 0.75})});
  add("clamp-right-middle-half", {pin({Edge::Right, 0.25, 0.75})});
  return out;
}

}  // namespace

std::string_view to_string(Fixity f) noexcept {
  switch (f) {
    case Fixity::UX: return "UX";
    case Fixity::UY: return "UY";
    case Fixity::Pin: return "PIN";
  }
  return "?";
}

std::string_view to_string(Edge e) noexcept { return edge_tag(e); }

NodeRegion NodeRegion::corner(Corner c) {
  switch (c) {
    case Corner::TopLeft: return {Edge::Left, 0.0, 0.0};
    case Corner::BottomLeft: return {Edge::Left, 1.0, 1.0};
    case Corner::TopRight: return {Edge::Right, 0.0, 0.0};
    case Corner::BottomRight: return {Edge::Right, 1.0, 1.0};
  }
  return {};
}

std::vector<int> NodeRegion::resolve(const DesignDomain& domain) const {
  const bool vertical = edge == Edge::Left || edge == Edge::Right;
  const int last = vertical ? domain.nely : domain.nelx;
  std::vector<int> nodes;
  for (int k = 0; k <= last; ++k) {
    const double lo = from * last - 1e-9;
    const double hi = to * last + 1e-9;
    if (k < lo || k > hi) continue;
    switch (edge) {
      case Edge::Left: nodes.push_back(domain.node(k, 0)); break;
      case Edge::Right: nodes.push_back(domain.node(k, domain.nelx)); break;
      case Edge::Top: nodes.push_back(domain.node(0, k)); break;
      case Edge::Bottom: nodes.push_back(domain.node(domain.nely, k)); break;
    }
  }
  return nodes;
}

std::string NodeRegion::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s[%.2f,%.2f]", std::string(edge_tag(edge)).c_str(), from, to);
  return buf;
}

const std::vector<BcScenario>& bc_catalog() {
  static const std::vector<BcScenario> catalog = build_catalog();
  return catalog;
}

std::vector<BcScenario> enumerate_bc_scenarios() { return bc_catalog(); }

const BcScenario& scenario_by_id(int id) {
  const auto& cat = bc_catalog();
  if (id < 0 || id >= static_cast<int>(cat.size())) {
    throw Error(ErrorCode::InvalidArgument, "scenario id out of range: " + std::to_string(id));
  }
  return cat[static_cast<std::size_t>(id)];
}

NodeFixity resolve_fixity(const BcScenario& scenario, const DesignDomain& domain) {
  NodeFixity mask(static_cast<std::size_t>(domain.node_count()), 0);
  for (const auto& c : scenario.constraints) {
    for (int n : c.region.resolve(domain)) {
      mask[static_cast<std::size_t>(n)] |= static_cast<std::uint8_t>(c.fixity);
    }
  }
  return mask;
}

bool removes_rigid_body_modes(const NodeFixity& fixity, const DesignDomain& domain) {
  // A rigid motion is u = (a - b*y, c + b*x). Each fixed dof gives one linear
  // equation in (a, c, b); coordinates are centred for conditioning.
  const double cx = 0.5 * domain.nelx * domain.element_size;
  const double cy = 0.5 * domain.nely * domain.element_size;
  const double scale = std::max(cx, cy);
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  for (int n = 0; n < domain.node_count(); ++n) {
    const auto f = fixity[static_cast<std::size_t>(n)];
    const double x = (domain.node_x(n) - cx) / scale;
    const double y = (domain.node_y(n) - cy) / scale;
    if (f & static_cast<std::uint8_t>(Fixity::UX)) {
      const Eigen::Vector3d r(1.0, 0.0, -y);
      gram += r * r.transpose();
    }
    if (f & static_cast<std::uint8_t>(Fixity::UY)) {
      const Eigen::Vector3d r(0.0, 1.0, x);
      gram += r * r.transpose();
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return ev(2) > 0.0 && ev(0) > 1e-12 * ev(2);
}

std::vector<int> fixed_dofs(const NodeFixity& fixity) {
  std::vector<int> dofs;
  for (std::size_t n = 0; n < fixity.size(); ++n) {
    if (fixity[n] & static_cast<std::uint8_t>(Fixity::UX)) dofs.push_back(static_cast<int>(2 * n));
    if (fixity[n] & static_cast<std::uint8_t>(Fixity::UY)) {
      dofs.push_back(static_cast<int>(2 * n + 1));
    }
  }
  return dofs;
}

std::vector<int> admissible_load_nodes(const NodeFixity& fixity, const DesignDomain& domain) {
  std::vector<int> nodes;
  for (int n = 0; n < domain.node_count(); ++n) {
    if (domain.on_boundary(n) && fixity[static_cast<std::size_t>(n)] == 0) nodes.push_back(n);
  }
  return nodes;
}

std::string catalog_to_text(const std::vector<BcScenario>& catalog) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& s : catalog) {
    nlohmann::ordered_json cs = nlohmann::ordered_json::array();
    for (const auto& c : s.constraints) {
      cs.push_back({{"region", c.region.describe()},
                    {"edge", edge_tag(c.region.edge)},
                    {"from", c.region.from},
                    {"to", c.region.to},
                    {"fixity", to_string(c.fixity)}});
    }
    doc.push_back({{"id", s.id}, {"name", s.name}, {"constraints", std::move(cs)}});
  }
  return doc.dump(2) + "\n";
}

std::string catalog_hash(const std::vector<BcScenario>& catalog) {
  const std::string text = catalog_to_text(catalog);
  const auto crc = crc32({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

}  // namespace topo
