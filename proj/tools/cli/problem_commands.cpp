#include "cli/commands.hpp"
#include "cli/io_util.hpp"

#include "topo/error.hpp"
#include "topo/image.hpp"
#include "topo/record.hpp"
#include "topo/scenario.hpp"
#include "topo/topo1.hpp"

#include <nlohmann/json.hpp>

namespace topo::cli {

ProblemOptions cantilever_preset() {
  ProblemOptions p;
  p.domain.nelx = 60;
  p.domain.nely = 20;
  p.simp.penal = 3.0;
  p.simp.filter_radius = 1.5;
  p.scenario = 0;
  p.load_node = p.domain.node(p.domain.nely / 2, p.domain.nelx);
  p.angle_index = 3;
  p.vf = 0.5;
  return p;
}

ProblemSpec resolve_problem(const ProblemOptions& options) {
  const DesignDomain& d = options.domain;
  d.validate();
  ProblemSpec spec;
  spec.vf_target = options.vf;
  spec.scenario_id = options.scenario;
  spec.angle_index = options.angle_index;
  if (options.load_node) {
    spec.load_node = *options.load_node;
  } else if (options.load_x || options.load_y) {
    if (!(options.load_x && options.load_y)) {
      throw Error(ErrorCode::InvalidArgument, "load-x and load-y must be given together");
    }
    spec.load_node = snap_to_boundary(d, *options.load_x, *options.load_y);
  } else {
    spec.load_node = d.node(d.nely / 2, d.nelx);
  }
  if (spec.load_node < 0 || spec.load_node >= d.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "load node out of range");
  }
  validate(spec, d);
  return spec;
}

SolveOutput cmd_solve(const ProblemOptions& options, const fs::path& out, bool dump_system) {
  options.simp.validate();
  const ProblemSpec spec = resolve_problem(options);
  const DesignDomain& d = options.domain;
  fs::create_directories(out);

  const NodeFixity fixity = resolve_fixity(spec.scenario(), d);
  ElasticSolver solver(d, fixity);
  const Eigen::VectorXd F = load_vector(spec, d);
  const Field solid = d.uniform(1.0);
  const FieldBundle fields = compute_fields(solver.solve(solid, 1.0, F), solid, d, 1.0);
  SolveOutput result{spec, optimize(solver, F, spec.vf_target, options.simp)};
  const Field& y = result.result.density;
  const OptimizationTrace& trace = result.result.trace;

  write_sample(encode_sample(spec, fields, y, d), out / "solution.topo");
  write_density_pgm(out / "density.pgm", y);
  write_text_with(out / "trace.csv", [&](std::ostream& os) { trace.write_csv(os); });

  nlohmann::json summary = {{"spec", spec},
                            {"domain", d},
                            {"simp", options.simp},
                            {"iterations", trace.iterations},
                            {"converged", trace.converged},
                            {"initial_compliance", trace.compliance.front()},
                            {"compliance", trace.compliance.back()},
                            {"volume_fraction", y.mean()}};
  write_text(out / "solve.json", summary.dump(2) + "\n");

  if (dump_system) {
    const StiffnessSystem system = assemble(y, options.simp.penal, fixity, F, d);
    const Eigen::VectorXd U = solver.solve(y, options.simp.penal, F);
    write_text_with(out / "K.txt", [&](std::ostream& os) { write_triplets(os, system.K); });
    write_text_with(out / "F.txt", [&](std::ostream& os) { write_vector(os, F); });
    write_text_with(out / "U.txt", [&](std::ostream& os) { write_vector(os, U); });
  }
  return result;
}

SampleRecord cmd_fields(const ProblemOptions& options, const fs::path& out, bool pgm, int combo) {
  if (combo >= 0) (void)combo_channels(combo);  // reject unknown ids before solving
  const ProblemSpec spec = resolve_problem(options);
  const DesignDomain& d = options.domain;
  fs::create_directories(out);

  SampleRecord record = encode_sample(spec, initial_fields(spec, d), d.uniform(spec.vf_target), d);
  write_sample(record, out / "fields.topo");
  if (pgm) {
    std::vector<std::string> names;
    if (combo >= 0) {
      for (std::string_view n : combo_channels(combo)) names.emplace_back(n);
    } else {
      for (const Channel& ch : record.channels) names.push_back(ch.name);
    }
    for (const std::string& name : names) {
      write_pgm_autoscale(out / (name + ".pgm"), to_field(record.channel(name)));
    }
  }
  return record;
}

}  // namespace topo::cli
