#include "cli/app.hpp"
#include "cli/commands.hpp"
#include "cli/io_util.hpp"

#include "topo/error.hpp"
#include "topo/record.hpp"
#include "topo/scenario.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <optional>
#include <thread>

namespace topo::cli {
namespace {

// Every override is optional so a preset (or the library default) shows
// through wherever a flag is absent.
struct DomainFlags {
  std::optional<int> nelx, nely;
  std::optional<double> element_size, thickness, youngs, youngs_min, poisson;

  void add(CLI::App* app) {
    auto* g = app->add_option_group("domain");
    g->add_option("--nelx", nelx, "Elements along x");
    g->add_option("--nely", nely, "Elements along y");
    g->add_option("--element-size", element_size, "Element edge length");
    g->add_option("--thickness", thickness, "Plate thickness");
    g->add_option("--youngs", youngs, "Young's modulus of solid material");
    g->add_option("--youngs-min", youngs_min, "Void stiffness floor");
    g->add_option("--poisson", poisson, "Poisson ratio");
  }
  void apply(DesignDomain& d) const {
    if (nelx) d.nelx = *nelx;
    if (nely) d.nely = *nely;
    if (element_size) d.element_size = *element_size;
    if (thickness) d.thickness = *thickness;
    if (youngs) d.youngs_modulus = *youngs;
    if (youngs_min) d.youngs_min = *youngs_min;
    if (poisson) d.poisson = *poisson;
  }
};

struct SimpFlags {
  std::optional<double> penal, rmin, move, eta, change_tol, bisect_tol;
  std::optional<int> max_iters;

  void add(CLI::App* app) {
    auto* g = app->add_option_group("simp");
    g->add_option("--penal", penal, "SIMP penalty exponent");
    g->add_option("--rmin", rmin, "Sensitivity filter radius (elements)");
    g->add_option("--move", move, "OC move limit");
    g->add_option("--eta", eta, "OC damping exponent");
    g->add_option("--max-iters", max_iters, "Iteration cap");
    g->add_option("--change-tol", change_tol, "Stop when max density change falls below");
    g->add_option("--bisect-tol", bisect_tol, "Volume tolerance of the multiplier bisection");
  }
  void apply(SimpConfig& c) const {
    if (penal) c.penal = *penal;
    if (rmin) c.filter_radius = *rmin;
    if (move) c.move_limit = *move;
    if (eta) c.oc_damping = *eta;
    if (max_iters) c.max_iters = *max_iters;
    if (change_tol) c.change_tol = *change_tol;
    if (bisect_tol) c.vf_bisect_tol = *bisect_tol;
  }
};

struct ProblemFlags {
  std::string preset;
  std::optional<int> scenario, load_node, angle;
  std::optional<double> load_x, load_y, vf;
  DomainFlags domain;
  SimpFlags simp;

  void add(CLI::App* app) {
    app->add_option("--preset", preset, "Start from a named problem")
        ->check(CLI::IsMember({"cantilever"}));
    auto* g = app->add_option_group("problem");
    g->add_option("--scenario", scenario, "Boundary-condition scenario id (0-41)");
    g->add_option("--load-node", load_node, "Boundary node carrying the load");
    g->add_option("--load-x", load_x, "Load position x, snapped to the boundary");
    g->add_option("--load-y", load_y, "Load position y, snapped to the boundary");
    g->add_option("--angle", angle, "Load angle index 0-6 (k * 30 degrees)");
    g->add_option("--vf", vf, "Target volume fraction (0.30:0.02:0.50)");
    domain.add(app);
    simp.add(app);
  }
  ProblemOptions resolve() const {
    ProblemOptions p = preset == "cantilever" ? cantilever_preset() : ProblemOptions{};
    const bool grid_changed = domain.nelx || domain.nely;
    domain.apply(p.domain);
    simp.apply(p.simp);
    if (grid_changed) p.load_node.reset();  // preset node belongs to the preset grid
    if (scenario) p.scenario = *scenario;
    if (angle) p.angle_index = *angle;
    if (vf) p.vf = *vf;
    if (load_node) p.load_node = *load_node;
    if (load_x || load_y) {
      p.load_node.reset();
      p.load_x = load_x;
      p.load_y = load_y;
    }
    return p;
  }
};

// Thrown for configuration problems found before any work starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto validated(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology-optimization dataset factory"};
  app.name("topo");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_help_all_flag("--help-all", "Expand all help");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  // catalog
  auto* catalog = app.add_subcommand("catalog", "Print the boundary-condition catalog");
  std::string catalog_out;
  catalog->add_option("--out", catalog_out, "Write the catalog to a file instead");

  // generate
  auto* gen = app.add_subcommand("generate", "Sample, optimize and write a dataset");
  GenerateConfig gcfg;
  gcfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string gen_out;
  DomainFlags gen_domain;
  SimpFlags gen_simp;
  gen->add_option("--out", gen_out, "Dataset directory")->required();
  gen->add_option("--count", gcfg.count, "Number of samples")->capture_default_str();
  gen->add_option("--seed", gcfg.seed, "Global seed")->required();
  gen->add_option("--threads", gcfg.threads, "Worker threads")->capture_default_str();
  gen->add_option("--train-fraction", gcfg.train_fraction, "Train share of non-test samples")
      ->capture_default_str();
  gen->add_flag("--overwrite", gcfg.overwrite, "Replace an existing dataset");
  gen_domain.add(gen);
  gen_simp.add(gen);

  // solve
  auto* solve = app.add_subcommand("solve", "Optimize a single problem");
  ProblemFlags solve_flags;
  std::string solve_out;
  bool dump_system = false;
  solve->add_option("--out", solve_out, "Output directory")->required();
  solve->add_flag("--dump-system", dump_system, "Also write K triplets, F and U as text");
  solve_flags.add(solve);

  // fields
  auto* fields = app.add_subcommand("fields", "Compute initial fields on the solid domain");
  ProblemFlags field_flags;
  std::string fields_out;
  bool pgm = false;
  int combo = -1;
  fields->add_option("--out", fields_out, "Output directory")->required();
  fields->add_flag("--pgm", pgm, "Write a PGM image per channel");
  fields->add_option("--combo", combo, "Only image the channels of this field combination (0-8)");
  field_flags.add(fields);

  // split
  auto* split = app.add_subcommand("split", "Assign train/val/test labels in a dataset manifest");
  std::string split_dataset;
  std::optional<std::uint64_t> split_seed;
  double split_fraction = 0.8;
  split->add_option("--dataset", split_dataset, "Dataset directory")->required();
  split->add_option("--seed", split_seed, "Split seed (default: generation seed)");
  split->add_option("--train-fraction", split_fraction, "Train share of non-test samples")
      ->capture_default_str();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score predictions against a dataset");
  EvaluateConfig ecfg;
  std::string truth_dir, pred_dir, eval_out;
  eval->add_option("--truth", truth_dir, "Ground-truth dataset directory")->required();
  eval->add_option("--pred", pred_dir, "Directory of predicted TOPO1 records")->required();
  eval->add_option("--split", ecfg.split, "train, val, test or all")
      ->check(CLI::IsMember({"train", "val", "test", "all"}))
      ->capture_default_str();
  eval->add_flag("--binarize", ecfg.binarize, "Threshold densities at 0.5 before analysis");
  eval->add_option("--penal", ecfg.penal, "Penalty for compliance (default: dataset's)");
  eval->add_option("--bin-width", ecfg.bin_width, "Histogram bin width")->capture_default_str();
  eval->add_option("--out", eval_out, "Write report.csv, sorted_series.csv, summary.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e, out, err);
    return kExitUsage;
  }

  std::ostream* progress = quiet ? nullptr : &err;
  try {
    if (*catalog) {
      const std::string text = catalog_to_text(bc_catalog());
      if (catalog_out.empty()) {
        out << text;
      } else {
        write_text(catalog_out, text);
      }
      out << "catalog_hash " << catalog_hash(bc_catalog()) << '\n';
      return kExitOk;
    }

    if (*gen) {
      gcfg.out = gen_out;
      gen_domain.apply(gcfg.domain);
      gen_simp.apply(gcfg.simp);
      validated([&] {
        gcfg.domain.validate();
        gcfg.simp.validate();
        if (gcfg.count == 0) throw Error(ErrorCode::InvalidArgument, "count must be positive");
        if (gcfg.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
        if (!(gcfg.train_fraction > 0.0 && gcfg.train_fraction < 1.0)) {
          throw Error(ErrorCode::InvalidArgument, "train fraction must be in (0, 1)");
        }
        return 0;
      });
      const GenerateReport report = generate_dataset(gcfg, progress);
      nlohmann::json summary = {{"out", gen_out},
                                {"requested", gcfg.count},
                                {"written", report.manifest.samples.size()},
                                {"failed", report.failed},
                                {"test_scenarios", report.manifest.test_scenarios},
                                {"wall_time_s", report.seconds}};
      out << summary.dump() << '\n';
      if (report.io_failed) {
        err << "error: I/O failure while writing samples\n";
        return kExitRuntime;
      }
      if (report.failure_budget_exceeded(gcfg.max_failure_rate)) {
        err << "error: " << report.failed << " of " << gcfg.count << " samples failed\n";
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (*solve) {
      const ProblemOptions p = validated([&] {
        ProblemOptions o = solve_flags.resolve();
        o.simp.validate();
        (void)resolve_problem(o);
        return o;
      });
      const SolveOutput s = cmd_solve(p, solve_out, dump_system);
      const OptimizationTrace& t = s.result.trace;
      out << nlohmann::json{{"iterations", t.iterations},
                            {"converged", t.converged},
                            {"compliance", t.compliance.back()},
                            {"volume_fraction", s.result.density.mean()}}
                 .dump()
          << '\n';
      return kExitOk;
    }

    if (*fields) {
      const ProblemOptions p = validated([&] {
        ProblemOptions o = field_flags.resolve();
        (void)resolve_problem(o);
        if (combo >= 0 || combo < -1) (void)combo_channels(combo);
        return o;
      });
      const SampleRecord r = cmd_fields(p, fields_out, pgm, combo);
      out << "wrote " << (fs::path(fields_out) / "fields.topo").string() << " with "
          << r.channels.size() << " channels\n";
      return kExitOk;
    }

    if (*split) {
      validated([&] {
        if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
          throw Error(ErrorCode::InvalidArgument, "train fraction must be in (0, 1)");
        }
        return 0;
      });
      const SplitSummary s = cmd_split(split_dataset, split_seed, split_fraction);
      out << nlohmann::json{{"test_scenarios", s.test_scenarios},
                            {"train", s.train},
                            {"val", s.val},
                            {"test", s.test}}
                 .dump()
          << '\n';
      return kExitOk;
    }

    if (*eval) {
      ecfg.truth = truth_dir;
      ecfg.predictions = pred_dir;
      if (!eval_out.empty()) ecfg.out = fs::path(eval_out);
      validated([&] {
        if (!(ecfg.bin_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin width must be positive");
        if (ecfg.penal && !(*ecfg.penal >= 1.0)) throw Error(ErrorCode::InvalidArgument, "penal must be >= 1");
        return 0;
      });
      const MetricsReport report = cmd_evaluate(ecfg);
      out << report_summary(report).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace topo::cli
