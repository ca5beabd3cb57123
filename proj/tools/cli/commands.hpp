#pragma once

#include "topo/fem.hpp"
#include "topo/manifest.hpp"
#include "topo/metrics.hpp"
#include "topo/simp.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace topo::cli {

namespace fs = std::filesystem;

// generate

struct GenerateConfig {
  fs::path out;
  std::uint64_t count = 50;
  std::uint64_t seed = 0;
  DesignDomain domain;
  SimpConfig simp;
  int threads = 1;
  double train_fraction = 0.8;
  double max_failure_rate = 0.01;
  bool overwrite = false;
};

struct SampleOutcome {
  std::uint64_t id = 0;
  bool ok = false;
  bool io_error = false;
  std::string error;
  int scenario_id = 0;
  int iterations = 0;
  bool converged = false;
  double initial_compliance = 0.0;
  double compliance = 0.0;
  double seconds = 0.0;
};

struct GenerateReport {
  DatasetManifest manifest;
  std::vector<SampleOutcome> outcomes;  // ascending id
  std::size_t failed = 0;
  bool io_failed = false;
  double seconds = 0.0;
  [[nodiscard]] bool failure_budget_exceeded(double max_rate) const;
};

/// Samples, solves and writes a dataset; the manifest is written last. Throws
/// on configuration or I/O errors, records per-sample failures.
GenerateReport generate_dataset(const GenerateConfig& config, std::ostream* progress);

// solve / fields

struct ProblemOptions {
  DesignDomain domain;
  SimpConfig simp;
  int scenario = 0;
  std::optional<int> load_node;
  std::optional<double> load_x;  // snapped to the nearest boundary node
  std::optional<double> load_y;
  int angle_index = 3;
  double vf = 0.5;
};

/// Cantilever benchmark: left edge pinned, vertical load at mid-height of the
/// right edge, 60x20, VF 0.5, p = 3.
ProblemOptions cantilever_preset();

ProblemSpec resolve_problem(const ProblemOptions& options);

struct SolveOutput {
  ProblemSpec spec;
  OptimizationResult result;
};

SolveOutput cmd_solve(const ProblemOptions& options, const fs::path& out, bool dump_system);

/// Writes fields.topo and, when pgm is set, one image per channel (or per
/// channel of combo when combo >= 0).
SampleRecord cmd_fields(const ProblemOptions& options, const fs::path& out, bool pgm, int combo);

// split

struct SplitSummary {
  std::vector<int> test_scenarios;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

SplitSummary cmd_split(const fs::path& dataset, std::optional<std::uint64_t> seed,
                       double train_fraction);

// evaluate

struct EvaluateConfig {
  fs::path truth;
  fs::path predictions;
  std::string split = "test";  // train, val, test or all
  bool binarize = false;
  std::optional<double> penal;  // defaults to the dataset's generation penalty
  double bin_width = 0.01;
  std::optional<fs::path> out;
};

MetricsReport cmd_evaluate(const EvaluateConfig& config);

}  // namespace topo::cli
