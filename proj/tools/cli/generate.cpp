#include "cli/commands.hpp"

#include "topo/error.hpp"
#include "topo/sampler.hpp"
#include "topo/scenario.hpp"
#include "topo/topo1.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

namespace topo::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Job {
  std::uint64_t id = 0;
  ProblemSpec spec;
  std::string split;
};

// Everything except the file write is a pure function of the job.
SampleOutcome run_job(const Job& job, const GenerateConfig& config, const fs::path& file) {
  const auto start = Clock::now();
  SampleOutcome outcome;
  outcome.id = job.id;
  outcome.scenario_id = job.spec.scenario_id;
  try {
    const DesignDomain& d = config.domain;
    ElasticSolver solver(d, resolve_fixity(job.spec.scenario(), d));
    const Eigen::VectorXd F = load_vector(job.spec, d);
    const Field solid = d.uniform(1.0);
    const FieldBundle fields = compute_fields(solver.solve(solid, 1.0, F), solid, d, 1.0);

    OptimizationResult result = optimize(solver, F, job.spec.vf_target, config.simp);
    outcome.iterations = result.trace.iterations;
    outcome.converged = result.trace.converged;
    outcome.initial_compliance = result.trace.compliance.front();
    outcome.compliance = result.trace.compliance.back();

    SampleRecord record = encode_sample(job.spec, fields, result.density, d);
    record.meta.id = job.id;
    record.meta.seed = config.seed;
    record.meta.split = job.split;

    std::vector<std::string> problems = record_violations(record);
    const double mean = result.density.mean();
    if (std::abs(mean - job.spec.vf_target) > 1e-3) {
      problems.push_back("mean density " + std::to_string(mean) + " misses the target");
    }
    if (!(outcome.compliance <= outcome.initial_compliance)) {
      problems.push_back("final compliance exceeds the uniform start");
    }
    if (!problems.empty()) throw Error(ErrorCode::InvalidArgument, problems.front());

    write_sample(record, file);
    outcome.ok = true;
  } catch (const Error& e) {
    outcome.error = e.what();
    outcome.io_error = e.code() == ErrorCode::Io;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  outcome.seconds = seconds_since(start);
  return outcome;
}

nlohmann::json log_line(const SampleOutcome& o) {
  nlohmann::json j = {{"id", o.id},
                      {"status", o.ok ? "ok" : "failed"},
                      {"scenario_id", o.scenario_id},
                      {"iterations", o.iterations},
                      {"converged", o.converged},
                      {"initial_compliance", o.initial_compliance},
                      {"compliance", o.compliance},
                      {"wall_time_s", o.seconds}};
  if (!o.ok) j["error"] = o.error;
  return j;
}

void clear_previous(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == kManifestName || (name.rfind("sample_", 0) == 0 && entry.path().extension() == ".topo")) {
      fs::remove(entry.path());
    }
  }
}

}  // namespace

bool GenerateReport::failure_budget_exceeded(double max_rate) const {
  if (outcomes.empty()) return false;
  return static_cast<double>(failed) > max_rate * static_cast<double>(outcomes.size());
}

GenerateReport generate_dataset(const GenerateConfig& config, std::ostream* progress) {
  config.domain.validate();
  config.simp.validate();
  if (config.count == 0) throw Error(ErrorCode::InvalidArgument, "count must be positive");
  if (config.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must be in (0, 1)");
  }
  if (config.out.empty()) throw Error(ErrorCode::InvalidArgument, "output directory required");

  const auto start = Clock::now();
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + config.out.string() + ": " + ec.message());
  if (fs::exists(config.out / kManifestName)) {
    if (!config.overwrite) {
      throw Error(ErrorCode::Io, config.out.string() + " already holds a dataset (use --overwrite)");
    }
    clear_previous(config.out);
  }

  // Problems and splits are fixed before any solve, so labels never depend
  // on which samples happen to fail.
  std::vector<Job> jobs(config.count);
  std::vector<SampleKey> keys(config.count);
  for (std::uint64_t i = 0; i < config.count; ++i) {
    jobs[i].id = i;
    jobs[i].spec = sample_problem(config.seed, i, config.domain);
    keys[i] = {i, jobs[i].spec.scenario_id};
  }
  std::optional<SplitPlan> plan;
  try {
    plan = plan_splits(keys, config.seed, config.train_fraction);
    for (Job& job : jobs) job.split = std::string(to_string(plan->labels.at(job.id)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientScenarios) throw;
    if (progress) *progress << "warning: " << e.what() << "; samples left unsplit\n";
  }

  std::ofstream run_log(config.out / "run_log.jsonl", std::ios::trunc);
  if (!run_log) throw Error(ErrorCode::Io, "cannot open run log in " + config.out.string());

  GenerateReport report;
  report.outcomes.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mutex;

  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const SampleOutcome o = run_job(jobs[i], config, config.out / sample_file_name(jobs[i].id));
      std::lock_guard lock(mutex);
      report.outcomes[i] = o;
      ++done;
      run_log << log_line(o).dump() << '\n' << std::flush;
      if (progress) {
        *progress << '[' << done << '/' << jobs.size() << "] sample " << o.id;
        if (o.ok) {
          *progress << " iters=" << o.iterations << " C=" << o.compliance;
        } else {
          *progress << " FAILED: " << o.error;
        }
        *progress << " (" << o.seconds << " s)\n";
      }
    }
  };
  const int n_threads = static_cast<int>(std::min<std::uint64_t>(config.threads, config.count));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (!run_log) throw Error(ErrorCode::Io, "failed writing the run log");

  DatasetManifest& m = report.manifest;
  m.domain = config.domain;
  m.simp = config.simp;
  m.catalog_hash = catalog_hash(bc_catalog());
  m.seed = config.seed;
  m.requested_count = config.count;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const SampleOutcome& o = report.outcomes[i];
    if (o.ok) {
      m.samples.push_back({o.id, sample_file_name(o.id), jobs[i].split, o.scenario_id});
    } else {
      m.failures.push_back({o.id, o.error});
      ++report.failed;
      if (o.io_error) report.io_failed = true;
    }
  }
  if (plan) {
    m.test_scenarios = plan->test_scenarios;
    m.split_seed = plan->seed;
    m.normalization = train_normalization(m, config.out);
  }
  save_manifest(m, config.out);
  report.seconds = seconds_since(start);
  return report;
}

}  // namespace topo::cli
