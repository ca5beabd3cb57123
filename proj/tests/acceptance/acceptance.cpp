// Acceptance suite: one PASS/FAIL line per criterion. An optional argument
// restricts the run to criteria whose name contains it.

#include "cli/commands.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/reference_simp.hpp"

#include "topo/error.hpp"
#include "topo/fem.hpp"
#include "topo/manifest.hpp"
#include "topo/metrics.hpp"
#include "topo/record.hpp"
#include "topo/scenario.hpp"
#include "topo/simp.hpp"
#include "topo/topo1.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace topo::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DesignDomain grid(int nelx, int nely) {
  DesignDomain d;
  d.nelx = nelx;
  d.nely = nely;
  return d;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("topo_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

Outcome patch_test() {
  const auto t0 = Clock::now();
  const DesignDomain d = grid(128, 64);
  const double traction = 1.0;
  const auto lc = fixture::uniaxial_tension(d, traction);
  const Field solid = d.uniform(1.0);
  ElasticSolver solver(d, lc.fixity);
  const FieldBundle f = compute_fields(solver.solve(solid, 1.0, lc.F), solid, d);
  const double secs = seconds_since(t0);

  const double s = f.s11.mean();
  const double spread = (f.s11.maxCoeff() - f.s11.minCoeff()) / std::abs(s);
  const double vm_err = (f.svm.array() - f.s11.array().abs()).abs().maxCoeff() / std::abs(s);
  const Eigen::ArrayXXd w_exact = f.s11.array().square() / (2.0 * d.youngs_modulus);
  const double w_err = ((f.w.array() - w_exact).abs() / w_exact).maxCoeff();
  const bool pass = spread <= 1e-8 && vm_err <= 1e-8 && w_err <= 1e-8 && secs < 5.0;
  return {pass, fmt("s11 spread %.2e, |svm-|s11||/s11 %.2e, W rel err %.2e, %.2f s (limits 1e-8, 5 s)",
                    spread, vm_err, w_err, secs)};
}

Outcome beam_check() {
  const DesignDomain d = grid(64, 16);
  const auto lc = fixture::tip_loaded_cantilever(d, 1.0);
  ElasticSolver solver(d, lc.fixity);
  const Eigen::VectorXd U = solver.solve(d.uniform(1.0), 1.0, lc.F);
  const double tip = -U(2 * lc.probe_node + 1);
  const double theory = fixture::beam_theory_deflection(d, 1.0);
  const double rel = std::abs(tip - theory) / theory;
  return {rel <= 0.15, fmt("tip %.4f vs PL^3/3EI %.4f, rel diff %.4f (limit 0.15)", tip, theory, rel)};
}

Outcome gradient_check() {
  const DesignDomain d = grid(8, 4);
  const double penal = 3.0;
  const auto fix = resolve_fixity(scenario_by_id(0), d);
  const Eigen::VectorXd F = nodal_load(d, d.node(2, 8), 0.3, -1.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Field y(d.nely, d.nelx);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = u(rng);

  ElasticSolver solver(d, fix);
  const Field dc = sensitivity(y, solver.solve(y, penal, F), d, penal);
  const double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Field yp = y, ym = y;
    yp.data()[i] += h;
    ym.data()[i] -= h;
    const double fd = (oracle::dense_compliance(d, yp, penal, fix, F) -
                       oracle::dense_compliance(d, ym, penal, fix, F)) / (2.0 * h);
    worst = std::max(worst, std::abs(dc.data()[i] - fd) / std::abs(fd));
  }
  return {worst <= 1e-4, fmt("max rel error %.2e over %d elements (limit 1e-4)", worst,
                             static_cast<int>(y.size()))};
}

Outcome simp_reference() {
  const auto t0 = Clock::now();
  const cli::ProblemOptions p = cli::cantilever_preset();
  const ProblemSpec spec = cli::resolve_problem(p);
  const OptimizationResult ours = optimize(spec, p.domain, p.simp);
  const double secs = seconds_since(t0);
  // The preset pulls upward, the reference pushes down; mirror images with
  // equal compliance.
  const auto ref = oracle::reference_simp_cantilever(60, 20, 0.5, 3.0, 1.5);
  const double c = ours.trace.compliance.back();
  const double rel = std::abs(c - ref.compliance) / ref.compliance;
  const double vf_err = std::abs(ours.density.mean() - 0.5);
  return {rel <= 0.05 && vf_err <= 1e-3 && secs < 60.0,
          fmt("C %.4f vs reference %.4f (rel %.4f, limit 0.05), |mean-0.5| %.1e, %.2f s", c,
              ref.compliance, rel, vf_err, secs)};
}

std::vector<std::string> dataset_files(const fs::path& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name != "run_log.jsonl") files.push_back(name);  // the log holds wall times
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome dataset_generation() {
  cli::GenerateConfig cfg;
  cfg.count = 50;
  cfg.seed = 7;
  cfg.domain = grid(128, 64);
  cfg.simp.penal = 2.0;
  cfg.simp.filter_radius = 1.5;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const fs::path da = scratch("gen_a");
  cfg.out = da;
  const cli::GenerateReport a = cli::generate_dataset(cfg, &std::cerr);
  cfg.out = scratch("gen_b");
  cfg.threads = cfg.threads == 1 ? 2 : 1;  // rerun also varies the worker count
  const cli::GenerateReport b = cli::generate_dataset(cfg, &std::cerr);

  std::vector<std::string> problems;
  if (a.failed != 0 || b.failed != 0) problems.push_back(fmt("%zu/%zu failures", a.failed, b.failed));
  if (a.manifest.samples.size() != 50) problems.push_back("manifest does not list 50 samples");

  const auto files_a = dataset_files(da);
  const auto files_b = dataset_files(cfg.out);
  std::size_t identical = 0;
  if (files_a != files_b) {
    problems.push_back("file sets differ");
  } else {
    for (const auto& f : files_a) {
      if (read_file(da / f) == read_file(cfg.out / f)) ++identical;
    }
    if (identical != files_a.size()) problems.push_back("rerun differs");
  }

  double worst_vf = 0.0;
  std::size_t invalid = 0;
  for (const ManifestEntry& e : a.manifest.samples) {
    const SampleRecord r = read_sample(da / e.file);
    if (!record_violations(r).empty() || r.meta.id != e.id) ++invalid;
    const double v = r.meta.spec.vf_target;
    if (v < 0.3 - 1e-12 || v > 0.5 + 1e-12) ++invalid;
    worst_vf = std::max(worst_vf, std::abs(to_field(r.target).mean() - v));
  }
  if (invalid) problems.push_back(fmt("%zu samples break invariants", invalid));
  if (worst_vf > 1e-3) problems.push_back("volume target missed");
  if (a.seconds > 1800.0) problems.push_back("over 30 min");
  fs::remove_all(da);
  fs::remove_all(cfg.out);

  std::string detail = fmt("%zu samples, %zu/%zu files bitwise identical on rerun, max |mean-vf| "
                           "%.1e, %.0f s (limit 1800 s)",
                           a.manifest.samples.size(), identical, files_a.size(), worst_vf, a.seconds);
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

Outcome metrics_exactness() {
  const DesignDomain d = grid(128, 64);
  std::vector<std::string> problems;
  double worst = 0.0;
  const auto expect = [&](const char* what, double got, double want, bool relative) {
    const double err = std::abs(got - want) / (relative ? std::abs(want) : 1.0);
    worst = std::max(worst, err);
    if (!(err <= 1e-12)) problems.push_back(fmt("%s %.17g vs %.17g", what, got, want));
  };

  // Uniform densities scale K uniformly: C(yh)/C(y) = E(y)/E(yh).
  ProblemSpec spec{0.5, 0, d.node(d.nely / 2, d.nelx), 3, 1.0};
  const Field half = d.uniform(0.5), quarter = d.uniform(0.25), zero = d.uniform(0.0);
  const double e_half = penalized_modulus(0.5, 2.0, d);
  expect("MAE(0.5,0)", mae(half, zero), 0.5, false);
  expect("MSE(0.5,0)", mse(half, zero), 0.25, false);
  expect("REVF(0.5,0)", re_vf(half, zero), -1.0, false);
  expect("REC(0.5,0)", re_c(half, zero, spec, d), e_half / d.youngs_min - 1.0, true);
  expect("MAE(0.5,0.25)", mae(half, quarter), 0.25, false);
  expect("MSE(0.5,0.25)", mse(half, quarter), 0.0625, false);
  expect("REVF(0.5,0.25)", re_vf(half, quarter), -0.5, false);
  expect("REC(0.5,0.25)", re_c(half, quarter, spec, d),
         e_half / penalized_modulus(0.25, 2.0, d) - 1.0, true);

  // Mirror about the horizontal midline of a problem symmetric about it.
  spec.angle_index = 0;
  Field y = Field::Zero(d.nely, d.nelx);
  y.topRows(d.nely / 2).setConstant(1.0);
  y.bottomRows(d.nely / 2).setConstant(0.2);
  const Field m = y.colwise().reverse();
  expect("MAE(mirror)", mae(y, m), 0.8, false);
  expect("MSE(mirror)", mse(y, m), 0.64, false);
  expect("REVF(mirror)", re_vf(y, m), 0.0, false);
  expect("REC(mirror)", re_c(y, m, spec, d), 0.0, false);
  ComplianceOptions bin;
  bin.binarize = true;
  expect("REC(mirror, binarized)", re_c(y, m, spec, d, bin), 0.0, false);

  std::string detail = fmt("worst error %.2e over 13 hand values (limit 1e-12)", worst);
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

std::string check_split(const DatasetManifest& m, bool* ok) {
  const std::set<int> held(m.test_scenarios.begin(), m.test_scenarios.end());
  std::set<int> seen;
  std::size_t train = 0, val = 0, test = 0, leaks = 0;
  for (const ManifestEntry& e : m.samples) {
    seen.insert(e.scenario_id);
    train += e.split == "train";
    val += e.split == "val";
    test += e.split == "test";
    if ((held.count(e.scenario_id) == 1) != (e.split == "test")) ++leaks;
  }
  const long expected_train = std::lround(0.8 * static_cast<double>(train + val));
  const long off = std::labs(static_cast<long>(train) - expected_train);
  *ok = *ok && seen.size() == 42 && held.size() == 4 && leaks == 0 && off <= 1 &&
        train + val + test == m.samples.size();
  return fmt("%zu scenarios, held out %zu, leaks %zu, train/val/test %zu/%zu/%zu (train target %ld)",
             seen.size(), held.size(), leaks, train, val, test, expected_train);
}

Outcome split_integrity() {
  cli::GenerateConfig cfg;
  cfg.out = scratch("split");
  cfg.count = 400;
  cfg.seed = 42;
  cfg.domain = grid(16, 8);
  cfg.simp.max_iters = 5;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const cli::GenerateReport g = cli::generate_dataset(cfg, nullptr);
  bool ok = g.failed == 0;
  std::string detail = "generate: " + check_split(load_manifest(cfg.out), &ok);
  (void)cli::cmd_split(cfg.out, 1234, 0.8);
  detail += "; resplit: " + check_split(load_manifest(cfg.out), &ok);
  fs::remove_all(cfg.out);
  return {ok, detail};
}

ErrorCode decode_error(std::span<const std::uint8_t> bytes) {
  try {
    (void)decode_topo1(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // accepted, which is wrong here
}

Outcome format_robustness() {
  std::mt19937_64 rng(100);
  int lossless = 0, magic = 0, truncations = 0, truncations_ok = 0;
  const fs::path dir = scratch("topo1");
  fs::create_directories(dir);
  for (int i = 0; i < 100; ++i) {
    const SampleRecord rec = fixture::random_record(rng);
    const auto bytes = encode_topo1(rec);
    const fs::path f = dir / "r.topo";
    write_sample(rec, f);
    const SampleRecord back = read_sample(f);
    if (fixture::bitwise_equal(rec, back) && encode_topo1(back) == bytes) ++lossless;

    auto bad = bytes;
    std::copy_n("XXXX", 4, bad.begin());
    if (decode_error(bad) == ErrorCode::BadMagic) ++magic;

    for (std::size_t cut : {std::size_t{0}, std::size_t{4}, bytes.size() / 2, bytes.size() - 4,
                            bytes.size() - 1}) {
      const ErrorCode c = decode_error(std::span(bytes).first(cut));
      ++truncations;
      if (c == ErrorCode::TruncatedFile || c == ErrorCode::ChecksumMismatch) ++truncations_ok;
    }
  }
  fs::remove_all(dir);
  return {lossless == 100 && magic == 100 && truncations_ok == truncations,
          fmt("%d/100 bitwise round trips, %d/100 BadMagic, %d/%d truncations rejected", lossless,
              magic, truncations_ok, truncations)};
}

}  // namespace
}  // namespace topo::acceptance

int main(int argc, char** argv) {
  using namespace topo::acceptance;
  const std::string only = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fem-patch-test", patch_test},
      {"beam-check", beam_check},
      {"gradient-check", gradient_check},
      {"simp-reference", simp_reference},
      {"metrics-exactness", metrics_exactness},
      {"split-integrity", split_integrity},
      {"format-robustness", format_robustness},
      {"dataset-generation", dataset_generation},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && name.find(only) == std::string::npos) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
