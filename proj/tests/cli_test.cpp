#include "cli/app.hpp"
#include "cli/commands.hpp"

#include "support/fixtures.hpp"

#include "topo/manifest.hpp"
#include "topo/metrics.hpp"
#include "topo/record.hpp"
#include "topo/topo1.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace topo::cli {
namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "topo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("topo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small, fast dataset: 16x8 grid, few iterations.
  CliResult tiny_generate(const std::string& out, int count, int threads,
                          std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"-q",         "generate",   "--out",  out,
                                     "--count",    std::to_string(count), "--seed", "11",
                                     "--nelx",     "16",         "--nely", "8",
                                     "--max-iters", "15",        "--threads", std::to_string(threads)};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }

  fs::path dir_;
};

std::vector<std::uint8_t> bytes_of(const fs::path& p) { return read_file(p); }

TEST_F(CliTest, HelpExitsZero) {
  const CliResult r = run_cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("generate"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"generate", "--out", path("x")}).code, kExitUsage);  // seed is mandatory
  EXPECT_EQ(run_cli({"generate", "--out", path("x"), "--seed", "1", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"generate", "--out", path("x"), "--seed", "1", "--nelx", "0"}).code,
            kExitUsage);
  EXPECT_EQ(run_cli({"generate", "--out", path("x"), "--seed", "1", "--penal", "0.5"}).code,
            kExitUsage);
  EXPECT_EQ(run_cli({"solve", "--out", path("s"), "--vf", "0.41"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"solve", "--out", path("s"), "--preset", "bridge"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"fields", "--out", path("f"), "--combo", "9"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"evaluate", "--truth", "a", "--pred", "b", "--split", "dev"}).code, kExitUsage);
  EXPECT_FALSE(fs::exists(path("x")));
}

TEST_F(CliTest, ConfigFileUnknownKeyRejected) {
  std::ofstream(path("bad.toml")) << "[generate]\nmystery = 3\n";
  EXPECT_EQ(run_cli({"--config", path("bad.toml"), "generate", "--out", path("x"), "--seed", "1"}).code,
            kExitUsage);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  std::ofstream(path("run.toml")) << "[generate]\ncount = 9\nnelx = 12\nnely = 6\nmax-iters = 5\n";
  const CliResult r = run_cli({"-q", "--config", path("run.toml"), "generate", "--out", path("ds"),
                               "--seed", "2", "--count", "5", "--threads", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const DatasetManifest m = load_manifest(path("ds"));
  EXPECT_EQ(m.requested_count, 5u);
  EXPECT_EQ(m.domain.nelx, 12);
  EXPECT_EQ(m.domain.nely, 6);
  EXPECT_EQ(m.simp.max_iters, 5);
  EXPECT_EQ(m.simp.penal, 2.0);
}

TEST_F(CliTest, CatalogPrintsHash) {
  const CliResult r = run_cli({"catalog"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("catalog_hash " + catalog_hash(bc_catalog())), std::string::npos);
}

TEST_F(CliTest, SolveCantileverPresetWritesArtifacts) {
  const CliResult r = run_cli({"solve", "--preset", "cantilever", "--out", path("s"), "--dump-system"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"solution.topo", "density.pgm", "trace.csv", "solve.json", "K.txt", "U.txt", "F.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "s" / f)) << f;
  }
  const auto summary = nlohmann::json::parse(std::ifstream(dir_ / "s" / "solve.json"));
  const int iterations = summary.at("iterations");
  EXPECT_EQ(summary.at("domain").at("nelx"), 60);
  EXPECT_EQ(summary.at("simp").at("penal"), 3.0);
  EXPECT_NEAR(summary.at("volume_fraction").get<double>(), 0.5, 1e-3);
  EXPECT_LT(summary.at("compliance").get<double>(), summary.at("initial_compliance").get<double>());

  std::ifstream trace(dir_ / "s" / "trace.csv");
  std::string line;
  int rows = -1;  // header
  while (std::getline(trace, line)) ++rows;
  EXPECT_EQ(rows, iterations + 1);

  std::ifstream u(dir_ / "s" / "U.txt");
  int values = 0;
  while (std::getline(u, line)) ++values;
  EXPECT_EQ(values, 2 * 61 * 21);

  const SampleRecord rec = read_sample(dir_ / "s" / "solution.topo");
  EXPECT_TRUE(record_violations(rec).empty());
  EXPECT_EQ(rec.nelx(), 60);
}

TEST_F(CliTest, SolveIsDeterministic) {
  ASSERT_EQ(run_cli({"solve", "--preset", "cantilever", "--out", path("a")}).code, kExitOk);
  ASSERT_EQ(run_cli({"solve", "--preset", "cantilever", "--out", path("b")}).code, kExitOk);
  EXPECT_EQ(bytes_of(dir_ / "a" / "solution.topo"), bytes_of(dir_ / "b" / "solution.topo"));
  EXPECT_EQ(bytes_of(dir_ / "a" / "trace.csv"), bytes_of(dir_ / "b" / "trace.csv"));
}

TEST_F(CliTest, PresetFieldsCanBeOverridden) {
  const CliResult r = run_cli({"solve", "--preset", "cantilever", "--out", path("s"), "--nelx", "30",
                               "--nely", "10", "--vf", "0.4", "--max-iters", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const SampleRecord rec = read_sample(dir_ / "s" / "solution.topo");
  EXPECT_EQ(rec.nelx(), 30);
  EXPECT_EQ(rec.meta.spec.vf_target, 0.4);
  // load node falls back to the right edge middle of the new grid
  EXPECT_EQ(rec.meta.spec.load_node, 5 * 31 + 30);
}

TEST_F(CliTest, FieldsWritesAllChannelsAndComboImages) {
  const CliResult r = run_cli({"fields", "--preset", "cantilever", "--out", path("f"), "--pgm",
                               "--combo", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const SampleRecord rec = read_sample(dir_ / "f" / "fields.topo");
  ASSERT_EQ(rec.channels.size(), kChannelNames.size());
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) EXPECT_EQ(rec.channels[i].name, kChannelNames[i]);
  EXPECT_TRUE((rec.target.array() == 0.5f).all());

  std::set<std::string> images;
  for (const auto& e : fs::directory_iterator(dir_ / "f")) {
    if (e.path().extension() == ".pgm") images.insert(e.path().stem().string());
  }
  std::set<std::string> expected;
  for (std::string_view n : combo_channels(4)) expected.emplace(n);
  EXPECT_EQ(images, expected);
}

TEST_F(CliTest, GenerateIndependentOfWorkerCount) {
  ASSERT_EQ(tiny_generate(path("one"), 12, 1).code, kExitOk);
  ASSERT_EQ(tiny_generate(path("three"), 12, 3).code, kExitOk);
  const DatasetManifest a = load_manifest(path("one"));
  const DatasetManifest b = load_manifest(path("three"));
  EXPECT_EQ(a, b);
  EXPECT_EQ(bytes_of(dir_ / "one" / kManifestName), bytes_of(dir_ / "three" / kManifestName));
  ASSERT_EQ(a.samples.size(), 12u);
  for (const ManifestEntry& e : a.samples) {
    EXPECT_EQ(bytes_of(dir_ / "one" / e.file), bytes_of(dir_ / "three" / e.file)) << e.file;
  }
  EXPECT_TRUE(verify_manifest(a, path("one")).empty());
}

TEST_F(CliTest, GenerateRunLogHasOneLinePerSample) {
  ASSERT_EQ(tiny_generate(path("ds"), 6, 2).code, kExitOk);
  std::ifstream log(dir_ / "ds" / "run_log.jsonl");
  std::set<std::uint64_t> ids;
  std::string line;
  while (std::getline(log, line)) {
    const auto j = nlohmann::json::parse(line);
    ids.insert(j.at("id").get<std::uint64_t>());
    EXPECT_EQ(j.at("status"), "ok");
    EXPECT_GT(j.at("iterations").get<int>(), 0);
    EXPECT_GT(j.at("compliance").get<double>(), 0.0);
    EXPECT_GE(j.at("wall_time_s").get<double>(), 0.0);
  }
  EXPECT_EQ(ids, (std::set<std::uint64_t>{0, 1, 2, 3, 4, 5}));
}

TEST_F(CliTest, GenerateSamplesMeetTheirTargets) {
  ASSERT_EQ(tiny_generate(path("ds"), 10, 1).code, kExitOk);
  const DatasetManifest m = load_manifest(path("ds"));
  for (const ManifestEntry& e : m.samples) {
    const SampleRecord r = read_sample(dir_ / "ds" / e.file);
    EXPECT_TRUE(record_violations(r).empty());
    EXPECT_EQ(r.meta.id, e.id);
    EXPECT_EQ(r.meta.split, e.split);
    EXPECT_EQ(r.meta.spec.scenario_id, e.scenario_id);
    EXPECT_GE(r.meta.spec.vf_target, 0.3 - 1e-12);
    EXPECT_LE(r.meta.spec.vf_target, 0.5 + 1e-12);
    EXPECT_LE(std::abs(to_field(r.target).mean() - r.meta.spec.vf_target), 1e-3);
  }
}

TEST_F(CliTest, GenerateRefusesExistingDatasetUnlessOverwrite) {
  ASSERT_EQ(tiny_generate(path("ds"), 3, 1).code, kExitOk);
  const auto before = bytes_of(dir_ / "ds" / kManifestName);
  EXPECT_EQ(tiny_generate(path("ds"), 4, 1).code, kExitRuntime);
  EXPECT_EQ(bytes_of(dir_ / "ds" / kManifestName), before);
  ASSERT_EQ(tiny_generate(path("ds"), 2, 1, {"--overwrite"}).code, kExitOk);
  const DatasetManifest m = load_manifest(path("ds"));
  EXPECT_EQ(m.samples.size(), 2u);
  EXPECT_FALSE(fs::exists(dir_ / "ds" / sample_file_name(2)));
}

TEST_F(CliTest, GenerateFailsOnUnwritableOutput) {
  std::ofstream(path("file")) << "x";
  EXPECT_EQ(tiny_generate(path("file") + "/ds", 2, 1).code, kExitRuntime);
}

TEST_F(CliTest, EvaluateSelfIsAllZero) {
  ASSERT_EQ(tiny_generate(path("ds"), 8, 1).code, kExitOk);
  const CliResult r = run_cli({"evaluate", "--truth", path("ds"), "--pred", path("ds"), "--split",
                               "all", "--out", path("eval")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto s = nlohmann::json::parse(r.out);
  EXPECT_EQ(s.at("count"), 8);
  for (const char* k : {"mae", "mse", "re_vf", "re_c", "abs_re_vf", "abs_re_c"}) {
    EXPECT_EQ(s.at(k).get<double>(), 0.0) << k;
  }
  for (const char* f : {"report.csv", "sorted_series.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "eval" / f)) << f;
  }
}

TEST_F(CliTest, EvaluateMatchesPredictionsById) {
  ASSERT_EQ(tiny_generate(path("ds"), 8, 1).code, kExitOk);
  const DatasetManifest m = load_manifest(path("ds"));
  fs::create_directories(dir_ / "pred");
  double mae_sum = 0.0;
  std::size_t n = 0;
  for (const ManifestEntry& e : m.samples) {
    SampleRecord r = read_sample(dir_ / "ds" / e.file);
    const Field truth = to_field(r.target);
    r.target = FloatImage::Constant(r.nely(), r.nelx(), 0.5f);
    r.meta.split.clear();
    write_sample(r, dir_ / "pred" / ("p" + std::to_string(100 - e.id) + ".topo"));
    if (e.split == "train") {
      mae_sum += mae(truth, to_field(r.target));
      ++n;
    }
  }
  ASSERT_GT(n, 0u);
  const CliResult r = run_cli({"evaluate", "--truth", path("ds"), "--pred", path("pred"), "--split", "train"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto s = nlohmann::json::parse(r.out);
  EXPECT_EQ(s.at("count").get<std::size_t>(), n);
  EXPECT_NEAR(s.at("mae").get<double>(), mae_sum / static_cast<double>(n), 1e-12);
}

TEST_F(CliTest, EvaluateMissingPredictionFails) {
  ASSERT_EQ(tiny_generate(path("ds"), 4, 1).code, kExitOk);
  const DatasetManifest m = load_manifest(path("ds"));
  fs::create_directories(dir_ / "pred");
  fs::copy_file(dir_ / "ds" / m.samples[0].file, dir_ / "pred" / m.samples[0].file);
  const CliResult r = run_cli({"evaluate", "--truth", path("ds"), "--pred", path("pred"), "--split", "all"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("IdMismatch"), std::string::npos);
}

TEST_F(CliTest, SplitRelabelsManifestAtomically) {
  // 8x4 grid and two iterations keep a 42-scenario dataset cheap.
  const CliResult g = run_cli({"-q", "generate", "--out", path("ds"), "--count", "300", "--seed", "5",
                               "--nelx", "8", "--nely", "4", "--max-iters", "2", "--threads", "2"});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  const CliResult r = run_cli({"split", "--dataset", path("ds"), "--seed", "99"});
  ASSERT_EQ(r.code, kExitOk) << r.err;

  const DatasetManifest m = load_manifest(path("ds"));
  ASSERT_EQ(m.test_scenarios.size(), 4u);
  EXPECT_EQ(m.split_seed, 99u);
  const std::set<int> held(m.test_scenarios.begin(), m.test_scenarios.end());
  std::size_t train = 0, val = 0;
  for (const ManifestEntry& e : m.samples) {
    EXPECT_EQ(held.count(e.scenario_id) == 1, e.split == "test") << e.id;
    train += e.split == "train";
    val += e.split == "val";
  }
  EXPECT_LE(std::abs(static_cast<long>(train) - std::lround(0.8 * static_cast<double>(train + val))), 1);
  EXPECT_FALSE(m.normalization.empty());
  for (const auto& e : fs::directory_iterator(dir_ / "ds")) {
    EXPECT_EQ(e.path().extension().string().find(".tmp"), std::string::npos) << e.path();
  }
}

}  // namespace
}  // namespace topo::cli
