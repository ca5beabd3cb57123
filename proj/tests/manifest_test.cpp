#include "topo/error.hpp"
#include "topo/manifest.hpp"
#include "topo/topo1.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace topo {
namespace {

namespace fs = std::filesystem;

class ManifestDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("topo_manifest_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Writes n tiny records; scenario = id % 6, channel "a" constant id, "b" = 2.
  DatasetManifest populate(int n) {
    DatasetManifest m;
    m.domain.nelx = 3;
    m.domain.nely = 2;
    m.seed = 17;
    m.requested_count = static_cast<std::uint64_t>(n);
    m.catalog_hash = catalog_hash(bc_catalog());
    for (int i = 0; i < n; ++i) {
      SampleRecord rec;
      rec.channels.push_back({"a", FloatImage::Constant(2, 3, static_cast<float>(i))});
      rec.channels.push_back({"b", FloatImage::Constant(2, 3, 2.0f)});
      rec.target = FloatImage::Constant(2, 3, 0.5f);
      rec.meta.id = static_cast<std::uint64_t>(i);
      rec.meta.spec.scenario_id = i % 6;
      const std::string file = sample_file_name(rec.meta.id);
      write_sample(rec, dir_ / file);
      m.samples.push_back({rec.meta.id, file, "", i % 6});
    }
    return m;
  }

  fs::path dir_;
};

TEST_F(ManifestDir, SaveLoadRoundTrip) {
  DatasetManifest m = populate(4);
  m.failures.push_back({99, "SingularSystem: boom"});
  m.normalization["a"] = {1.5, 0.25};
  m.test_scenarios = {1, 2, 3, 4};
  m.split_seed = 17;
  m.simp.max_iters = 12;
  save_manifest(m, dir_);
  EXPECT_FALSE(fs::exists(dir_ / "manifest.json.tmp"));
  EXPECT_EQ(load_manifest(dir_), m);

  const auto j = nlohmann::json::parse(std::ifstream(dir_ / kManifestName));
  EXPECT_EQ(j.at("sample_count"), 4);
  EXPECT_EQ(j.at("format_version"), kManifestVersion);
}

TEST_F(ManifestDir, RejectsOtherVersionsAndCountDrift) {
  DatasetManifest m = populate(2);
  nlohmann::json j = m;
  j["format_version"] = 7;
  std::ofstream(dir_ / kManifestName) << j.dump();
  try {
    (void)load_manifest(dir_);
    FAIL() << "expected VersionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VersionMismatch);
  }
  j["format_version"] = kManifestVersion;
  j["sample_count"] = 5;
  std::ofstream(dir_ / kManifestName) << j.dump();
  EXPECT_THROW((void)load_manifest(dir_), Error);
}

TEST_F(ManifestDir, VerifyFindsProblems) {
  DatasetManifest m = populate(3);
  EXPECT_TRUE(verify_manifest(m, dir_).empty());
  m.samples.push_back(m.samples.front());
  m.samples.push_back({50, "sample_000050.topo", "", 0});
  m.samples[1].scenario_id = 5;
  const auto problems = verify_manifest(m, dir_);
  EXPECT_EQ(problems.size(), 3u);

  auto bytes = read_file(dir_ / m.samples[2].file);
  bytes[bytes.size() / 2] ^= 1;
  std::ofstream(dir_ / m.samples[2].file, std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  EXPECT_EQ(verify_manifest(m, dir_).size(), 4u);
}

TEST_F(ManifestDir, SplitLabelsAndTrainOnlyNormalization) {
  DatasetManifest m = populate(60);
  std::vector<SampleKey> keys;
  for (const auto& e : m.samples) keys.push_back({e.id, e.scenario_id});
  const SplitPlan plan = plan_splits(keys, 4);
  apply_split(m, plan);
  EXPECT_EQ(m.test_scenarios, plan.test_scenarios);
  double sum = 0.0, sum_sq = 0.0, n = 0.0;
  for (const auto& e : m.samples) {
    EXPECT_EQ(e.split, to_string(plan.labels.at(e.id)));
    if (e.split == "train") {
      sum += static_cast<double>(e.id);
      sum_sq += static_cast<double>(e.id * e.id);
      n += 1.0;
    }
  }
  const auto stats = train_normalization(m, dir_);
  const double mean = sum / n;
  EXPECT_NEAR(stats.at("a").mean, mean, 1e-12);
  EXPECT_NEAR(stats.at("a").stddev, std::sqrt(sum_sq / n - mean * mean), 1e-9);
  // Constant channels get unit scale.
  EXPECT_EQ(stats.at("b").mean, 2.0);
  EXPECT_EQ(stats.at("b").stddev, 1.0);

  SplitPlan partial = plan;
  partial.labels.erase(partial.labels.begin());
  EXPECT_THROW(apply_split(m, partial), Error);
}

TEST(ManifestNames, ZeroPadded) {
  EXPECT_EQ(sample_file_name(7), "sample_000007.topo");
  EXPECT_EQ(sample_file_name(1234567), "sample_1234567.topo");
}

}  // namespace
}  // namespace topo
