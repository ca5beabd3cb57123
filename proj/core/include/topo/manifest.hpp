#pragma once

#include "topo/domain.hpp"
#include "topo/record.hpp"
#include "topo/sampler.hpp"
#include "topo/simp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace topo {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";

struct ManifestEntry {
  std::uint64_t id = 0;
  std::string file;
  std::string split;
  int scenario_id = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct FailedSample {
  std::uint64_t id = 0;
  std::string reason;

  friend bool operator==(const FailedSample&, const FailedSample&) = default;
};

/// Affine normalization (x - mean) / stddev, computed over the train split.
struct ChannelStats {
  double mean = 0.0;
  double stddev = 1.0;

  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

struct DatasetManifest {
  int format_version = kManifestVersion;
  std::string generator_version{kGeneratorVersion};
  DesignDomain domain;
  SimpConfig simp;
  std::string catalog_hash;
  std::uint64_t seed = 0;
  std::uint64_t requested_count = 0;
  std::vector<ManifestEntry> samples;
  std::vector<FailedSample> failures;
  std::vector<int> test_scenarios;
  std::uint64_t split_seed = 0;
  std::map<std::string, ChannelStats> normalization;

  [[nodiscard]] std::size_t sample_count() const noexcept { return samples.size(); }
  [[nodiscard]] const ManifestEntry* find(std::uint64_t id) const noexcept;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

[[nodiscard]] DatasetManifest load_manifest(const std::filesystem::path& dir);
/// Writes dir/manifest.json via temporary file + rename.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir);

/// Conventional sample file name, e.g. "sample_000042.topo".
[[nodiscard]] std::string sample_file_name(std::uint64_t id);

/// Checks unique ids and that every listed file exists and decodes with a
/// matching id. Returns the problems found; empty when consistent.
[[nodiscard]] std::vector<std::string> verify_manifest(const DatasetManifest& manifest,
                                                       const std::filesystem::path& dir);

/// Copies split labels and held-out scenarios from a plan into the manifest.
void apply_split(DatasetManifest& manifest, const SplitPlan& plan);

/// Per-channel mean / stddev over train-split samples.
[[nodiscard]] std::map<std::string, ChannelStats> train_normalization(
    const DatasetManifest& manifest, const std::filesystem::path& dir);

}  // namespace topo
