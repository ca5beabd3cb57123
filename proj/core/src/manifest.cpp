#include "topo/manifest.hpp"

#include "topo/error.hpp"
#include "topo/topo1.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace topo {

// Defined at namespace scope so nlohmann's ADL lookup finds them.
void to_json(nlohmann::json& j, const ManifestEntry& e) {
  j = nlohmann::json{{"id", e.id}, {"file", e.file}, {"split", e.split}, {"scenario_id", e.scenario_id}};
}

void from_json(const nlohmann::json& j, ManifestEntry& e) {
  j.at("id").get_to(e.id);
  j.at("file").get_to(e.file);
  e.split = j.value("split", std::string{});
  j.at("scenario_id").get_to(e.scenario_id);
}

void to_json(nlohmann::json& j, const FailedSample& f) {
  j = nlohmann::json{{"id", f.id}, {"reason", f.reason}};
}

void from_json(const nlohmann::json& j, FailedSample& f) {
  j.at("id").get_to(f.id);
  j.at("reason").get_to(f.reason);
}

void to_json(nlohmann::json& j, const ChannelStats& s) {
  j = nlohmann::json{{"mean", s.mean}, {"stddev", s.stddev}};
}

void from_json(const nlohmann::json& j, ChannelStats& s) {
  j.at("mean").get_to(s.mean);
  j.at("stddev").get_to(s.stddev);
}

void to_json(nlohmann::json& j, const DatasetManifest& m) {
  j = nlohmann::json{{"format_version", m.format_version},
                     {"generator_version", m.generator_version},
                     {"domain", m.domain},
                     {"simp", m.simp},
                     {"catalog_hash", m.catalog_hash},
                     {"seed", m.seed},
                     {"requested_count", m.requested_count},
                     {"sample_count", m.samples.size()},
                     {"samples", m.samples},
                     {"failures", m.failures},
                     {"test_scenarios", m.test_scenarios},
                     {"split_seed", m.split_seed},
                     {"normalization", m.normalization}};
}

void from_json(const nlohmann::json& j, DatasetManifest& m) {
  j.at("format_version").get_to(m.format_version);
  if (m.format_version != kManifestVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "unsupported manifest version " + std::to_string(m.format_version));
  }
  j.at("generator_version").get_to(m.generator_version);
  j.at("domain").get_to(m.domain);
  j.at("simp").get_to(m.simp);
  j.at("catalog_hash").get_to(m.catalog_hash);
  j.at("seed").get_to(m.seed);
  m.requested_count = j.value("requested_count", std::uint64_t{0});
  j.at("samples").get_to(m.samples);
  m.failures = j.value("failures", std::vector<FailedSample>{});
  m.test_scenarios = j.value("test_scenarios", std::vector<int>{});
  m.split_seed = j.value("split_seed", std::uint64_t{0});
  m.normalization = j.value("normalization", std::map<std::string, ChannelStats>{});
  if (j.contains("sample_count") && j.at("sample_count").get<std::size_t>() != m.samples.size()) {
    throw Error(ErrorCode::InvalidArgument, "manifest sample_count disagrees with sample list");
  }
}

const ManifestEntry* DatasetManifest::find(std::uint64_t id) const noexcept {
  for (const auto& e : samples) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

DatasetManifest load_manifest(const std::filesystem::path& dir) {
  const auto bytes = read_file(dir / kManifestName);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end()).get<DatasetManifest>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad manifest: ") + e.what());
  }
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir) {
  const std::string text = nlohmann::json(manifest).dump(2) + "\n";
  write_file_atomic(dir / kManifestName,
                    {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string sample_file_name(std::uint64_t id) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "sample_%06llu.topo", static_cast<unsigned long long>(id));
  return buf;
}

std::vector<std::string> verify_manifest(const DatasetManifest& manifest,
                                         const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  std::set<std::uint64_t> ids;
  for (const auto& e : manifest.samples) {
    if (!ids.insert(e.id).second) problems.push_back("duplicate id " + std::to_string(e.id));
    const auto path = dir / e.file;
    if (!std::filesystem::exists(path)) {
      problems.push_back("missing file " + e.file);
      continue;
    }
    try {
      const auto rec = read_sample(path);
      if (rec.meta.id != e.id) problems.push_back(e.file + ": id differs from manifest");
      if (rec.meta.spec.scenario_id != e.scenario_id) {
        problems.push_back(e.file + ": scenario differs from manifest");
      }
    } catch (const Error& err) {
      problems.push_back(e.file + ": " + err.what());
    }
  }
  return problems;
}

void apply_split(DatasetManifest& manifest, const SplitPlan& plan) {
  for (auto& e : manifest.samples) {
    const auto it = plan.labels.find(e.id);
    if (it == plan.labels.end()) {
      throw Error(ErrorCode::IdMismatch, "split plan has no label for id " + std::to_string(e.id));
    }
    e.split = std::string(to_string(it->second));
  }
  manifest.test_scenarios = plan.test_scenarios;
  manifest.split_seed = plan.seed;
}

std::map<std::string, ChannelStats> train_normalization(const DatasetManifest& manifest,
                                                        const std::filesystem::path& dir) {
  // Chan et al. pairwise merge of per-channel (n, mean, M2).
  struct Acc {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& e : manifest.samples) {
    if (e.split != "train") continue;
    const auto rec = read_sample(dir / e.file);
    for (const auto& ch : rec.channels) {
      if (ch.data.size() == 0) continue;
      const Eigen::ArrayXd v = ch.data.cast<double>().reshaped().array();
      const double nb = static_cast<double>(v.size());
      const double mb = v.mean();
      const double m2b = (v - mb).square().sum();
      auto& a = acc[ch.name];
      const double n = a.n + nb;
      const double delta = mb - a.mean;
      a.mean += delta * nb / n;
      a.m2 += m2b + delta * delta * a.n * nb / n;
      a.n = n;
    }
  }
  std::map<std::string, ChannelStats> out;
  for (const auto& [name, a] : acc) {
    const double sd = std::sqrt(a.m2 / a.n);
    out[name] = {a.mean, sd > 0.0 ? sd : 1.0};
  }
  return out;
}

}  // namespace topo
