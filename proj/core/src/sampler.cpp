#include "topo/sampler.hpp"

#include "topo/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace topo {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL)));
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "uniform_index over an empty range");
  // Rejection keeps the draw unbiased: discard the top partial block.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

ProblemSpec sample_problem(std::mt19937_64& rng, const DesignDomain& domain) {
  ProblemSpec spec;
  spec.vf_target = volume_fraction_level(static_cast<int>(uniform_index(rng, kVolumeFractionLevels)));
  spec.scenario_id = static_cast<int>(uniform_index(rng, kScenarioCount));
  const auto nodes = admissible_load_nodes(resolve_fixity(spec.scenario(), domain), domain);
  if (nodes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "scenario leaves no free boundary node for the load");
  }
  spec.load_node = nodes[uniform_index(rng, nodes.size())];
  spec.angle_index = static_cast<int>(uniform_index(rng, kLoadAngleLevels));
  spec.load_magnitude = 1.0;
  return spec;
}

ProblemSpec sample_problem(std::uint64_t seed, std::uint64_t id, const DesignDomain& domain) {
  auto rng = stream_rng(seed, id);
  return sample_problem(rng, domain);
}

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Validation;
  if (s == "test") return Split::Test;
  throw Error(ErrorCode::InvalidArgument, "unknown split label: " + std::string(s));
}

std::size_t SplitPlan::count(Split s) const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [s](const auto& kv) { return kv.second == s; }));
}

SplitPlan plan_splits(std::span<const SampleKey> samples, std::uint64_t seed,
                      double train_fraction) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must be in [0, 1]");
  }
  // Canonical order so the plan does not depend on input order.
  std::vector<SampleKey> keys(samples.begin(), samples.end());
  std::sort(keys.begin(), keys.end(),
            [](const SampleKey& a, const SampleKey& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i].id == keys[i - 1].id) {
      throw Error(ErrorCode::InvalidArgument, "duplicate sample id " + std::to_string(keys[i].id));
    }
  }

  std::set<int> present;
  for (const auto& k : keys) present.insert(k.scenario_id);
  if (present.size() <= static_cast<std::size_t>(kTestScenarioCount)) {
    throw Error(ErrorCode::InsufficientScenarios,
                "need at least 5 scenarios, found " + std::to_string(present.size()));
  }

  SplitPlan plan;
  plan.seed = seed;
  plan.train_fraction = train_fraction;

  auto scenario_rng = stream_rng(seed, 0x5ce7a710ULL);
  std::vector<int> scenarios(present.begin(), present.end());
  shuffle(scenarios, scenario_rng);
  plan.test_scenarios.assign(scenarios.begin(), scenarios.begin() + kTestScenarioCount);
  std::sort(plan.test_scenarios.begin(), plan.test_scenarios.end());
  const std::set<int> held_out(plan.test_scenarios.begin(), plan.test_scenarios.end());

  std::vector<std::uint64_t> rest;
  for (const auto& k : keys) {
    if (held_out.count(k.scenario_id)) {
      plan.labels[k.id] = Split::Test;
    } else {
      rest.push_back(k.id);
    }
  }
  auto sample_rng = stream_rng(seed, 0x5a3f1e5ULL);
  shuffle(rest, sample_rng);
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(rest.size())));
  for (std::size_t i = 0; i < rest.size(); ++i) {
    plan.labels[rest[i]] = i < n_train ? Split::Train : Split::Validation;
  }
  return plan;
}

}  // namespace topo
