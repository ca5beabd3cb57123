#include "cli/commands.hpp"

#include "topo/sampler.hpp"

namespace topo::cli {

SplitSummary cmd_split(const fs::path& dataset, std::optional<std::uint64_t> seed,
                       double train_fraction) {
  DatasetManifest m = load_manifest(dataset);
  std::vector<SampleKey> keys;
  keys.reserve(m.samples.size());
  for (const ManifestEntry& e : m.samples) keys.push_back({e.id, e.scenario_id});

  const SplitPlan plan = plan_splits(keys, seed.value_or(m.seed), train_fraction);
  apply_split(m, plan);
  m.normalization = train_normalization(m, dataset);
  save_manifest(m, dataset);

  return {plan.test_scenarios, plan.count(Split::Train), plan.count(Split::Validation),
          plan.count(Split::Test)};
}

}  // namespace topo::cli
