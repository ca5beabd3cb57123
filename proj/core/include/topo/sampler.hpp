#pragma once

#include "topo/domain.hpp"
#include "topo/problem.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topo {

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent generator for one logical stream (e.g. one sample id) of a
/// global seed. Streams do not depend on each other, so sample i draws the
/// same problem regardless of worker count or scheduling order.
[[nodiscard]] std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream);

/// Unbiased integer in [0, n). Implemented locally because
/// std::uniform_int_distribution is not portable across standard libraries.
[[nodiscard]] std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Draws vf, scenario, load node and angle uniformly per the dataset protocol.
[[nodiscard]] ProblemSpec sample_problem(std::mt19937_64& rng, const DesignDomain& domain);

/// Problem for sample `id` under global `seed`.
[[nodiscard]] ProblemSpec sample_problem(std::uint64_t seed, std::uint64_t id,
                                         const DesignDomain& domain);

enum class Split : std::uint8_t { Train, Validation, Test };

std::string_view to_string(Split s) noexcept;
[[nodiscard]] Split parse_split(std::string_view s);

struct SampleKey {
  std::uint64_t id = 0;
  int scenario_id = 0;
};

struct SplitPlan {
  std::vector<int> test_scenarios;  // ascending
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::map<std::uint64_t, Split> labels;

  [[nodiscard]] std::size_t count(Split s) const;
};

inline constexpr int kTestScenarioCount = 4;

/// Holds out 4 whole scenarios for test, then shuffles the rest and labels
/// the first round(0.8 n) as train and the remainder as validation.
/// Pure function of the (id, scenario) set and the seed.
/// Throws InsufficientScenarios with fewer than 5 distinct scenarios.
[[nodiscard]] SplitPlan plan_splits(std::span<const SampleKey> samples, std::uint64_t seed,
                                    double train_fraction = 0.8);

}  // namespace topo
