#pragma once

#include "topo/domain.hpp"
#include "topo/fem.hpp"
#include "topo/problem.hpp"
#include "topo/types.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topo {

inline constexpr std::string_view kGeneratorVersion = "topogen-0.1.0";

/// Stored channel order. The first four are the problem inputs x, the rest
/// are the initial fields f(x).
inline constexpr std::array<std::string_view, 14> kChannelNames = {
    "vf",  "bc_code", "load_x", "load_y", "ux",  "uy",  "s11",
    "s22", "s12",     "e11",    "e22",    "e12", "svm", "w",
};

struct SampleMeta {
  std::uint64_t id = 0;
  ProblemSpec spec;
  std::string split;  // empty until assigned; the manifest is authoritative
  std::uint64_t seed = 0;
  std::string generator_version{kGeneratorVersion};
  nlohmann::json extra = nlohmann::json::object();  // unrecognized keys, kept verbatim

  friend bool operator==(const SampleMeta&, const SampleMeta&) = default;
};

void to_json(nlohmann::json& j, const SampleMeta& meta);
void from_json(const nlohmann::json& j, SampleMeta& meta);

struct Channel {
  std::string name;
  FloatImage data;

  friend bool operator==(const Channel& a, const Channel& b) {
    return a.name == b.name && a.data.rows() == b.data.rows() && a.data.cols() == b.data.cols() &&
           a.data == b.data;
  }
};

struct SampleRecord {
  std::vector<Channel> channels;
  FloatImage target;  // ground-truth y, or a prediction y-hat
  SampleMeta meta;

  [[nodiscard]] int nely() const noexcept { return static_cast<int>(target.rows()); }
  [[nodiscard]] int nelx() const noexcept { return static_cast<int>(target.cols()); }
  [[nodiscard]] const FloatImage* find(std::string_view name) const noexcept;
  /// Throws Error(InvalidArgument) when absent.
  [[nodiscard]] const FloatImage& channel(std::string_view name) const;

  friend bool operator==(const SampleRecord& a, const SampleRecord& b) {
    return a.channels == b.channels && a.target.rows() == b.target.rows() &&
           a.target.cols() == b.target.cols() && a.target == b.target && a.meta == b.meta;
  }
};

/// Builds the 14-channel record. Throws ShapeMismatch if any input does not
/// match the domain grid.
[[nodiscard]] SampleRecord encode_sample(const ProblemSpec& spec, const FieldBundle& fields,
                                         const Field& density, const DesignDomain& domain);

/// Every broken SampleRecord invariant, as a readable message. Empty when valid.
[[nodiscard]] std::vector<std::string> record_violations(const SampleRecord& record);

inline constexpr int kComboCount = 9;  // 0..8; 9 (load path) is not defined

/// Ordered channel names for a field combination.
/// 0 baseline x-only, 1 VF+U, 2 VF+W, 3 VF+svm, 4 VF+svm+W, 5 VF+sigma,
/// 6 VF+eps, 7 VF+sigma+eps, 8 VF+U+svm+W. Throws UnknownCombo otherwise.
[[nodiscard]] std::vector<std::string_view> combo_channels(int combo);

[[nodiscard]] std::vector<FloatImage> select_field_combo(const SampleRecord& record, int combo);

[[nodiscard]] Field to_field(const FloatImage& image);
[[nodiscard]] FloatImage to_image(const Field& field);

}  // namespace topo
