#pragma once

#include "topo/topo1.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <sstream>
#include <string>

namespace topo::cli {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
  write_file_atomic(path, std::span<const std::uint8_t>(p, text.size()));
}

template <typename Writer>
void write_text_with(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream os;
  os.precision(17);
  writer(os);
  write_text(path, os.str());
}

}  // namespace topo::cli
