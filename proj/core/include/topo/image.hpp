#pragma once

#include "topo/types.hpp"

#include <filesystem>

namespace topo {

/// Binary 8-bit PGM. Values are mapped linearly from [lo, hi] to [0, 255];
/// with `invert` high values render dark (solid material black).
void write_pgm(const std::filesystem::path& path, const Field& image, double lo, double hi,
               bool invert = false);

/// Scales to the image's own min/max.
void write_pgm_autoscale(const std::filesystem::path& path, const Field& image);

/// Density rendering: 1 -> black, 0 -> white.
void write_density_pgm(const std::filesystem::path& path, const Field& density);

}  // namespace topo
