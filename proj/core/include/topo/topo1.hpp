#pragma once

#include "topo/record.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace topo {

/// TOPO1 container, all integers little-endian:
///
///   "TOPO1"                      5 bytes magic
///   version                      u16 (= 1)
///   nely, nelx, channel_count    u16 each
///   per channel:
///     name_len                   u8
///     name                       ASCII, name_len bytes
///     data                       nely*nelx f32, row-major
///   target                       nely*nelx f32, row-major
///   meta_len                     u32
///   meta                         canonical JSON (sorted keys, compact), meta_len bytes
///   crc32                        u32, IEEE CRC-32 of every preceding byte
inline constexpr std::uint16_t kTopo1Version = 1;

[[nodiscard]] std::vector<std::uint8_t> encode_topo1(const SampleRecord& record);

/// Throws BadMagic, VersionMismatch, TruncatedFile or ChecksumMismatch.
[[nodiscard]] SampleRecord decode_topo1(std::span<const std::uint8_t> bytes);

/// Writes to a temporary sibling and renames into place.
void write_sample(const SampleRecord& record, const std::filesystem::path& path);
[[nodiscard]] SampleRecord read_sample(const std::filesystem::path& path);

[[nodiscard]] std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

/// Atomically replaces `path` with `bytes`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
[[nodiscard]] std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace topo
