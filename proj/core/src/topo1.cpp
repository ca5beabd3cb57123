#include "topo/topo1.hpp"

#include "topo/error.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

namespace topo {

namespace {

constexpr char kMagic[5] = {'T', 'O', 'P', 'O', '1'};

class ByteWriter {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) u8(static_cast<std::uint8_t>(v >> s));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void image(const FloatImage& img) {
    for (Eigen::Index i = 0; i < img.size(); ++i) f32(img.data()[i]);
  }
  std::vector<std::uint8_t>& data() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::TruncatedFile, std::string("file ends inside ") + what);
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return take(1, what)[0]; }
  std::uint16_t u16(const char* what) {
    const auto s = take(2, what);
    return static_cast<std::uint16_t>(s[0] | (s[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    const auto s = take(4, what);
    return static_cast<std::uint32_t>(s[0]) | (static_cast<std::uint32_t>(s[1]) << 8) |
           (static_cast<std::uint32_t>(s[2]) << 16) | (static_cast<std::uint32_t>(s[3]) << 24);
  }
  FloatImage image(int rows, int cols, const char* what) {
    FloatImage img(rows, cols);
    const auto s = take(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 4, what);
    for (Eigen::Index i = 0; i < img.size(); ++i) {
      const auto* b = s.data() + 4 * i;
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                                 (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      img.data()[i] = std::bit_cast<float>(bits);
    }
    return img;
  }
  [[nodiscard]] std::size_t pos() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large buffers.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_topo1(const SampleRecord& rec) {
  const auto rows = rec.target.rows();
  const auto cols = rec.target.cols();
  if (rows < 1 || cols < 1 || rows > 0xffff || cols > 0xffff || rec.channels.size() > 0xffff) {
    throw Error(ErrorCode::InvalidArgument, "record dimensions do not fit TOPO1 u16 fields");
  }
  ByteWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u16(kTopo1Version);
  w.u16(static_cast<std::uint16_t>(rows));
  w.u16(static_cast<std::uint16_t>(cols));
  w.u16(static_cast<std::uint16_t>(rec.channels.size()));
  for (const auto& ch : rec.channels) {
    if (ch.name.empty() || ch.name.size() > 255) {
      throw Error(ErrorCode::InvalidArgument, "channel name must be 1..255 bytes");
    }
    for (char c : ch.name) {
      if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) > 0x7e) {
        throw Error(ErrorCode::InvalidArgument, "channel name must be printable ASCII");
      }
    }
    if (ch.data.rows() != rows || ch.data.cols() != cols) {
      throw Error(ErrorCode::ShapeMismatch, "channel " + ch.name + " shape differs from target");
    }
    w.u8(static_cast<std::uint8_t>(ch.name.size()));
    w.bytes(ch.name.data(), ch.name.size());
    w.image(ch.data);
  }
  w.image(rec.target);
  const std::string meta = nlohmann::json(rec.meta).dump();
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta.data(), meta.size());
  w.u32(crc32(w.data()));
  return std::move(w.data());
}

SampleRecord decode_topo1(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::TruncatedFile, "empty file");
  const std::size_t head = std::min(bytes.size(), sizeof kMagic);
  if (std::memcmp(bytes.data(), kMagic, head) != 0) {
    throw Error(ErrorCode::BadMagic, "not a TOPO1 file");
  }
  ByteReader r(bytes);
  r.take(sizeof kMagic, "magic");
  const auto version = r.u16("header");
  if (version != kTopo1Version) {
    throw Error(ErrorCode::VersionMismatch, "unsupported TOPO1 version " + std::to_string(version));
  }
  const int rows = r.u16("header");
  const int cols = r.u16("header");
  const int nch = r.u16("header");

  SampleRecord rec;
  rec.channels.reserve(static_cast<std::size_t>(nch));
  for (int k = 0; k < nch; ++k) {
    const auto len = r.u8("channel name");
    const auto name = r.take(len, "channel name");
    rec.channels.push_back({std::string(name.begin(), name.end()), r.image(rows, cols, "channel")});
  }
  rec.target = r.image(rows, cols, "target");
  const auto meta_len = r.u32("metadata length");
  const auto meta = r.take(meta_len, "metadata");
  const std::size_t payload = r.pos();
  const auto stored = r.u32("checksum");
  if (r.remaining() != 0) {
    throw Error(ErrorCode::ChecksumMismatch, "trailing bytes after checksum");
  }
  if (stored != crc32(bytes.first(payload))) {
    throw Error(ErrorCode::ChecksumMismatch, "payload CRC32 does not match");
  }
  try {
    rec.meta = nlohmann::json::parse(meta.begin(), meta.end()).get<SampleMeta>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad metadata: ") + e.what());
  }
  return rec;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> buf(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size))) {
    throw Error(ErrorCode::Io, "cannot read " + path.string());
  }
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename into " + path.string() + ": " + ec.message());
}

void write_sample(const SampleRecord& record, const std::filesystem::path& path) {
  write_file_atomic(path, encode_topo1(record));
}

SampleRecord read_sample(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_topo1(bytes);
}

}  // namespace topo
