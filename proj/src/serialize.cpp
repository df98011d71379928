#include "gprbtd/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gprbtd/config.hpp"
#include "gprbtd/core.hpp"

namespace gprbtd {

BinaryWriter::BinaryWriter(ModelKind kind) {
  buf_.append(kModelMagic, sizeof(kModelMagic));
  u32(kModelVersion);
  u32(static_cast<std::uint32_t>(kind));
}

void BinaryWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::f64s(std::span<const double> v) {
  u64(v.size());
  for (double d : v) f64(d);
}

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  buf_.append(s);
}

void BinaryWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw DataError("short write to " + path);
}

BinaryReader::BinaryReader(std::string bytes) : buf_(std::move(bytes)) {
  need(sizeof(kModelMagic));
  if (std::memcmp(buf_.data(), kModelMagic, sizeof(kModelMagic)) != 0)
    throw DataError("model container: bad magic");
  pos_ = sizeof(kModelMagic);
  const std::uint32_t version = u32();
  if (version != kModelVersion)
    throw DataError("model container: unsupported version " + std::to_string(version));
  kind_ = static_cast<ModelKind>(u32());
}

BinaryReader BinaryReader::from_file(const std::string& path) {
  return BinaryReader(read_text_file(path));
}

void BinaryReader::need(std::size_t n) const {
  if (buf_.size() - pos_ < n) throw DataError("model container: truncated");
}

std::uint32_t BinaryReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
  pos_ += 8;
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::vector<double> BinaryReader::f64s() {
  const std::uint64_t n = u64();
  if (n > (buf_.size() - pos_) / 8) throw DataError("model container: truncated");
  std::vector<double> v(n);
  for (auto& d : v) d = f64();
  return v;
}

std::string BinaryReader::str() {
  const std::uint64_t n = u64();
  need(n);
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

}  // namespace gprbtd
