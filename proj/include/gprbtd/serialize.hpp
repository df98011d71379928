#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gprbtd {

// Versioned little-endian model container:
//   "GPRBTDM\0" | u32 version | u32 kind | payload
// Payload fields are u64 counts, f64 values and length-prefixed strings.
inline constexpr char kModelMagic[8] = {'G', 'P', 'R', 'B', 'T', 'D', 'M', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

enum class ModelKind : std::uint32_t {
  svm = 1,
  forest = 2,
  prototypes = 3,
  standardizer = 4,
  discriminator = 16,
};

class BinaryWriter {
 public:
  explicit BinaryWriter(ModelKind kind);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void f64s(std::span<const double> v);
  void str(std::string_view s);
  const std::string& bytes() const { return buf_; }
  void write_file(const std::string& path) const;

 private:
  std::string buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string bytes);
  static BinaryReader from_file(const std::string& path);
  ModelKind kind() const { return kind_; }
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  std::vector<double> f64s();
  std::string str();
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const;
  std::string buf_;
  std::size_t pos_ = 0;
  ModelKind kind_{};
};

}  // namespace gprbtd
