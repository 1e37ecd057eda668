#pragma once

#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>

namespace msk {

// Append-only little-endian encoder. The sink form lets callers stream or
// count bytes without materializing a buffer.
class ByteWriter {
 public:
  using Sink = std::function<void(const void*, std::size_t)>;

  explicit ByteWriter(Sink sink) : sink_(std::move(sink)) {}

  static ByteWriter appending_to(std::string& out) {
    return ByteWriter([&out](const void* p, std::size_t len) {
      out.append(static_cast<const char*>(p), len);
    });
  }

  static ByteWriter counting(std::size_t& count) {
    return ByteWriter([&count](const void*, std::size_t len) { count += len; });
  }

  void bytes(const void* p, std::size_t len) {
    sink_(p, len);
    written_ += len;
  }

  void u8(std::uint8_t v) { bytes(&v, 1); }

  void u32(std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(b, 4);
  }

  void u64(std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(b, 8);
  }

  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }

  std::size_t written() const { return written_; }

 private:
  Sink sink_;
  std::size_t written_ = 0;
};

class ByteReader {
 public:
  ByteReader(const void* data, std::size_t size)
      : data_(static_cast<const std::uint8_t*>(data)), size_(size) {}

  explicit ByteReader(const std::string& buf) : ByteReader(buf.data(), buf.size()) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw std::runtime_error("binio: truncated input");
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace msk
