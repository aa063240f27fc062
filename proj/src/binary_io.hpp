// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Little-endian primitive I/O shared by the on-disk index and cache formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace reclink::detail {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  }

  template <typename T>
  void uint(T value) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<unsigned char>(value >> (8 * i));
    }
    bytes(buf, sizeof(T));
  }

  void u32(std::uint32_t v) { uint(v); }
  void u64(std::uint64_t v) { uint(v); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

/// Reader that reports truncation instead of throwing; callers decide the
/// error kind.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  bool ok() const noexcept { return ok_; }

  bool bytes(void* data, std::size_t size) {
    if (!ok_) return false;
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) ok_ = false;
    return ok_;
  }

  template <typename T>
  T uint() {
    unsigned char buf[sizeof(T)] = {};
    bytes(buf, sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(buf[i]) << (8 * i);
    return value;
  }

  std::uint32_t u32() { return uint<std::uint32_t>(); }
  std::uint64_t u64() { return uint<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  /// Length-prefixed string; refuses lengths above `max_len`.
  std::string str(std::uint32_t max_len = 1u << 24) {
    const std::uint32_t len = u32();
    if (!ok_ || len > max_len) {
      ok_ = false;
      return {};
    }
    std::string s(len, '\0');
    bytes(s.data(), len);
    return s;
  }

  /// True when no bytes remain.
  bool at_end() {
    return ok_ && in_.peek() == std::char_traits<char>::eof();
  }

 private:
  std::istream& in_;
  bool ok_ = true;
};

}  // namespace reclink::detail
