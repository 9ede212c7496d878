#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odoh/error.hpp"

namespace odoh {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return {v.begin(), v.end()};
}

inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

std::string to_hex(ByteView b);

/// Throws Error{InvalidArgument} on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

Bytes concat(ByteView a, ByteView b);

/// Big-endian appender for wire encodings.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u16(std::uint16_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& raw(ByteView v);
  /// Writes a 16-bit length followed by the bytes. Throws if |v| > 0xFFFF.
  ByteWriter& prefixed16(ByteView v);

  [[nodiscard]] std::size_t size() const { return out_.size(); }
  [[nodiscard]] const Bytes& bytes() const& { return out_; }
  [[nodiscard]] Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

/// Big-endian cursor over a borrowed buffer. Every read is bounds-checked and
/// throws Error with the code given at construction on underrun.
class ByteReader {
 public:
  ByteReader(ByteView data, ErrorCode on_underrun);

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  ByteView take(std::size_t n);
  ByteView prefixed16();

  void seek(std::size_t pos);
  [[nodiscard]] std::size_t position() const { return pos_; }
  [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }
  [[nodiscard]] bool empty() const { return remaining() == 0; }
  [[nodiscard]] ByteView data() const { return data_; }

 private:
  [[noreturn]] void underrun() const;

  ByteView data_;
  std::size_t pos_ = 0;
  ErrorCode on_underrun_;
};

}  // namespace odoh
