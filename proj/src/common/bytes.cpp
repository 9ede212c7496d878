#include "odoh/bytes.hpp"

#include "odoh/error.hpp"

namespace odoh {

std::string to_hex(ByteView b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto c : b) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0x0F]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::InvalidArgument, "invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Bytes concat(ByteView a, ByteView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  u16(static_cast<std::uint16_t>(v >> 16));
  return u16(static_cast<std::uint16_t>(v));
}

ByteWriter& ByteWriter::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteWriter& ByteWriter::prefixed16(ByteView v) {
  if (v.size() > 0xFFFF) {
    throw Error(ErrorCode::InvalidArgument, "field exceeds 16-bit length prefix");
  }
  u16(static_cast<std::uint16_t>(v.size()));
  return raw(v);
}

ByteReader::ByteReader(ByteView data, ErrorCode on_underrun)
    : data_(data), on_underrun_(on_underrun) {}

void ByteReader::underrun() const {
  throw Error(on_underrun_, "truncated input");
}

std::uint8_t ByteReader::u8() {
  if (remaining() < 1) underrun();
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  if (remaining() < 2) underrun();
  auto v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  std::uint32_t hi = u16();
  return (hi << 16) | u16();
}

ByteView ByteReader::take(std::size_t n) {
  if (remaining() < n) underrun();
  auto v = data_.subspan(pos_, n);
  pos_ += n;
  return v;
}

ByteView ByteReader::prefixed16() { return take(u16()); }

void ByteReader::seek(std::size_t pos) {
  if (pos > data_.size()) underrun();
  pos_ = pos;
}

}  // namespace odoh
