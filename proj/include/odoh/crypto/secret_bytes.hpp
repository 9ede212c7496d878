#pragma once

#include "odoh/bytes.hpp"

namespace odoh {

/// Owning byte buffer for key material; wiped on destruction and reassignment.
class SecretBytes {
 public:
  SecretBytes() = default;
  explicit SecretBytes(Bytes b) : data_(std::move(b)) {}
  explicit SecretBytes(ByteView b) : data_(b.begin(), b.end()) {}
  SecretBytes(const SecretBytes&) = default;
  SecretBytes(SecretBytes&& other) noexcept : data_(std::move(other.data_)) { other.data_.clear(); }
  SecretBytes& operator=(const SecretBytes& other);
  SecretBytes& operator=(SecretBytes&& other) noexcept;
  ~SecretBytes();

  [[nodiscard]] ByteView view() const { return data_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] bool empty() const { return data_.empty(); }
  [[nodiscard]] const std::uint8_t* data() const { return data_.data(); }

  friend bool operator==(const SecretBytes& a, const SecretBytes& b);

 private:
  void wipe();

  Bytes data_;
};

}  // namespace odoh
