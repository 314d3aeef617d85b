/*
 * Copyright 2026 The HybridTree Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HYBRIDTREE_COMMON_BYTES_HPP_
#define HYBRIDTREE_COMMON_BYTES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace hybridtree {

// Big-endian binary encoder for wire frames.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void i16(std::int16_t v) { put(static_cast<std::uint16_t>(v), 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v);
  void bytes(std::span<const std::uint8_t> data);
  // u32 length, then the raw bytes.
  void blob(std::span<const std::uint8_t> data);
  void str(const std::string& s);
  // Non-negative integer: u32 length, then big-endian magnitude.
  void mpz(const mpz_class& v);

  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> release() { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  std::vector<std::uint8_t> buf_;
};

// Decoder matching ByteWriter; throws ProtocolError on truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::int16_t i16() { return static_cast<std::int16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64();
  std::span<const std::uint8_t> bytes(std::size_t n);
  std::vector<std::uint8_t> blob();
  std::string str();
  mpz_class mpz();

  std::size_t remaining() const { return data_.size() - pos_; }
  // Throws unless every byte was consumed.
  void expect_end() const;

 private:
  std::uint64_t get(int width);
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace hybridtree

#endif  // HYBRIDTREE_COMMON_BYTES_HPP_
