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

#include "hybridtree/common/bytes.hpp"

#include <bit>
#include <cstring>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(std::span<const std::uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
}

void ByteWriter::blob(std::span<const std::uint8_t> data) {
  u32(static_cast<std::uint32_t>(data.size()));
  bytes(data);
}

void ByteWriter::str(const std::string& s) {
  blob({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

void ByteWriter::mpz(const mpz_class& v) {
  if (sgn(v) < 0) throw ProtocolError("cannot encode a negative integer");
  const std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  const std::size_t len = sgn(v) == 0 ? 0 : n;
  u32(static_cast<std::uint32_t>(len));
  const std::size_t at = buf_.size();
  buf_.resize(at + len);
  if (len > 0) {
    std::size_t written = 0;
    mpz_export(buf_.data() + at, &written, 1, 1, 1, 0, v.get_mpz_t());
  }
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  if (remaining() < n) throw ProtocolError("truncated frame");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::vector<std::uint8_t> ByteReader::blob() {
  auto b = bytes(u32());
  return {b.begin(), b.end()};
}

std::string ByteReader::str() {
  auto b = bytes(u32());
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

mpz_class ByteReader::mpz() {
  auto b = bytes(u32());
  mpz_class v;
  if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return v;
}

void ByteReader::expect_end() const {
  if (remaining() != 0) throw ProtocolError("trailing bytes in frame");
}

std::uint64_t ByteReader::get(int width) {
  auto b = bytes(static_cast<std::size_t>(width));
  std::uint64_t v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * data.size());
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  if (hex.size() % 2) throw ParseError("odd-length hex string", 0);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ParseError("invalid hex digit", 0);
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 |
                                       nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace hybridtree
