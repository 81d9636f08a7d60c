// Copyright 2026 The affectrec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Little-endian byte buffers, payload checksums and whole-file helpers shared
// by the AFMX / AFNN / AFIX container formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "affectrec/error.hpp"

namespace affectrec::io {

/// FNV-1a, 64-bit.
inline std::uint64_t checksum64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

class ByteWriter {
 public:
  void bytes(std::string_view raw) { buffer_.append(raw); }
  void u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }

  /// u32 byte length followed by the UTF-8 bytes.
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }

  const std::string& data() const noexcept { return buffer_; }
  std::string take() noexcept { return std::move(buffer_); }

 private:
  template <typename T>
  void put_le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }

  std::string buffer_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data, std::string context = "buffer")
      : data_(data), context_(std::move(context)) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }
  std::uint32_t u32() { return get_le<std::uint32_t>(); }
  std::uint64_t u64() { return get_le<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(get_le<std::uint32_t>()); }
  std::string str() {
    const auto n = u32();
    return std::string(bytes(n));
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      fail(ErrorKind::integrity, context_ + ": truncated data");
    }
  }

  template <typename T>
  T get_le() {
    auto raw = bytes(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string context_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open file: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "short write: " + path.string());
}

/// Validates the 4-byte magic and returns the version byte.
inline std::uint8_t expect_header(ByteReader& in, std::string_view magic,
                                  const std::string& context) {
  if (in.remaining() < magic.size() + 1 || in.bytes(magic.size()) != magic) {
    fail(ErrorKind::integrity, context + ": bad magic, expected " + std::string(magic));
  }
  return in.u8();
}

/// Splits off and verifies the trailing u64 checksum; returns the checked payload.
inline std::string_view verify_trailer(std::string_view file, std::size_t payload_begin,
                                       const std::string& context) {
  if (file.size() < payload_begin + 8) fail(ErrorKind::integrity, context + ": truncated");
  const auto payload = file.substr(payload_begin, file.size() - 8 - payload_begin);
  ByteReader tail(file.substr(file.size() - 8), context);
  if (tail.u64() != checksum64(payload)) {
    fail(ErrorKind::integrity, context + ": checksum mismatch");
  }
  return payload;
}

}  // namespace affectrec::io
