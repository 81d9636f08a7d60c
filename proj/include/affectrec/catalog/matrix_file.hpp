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

// AFMX sidecar matrix: "AFMX" | u32 rows | u32 cols | f32 values, row-major.

#include <filesystem>
#include <string>
#include <string_view>

#include "affectrec/binary_io.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec {

inline constexpr std::string_view kMatrixMagic = "AFMX";

inline std::string encode_matrix(const Matrix& m) {
  io::ByteWriter out;
  out.bytes(kMatrixMagic);
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) out.f32(static_cast<float>(m.data()[i]));
  return out.take();
}

inline Matrix decode_matrix(std::string_view bytes, const std::string& context = "matrix") {
  io::ByteReader in(bytes, context);
  if (in.remaining() < 12 || in.bytes(4) != kMatrixMagic) {
    fail(ErrorKind::integrity, context + ": bad magic, expected AFMX");
  }
  const auto rows = in.u32();
  const auto cols = in.u32();
  const auto expected = static_cast<std::uint64_t>(rows) * cols * 4;
  if (in.remaining() != expected) {
    fail(ErrorKind::integrity, context + ": payload size does not match " + std::to_string(rows) +
                                   "x" + std::to_string(cols));
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = in.f32();
  return m;
}

inline void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  io::write_file(path, encode_matrix(m));
}

inline Matrix load_matrix(const std::filesystem::path& path) {
  return decode_matrix(io::read_file(path), path.string());
}

}  // namespace affectrec
