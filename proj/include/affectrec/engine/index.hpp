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

// Precomputed item x painting matrices and their AFIX container:
//   "AFIX" | u8 version | u8 engine | u8 semantics | u32 rows | u32 cols
//   | row ids | col ids (u32 length-prefixed UTF-8 each)
//   | build info (u32 length-prefixed JSON) | f32 values, row-major
//   | u64 FNV-1a checksum of every byte after the version.

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "affectrec/binary_io.hpp"
#include "affectrec/error.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec {

enum class Engine : std::uint8_t { mozart = 0, haydn = 1, salieri = 2, visual = 3 };
enum class Semantics : std::uint8_t { distance = 0, similarity = 1 };

inline constexpr Engine kAllEngines[] = {Engine::mozart, Engine::haydn, Engine::salieri, Engine::visual};

constexpr std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::mozart: return "mozart";
    case Engine::haydn: return "haydn";
    case Engine::salieri: return "salieri";
    case Engine::visual: return "visual";
  }
  return "unknown";
}

constexpr std::string_view to_string(Semantics s) {
  return s == Semantics::distance ? "distance" : "similarity";
}

inline Engine parse_engine(std::string_view text) {
  for (Engine e : kAllEngines) {
    if (to_string(e) == text) return e;
  }
  fail(ErrorKind::invalid_parameter, "unknown engine '" + std::string(text) + "'");
}

class SimilarityIndex {
 public:
  SimilarityIndex() = default;
  SimilarityIndex(Engine engine, Semantics semantics, std::vector<std::string> row_ids,
                  std::vector<std::string> col_ids, Matrix values,
                  nlohmann::json build_info = nlohmann::json::object())
      : engine_(engine),
        semantics_(semantics),
        row_ids_(std::move(row_ids)),
        col_ids_(std::move(col_ids)),
        values_(std::move(values)),
        build_info_(std::move(build_info)) {
    validate();
  }

  Engine engine() const noexcept { return engine_; }
  Semantics semantics() const noexcept { return semantics_; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
  const std::vector<std::string>& col_ids() const noexcept { return col_ids_; }
  const Matrix& values() const noexcept { return values_; }
  const nlohmann::json& build_info() const noexcept { return build_info_; }

  std::optional<Eigen::Index> row_of(const std::string& id) const {
    auto it = row_lookup_.find(id);
    if (it == row_lookup_.end()) return std::nullopt;
    return it->second;
  }

  /// Dissimilarity used for ranking: the stored value for distance indices,
  /// 1 - similarity otherwise.
  double dissimilarity(Eigen::Index row, Eigen::Index col) const {
    const double v = values_(row, col);
    return semantics_ == Semantics::distance ? v : 1.0 - v;
  }

  friend bool operator==(const SimilarityIndex& a, const SimilarityIndex& b) {
    return a.engine_ == b.engine_ && a.semantics_ == b.semantics_ && a.row_ids_ == b.row_ids_ &&
           a.col_ids_ == b.col_ids_ && a.values_ == b.values_ && a.build_info_ == b.build_info_;
  }

 private:
  void validate() {
    require(values_.rows() == static_cast<Eigen::Index>(row_ids_.size()) &&
                values_.cols() == static_cast<Eigen::Index>(col_ids_.size()),
            ErrorKind::shape, "index matrix shape does not match its id axes");
    require(values_.allFinite(), ErrorKind::integrity, "index contains non-finite values");
    if (semantics_ == Semantics::distance) {
      require(values_.size() == 0 || values_.minCoeff() >= 0.0, ErrorKind::integrity,
              "distance index contains negative values");
    } else if (values_.size() > 0) {
      // Cosine values can overshoot [-1, 1] by rounding; clamp.
      values_ = values_.cwiseMax(-1.0).cwiseMin(1.0);
    }
    for (std::size_t i = 0; i < row_ids_.size(); ++i) {
      if (!row_lookup_.emplace(row_ids_[i], static_cast<Eigen::Index>(i)).second) {
        fail(ErrorKind::duplicate_id, "duplicate row id '" + row_ids_[i] + "' in index");
      }
    }
  }

  Engine engine_ = Engine::haydn;
  Semantics semantics_ = Semantics::distance;
  std::vector<std::string> row_ids_;
  std::vector<std::string> col_ids_;
  Matrix values_;
  nlohmann::json build_info_ = nlohmann::json::object();
  std::unordered_map<std::string, Eigen::Index> row_lookup_;
};

inline constexpr std::string_view kIndexMagic = "AFIX";
inline constexpr std::uint8_t kIndexVersion = 1;

inline std::string encode_index(const SimilarityIndex& index) {
  io::ByteWriter payload;
  payload.u8(static_cast<std::uint8_t>(index.engine()));
  payload.u8(static_cast<std::uint8_t>(index.semantics()));
  payload.u32(static_cast<std::uint32_t>(index.row_ids().size()));
  payload.u32(static_cast<std::uint32_t>(index.col_ids().size()));
  for (const auto& id : index.row_ids()) payload.str(id);
  for (const auto& id : index.col_ids()) payload.str(id);
  payload.str(index.build_info().dump());
  const Matrix& v = index.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) payload.f32(static_cast<float>(v.data()[i]));

  io::ByteWriter file;
  file.bytes(kIndexMagic);
  file.u8(kIndexVersion);
  file.bytes(payload.data());
  file.u64(io::checksum64(payload.data()));
  return file.take();
}

inline SimilarityIndex decode_index(std::string_view bytes, const std::string& context = "index") {
  io::ByteReader header(bytes, context);
  const auto version = io::expect_header(header, kIndexMagic, context);
  require(version == kIndexVersion, ErrorKind::integrity,
          context + ": unsupported version " + std::to_string(version));
  io::ByteReader in(io::verify_trailer(bytes, header.position(), context), context);
  const auto engine = in.u8();
  const auto semantics = in.u8();
  require(engine <= static_cast<std::uint8_t>(Engine::visual), ErrorKind::integrity, context + ": bad engine tag");
  require(semantics <= static_cast<std::uint8_t>(Semantics::similarity), ErrorKind::integrity,
          context + ": bad semantics tag");
  const auto rows = in.u32();
  const auto cols = in.u32();
  require(static_cast<std::uint64_t>(rows) * cols * 4 <= in.remaining(), ErrorKind::integrity,
          context + ": dimensions exceed payload");
  std::vector<std::string> row_ids(rows), col_ids(cols);
  for (auto& id : row_ids) id = in.str();
  for (auto& id : col_ids) id = in.str();
  nlohmann::json info;
  try {
    info = nlohmann::json::parse(in.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::integrity, context + ": bad build info: " + e.what());
  }
  Matrix values(rows, cols);
  for (Eigen::Index i = 0; i < values.size(); ++i) values.data()[i] = in.f32();
  require(in.remaining() == 0, ErrorKind::integrity, context + ": trailing bytes");
  return SimilarityIndex(static_cast<Engine>(engine), static_cast<Semantics>(semantics),
                         std::move(row_ids), std::move(col_ids), std::move(values), std::move(info));
}

inline void save_index(const std::filesystem::path& path, const SimilarityIndex& index) {
  io::write_file(path, encode_index(index));
}

inline SimilarityIndex load_index(const std::filesystem::path& path) {
  return decode_index(io::read_file(path), path.string());
}

/// Inspection mirror: header row of column ids, then one line per row id.
inline std::string index_to_csv(const SimilarityIndex& index) {
  std::ostringstream out;
  out.precision(9);
  out << "id";
  for (const auto& c : index.col_ids()) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < index.row_ids().size(); ++i) {
    out << index.row_ids()[i];
    for (Eigen::Index j = 0; j < index.values().cols(); ++j) {
      out << ',' << index.values()(static_cast<Eigen::Index>(i), j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace affectrec
