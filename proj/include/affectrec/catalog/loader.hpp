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

// JSON-lines feature files.
//
// One object per line:
//   id, modality ("music" | "painting"),
//   valence, arousal                 explicit coordinates (win over emotions)
//   va_scale                         "unit" (default, already in [-1, 1]) or "deam" (1..9)
//   emotions                         word -> intensity, converted through a lexicon
//   features | features_ref          inline numbers, or {"path", "row"} into an AFMX sidecar
//   text_features                    optional second stream
//   valence_sd, arousal_sd           optional annotation spread (stability filter)
//   metadata                         string -> string

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "affectrec/affect.hpp"
#include "affectrec/binary_io.hpp"
#include "affectrec/catalog/matrix_file.hpp"
#include "affectrec/catalog/record.hpp"

namespace affectrec {

namespace detail {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

class SidecarCache {
 public:
  explicit SidecarCache(std::filesystem::path base) : base_(std::move(base)) {}

  std::vector<double> row(const std::string& rel, std::int64_t row, const std::string& where) {
    auto it = cache_.find(rel);
    if (it == cache_.end()) {
      it = cache_.emplace(rel, load_matrix(base_ / rel)).first;
    }
    const Matrix& m = it->second;
    require(row >= 0 && row < m.rows(), ErrorKind::parse,
            where + ": features_ref row " + std::to_string(row) + " out of range for " + rel);
    const auto r = m.row(row);
    return std::vector<double>(r.data(), r.data() + r.size());
  }

 private:
  std::filesystem::path base_;
  std::map<std::string, Matrix> cache_;
};

inline std::vector<double> number_array(const nlohmann::json& j, const std::string& where) {
  require(j.is_array(), ErrorKind::parse, where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    require(x.is_number(), ErrorKind::parse, where + ": non-numeric array element");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

struct LoadOptions {
  const VALexicon* lexicon = nullptr;
  bool apply_stability_filter = true;
};

/// Parses one JSON-lines record. Returns nullopt when the stability filter drops it.
inline std::optional<FeatureRecord> parse_record(const nlohmann::json& j, const std::string& where,
                                                 detail::SidecarCache& sidecars,
                                                 const LoadOptions& options) {
  require(j.is_object(), ErrorKind::parse, where + ": expected a JSON object");
  FeatureRecord r;
  require(j.contains("id") && j["id"].is_string(), ErrorKind::parse, where + ": missing string 'id'");
  r.id = j["id"].get<std::string>();
  const std::string at = where + " (" + r.id + ")";
  require(j.contains("modality") && j["modality"].is_string(), ErrorKind::parse,
          at + ": missing 'modality'");
  r.modality = parse_modality(j["modality"].get<std::string>());

  if (j.contains("features")) {
    r.features = detail::number_array(j["features"], at + " features");
  } else if (j.contains("features_ref")) {
    const auto& ref = j["features_ref"];
    require(ref.is_object() && ref.contains("path") && ref["path"].is_string() &&
                ref.contains("row") && ref["row"].is_number_integer(),
            ErrorKind::parse, at + ": features_ref needs string 'path' and integer 'row'");
    r.features = sidecars.row(ref["path"].get<std::string>(), ref["row"].get<std::int64_t>(), at);
  } else {
    fail(ErrorKind::parse, at + ": needs 'features' or 'features_ref'");
  }
  if (j.contains("text_features")) r.text_features = detail::number_array(j["text_features"], at + " text_features");

  if (j.contains("valence_sd") || j.contains("arousal_sd")) {
    require(j.contains("valence_sd") && j.contains("arousal_sd") && j["valence_sd"].is_number() &&
                j["arousal_sd"].is_number(),
            ErrorKind::parse, at + ": valence_sd and arousal_sd must both be numbers");
    StabilityStats s{j["valence_sd"].get<double>(), j["arousal_sd"].get<double>()};
    require(std::isfinite(s.valence_sd) && std::isfinite(s.arousal_sd) && s.valence_sd >= 0 &&
                s.arousal_sd >= 0,
            ErrorKind::parse, at + ": standard deviations must be finite and nonnegative");
    r.stability = s;
  }

  const bool has_va = j.contains("valence") && j.contains("arousal");
  if (has_va) {
    require(j["valence"].is_number() && j["arousal"].is_number(), ErrorKind::parse,
            at + ": valence/arousal must be numbers");
    double v = j["valence"].get<double>(), a = j["arousal"].get<double>();
    const std::string scale = j.value("va_scale", std::string("unit"));
    if (scale == "deam") {
      v = deam_to_unit_range(v);
      a = deam_to_unit_range(a);
    } else {
      require(scale == "unit", ErrorKind::parse, at + ": unknown va_scale '" + scale + "'");
    }
    try {
      r.va = VAVector(v, a);
    } catch (const Error& e) {
      fail(ErrorKind::parse, at + ": " + e.what());
    }
  } else if (j.contains("emotions")) {
    require(j["emotions"].is_object(), ErrorKind::parse, at + ": 'emotions' must be an object");
    if (options.lexicon == nullptr) {
      fail(ErrorKind::missing_va, at + ": record carries emotions but no lexicon was provided");
    }
    EmotionIntensityMap labels;
    for (const auto& [word, intensity] : j["emotions"].items()) {
      require(intensity.is_number(), ErrorKind::parse, at + ": intensity of '" + word + "' is not a number");
      labels[word] = intensity.get<double>();
    }
    r.va = emotions_to_va(labels, *options.lexicon);
  } else {
    fail(ErrorKind::missing_va, at + ": missing valence/arousal");
  }

  if (j.contains("metadata")) {
    require(j["metadata"].is_object(), ErrorKind::parse, at + ": 'metadata' must be an object");
    for (const auto& [key, value] : j["metadata"].items()) {
      r.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }

  if (options.apply_stability_filter && r.stability && !deam_stability_filter(*r.stability)) {
    return std::nullopt;
  }
  return r;
}

struct RecordFile {
  std::vector<FeatureRecord> records;
  std::size_t read = 0;
  std::size_t dropped_unstable = 0;
  std::string checksum;
};

inline RecordFile read_records(const std::filesystem::path& path, Modality expected,
                               const LoadOptions& options = {}) {
  const std::string text = io::read_file(path);
  RecordFile out;
  out.checksum = detail::hex64(io::checksum64(text));
  detail::SidecarCache sidecars(path.parent_path());
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::parse, where + ": " + e.what());
    }
    ++out.read;
    auto record = parse_record(j, where, sidecars, options);
    if (!record) {
      ++out.dropped_unstable;
      continue;
    }
    require(record->modality == expected, ErrorKind::parse,
            where + ": record '" + record->id + "' is " + std::string(to_string(record->modality)) +
                ", file holds " + std::string(to_string(expected)));
    out.records.push_back(std::move(*record));
  }
  return out;
}

inline Catalog load_catalog(const std::filesystem::path& music_path,
                            const std::filesystem::path& paintings_path,
                            const LoadOptions& options = {}) {
  auto music = read_records(music_path, Modality::music, options);
  auto paintings = read_records(paintings_path, Modality::painting, options);
  CatalogProvenance prov;
  prov.source = music_path.string() + ";" + paintings_path.string();
  prov.music_read = music.read;
  prov.paintings_read = paintings.read;
  prov.dropped_unstable = music.dropped_unstable + paintings.dropped_unstable;
  prov.music_checksum = music.checksum;
  prov.paintings_checksum = paintings.checksum;
  return Catalog(std::move(music.records), std::move(paintings.records), std::move(prov));
}

inline nlohmann::json record_to_json(const FeatureRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["modality"] = std::string(to_string(r.modality));
  j["valence"] = r.va.valence();
  j["arousal"] = r.va.arousal();
  j["features"] = r.features;
  if (!r.text_features.empty()) j["text_features"] = r.text_features;
  if (r.stability) {
    j["valence_sd"] = r.stability->valence_sd;
    j["arousal_sd"] = r.stability->arousal_sd;
  }
  if (!r.metadata.empty()) j["metadata"] = r.metadata;
  return j;
}

inline std::string records_to_jsonl(const std::vector<FeatureRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

inline void save_records(const std::filesystem::path& path, const std::vector<FeatureRecord>& records) {
  io::write_file(path, records_to_jsonl(records));
}

}  // namespace affectrec
