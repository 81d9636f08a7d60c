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

// Valence-arousal coordinates, affective distance and kernel, emotion-label
// conversion through a word-level lexicon, and dataset curation rules.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>

#include "affectrec/error.hpp"

namespace affectrec {

/// A point in affective space. Both components live in [-1, 1].
class VAVector {
 public:
  constexpr VAVector() = default;
  VAVector(double valence, double arousal) : valence_(valence), arousal_(arousal) {
    auto ok = [](double x) { return std::isfinite(x) && x >= -1.0 && x <= 1.0; };
    if (!ok(valence) || !ok(arousal)) {
      std::ostringstream msg;
      msg << "V-A vector out of range: (" << valence << ", " << arousal << ")";
      fail(ErrorKind::invalid_parameter, msg.str());
    }
  }

  /// Clamps into [-1, 1]^2; non-finite input is still rejected.
  static VAVector clamped(double valence, double arousal) {
    return {std::clamp(valence, -1.0, 1.0), std::clamp(arousal, -1.0, 1.0)};
  }

  constexpr double valence() const noexcept { return valence_; }
  constexpr double arousal() const noexcept { return arousal_; }

  friend bool operator==(const VAVector&, const VAVector&) = default;

 private:
  double valence_ = 0.0;
  double arousal_ = 0.0;
};

inline double va_distance(const VAVector& a, const VAVector& b) noexcept {
  const double dv = a.valence() - b.valence();
  const double da = a.arousal() - b.arousal();
  return std::sqrt(dv * dv + da * da);
}

/// exp(-d^2 / (2 sigma^2)).
inline double gaussian_similarity(double distance, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::invalid_parameter,
          "gaussian_similarity: sigma must be positive");
  require(distance >= 0.0, ErrorKind::invalid_parameter,
          "gaussian_similarity: distance must be nonnegative");
  return std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

using EmotionIntensityMap = std::map<std::string, double>;

/// Word -> (valence, arousal) in [-1, 1].
class VALexicon {
 public:
  VALexicon() = default;
  explicit VALexicon(std::unordered_map<std::string, VAVector> entries)
      : entries_(std::move(entries)) {}

  void insert(const std::string& word, VAVector va) { entries_.insert_or_assign(word, va); }

  const VAVector* find(const std::string& word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return entries_.size(); }

  /// Maps the lexicon's published [0, 1] scale onto [-1, 1].
  static double from_unit_scale(double x) { return 2.0 * x - 1.0; }

  /// Parses `word<TAB>valence<TAB>arousal[<TAB>...]` lines with values in [0, 1].
  /// A non-numeric first line is treated as a header.
  static VALexicon parse(std::istream& in, const std::string& source = "lexicon") {
    VALexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string word, v_text, a_text;
      if (!std::getline(fields, word, '\t') || !std::getline(fields, v_text, '\t') ||
          !std::getline(fields, a_text, '\t')) {
        fail(ErrorKind::parse, source + ":" + std::to_string(line_no) +
                                   ": expected word<TAB>valence<TAB>arousal");
      }
      double v = 0.0, a = 0.0;
      try {
        std::size_t used_v = 0, used_a = 0;
        v = std::stod(v_text, &used_v);
        a = std::stod(a_text, &used_a);
        if (used_v != v_text.size() || used_a != a_text.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        if (line_no == 1) continue;
        fail(ErrorKind::parse, source + ":" + std::to_string(line_no) + ": non-numeric score");
      }
      if (!(v >= 0.0 && v <= 1.0 && a >= 0.0 && a <= 1.0)) {
        fail(ErrorKind::parse,
             source + ":" + std::to_string(line_no) + ": score outside [0, 1] for '" + word + "'");
      }
      lex.insert(word, VAVector(from_unit_scale(v), from_unit_scale(a)));
    }
    return lex;
  }

  static VALexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open lexicon: " + path.string());
    return parse(in, path.string());
  }

 private:
  std::unordered_map<std::string, VAVector> entries_;
};

/// Intensity-weighted mean of the lexicon coordinates of each emotion word.
inline VAVector emotions_to_va(const EmotionIntensityMap& labels, const VALexicon& lexicon) {
  require(!labels.empty(), ErrorKind::degenerate_label, "emotion map is empty");
  double total = 0.0;
  for (const auto& [word, intensity] : labels) {
    require(std::isfinite(intensity) && intensity >= 0.0, ErrorKind::degenerate_label,
            "emotion intensity must be finite and nonnegative: " + word);
    require(lexicon.find(word) != nullptr, ErrorKind::missing_lexicon_entry,
            "no lexicon entry for emotion '" + word + "'");
    total += intensity;
  }
  require(total > 0.0, ErrorKind::degenerate_label, "emotion intensities sum to zero");

  double valence = 0.0, arousal = 0.0;
  for (const auto& [word, intensity] : labels) {
    const double w = intensity / total;
    const VAVector& va = *lexicon.find(word);
    valence += w * va.valence();
    arousal += w * va.arousal();
  }
  return VAVector::clamped(valence, arousal);
}

struct StabilityStats {
  double valence_sd = 0.0;
  double arousal_sd = 0.0;

  friend bool operator==(const StabilityStats&, const StabilityStats&) = default;
};

inline constexpr double kMaxValenceSd = 1.75;
inline constexpr double kMaxArousalSd = 1.0;

/// Keeps a song unless its annotation spread is strictly above either threshold.
inline bool deam_stability_filter(const StabilityStats& stats) noexcept {
  return stats.valence_sd <= kMaxValenceSd && stats.arousal_sd <= kMaxArousalSd;
}

/// Positive valence and non-neutral arousal.
inline bool therapeutic_curation_filter(const VAVector& va) noexcept {
  return va.valence() > 0.1 && (va.arousal() <= -0.1 || va.arousal() >= 0.1);
}

/// Per-song annotations on the 1..9 scale to [-1, 1].
inline double deam_to_unit_range(double x) { return (x - 5.0) / 4.0; }

}  // namespace affectrec
