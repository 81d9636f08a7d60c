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

// Fixtures and independent oracles shared by the unit and acceptance tests.
// Oracles recompute from raw inputs with plain loops; they never call the
// library routine they are checking.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "affectrec/affectrec.hpp"

namespace testing_support {

namespace fs = std::filesystem;
using affectrec::Matrix;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "affectrec-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Kind of the affectrec::Error thrown by fn; records a failure if none is thrown.
template <typename Fn>
std::optional<affectrec::ErrorKind> kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const affectrec::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

// Message of the affectrec::Error thrown by fn, or empty.
template <typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const affectrec::Error& e) {
    return e.what();
  }
  return {};
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs a command through the shell; stdout and stderr are captured separately.
inline RunResult run_command(const std::string& command) {
  TempDir tmp;
  const auto out_path = tmp / "stdout", err_path = tmp / "stderr";
  const std::string full = command + " >" + out_path.string() + " 2>" + err_path.string();
  const int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out_path);
  r.err = read_text(err_path);
  return r;
}

inline std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

/// Random catalog with uniform V-A in [-1, 1]^2 and small random features.
inline affectrec::Catalog random_catalog(std::uint64_t seed, int n_music, int n_paintings, int dim = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto make = [&](affectrec::Modality m, int n, const char* prefix) {
    std::vector<affectrec::FeatureRecord> out;
    for (int i = 0; i < n; ++i) {
      affectrec::FeatureRecord r;
      char id[32];
      std::snprintf(id, sizeof id, "%s%04d", prefix, i);
      r.id = id;
      r.modality = m;
      for (int k = 0; k < dim; ++k) r.features.push_back(unit(rng));
      const double v = unit(rng);
      const double a = unit(rng);
      r.va = affectrec::VAVector(v, a);
      out.push_back(std::move(r));
    }
    return out;
  };
  auto music = make(affectrec::Modality::music, n_music, "m");
  auto paintings = make(affectrec::Modality::painting, n_paintings, "p");
  return affectrec::Catalog(std::move(music), std::move(paintings));
}

/// sqrt((v1 - v2)^2 + (a1 - a2)^2), written out.
inline double oracle_va_distance(double v1, double a1, double v2, double a2) {
  const double dv = v1 - v2;
  const double da = a1 - a2;
  return std::sqrt(dv * dv + da * da);
}

/// Brute-force weighted ranking. `dist(row_id, col_id)` supplies the
/// per-pair dissimilarity; accumulation runs in rating order.
template <typename Dist>
std::vector<std::pair<std::string, double>> oracle_ranking(
    const std::vector<affectrec::PreferenceRating>& ratings, const std::vector<std::string>& candidates,
    Dist dist) {
  double total = 0.0;
  for (const auto& r : ratings) {
    if (!r.is_attention_check) total += r.rating;
  }
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& c : candidates) {
    double agg = 0.0;
    for (const auto& r : ratings) {
      if (r.is_attention_check) continue;
      agg += (r.rating / total) * dist(r.item_id, c);
    }
    scored.emplace_back(c, agg);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first < y.first;
  });
  return scored;
}

inline std::vector<affectrec::PreferenceRating> random_ratings(std::mt19937_64& rng,
                                                               const std::vector<std::string>& pool,
                                                               std::size_t count) {
  std::vector<std::string> chosen;
  std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), static_cast<std::ptrdiff_t>(count), rng);
  std::uniform_int_distribution<int> score(1, 5);
  std::vector<affectrec::PreferenceRating> out;
  for (const auto& id : chosen) out.push_back({id, score(rng), false});
  return out;
}

/// Small bundle built directly from random matrices, no training involved.
inline affectrec::PreprocessedBundle toy_bundle(std::uint64_t seed, int n_music, int n_paintings, int joint = 3,
                                                int embed = 4, int visual = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random = [&](int rows, int cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = unit(rng);
    return m;
  };
  affectrec::PreprocessedBundle b;
  for (int i = 0; i < n_music; ++i) b.music_ids.push_back("m" + std::to_string(100 + i));
  for (int j = 0; j < n_paintings; ++j) b.painting_ids.push_back("p" + std::to_string(100 + j));
  b.va_music = random(n_music, 2);
  b.va_paintings = random(n_paintings, 2);
  b.mozart_music = random(n_music, joint);
  b.mozart_paintings = random(n_paintings, joint);
  b.salieri_music = random(n_music, embed);
  b.salieri_paintings = random(n_paintings, embed);
  b.visual_paintings = random(n_paintings, visual);
  return b;
}

inline double oracle_euclidean(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  double sq = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) sq += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
  return std::sqrt(sq);
}

inline double oracle_cosine(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    dot += a(i, k) * b(j, k);
    na += a(i, k) * a(i, k);
    nb += b(j, k) * b(j, k);
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace testing_support
