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

// Offline preprocessing: from a validated catalog to every matrix the four
// engines consume, plus the trained networks and scalers that produced them.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "affectrec/binary_io.hpp"
#include "affectrec/catalog/loader.hpp"
#include "affectrec/catalog/matrix_file.hpp"
#include "affectrec/catalog/record.hpp"
#include "affectrec/catalog/scaler.hpp"
#include "affectrec/engine/mozart.hpp"
#include "affectrec/neural/checkpoint.hpp"
#include "affectrec/neural/loss.hpp"
#include "affectrec/neural/trainer.hpp"

namespace affectrec {

struct PipelineConfig {
  std::vector<int> ae_hidden{1024, 512};
  int embed_dim = 256;
  nn::TrainConfig autoencoder_train;
  nn::AdamConfig adam;
  ProjectionConfig projection;
  std::uint64_t seed = 0;

  /// Derives every per-stage seed from `seed` so one number pins a run.
  PipelineConfig seeded(std::uint64_t s) const {
    PipelineConfig c = *this;
    c.seed = s;
    c.autoencoder_train.rng_seed = s;
    c.projection.train.rng_seed = s + 7919;
    return c;
  }

  std::vector<int> autoencoder_layers(int input_dim) const {
    std::vector<int> layers{input_dim};
    layers.insert(layers.end(), ae_hidden.begin(), ae_hidden.end());
    layers.push_back(embed_dim);
    return layers;
  }

  nlohmann::json to_json() const {
    return {{"ae_hidden", ae_hidden},
            {"embed_dim", embed_dim},
            {"seed", seed},
            {"epochs", autoencoder_train.max_epochs},
            {"patience", autoencoder_train.patience},
            {"batch_size", autoencoder_train.batch_size},
            {"validation_fraction", autoencoder_train.validation_fraction},
            {"step_size", adam.step_size},
            {"beta1", adam.beta1},
            {"beta2", adam.beta2},
            {"sigma", projection.sigma},
            {"margin", projection.margin},
            {"projection_hidden", projection.hidden_dim},
            {"joint_dim", projection.joint_dim},
            {"projection_epochs", projection.train.max_epochs},
            {"projection_patience", projection.train.patience},
            {"projection_batch_size", projection.train.batch_size}};
  }
};

inline nlohmann::json history_to_json(const nn::TrainHistory& h) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"train", e.train_loss}, {"validation", e.validation_loss}});
  }
  return {{"epochs", epochs}, {"best_epoch", h.best_epoch}, {"stopped_early", h.stopped_early}};
}

/// Everything the engines need, row-aligned with `music_ids` / `painting_ids`.
struct PreprocessedBundle {
  std::vector<std::string> music_ids;
  std::vector<std::string> painting_ids;
  Matrix va_music, va_paintings;            // (N, 2)
  Matrix mozart_music, mozart_paintings;    // joint space (N, joint_dim)
  Matrix salieri_music, salieri_paintings;  // composed stream embeddings (N, embed_dim)
  Matrix visual_paintings;                  // raw painting features

  ScalerParams scaler_music, scaler_paintings;
  std::map<std::string, nn::Mlp> networks;  // autoencoders and projection head by role
  nlohmann::json provenance;
};

namespace detail {

inline Matrix enrich(const Matrix& embedding, const Matrix& va) {
  Matrix out(embedding.rows(), embedding.cols() + 2);
  out << embedding, va;
  return out;
}

}  // namespace detail

inline PreprocessedBundle preprocess_cdr(const Catalog& catalog, const PipelineConfig& config) {
  require(!catalog.music().empty(), ErrorKind::invalid_catalog, "catalog has no music items");
  require(!catalog.paintings().empty(), ErrorKind::invalid_catalog, "catalog has no paintings");
  require(config.embed_dim > 0, ErrorKind::invalid_parameter, "embed_dim must be positive");

  PreprocessedBundle b;
  b.music_ids = catalog.ids(Modality::music);
  b.painting_ids = catalog.ids(Modality::painting);
  b.va_music = catalog.va_table(Modality::music);
  b.va_paintings = catalog.va_table(Modality::painting);
  b.visual_paintings = catalog.features(Modality::painting);

  nlohmann::json histories;
  auto reduce = [&](const Matrix& data, const std::string& role, std::uint64_t salt) {
    nn::TrainConfig train = config.autoencoder_train;
    train.rng_seed = config.autoencoder_train.rng_seed + salt;
    auto ae = nn::train_autoencoder(data, config.autoencoder_layers(static_cast<int>(data.cols())),
                                    train, config.adam);
    histories[role] = history_to_json(ae.history);
    Matrix code = ae.encode(data);
    b.networks.emplace(role + "_encoder", std::move(ae.encoder));
    b.networks.emplace(role + "_decoder", std::move(ae.decoder));
    return code;
  };

  // Affect-aware contrastive engine: reduce, scale, enrich with V-A, project.
  const Matrix code_m = reduce(catalog.features(Modality::music), "mozart_music", 1);
  const Matrix code_p = reduce(catalog.features(Modality::painting), "mozart_painting", 2);
  auto [scaled_m, scaler_m] = minmax_scale(code_m);
  auto [scaled_p, scaler_p] = minmax_scale(code_p);
  b.scaler_music = scaler_m;
  b.scaler_paintings = scaler_p;
  const auto weights = nn::modality_weights(static_cast<long long>(b.music_ids.size()),
                                            static_cast<long long>(b.painting_ids.size()));
  ProjectionConfig projection = config.projection;
  projection.adam = config.adam;
  auto head = train_mozart_projection(detail::enrich(scaled_m, b.va_music),
                                      detail::enrich(scaled_p, b.va_paintings), b.va_music,
                                      b.va_paintings, weights, projection);
  histories["mozart_projection"] = history_to_json(head.history);
  b.mozart_music = head.head.forward(detail::enrich(scaled_m, b.va_music));
  b.mozart_paintings = head.head.forward(detail::enrich(scaled_p, b.va_paintings));
  b.networks.emplace("mozart_projection", std::move(head.head));

  // Multimodal engine: autoencode the concatenated feature + description streams.
  b.salieri_music = reduce(catalog.composed_features(Modality::music), "salieri_music", 3);
  b.salieri_paintings = reduce(catalog.composed_features(Modality::painting), "salieri_painting", 4);

  b.provenance = {{"catalog", catalog.provenance().source},
                  {"music_checksum", catalog.provenance().music_checksum},
                  {"paintings_checksum", catalog.provenance().paintings_checksum},
                  {"dropped_unstable", catalog.provenance().dropped_unstable},
                  {"lambda_music", weights.music},
                  {"lambda_painting", weights.painting},
                  {"config", config.to_json()},
                  {"histories", histories}};
  return b;
}

// On-disk bundle: one AFMX file per matrix, AFNN checkpoints, scalers and a
// manifest carrying ids and a checksum per file.

inline const std::vector<std::pair<std::string, Matrix PreprocessedBundle::*>>& bundle_matrix_files() {
  static const std::vector<std::pair<std::string, Matrix PreprocessedBundle::*>> files{
      {"va_music.afmx", &PreprocessedBundle::va_music},
      {"va_paintings.afmx", &PreprocessedBundle::va_paintings},
      {"mozart_music.afmx", &PreprocessedBundle::mozart_music},
      {"mozart_paintings.afmx", &PreprocessedBundle::mozart_paintings},
      {"salieri_music.afmx", &PreprocessedBundle::salieri_music},
      {"salieri_paintings.afmx", &PreprocessedBundle::salieri_paintings},
      {"visual_paintings.afmx", &PreprocessedBundle::visual_paintings},
  };
  return files;
}

inline void save_bundle(const std::filesystem::path& dir, const PreprocessedBundle& b) {
  std::filesystem::create_directories(dir);
  nlohmann::json files;
  auto put = [&](const std::string& name, const std::string& bytes) {
    io::write_file(dir / name, bytes);
    files[name] = detail::hex64(io::checksum64(bytes));
  };
  for (const auto& [name, member] : bundle_matrix_files()) put(name, encode_matrix(b.*member));
  for (const auto& [role, net] : b.networks) put("models/" + role + ".afnn", nn::encode_checkpoint(net));
  put("scalers.json",
      nlohmann::json{{"music", b.scaler_music.to_json()}, {"paintings", b.scaler_paintings.to_json()}}
          .dump(2));
  nlohmann::json manifest{{"format", "affectrec-bundle"},
                          {"version", 1},
                          {"music_ids", b.music_ids},
                          {"painting_ids", b.painting_ids},
                          {"files", files},
                          {"provenance", b.provenance}};
  io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

/// Loads and verifies every file listed in the manifest.
inline PreprocessedBundle load_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(io::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::integrity, manifest_path.string() + ": " + e.what());
  }
  require(manifest.value("format", "") == "affectrec-bundle", ErrorKind::integrity,
          manifest_path.string() + ": not a bundle manifest");

  PreprocessedBundle b;
  b.music_ids = manifest.at("music_ids").get<std::vector<std::string>>();
  b.painting_ids = manifest.at("painting_ids").get<std::vector<std::string>>();
  b.provenance = manifest.value("provenance", nlohmann::json::object());
  const auto& files = manifest.at("files");
  auto fetch = [&](const std::string& name) {
    require(files.contains(name), ErrorKind::integrity, "bundle manifest does not list " + name);
    std::string bytes = io::read_file(dir / name);
    if (detail::hex64(io::checksum64(bytes)) != files.at(name).get<std::string>()) {
      fail(ErrorKind::integrity, (dir / name).string() + ": checksum mismatch");
    }
    return bytes;
  };
  for (const auto& [name, member] : bundle_matrix_files()) {
    b.*member = decode_matrix(fetch(name), (dir / name).string());
  }
  for (const auto& [name, _] : files.items()) {
    if (name.rfind("models/", 0) == 0) {
      const std::string role = name.substr(7, name.size() - 7 - 5);
      b.networks.emplace(role, nn::decode_checkpoint(fetch(name), (dir / name).string()));
    }
  }
  const auto scalers = nlohmann::json::parse(fetch("scalers.json"));
  b.scaler_music = ScalerParams::from_json(scalers.at("music"));
  b.scaler_paintings = ScalerParams::from_json(scalers.at("paintings"));

  const auto n_m = static_cast<Eigen::Index>(b.music_ids.size());
  const auto n_p = static_cast<Eigen::Index>(b.painting_ids.size());
  require(b.va_music.rows() == n_m && b.mozart_music.rows() == n_m && b.salieri_music.rows() == n_m,
          ErrorKind::integrity, "bundle music matrices do not match the id table");
  require(b.va_paintings.rows() == n_p && b.mozart_paintings.rows() == n_p &&
              b.salieri_paintings.rows() == n_p && b.visual_paintings.rows() == n_p,
          ErrorKind::integrity, "bundle painting matrices do not match the id table");
  return b;
}

}  // namespace affectrec
