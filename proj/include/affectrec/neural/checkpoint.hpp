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

// AFNN model checkpoint:
//   "AFNN" | u8 version | u8 hidden activation | u32 size count | u32 sizes[]
//   | per layer: f32 weights (out x in, row-major), f32 bias (out)
//   | u64 FNV-1a checksum of every byte after the version.

#include <filesystem>
#include <string>
#include <string_view>

#include "affectrec/binary_io.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec::nn {

inline constexpr std::string_view kCheckpointMagic = "AFNN";
inline constexpr std::uint8_t kCheckpointVersion = 1;

inline std::string encode_checkpoint(const Mlp& net) {
  io::ByteWriter payload;
  payload.u8(static_cast<std::uint8_t>(net.hidden_activation()));
  const auto sizes = net.layer_sizes();
  payload.u32(static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) payload.u32(static_cast<std::uint32_t>(s));
  for (const auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) payload.f32(static_cast<float>(layer.weights.data()[i]));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) payload.f32(static_cast<float>(layer.bias[i]));
  }
  io::ByteWriter file;
  file.bytes(kCheckpointMagic);
  file.u8(kCheckpointVersion);
  file.bytes(payload.data());
  file.u64(io::checksum64(payload.data()));
  return file.take();
}

inline Mlp decode_checkpoint(std::string_view bytes, const std::string& context = "checkpoint") {
  io::ByteReader header(bytes, context);
  const auto version = io::expect_header(header, kCheckpointMagic, context);
  require(version == kCheckpointVersion, ErrorKind::integrity,
          context + ": unsupported version " + std::to_string(version));
  io::ByteReader in(io::verify_trailer(bytes, header.position(), context), context);

  const auto activation = in.u8();
  require(activation <= static_cast<std::uint8_t>(Activation::identity), ErrorKind::integrity,
          context + ": unknown activation tag");
  const auto count = in.u32();
  require(count >= 2 && count <= 4096, ErrorKind::integrity, context + ": implausible layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto s = in.u32();
    require(s > 0 && s <= (1u << 24), ErrorKind::integrity, context + ": implausible layer size");
    sizes.push_back(static_cast<int>(s));
  }
  Mlp net = Mlp::zeros(sizes, static_cast<Activation>(activation));
  for (auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = in.f32();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = in.f32();
  }
  require(in.remaining() == 0, ErrorKind::integrity, context + ": trailing bytes");
  require(net.all_finite(), ErrorKind::integrity, context + ": non-finite parameters");
  return net;
}

inline void save_checkpoint(const std::filesystem::path& path, const Mlp& net) {
  io::write_file(path, encode_checkpoint(net));
}

inline Mlp load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path), path.string());
}

}  // namespace affectrec::nn
