// Copyright 2026 The gruscreen Authors. All Rights Reserved.
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

// Single-file model archive, little-endian throughout:
//   "CSUICIDE"                      8-byte magic
//   u32 format_version              currently 1
//   u32 n, n bytes                  JSON header (model config, parameter
//                                   counts, free-form metadata)
//   u32 n, n bytes                  vocabulary in the text vocabulary format
//   u32 tensor_count
//   tensor_count x { u16 name_len, name, u32 rank, rank x u64 dim,
//                    prod(dim) x f32 }
//   u32 CRC-32 (zlib polynomial) of every preceding byte
// Tensor order: embedding, gru1.{W_in,W_rec,b_in,b_rec}, gru2.*, gru3.*,
// dense_W, dense_b. See docs/model-format.md.

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/model.hpp"
#include "gruscreen/nn/param_count.hpp"
#include "gruscreen/text/vocabulary.hpp"
#include "json.hpp"

namespace gruscreen::store {

inline constexpr std::string_view kMagic = "CSUICIDE";
inline constexpr std::uint32_t kFormatVersion = 1;

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto len = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = crc32(crc, bytes.data() + off, len);
    off += len;
  }
  return static_cast<std::uint32_t>(crc);
}

inline std::string checksum_hex(std::uint32_t crc) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

namespace detail {

class Writer {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) throw Error(ErrorCode::kFormatError, "archive is truncated");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

template <typename T>
void write_tensor(Writer& w, const std::string& name, std::span<const T> data, const std::vector<std::size_t>& shape) {
  w.u16(static_cast<std::uint16_t>(name.size()));
  w.bytes(name);
  w.u32(static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) w.u64(d);
  for (auto v : data) w.f32(static_cast<float>(v));
}

inline nlohmann::json param_count_json(const nn::ParamCount& p) {
  return {{"embedding", p.embedding}, {"gru1", p.gru1},   {"gru2", p.gru2},
          {"gru3", p.gru3},           {"dense", p.dense}, {"total", p.total},
          {"trainable", p.trainable}, {"non_trainable", p.non_trainable}};
}

}  // namespace detail

/// Serializes a model and its vocabulary. `metadata` is stored verbatim in
/// the JSON header (training summary and the like).
template <typename T>
std::vector<std::uint8_t> encode_archive(const nn::GruStackModel<T>& model, const text::Vocabulary& vocab,
                                         const nlohmann::json& metadata = nlohmann::json::object()) {
  model.check_shapes();
  detail::Writer w;
  w.bytes(kMagic);
  w.u32(kFormatVersion);
  nlohmann::json header = {{"model", model.config},
                           {"param_count", detail::param_count_json(nn::param_count(model.config))},
                           {"metadata", metadata}};
  const std::string header_text = header.dump();
  w.u32(static_cast<std::uint32_t>(header_text.size()));
  w.bytes(header_text);
  std::ostringstream vocab_text;
  text::write_vocabulary(vocab_text, vocab);
  const std::string vocab_str = vocab_text.str();
  w.u32(static_cast<std::uint32_t>(vocab_str.size()));
  w.bytes(vocab_str);
  w.u32(1 + 4 * 3 + 2);
  detail::write_tensor<T>(w, "embedding", model.embedding.flat(), {model.embedding.rows(), model.embedding.cols()});
  model.params.visit([&](const std::string& name, std::span<const T> data, const std::vector<std::size_t>& shape) {
    detail::write_tensor<T>(w, name, data, shape);
  });
  w.u32(crc32_of(w.buffer()));
  return std::move(w.buffer());
}

template <typename T = float>
struct LoadedArchive {
  nn::GruStackModel<T> model;
  text::Vocabulary vocab;
  nlohmann::json metadata;
  std::uint32_t checksum = 0;
};

template <typename T = float>
LoadedArchive<T> decode_archive(std::span<const std::uint8_t> bytes) {
  detail::Reader r(bytes);
  if (r.bytes(kMagic.size()) != kMagic) throw Error(ErrorCode::kFormatError, "bad archive magic");
  const auto version = r.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kVersionUnsupported, "archive format version " + std::to_string(version));
  }
  if (bytes.size() < kMagic.size() + 8) throw Error(ErrorCode::kFormatError, "archive is truncated");
  const auto body = bytes.first(bytes.size() - 4);
  detail::Reader tail(bytes.last(4));
  const std::uint32_t stored = tail.u32();
  if (crc32_of(body) != stored) throw Error(ErrorCode::kChecksumMismatch, "archive checksum does not match");

  LoadedArchive<T> out;
  out.checksum = stored;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.bytes(r.u32()));
    header.at("model").get_to(out.model.config);
    out.metadata = header.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("archive header: ") + e.what());
  }
  out.model.config.validate();
  const auto& cfg = out.model.config;
  if (header.contains("param_count") &&
      header["param_count"].value("total", std::size_t{0}) != nn::param_count(cfg).total) {
    throw Error(ErrorCode::kShapeMismatch, "archive parameter count disagrees with its config");
  }
  {
    std::istringstream vocab_in{std::string(r.bytes(r.u32()))};
    out.vocab = text::read_vocabulary(vocab_in);
  }
  if (out.vocab.size() >= cfg.vocab_size) throw Error(ErrorCode::kShapeMismatch, "vocabulary exceeds embedding rows");

  out.model.embedding = nn::Matrix<T>(cfg.vocab_size, cfg.embed_dim);
  out.model.params = nn::Params<T>::zeros_like(cfg);
  struct Slot {
    std::string name;
    std::span<T> data;
    std::vector<std::size_t> shape;
  };
  std::vector<Slot> slots{{"embedding", out.model.embedding.flat(), {cfg.vocab_size, cfg.embed_dim}}};
  out.model.params.visit([&](const std::string& name, std::span<T> data, const std::vector<std::size_t>& shape) {
    slots.push_back({name, data, shape});
  });
  if (r.u32() != slots.size()) throw Error(ErrorCode::kShapeMismatch, "unexpected tensor count");
  for (auto& slot : slots) {
    const std::string_view name = r.bytes(r.u16());
    if (name != slot.name) {
      throw Error(ErrorCode::kShapeMismatch, "expected tensor " + slot.name + ", found " + std::string(name));
    }
    const auto rank = r.u32();
    std::vector<std::size_t> shape;
    for (std::uint32_t i = 0; i < rank && i < 8; ++i) shape.push_back(static_cast<std::size_t>(r.u64()));
    if (shape != slot.shape) throw Error(ErrorCode::kShapeMismatch, "tensor " + slot.name + " has the wrong shape");
    for (auto& v : slot.data) v = static_cast<T>(r.f32());
  }
  if (r.remaining() != 4) throw Error(ErrorCode::kFormatError, "trailing bytes in archive");
  out.model.check_shapes();
  return out;
}

/// Writes to a temporary sibling and renames it into place.
template <typename T>
std::uint32_t save(const nn::GruStackModel<T>& model, const text::Vocabulary& vocab, const std::string& path,
                   const nlohmann::json& metadata = nlohmann::json::object()) {
  auto bytes = encode_archive(model, vocab, metadata);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot move archive into " + path + ": " + ec.message());
  detail::Reader tail(std::span<const std::uint8_t>(bytes).last(4));
  return tail.u32();
}

template <typename T = float>
LoadedArchive<T> load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_archive<T>(bytes);
}

}  // namespace gruscreen::store
