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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "gruscreen/nn/param_count.hpp"
#include "gruscreen/store/archive.hpp"
#include "gruscreen/text/vocabulary.hpp"
#include "support/grad_check.hpp"

namespace {

using namespace gruscreen;
namespace fs = std::filesystem;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gruscreen::Error thrown";
  return ErrorCode::kInvalidArgument;
}

class ArchiveTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gruscreen_archive_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }

  static std::vector<std::uint8_t> read_bytes(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  static void write_bytes(const std::string& p, const std::vector<std::uint8_t>& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }

  fs::path dir_;
};

text::Vocabulary small_vocab() { return text::fit_vocabulary({"calm river stone", "river light"}, 10); }

std::vector<text::EncodedSequence> random_inputs(const nn::ModelConfig& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<text::EncodedSequence> xs(n, text::EncodedSequence(c.seq_len));
  for (auto& s : xs) {
    for (auto& v : s) v = static_cast<std::uint32_t>(gen() % c.vocab_size);
  }
  return xs;
}

TEST_F(ArchiveTest, RoundTripReproducesLogits) {
  auto model = nn::make_model<float>(oracle::tiny_config(0.2), 12);
  model.params.dense_b = {0.25f, -0.125f};
  auto vocab = small_vocab();
  const auto crc = store::save(model, vocab, path("m.bin"), {{"note", "unit"}});
  auto loaded = store::load<float>(path("m.bin"));
  EXPECT_EQ(loaded.checksum, crc);
  EXPECT_EQ(loaded.vocab, vocab);
  EXPECT_EQ(loaded.metadata.at("note"), "unit");
  EXPECT_EQ(loaded.model.config, model.config);
  EXPECT_EQ(loaded.model.embedding, model.embedding);
  EXPECT_TRUE(loaded.model.same_weights(model));
  auto xs = random_inputs(model.config, 100, 1);
  auto a = nn::predict(model, xs);
  auto b = nn::predict(loaded.model, xs);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_LE(std::abs(a.flat()[i] - b.flat()[i]), 1e-12);
  EXPECT_FALSE(fs::exists(path("m.bin.tmp")));
}

TEST_F(ArchiveTest, DefaultConfigSizeAndCount) {
  auto model = nn::make_model<float>(nn::ModelConfig{}, 1);
  store::save(model, small_vocab(), path("full.bin"));
  const auto size = fs::file_size(path("full.bin"));
  EXPECT_GE(size, 1053502u * 4);
  EXPECT_LT(size, 1053502u * 4 + 8192);
  auto loaded = store::load<float>(path("full.bin"));
  EXPECT_EQ(nn::param_count(loaded.model.config).total, 1053502u);
  EXPECT_EQ(loaded.model.params.count() + loaded.model.embedding.size(), 1053502u);
}

TEST_F(ArchiveTest, TensorOrderIsFixed) {
  std::vector<std::string> names;
  nn::make_model<float>(oracle::tiny_config(0.2), 1)
      .params.visit([&](const std::string& n, std::span<const float>, const auto&) { names.push_back(n); });
  const std::vector<std::string> want = {"gru1.W_in", "gru1.W_rec", "gru1.b_in", "gru1.b_rec", "gru2.W_in",
                                         "gru2.W_rec", "gru2.b_in", "gru2.b_rec", "gru3.W_in", "gru3.W_rec",
                                         "gru3.b_in",  "gru3.b_rec", "dense_W",  "dense_b"};
  EXPECT_EQ(names, want);
}

TEST_F(ArchiveTest, CorruptPayloadFailsChecksum) {
  auto model = nn::make_model<float>(oracle::tiny_config(0.2), 1);
  store::save(model, small_vocab(), path("c.bin"));
  auto bytes = read_bytes(path("c.bin"));
  for (std::size_t pos : {std::size_t{20}, bytes.size() / 2, bytes.size() - 5}) {
    auto bad = bytes;
    bad[pos] ^= 0x40;
    write_bytes(path("bad.bin"), bad);
    EXPECT_EQ(code_of([&] { store::load<float>(path("bad.bin")); }), ErrorCode::kChecksumMismatch) << pos;
  }
  auto bad = bytes;
  bad.back() ^= 1;  // the stored checksum itself
  write_bytes(path("bad.bin"), bad);
  EXPECT_EQ(code_of([&] { store::load<float>(path("bad.bin")); }), ErrorCode::kChecksumMismatch);
}

TEST_F(ArchiveTest, TruncationIsRejected) {
  auto model = nn::make_model<float>(oracle::tiny_config(0.2), 1);
  store::save(model, small_vocab(), path("t.bin"));
  auto bytes = read_bytes(path("t.bin"));
  for (std::size_t keep : {std::size_t{0}, std::size_t{5}, std::size_t{12}, std::size_t{40}, bytes.size() / 2,
                           bytes.size() - 1}) {
    write_bytes(path("short.bin"), std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + keep));
    try {
      store::load<float>(path("short.bin"));
      ADD_FAILURE() << "accepted a file truncated to " << keep << " bytes";
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kFormatError || e.code() == ErrorCode::kChecksumMismatch) << keep;
    }
  }
}

TEST_F(ArchiveTest, UnknownVersion) {
  auto model = nn::make_model<float>(oracle::tiny_config(0.2), 1);
  auto bytes = store::encode_archive(model, small_vocab());
  bytes[8] = 2;  // u32 version right after the magic
  EXPECT_EQ(code_of([&] { store::decode_archive<float>(bytes); }), ErrorCode::kVersionUnsupported);
  bytes[8] = 1;
  bytes[0] = 'X';
  EXPECT_EQ(code_of([&] { store::decode_archive<float>(bytes); }), ErrorCode::kFormatError);
}

TEST_F(ArchiveTest, ShapeMismatchIsDetected) {
  // a header that disagrees with the tensors, re-sealed with a valid checksum
  auto model = nn::make_model<float>(oracle::tiny_config(0.2), 1);
  auto bytes = store::encode_archive(model, small_vocab());
  std::string s(bytes.begin(), bytes.end());
  const auto at = s.find("\"gru_units\":3");
  ASSERT_NE(at, std::string::npos);
  s[at + 12] = '4';
  std::vector<std::uint8_t> body(s.begin(), s.end() - 4);
  const auto crc = store::crc32_of(body);
  for (int i = 0; i < 4; ++i) body.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
  EXPECT_EQ(code_of([&] { store::decode_archive<float>(body); }), ErrorCode::kShapeMismatch);
}

TEST_F(ArchiveTest, MissingFile) {
  EXPECT_EQ(code_of([&] { store::load<float>(path("absent.bin")); }), ErrorCode::kIoError);
}

TEST(Checksum, KnownVector) {
  const std::string s = "123456789";
  std::vector<std::uint8_t> b(s.begin(), s.end());
  EXPECT_EQ(store::crc32_of(b), 0xCBF43926u);
  EXPECT_EQ(store::checksum_hex(0xCBF43926u), "cbf43926");
}

}  // namespace
