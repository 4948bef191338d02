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


// Runs the gruscreen binary end to end.

#include <gtest/gtest.h>
#include <signal.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gruscreen/store/archive.hpp"
#include "gruscreen/text/csv.hpp"
#include "httplib.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(GRUSCREEN_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  // ctest runs each case in its own process, so the desk-scale training run
  // is cached in the build tree and shared under a file lock.
  static void SetUpTestSuite() {
    dir_ = fs::path(GRUSCREEN_CLI_WORK_DIR);
    fs::create_directories(dir_);
    const int lock = ::open(p(".lock").c_str(), O_CREAT | O_RDWR, 0644);
    ASSERT_GE(lock, 0);
    ::flock(lock, LOCK_EX);
    const fs::path done = dir_ / "train.done";
    const bool fresh = !fs::exists(done) || fs::last_write_time(done) < fs::last_write_time(GRUSCREEN_CLI);
    if (fresh) {
      fs::remove(done);
      synth_code_ = run("synth-data --out " + p("synth.csv") + " --n 2000 --seed 7").code;
      train_code_ = run("train --data " + p("synth.csv") + " --out " + p("model.bin") + " --history " +
                        p("history.csv") + " --report-dir " + p("train_report"))
                        .code;
      std::ofstream(done) << synth_code_ << " " << train_code_ << "\n";
    } else {
      std::ifstream(done) >> synth_code_ >> train_code_;
    }
    ::flock(lock, LOCK_UN);
    ::close(lock);
    scratch_ = dir_ / ("scratch_" + std::to_string(::getpid()));
    fs::create_directories(scratch_);
  }
  static void TearDownTestSuite() { fs::remove_all(scratch_); }
  static std::string p(const std::string& name) { return (dir_ / name).string(); }
  static std::string tmp(const std::string& name) { return (scratch_ / name).string(); }

  static inline fs::path dir_;
  static inline fs::path scratch_;
  static inline int synth_code_ = -1;
  static inline int train_code_ = -1;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("train --out x.bin").code, 2);
  EXPECT_EQ(run("synth-data --out " + tmp("tiny.csv") + " --n 3").code, 2);
  EXPECT_EQ(run("predict --model " + tmp("absent.bin") + " --text hi").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
  {
    std::ofstream bad(tmp("corrupt.bin"));
    bad << "CSUICIDE garbage";
  }
  EXPECT_EQ(run("predict --model " + tmp("corrupt.bin") + " --text hi").code, 1);
  {
    std::ofstream bad(tmp("bad.csv"));
    bad << "text,class\nhello,maybe\n";
  }
  EXPECT_EQ(run("preprocess --data " + tmp("bad.csv") + " --out " + tmp("bad_out.csv")).code, 1);
}

TEST_F(CliTest, SynthDataIsDeterministic) {
  ASSERT_EQ(synth_code_, 0);
  ASSERT_EQ(run("synth-data --out " + tmp("synth2.csv") + " --n 2000 --seed 7").code, 0);
  EXPECT_EQ(gruscreen::text::read_file(p("synth.csv")), gruscreen::text::read_file(tmp("synth2.csv")));
  EXPECT_EQ(count_lines(p("synth.csv")), 2001u);
}

TEST_F(CliTest, TrainDeskScale) {
  ASSERT_EQ(train_code_, 0);
  const auto rows = count_lines(p("history.csv")) - 1;
  EXPECT_GE(rows, 1u);
  EXPECT_LE(rows, 25u);
  auto archive = gruscreen::store::load<float>(p("model.bin"));
  EXPECT_GE(archive.metadata.at("test_accuracy").get<double>(), 0.95);
  EXPECT_EQ(archive.metadata.at("stopped_epoch").get<std::size_t>(), rows);
  EXPECT_TRUE(fs::exists(p("train_report/report.txt")));
}

TEST_F(CliTest, EvaluateWritesReports) {
  ASSERT_EQ(train_code_, 0);
  auto r = run("evaluate --model " + p("model.bin") + " --data " + p("synth.csv") + " --report-dir " + tmp("eval"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Kappa"), std::string::npos);
  auto rows = gruscreen::text::parse_csv(gruscreen::text::read_file(tmp("eval/overall_stats.csv")));
  ASSERT_EQ(rows.size(), 15u);  // header + 14 merits
  EXPECT_EQ(rows[0][0], "merit");
  auto cls = gruscreen::text::parse_csv(gruscreen::text::read_file(tmp("eval/class_stats.csv")));
  EXPECT_EQ(cls.size(), 10u);
  EXPECT_TRUE(fs::exists(tmp("eval/confusion_matrix.csv")));
  // same inputs, same bytes
  ASSERT_EQ(run("evaluate --model " + p("model.bin") + " --data " + p("synth.csv") + " --report-dir " + tmp("eval2"))
                .code,
            0);
  EXPECT_EQ(gruscreen::text::read_file(tmp("eval/overall_stats.csv")),
            gruscreen::text::read_file(tmp("eval2/overall_stats.csv")));
}

TEST_F(CliTest, PredictSeparatesLexicons) {
  ASSERT_EQ(train_code_, 0);
  // synthetic documents hold 8 to 60 words, so the probes do too
  auto a = run("predict --model " + p("model.bin") + " --text 'river meadow forest breeze pine moss reef lake'");
  auto b = run("predict --model " + p("model.bin") + " --text 'server subway laptop engine tram kiosk depot tower'");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(a.out.find("label suicide"), std::string::npos) << a.out;
  EXPECT_NE(b.out.find("label non-suicide"), std::string::npos) << b.out;
}

TEST_F(CliTest, PredictAllStopwords) {
  ASSERT_EQ(train_code_, 0);
  auto r = run("predict --model " + p("model.bin") + " --text 'I am the one who is'");
  auto s = run("predict --model " + p("model.bin") + " --text 'and the of to'");
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("suicide_probability "), std::string::npos);
  EXPECT_NE(s.out.find("label "), std::string::npos);
  // an all-stopword text is the all-padding sequence; so is the empty text
  EXPECT_EQ(s.out, run("predict --model " + p("model.bin") + " --text ''").out);
}

TEST_F(CliTest, PreprocessCleansText) {
  {
    std::ofstream in(tmp("raw.csv"));
    in << "text,class\n\"I'm SO tired... email me at a@b.com <br> Café\",suicide\n";
  }
  ASSERT_EQ(run("preprocess --data " + tmp("raw.csv") + " --out " + tmp("clean.csv")).code, 0);
  EXPECT_EQ(gruscreen::text::read_file(tmp("clean.csv")), "text,class\ntired email cafe,suicide\n");
}

TEST_F(CliTest, ServeAnswersAndStopsOnSignal) {
  ASSERT_EQ(train_code_, 0);
  const int port = 20000 + static_cast<int>(::getpid() % 20000);
  const std::string addr = "127.0.0.1:" + std::to_string(port);
  const std::string model = p("model.bin");
  const std::string bank = std::string(GRUSCREEN_SOURCE_DIR) + "/data/question_bank.json";
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::setenv("GRUSCREEN_API_TOKEN", "tok", 1);
    if (!::freopen("/dev/null", "w", stderr)) ::_exit(126);
    ::execl(GRUSCREEN_CLI, GRUSCREEN_CLI, "serve", "--model", model.c_str(), "--bank", bank.c_str(), "--addr",
            addr.c_str(), "--data-dir", tmp("sessions").c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  httplib::Client client("127.0.0.1", port);
  client.set_bearer_token_auth("tok");
  httplib::Result health;
  for (int i = 0; i < 100 && !health; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    health = client.Get("/v1/health");
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  const auto crc = gruscreen::store::checksum_hex(gruscreen::store::load<float>(model).checksum);
  EXPECT_EQ(nlohmann::json::parse(health->body)["model_checksum"], crc);
  auto created = client.Post("/v1/sessions", "", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = nlohmann::json::parse(created->body)["session_id"];
  auto msg = client.Post("/v1/sessions/" + id + "/messages", R"({"text": "river meadow forest breeze pine moss reef lake"})", "application/json");
  ASSERT_TRUE(msg);
  EXPECT_EQ(msg->status, 200);
  EXPECT_GT(nlohmann::json::parse(msg->body)["score"].get<double>(), 0.5);
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_TRUE(fs::exists(tmp("sessions/" + id + ".jsonl")));
}

}  // namespace
