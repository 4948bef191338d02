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

// gruscreen: train, evaluate and serve the GRU ideation classifier.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gruscreen/gruscreen.hpp"
#include "gruscreen/service/http_api.hpp"

namespace {

using namespace gruscreen;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct TrainArgs {
  std::string data;
  std::string config;
  std::string out;
  std::string history;
  std::string report_dir;
  std::string vocab_out;
  std::string pretrained;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string report_dir;
};

struct PredictArgs {
  std::string model;
  std::string text;
};

struct ServeArgs {
  std::string model;
  std::string bank;
  std::string addr = "127.0.0.1:8080";
  std::string data_dir;
  std::string policy;
  std::string static_dir;
};

struct SynthArgs {
  std::string out;
  std::size_t n = 2000;
  std::uint64_t seed = 7;
};

struct PreprocessArgs {
  std::string data;
  std::string out;
};

metrics::ConfusionMatrix confusion_of(const nn::GruStackModel<float>& model, const train::Dataset& data) {
  auto probs = train::predict_all(model, data.x);
  std::vector<int> predicted;
  predicted.reserve(probs.size());
  for (const auto& p : probs) predicted.push_back(nn::argmax<float>(p));
  return metrics::build_confusion(data.y, predicted);
}

int run_train(const TrainArgs& a) {
  train::ExperimentConfig cfg;
  if (!a.config.empty()) cfg = train::load_experiment_config(a.config);
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  if (a.seed) {
    cfg.train.seed = *a.seed;
    cfg.model_seed = *a.seed;
    cfg.split.shuffle_seed = *a.seed;
  }
  if (a.threads) cfg.train.threads = *a.threads;
  cfg.validate();

  auto corpus = text::load_corpus_csv(a.data);
  std::cerr << "loaded " << corpus.size() << " samples from " << a.data << "\n";
  auto data = train::prepare_data(corpus, cfg);
  std::cerr << "split " << data.train.size() << "/" << data.val.size() << "/" << data.test.size()
            << ", vocabulary " << data.vocab.size() << " words\n";
  if (!a.vocab_out.empty()) text::save_vocabulary(a.vocab_out, data.vocab);

  auto model = nn::make_model<float>(cfg.model, cfg.model_seed);
  if (!a.pretrained.empty()) {
    auto n = nn::load_pretrained_embedding(a.pretrained, data.vocab, model);
    std::cerr << "pretrained vectors for " << n << " words\n";
  }
  const auto counts = nn::param_count(cfg.model);
  std::cerr << "parameters: total " << counts.total << ", trainable " << counts.trainable << ", non-trainable "
            << counts.non_trainable << "\n";

  train::TrainHooks<float> hooks;
  hooks.on_epoch_end = [](const train::EpochRecord& r, const nn::GruStackModel<float>&) {
    std::fprintf(stderr, "epoch %2zu  loss %.4f  acc %.4f  val_loss %.4f  val_acc %.4f\n", r.epoch, r.train_loss,
                 r.train_accuracy, r.val_loss, r.val_accuracy);
  };
  auto history = train::train(model, data.train, data.val, cfg.train, hooks);
  if (!a.history.empty()) train::export_history(history, a.history);

  const auto& best = history.records.at(history.best_epoch ? history.best_epoch - 1 : history.records.size() - 1);
  auto test = train::evaluate(model, data.test);
  nlohmann::json metadata = {{"experiment", cfg},
                             {"stopword_list_version", text::kStopwordListVersion},
                             {"stopped_epoch", history.stopped_epoch},
                             {"best_epoch", history.best_epoch},
                             {"train_accuracy", best.train_accuracy},
                             {"test_accuracy", test.accuracy},
                             {"samples", {{"train", data.train.size()}, {"val", data.val.size()}, {"test", data.test.size()}}}};
  auto crc = store::save(model, data.vocab, a.out, metadata);
  std::fprintf(stderr, "stopped at epoch %zu (best %zu); test accuracy %.5f; saved %s (crc %s)\n",
               history.stopped_epoch, history.best_epoch, test.accuracy, a.out.c_str(),
               store::checksum_hex(crc).c_str());

  if (!a.report_dir.empty()) {
    auto report = metrics::make_report(confusion_of(model, data.test), best.train_accuracy);
    metrics::write_report(metrics::render_report(report), a.report_dir);
  }
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& a) {
  auto archive = store::load<float>(a.model);
  auto corpus = text::load_corpus_csv(a.data);
  std::vector<std::string> cleaned;
  cleaned.reserve(corpus.size());
  for (const auto& t : corpus.texts) cleaned.push_back(text::clean_text(t));
  auto data = train::encode_dataset(cleaned, corpus.labels, archive.vocab, archive.model.config.seq_len);
  std::optional<double> train_acc;
  if (archive.metadata.contains("train_accuracy")) train_acc = archive.metadata["train_accuracy"].get<double>();
  auto report = metrics::make_report(confusion_of(archive.model, data), train_acc);
  auto rendered = metrics::render_report(report);
  metrics::write_report(rendered, a.report_dir);
  std::cout << rendered.text;
  return kExitOk;
}

int run_predict(const PredictArgs& a) {
  auto detector = service::ModelDetector::from_file(a.model);
  const double p = detector->suicide_probability(text::clean_text(a.text));
  std::printf("suicide_probability %.6f\nlabel %s\n", p,
              std::string(text::class_name(p >= 0.5 ? text::kSuicide : text::kNonSuicide)).c_str());
  return kExitOk;
}

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const ServeArgs& a) {
  auto colon = a.addr.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--addr", "expected host:port");
  const std::string host = a.addr.substr(0, colon);
  const int port = std::stoi(a.addr.substr(colon + 1));

  service::ServiceOptions options;
  if (!a.policy.empty()) {
    std::ifstream in(a.policy);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read " + a.policy);
    options.policy = nlohmann::json::parse(in).get<service::RiskPolicy>();
  }
  if (!a.data_dir.empty()) options.data_dir = a.data_dir;
  service::ChatService chat(service::load_question_bank(a.bank), service::ModelDetector::from_file(a.model), options);
  const auto restored = chat.replay();

  const char* token_env = std::getenv(service::kTokenEnv);
  const std::string token = token_env ? token_env : "";
  if (token.empty()) std::cerr << "warning: " << service::kTokenEnv << " is unset; API is unauthenticated\n";

  httplib::Server server;
  service::register_routes(server, chat, token);
  if (!a.static_dir.empty() && !server.set_mount_point("/", a.static_dir)) {
    throw Error(ErrorCode::kIoError, "cannot serve static files from " + a.static_dir);
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::cerr << "model " << chat.model_checksum() << ", " << restored << " sessions restored; listening on " << host
            << ":" << port << "\n";
  if (!server.listen(host, port)) throw Error(ErrorCode::kIoError, "cannot listen on " + a.addr);
  return kExitOk;
}

int run_synth(const SynthArgs& a) {
  train::SynthSpec spec;
  spec.n = a.n;
  spec.seed = a.seed;
  text::save_corpus_csv(a.out, train::make_synthetic_corpus(spec));
  return kExitOk;
}

int run_preprocess(const PreprocessArgs& a) {
  auto corpus = text::load_corpus_csv(a.data);
  for (auto& t : corpus.texts) t = text::clean_text(t);
  text::save_corpus_csv(a.out, corpus);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRU-based suicidal ideation screening: training, evaluation and chat service"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model on a labeled CSV corpus");
  train_cmd->add_option("--data", train_args.data, "CSV with text,class columns")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--config", train_args.config, "JSON experiment config")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "model archive to write")->required();
  train_cmd->add_option("--history", train_args.history, "per-epoch history CSV");
  train_cmd->add_option("--report-dir", train_args.report_dir, "write test-split metrics here");
  train_cmd->add_option("--vocab-out", train_args.vocab_out, "write the fitted vocabulary here");
  train_cmd->add_option("--pretrained", train_args.pretrained, "word vectors for the frozen embedding")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--epochs", train_args.epochs, "override train.epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", train_args.batch_size, "override train.batch_size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train_args.seed, "override every seed in the config");
  train_cmd->add_option("--threads", train_args.threads, "worker threads (0 = all cores)");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a labeled CSV and write metric reports");
  eval_cmd->add_option("--model", eval_args.model)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_args.data)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--report-dir", eval_args.report_dir)->required();

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "print the suicide probability of one text");
  predict_cmd->add_option("--model", predict_args.model)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--text", predict_args.text)->required();

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "run the screening chat API");
  serve_cmd->add_option("--model", serve_args.model)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--bank", serve_args.bank, "question bank JSON")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--addr", serve_args.addr, "host:port")->capture_default_str();
  serve_cmd->add_option("--data-dir", serve_args.data_dir, "directory for session event logs");
  serve_cmd->add_option("--policy", serve_args.policy, "risk policy JSON")->check(CLI::ExistingFile);
  serve_cmd->add_option("--static-dir", serve_args.static_dir, "serve a browser client from here")
      ->check(CLI::ExistingDirectory);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth-data", "write the synthetic separable corpus");
  synth_cmd->add_option("--out", synth_args.out)->required();
  synth_cmd->add_option("--n", synth_args.n)->capture_default_str()->check(CLI::Range(10, 100000000));
  synth_cmd->add_option("--seed", synth_args.seed)->capture_default_str();

  PreprocessArgs pre_args;
  auto* pre_cmd = app.add_subcommand("preprocess", "write a cleaned copy of a corpus CSV");
  pre_cmd->add_option("--data", pre_args.data)->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--out", pre_args.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return run_train(train_args);
    if (eval_cmd->parsed()) return run_evaluate(eval_args);
    if (predict_cmd->parsed()) return run_predict(predict_args);
    if (serve_cmd->parsed()) return run_serve(serve_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (pre_cmd->parsed()) return run_preprocess(pre_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
