// hrsn command line: corpus preparation, training, evaluation and checks.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hrsn/checkpoint.hpp"
#include "hrsn/config.hpp"
#include "hrsn/corpus.hpp"
#include "hrsn/embeddings.hpp"
#include "hrsn/evaluation.hpp"
#include "hrsn/gradcheck.hpp"
#include "hrsn/rng.hpp"
#include "hrsn/synthetic.hpp"
#include "hrsn/text.hpp"
#include "hrsn/train.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string corpus_path;
  std::string embeddings_path;
  std::string checkpoint_path;
  bool deterministic = false;
  std::optional<std::size_t> threads;
  std::string out_path;
  std::vector<std::string> overrides;  // key=value
};

hrsn::TrainConfig resolve_config(const CommonOptions& opts) {
  hrsn::TrainConfig config;
  if (!opts.config_path.empty()) config = hrsn::load_config(opts.config_path);
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw hrsn::Error("--set expects key=value, got '" + kv + "'");
    hrsn::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) config.seed = *opts.seed;
  if (opts.deterministic) config.deterministic = true;
  if (opts.threads) config.threads = *opts.threads;
  config.validate();
  return config;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw hrsn::Error(std::string("missing required option ") + flag);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hrsn::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hrsn::Error("cannot write " + out_path);
  out << text;
}

int run_synthetic(const CommonOptions& opts, hrsn::SyntheticConfig cfg) {
  require(opts.out_path, "--out");
  const fs::path dir = opts.out_path;
  fs::create_directories(dir);
  hrsn::Rng rng(opts.seed.value_or(0));
  const auto data = hrsn::generate_synthetic(cfg, rng);
  hrsn::save_corpus(data.corpus, dir / "corpus.jsonl");
  {
    std::ofstream out(dir / "embeddings.txt");
    hrsn::save_embeddings(data.embeddings, out);
  }
  hrsn::TrainConfig train;
  train.dims = {cfg.embedding_dim, 10, 5};
  train.max_words = 12;
  train.max_sentences = 15;
  train.max_epochs = 30;
  train.seed = opts.seed.value_or(0);
  {
    std::ofstream out(dir / "train.cfg");
    out << "# configuration for the synthetic corpus\n" << hrsn::to_key_value(train);
  }
  std::cerr << "wrote " << data.corpus.size() << " instances, " << cfg.vocab
            << " embeddings and train.cfg to " << dir.string() << "\n";
  return 0;
}

int run_preprocess(const CommonOptions& opts) {
  require(opts.corpus_path, "--corpus");
  const auto config = resolve_config(opts);
  const hrsn::Corpus corpus = hrsn::load_corpus(opts.corpus_path);
  std::optional<hrsn::EmbeddingTable> table;
  if (!opts.embeddings_path.empty()) {
    table = hrsn::load_embeddings(opts.embeddings_path, config.dims.word);
  }

  std::ostringstream out;
  std::size_t tokens = 0;
  const auto tokenized = [&](const std::string& text) {
    auto doc = hrsn::tokenize_document(text, config.max_words, config.max_sentences);
    for (const auto& sentence : doc) {
      tokens += sentence.size();
      if (table) {
        for (const auto& token : sentence) table->lookup(token);
      }
    }
    return doc;
  };
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    nlohmann::ordered_json j;
    j["index"] = i;
    j["label"] = inst.label;
    j["known"] = tokenized(hrsn::concatenate_known(inst));
    j["unknown"] = tokenized(inst.unknown_doc);
    out << j.dump() << "\n";
  }
  emit(out.str(), opts.out_path);
  std::cerr << "instances " << corpus.size() << ", tokens " << tokens;
  if (table) {
    std::cerr << ", oov " << table->oov_count() << " (" << table->oov_rate() << ")";
  }
  std::cerr << "\n";
  return 0;
}

int run_train(const CommonOptions& opts, std::size_t fold) {
  require(opts.corpus_path, "--corpus");
  require(opts.embeddings_path, "--embeddings");
  require(opts.checkpoint_path, "--checkpoint");
  const auto config = resolve_config(opts);
  const hrsn::Corpus corpus = hrsn::load_corpus(opts.corpus_path);
  const auto table = hrsn::load_embeddings(opts.embeddings_path, config.dims.word);

  hrsn::Rng rng(config.seed);
  const auto splits = hrsn::make_cv_splits(corpus.size(), config.folds, rng);
  if (fold >= splits.size()) throw hrsn::Error("--fold out of range");
  const auto& split = splits[fold];

  std::ofstream log_file;
  if (!opts.out_path.empty()) {
    log_file.open(opts.out_path);
    if (!log_file) throw hrsn::Error("cannot write " + opts.out_path);
  }
  const auto on_epoch = [&](const hrsn::EpochLog& entry) {
    const std::string line = hrsn::to_json_line(entry);
    std::cerr << line << "\n";
    if (log_file) log_file << line << "\n" << std::flush;
  };
  const auto result = hrsn::fit(corpus, split, table, config, on_epoch);

  hrsn::save_checkpoint(hrsn::Model{hrsn::ModelConfig::from(config), result.params},
                        opts.checkpoint_path);

  std::vector<hrsn::EncodedPair> test;
  for (const auto id : split.test_ids) test.push_back(hrsn::encode_instance(corpus[id], table, config));
  const auto eval = hrsn::evaluate(result.params, test, config.thresholds,
                                   config.thresholds.decision_threshold());
  const auto m = hrsn::confusion_metrics(eval.counts);
  std::cerr << "best epoch " << result.best_epoch << ", dev accuracy "
            << result.best_dev_accuracy << ", test accuracy " << m.accuracy << " on "
            << test.size() << " pairs\n";
  return 0;
}

int run_verify(const CommonOptions& opts, const std::string& doc_a, const std::string& doc_b) {
  require(opts.checkpoint_path, "--checkpoint");
  require(opts.embeddings_path, "--embeddings");
  const auto model = hrsn::load_checkpoint(opts.checkpoint_path);
  const auto table = hrsn::load_embeddings(opts.embeddings_path, model.config.dims.word);
  const auto score = hrsn::verify_pair(model, table, read_file(doc_a), read_file(doc_b));
  emit(hrsn::to_json(score, model.config.thresholds).dump(2) + "\n", opts.out_path);
  return 0;
}

int run_cross_validate(const CommonOptions& opts) {
  require(opts.corpus_path, "--corpus");
  require(opts.embeddings_path, "--embeddings");
  const auto config = resolve_config(opts);
  const hrsn::Corpus corpus = hrsn::load_corpus(opts.corpus_path);
  const auto table = hrsn::load_embeddings(opts.embeddings_path, config.dims.word);
  const auto start = std::chrono::steady_clock::now();
  const auto report = hrsn::cross_validate(corpus, table, config);
  const auto json = hrsn::to_json(report);
  emit(json.dump(2) + "\n", opts.out_path);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << hrsn::render_table(nlohmann::json::parse(json.dump())) << "elapsed " << secs
            << " s\n";
  return 0;
}

int run_report(const std::string& path) {
  std::cout << hrsn::render_table(nlohmann::json::parse(read_file(path)));
  return 0;
}

int run_gradcheck(const CommonOptions& opts, std::size_t configs) {
  const std::uint64_t seed = opts.seed.value_or(0);
  const auto lstm = hrsn::lstm_gradcheck(configs, seed);
  const auto same = hrsn::pipeline_gradcheck(1, seed);
  const auto diff = hrsn::pipeline_gradcheck(0, seed + 1);
  bool ok = true;
  const auto show = [&](const char* name, const hrsn::GradCheckStats& s) {
    std::cout << name << ": " << (s.ok() ? "ok" : "FAILED") << ", " << s.checked
              << " entries, " << s.failed << " failed, max rel " << s.max_relative_error
              << ", max abs " << s.max_absolute_error << "\n";
    if (!s.ok() && !s.worst.empty()) std::cout << "  " << s.worst << "\n";
    ok = ok && s.ok();
  };
  show("lstm", lstm);
  show("pipeline l=1", same);
  show("pipeline l=0", diff);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical recurrent Siamese network for authorship verification"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions opts;
  app.add_option("--config", opts.config_path, "key = value training configuration");
  app.add_option("--seed", opts.seed, "seed for every random draw");
  app.add_option("--corpus", opts.corpus_path, "corpus JSONL");
  app.add_option("--embeddings", opts.embeddings_path, "word embeddings, GloVe text format");
  app.add_option("--checkpoint", opts.checkpoint_path, "model checkpoint JSON");
  app.add_flag("--deterministic", opts.deterministic, "serial, reproducible execution");
  app.add_option("--threads", opts.threads, "worker threads");
  app.add_option("--out", opts.out_path, "output path");
  app.add_option("--set", opts.overrides, "override a config key (key=value)");

  hrsn::SyntheticConfig synth;
  auto* synthetic = app.add_subcommand("synthetic", "generate the synthetic author corpus into --out");
  synthetic->add_option("--authors", synth.authors);
  synthetic->add_option("--vocab", synth.vocab);
  synthetic->add_option("--dim", synth.embedding_dim);
  synthetic->add_option("--instances", synth.instances);
  synthetic->add_option("--zipf", synth.zipf_exponent);
  synthetic->add_option("--max-known", synth.max_known_docs);

  auto* preprocess = app.add_subcommand("preprocess", "normalize, segment and tokenize a corpus");

  std::size_t fold = 0;
  auto* train = app.add_subcommand("train", "train on one split, write --checkpoint and the epoch log to --out");
  train->add_option("--fold", fold, "which cross-validation split to train on");

  std::string doc_a, doc_b;
  auto* verify = app.add_subcommand("verify", "score two text files with a trained model");
  verify->add_option("first", doc_a)->required()->check(CLI::ExistingFile);
  verify->add_option("second", doc_b)->required()->check(CLI::ExistingFile);

  auto* cv = app.add_subcommand("cross-validate", "k-fold cross-validation report");

  std::string report_path;
  auto* report = app.add_subcommand("report", "render a cross-validation report as a table");
  report->add_option("report", report_path)->required()->check(CLI::ExistingFile);

  std::size_t configs = 20;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  gradcheck->add_option("--configs", configs, "random LSTM configurations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synthetic) return run_synthetic(opts, synth);
    if (*preprocess) return run_preprocess(opts);
    if (*train) return run_train(opts, fold);
    if (*verify) return run_verify(opts, doc_a, doc_b);
    if (*cv) return run_cross_validate(opts);
    if (*report) return run_report(report_path);
    if (*gradcheck) return run_gradcheck(opts, configs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
