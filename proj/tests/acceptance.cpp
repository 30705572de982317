// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hrsn/corpus.hpp"
#include "hrsn/encoder.hpp"
#include "hrsn/evaluation.hpp"
#include "hrsn/lstm.hpp"
#include "hrsn/metrics.hpp"
#include "hrsn/numeric.hpp"
#include "hrsn/optim.hpp"
#include "hrsn/rng.hpp"
#include "hrsn/siamese.hpp"
#include "hrsn/synthetic.hpp"
#include "hrsn/text.hpp"
#include "hrsn/train.hpp"
#include "support/finite_difference.hpp"

namespace {

using namespace hrsn;
using Clock = std::chrono::steady_clock;

constexpr double kRelTol = 1e-4;
constexpr double kAbsTol = 1e-7;
constexpr std::uint64_t kSyntheticSeed = 1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first message is kept for the report line.
struct Checker {
  bool ok = true;
  std::string first_failure;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int report(int id, const std::string& name, double limit_s,
           const std::function<Outcome()>& run) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = run();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double took = seconds_since(start);
  if (limit_s > 0 && took > limit_s) {
    out.pass = false;
    out.detail += "; over the " + fmt("%.0f", limit_s) + " s budget";
  }
  std::printf("criterion %d %s  %s: %s [%.2f s]\n", id, out.pass ? "PASS" : "FAIL",
              name.c_str(), out.detail.c_str(), took);
  std::fflush(stdout);
  return out.pass ? 0 : 1;
}

struct FdTally {
  std::size_t entries = 0;
  double worst = 0.0;
  bool ok = true;
  std::string where;

  void check(std::span<const double> analytic, std::span<const double> numeric,
             const std::string& label) {
    const auto v = testing::compare_gradients(analytic, numeric, kRelTol, kAbsTol);
    entries += analytic.size();
    worst = std::max(worst, v.worst);
    if (!v.ok && ok) where = label + "[" + std::to_string(v.worst_index) + "]";
    ok = ok && v.ok;
  }
};

EncodedDocument random_document(const std::vector<std::size_t>& lengths,
                                std::size_t max_sentences, std::size_t max_words,
                                std::size_t dim, Rng& rng) {
  EncodedDocument doc(max_sentences, max_words, dim);
  for (std::size_t len : lengths) {
    std::vector<Vector> words;
    for (std::size_t t = 0; t < len; ++t) words.push_back(uniform_init(dim, -1.0, 1.0, rng));
    std::vector<std::span<const double>> views;
    for (const auto& w : words) views.push_back(w.values());
    doc.add_sentence(views);
  }
  return doc;
}

// 1 ---------------------------------------------------------------------------

Outcome lstm_gradients() {
  constexpr std::size_t kConfigs = 40;
  Rng rng(101);
  FdTally tally;
  for (std::size_t k = 0; k < kConfigs; ++k) {
    const std::size_t in = 1 + rng.below(4);
    const std::size_t out = 1 + rng.below(4);
    const std::size_t unrolled = 1 + rng.below(5);
    const std::size_t true_len = 1 + rng.below(unrolled);
    auto params = LstmParams::uniform(in, out, -1.0, 1.0, rng);
    std::vector<double> inputs(unrolled * in);
    for (auto& v : inputs) v = rng.uniform(-1.0, 1.0);
    LstmState init{uniform_init(out, -1.0, 1.0, rng), uniform_init(out, -1.0, 1.0, rng)};
    std::optional<StepMasks> masks;
    if (k % 2 == 1) masks = StepMasks{sample_dropout_mask(in, 0.3, rng), sample_dropout_mask(out, 0.3, rng)};
    const Vector wh = uniform_init(out, -1.0, 1.0, rng);
    const Vector wc = uniform_init(out, -1.0, 1.0, rng);

    const auto loss = [&] {
      const auto run = lstm_run_frozen(params, std::span<const double>(inputs), true_len,
                                       unrolled, init, masks ? &*masks : nullptr);
      return dot(wh.values(), run.final.h.values()) + dot(wc.values(), run.final.c.values());
    };
    const auto run = lstm_run_frozen(params, std::span<const double>(inputs), true_len,
                                     unrolled, init, masks ? &*masks : nullptr);
    const auto grads = lstm_backward(params, run.tape, wh, wc);

    const std::string tag = "config " + std::to_string(k);
    auto p = params.tensors();
    const auto g = grads.params.tensors();
    for (std::size_t t = 0; t < p.size(); ++t) {
      tally.check(g[t], testing::numeric_gradient(loss, p[t]), tag + " tensor " + std::to_string(t));
    }
    std::vector<double> d_inputs;
    for (const auto& row : grads.inputs) d_inputs.insert(d_inputs.end(), row.raw().begin(), row.raw().end());
    tally.check(d_inputs, testing::numeric_gradient(loss, inputs), tag + " inputs");
    tally.check(grads.h0.values(), testing::numeric_gradient(loss, init.h.values()), tag + " h0");
    tally.check(grads.c0.values(), testing::numeric_gradient(loss, init.c.values()), tag + " c0");
  }
  std::ostringstream d;
  d << kConfigs << " configs, " << tally.entries << " entries, worst error "
    << fmt("%.1e", tally.worst);
  if (!tally.ok) d << ", mismatch at " << tally.where;
  return {tally.ok, d.str()};
}

// 2 ---------------------------------------------------------------------------

Outcome pipeline_gradients() {
  const EncoderDims dims{3, 2, 2};
  FdTally tally;
  std::size_t nonzero = 0;
  for (int label : {0, 1}) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      Rng rng(seed * 10 + static_cast<std::uint64_t>(label));
      auto params = EncoderParams::uniform(dims, -1.0, 1.0, rng);
      EncodedPair pair{random_document({2, 2}, 2, 2, 3, rng), random_document({2, 2}, 2, 2, 3, rng), label};

      // Thresholds placed so that the loss is in its active region.
      const double d0 = forward_pair(params, pair, {}).distance;
      TrainConfig config;
      config.dims = dims;
      config.max_words = 2;
      config.max_sentences = 2;
      config.dropout_rate = 0.0;
      config.thresholds = label == 1 ? Thresholds{0.5 * d0, 0.5 * d0 + 1.0} : Thresholds{0.0, 2.0 * d0 + 0.5};

      const auto loss = [&] { return forward_pair(params, pair, config.thresholds).loss; };
      const auto batch = batch_gradient(params, std::span<const EncodedPair>(&pair, 1), config, rng);
      auto p = params.tensors();
      const auto g = batch.grads.tensors();
      for (std::size_t t = 0; t < p.size(); ++t) {
        for (double v : g[t]) nonzero += v != 0.0;
        tally.check(g[t], testing::numeric_gradient(loss, p[t]),
                    "label " + std::to_string(label) + " tensor " + std::to_string(t));
      }
    }
  }
  const bool ok = tally.ok && nonzero > tally.entries / 2;
  std::ostringstream d;
  d << "labels 0 and 1, 3 seeds each, " << tally.entries << " entries (" << nonzero
    << " nonzero), worst error " << fmt("%.1e", tally.worst);
  if (!tally.ok) d << ", mismatch at " << tally.where;
  return {ok, d.str()};
}

// 3 ---------------------------------------------------------------------------

Outcome padding_invariance() {
  const EncoderDims dims{20, 10, 5};
  Rng rng(303);
  const auto params = EncoderParams::uniform(dims, -0.5, 0.5, rng);
  std::size_t equal = 0;
  for (std::size_t k = 0; k < 100; ++k) {
    const std::size_t sentences = 1 + rng.below(40);
    std::vector<std::size_t> lengths(sentences);
    std::size_t longest = 0;
    for (auto& l : lengths) {
      l = 1 + rng.below(33);
      longest = std::max(longest, l);
    }
    const auto tight = random_document(lengths, sentences, longest, dims.word, rng);
    const auto padded = tight.with_bounds(123, 33);
    std::optional<DropoutMasks> masks;
    if (k % 2 == 1) masks = sample_dropout_masks(dims, 0.3, rng);
    const auto* m = masks ? &*masks : nullptr;
    equal += encode_document(params, tight, m) == encode_document(params, padded, m);
  }
  return {equal == 100, std::to_string(equal) + "/100 documents bitwise equal at (33, 123)"};
}

// 4 ---------------------------------------------------------------------------

Outcome loss_shape() {
  Checker c;
  const std::vector<Thresholds> settings{{1.0, 3.0}, {0.0, 0.5}, {0.25, 4.0}};
  constexpr double kStep = 1e-3;
  for (const auto& th : settings) {
    double prev1 = contrastive_loss(0.0, 1, th);
    double prev0 = contrastive_loss(0.0, 0, th);
    for (double d = 0.0; d <= 6.0; d += kStep) {
      const double l1 = contrastive_loss(d, 1, th);
      const double l0 = contrastive_loss(d, 0, th);
      c.expect(d > th.tau1 || l1 == 0.0, "same-author loss nonzero below tau1");
      c.expect(d < th.tau2 || l0 == 0.0, "different-author loss nonzero above tau2");
      c.expect(d <= th.tau1 || l1 > 0.0, "same-author loss zero above tau1");
      c.expect(d >= th.tau2 || l0 > 0.0, "different-author loss zero below tau2");
      c.expect(l1 >= prev1, "same-author loss decreases in d");
      c.expect(l0 <= prev0, "different-author loss increases in d");
      prev1 = l1;
      prev0 = l0;
    }
    for (double tau : {th.tau1, th.tau2}) {
      for (int label : {0, 1}) {
        const double at = contrastive_loss(tau, label, th);
        for (double h : {1e-10, 1e-11, 1e-12}) {
          const double below = contrastive_loss(std::max(0.0, tau - h), label, th);
          const double above = contrastive_loss(tau + h, label, th);
          c.expect(std::abs(below - at) <= 1e-9 && std::abs(above - at) <= 1e-9,
                   "discontinuity at tau");
        }
      }
    }
  }
  Rng rng(404);
  for (std::size_t k = 0; k < 200; ++k) {
    const auto x1 = uniform_init(5, -1.0, 1.0, rng);
    const auto x2 = uniform_init(5, -1.0, 1.0, rng);
    const int label = static_cast<int>(k % 2);
    const Thresholds th{0.5, 2.0};
    c.expect(contrastive_loss(x1, x2, label, th) == contrastive_loss(x2, x1, label, th),
             "loss not symmetric under swap");
    const auto [g1, g2] = contrastive_loss_grad(x1, x2, label, th);
    const auto [s1, s2] = contrastive_loss_grad(x2, x1, label, th);
    c.expect(g1 == s2 && g2 == s1, "gradient not symmetric under swap");
  }
  return {c.ok, c.ok ? "zero regions, monotonicity, swap symmetry, continuity at tau1/tau2"
                     : c.first_failure};
}

// 5 ---------------------------------------------------------------------------

Outcome clip_and_adadelta() {
  Checker c;
  std::vector<double> g{6.0, 8.0};
  const std::vector<std::span<double>> tensors{g};
  const double norm = clip_by_global_norm(tensors, 5.0);
  c.expect(norm == 10.0 && g[0] == 3.0 && g[1] == 4.0, "clip (6, 8) at 5 is not (3, 4)");

  const AdadeltaConfig cfg{1.0, 0.95, 1e-6};
  std::vector<double> grad{1.0};
  const std::vector<std::span<const double>> grads{grad};
  AdadeltaState state(grads);
  const auto delta = adadelta_update(state, grads, cfg);
  const double expected = -cfg.learning_rate * std::sqrt(cfg.epsilon) / std::sqrt(0.05 + cfg.epsilon) * 1.0;
  c.expect(std::abs(delta[0][0] - expected) < 1e-9, "first Adadelta step off the closed form");
  c.expect(std::abs(delta[0][0] - (-0.0044721)) < 1e-7, "first Adadelta step off -0.0044721");
  return {c.ok, c.ok ? "(6, 8) -> (3, 4) exact; first step " + fmt("%.9f", delta[0][0])
                     : c.first_failure};
}

// 6, 7, 8 ---------------------------------------------------------------------

struct SyntheticRun {
  SyntheticCorpus data;
  TrainConfig config;
  CvReport report;
  std::string json;
  double seconds = 0.0;
};

SyntheticRun run_synthetic_cv() {
  SyntheticRun run;
  Rng rng(kSyntheticSeed);
  run.data = generate_synthetic(SyntheticConfig{}, rng);
  run.config.dims = {20, 10, 5};
  run.config.max_words = 12;
  run.config.max_sentences = 15;
  run.config.batch_size = 32;
  run.config.max_epochs = 30;
  run.config.thresholds = {1.0, 3.0};
  run.config.seed = kSyntheticSeed;
  run.config.deterministic = true;
  const auto start = Clock::now();
  run.report = cross_validate(run.data.corpus, run.data.embeddings, run.config);
  run.seconds = seconds_since(start);
  run.json = to_json(run.report).dump(2);
  return run;
}

Outcome synthetic_separability(const SyntheticRun& run) {
  double same = 0.0, diff = 0.0;
  std::size_t n_same = 0, n_diff = 0, correct = 0, total = 0;
  const double tau = run.config.thresholds.decision_threshold();
  for (const auto& fold : run.report.folds) {
    for (std::size_t k = 0; k < fold.test_ids.size(); ++k) {
      const double d = fold.test_distances[k];
      const int label = run.data.corpus[fold.test_ids[k]].label;
      (label == 1 ? same : diff) += d;
      ++(label == 1 ? n_same : n_diff);
      correct += (d < tau) == (label == 1);
      ++total;
    }
  }
  same /= static_cast<double>(n_same);
  diff /= static_cast<double>(n_diff);
  const double accuracy = run.report.midpoint.accuracy.mean;
  const double margin = diff - same;
  const double needed = 0.5 * (run.config.thresholds.tau2 - run.config.thresholds.tau1);
  const bool ok = accuracy >= 0.9 && margin > needed && run.seconds < 600.0;
  std::ostringstream d;
  d << "10-fold held-out accuracy " << fmt("%.3f", accuracy) << " +- "
    << fmt("%.3f", run.report.midpoint.accuracy.stddev) << " (pooled "
    << fmt("%.3f", static_cast<double>(correct) / static_cast<double>(total))
    << ", need >= 0.900); mean distance same " << fmt("%.3f", same) << " vs different "
    << fmt("%.3f", diff) << ", margin " << fmt("%.3f", margin) << " (need > "
    << fmt("%.1f", needed) << "); " << fmt("%.0f", run.seconds) << " s";
  return {ok, d.str()};
}

Outcome determinism(const SyntheticRun& first) {
  const auto second = run_synthetic_cv();
  const bool same = second.json == first.json;
  return {same, same ? "two deterministic runs, " + std::to_string(first.json.size()) +
                           " bytes of CvReport JSON, identical"
                     : "CvReport JSON differs between runs"};
}

Outcome metrics_oracle(const SyntheticRun& run) {
  Checker c;
  const auto m = confusion_metrics({3, 1, 4, 2});
  c.expect(m.precision == 0.75 && m.recall == 0.6 && m.f1 == 2.0 / 3.0 && m.accuracy == 0.7,
           "fixture tp=3 fp=1 tn=4 fn=2 mismatch");

  // Independent recomputation from the raw per-fold counts.
  std::vector<std::vector<double>> columns(4);
  const double tau = run.config.thresholds.decision_threshold();
  for (const auto& fold : run.report.folds) {
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t k = 0; k < fold.test_ids.size(); ++k) {
      const bool said_same = fold.test_distances[k] < tau;
      const bool is_same = run.data.corpus[fold.test_ids[k]].label == 1;
      tp += said_same && is_same;
      fp += said_same && !is_same;
      tn += !said_same && !is_same;
      fn += !said_same && is_same;
    }
    const auto& k = fold.midpoint.counts;
    c.expect(k.tp == tp && k.fp == fp && k.tn == tn && k.fn == fn, "fold counts disagree");
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    columns[0].push_back(p);
    columns[1].push_back(r);
    columns[2].push_back(p + r > 0 ? 2 * p * r / (p + r) : 0.0);
    columns[3].push_back((tp + tn) / (tp + fp + tn + fn));
  }
  const auto& s = run.report.midpoint;
  const MeanStd* reported[4] = {&s.precision, &s.recall, &s.f1, &s.accuracy};
  double worst = 0.0;
  for (std::size_t col = 0; col < 4; ++col) {
    double sum = 0.0;
    for (double v : columns[col]) sum += v;
    const double n = static_cast<double>(columns[col].size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : columns[col]) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    worst = std::max({worst, std::abs(mean - reported[col]->mean), std::abs(sd - reported[col]->stddev)});
  }
  c.expect(worst <= 1e-9, "aggregate disagrees with recomputation");
  return {c.ok, c.ok ? "fixture exact; 10-fold mean/sample std within " + fmt("%.1e", worst)
                     : c.first_failure};
}

// 9 ---------------------------------------------------------------------------

std::string fuzz_document(Rng& rng) {
  static const std::vector<std::string> pieces{
      "the", "The", "cat", "SAT", "on", "mat", "Dr.", "Mr.", "e.g.", "etc.", "J.", "U.S.",
      "3.14", "1,000", "42", ".", ",", "!", "?", "...", ";", ":", "(", ")", "\"", "'",
      "don't", "well-known", "caf\xc3\xa9", "na\xc3\xafve", "\xe2\x80\x94", "\xe2\x80\x9cq\xe2\x80\x9d",
      "http://example.com/a?b=1&c=2", "https://x.org/path/to.html", "www.site.net/page",
      "ftp://files.example.org", "user@example.com", "first.last+tag@mail.co.uk",
      "555-123-4567", "(555) 123-4567", "+1 555 123 4567", "555.123.4567", "+44 20 7946 0958",
      "<url>", "<email>", "<phone>", "<URL>", "@", "#tag", "a.b", "x@y", "1-2-3",
      "\n", "\n\n", "\t", "  ", "\r\n"};
  std::string doc = "Start";
  const std::size_t n = 1 + rng.below(80);
  for (std::size_t k = 0; k < n; ++k) {
    doc += rng.bernoulli(0.2) ? "" : " ";
    doc += pieces[rng.below(pieces.size())];
  }
  return doc;
}

Outcome pipeline_fidelity() {
  Checker c;
  Rng rng(909);
  std::vector<std::string> docs;
  for (std::size_t k = 0; k < 1000; ++k) docs.push_back(fuzz_document(rng));

  std::size_t idempotent = 0;
  for (const auto& d : docs) {
    const auto once = normalize_text(d);
    idempotent += normalize_text(once) == once;
  }
  c.expect(idempotent == docs.size(), "normalize_text not idempotent");

  std::size_t round_trips = 0;
  std::ostringstream saved;
  Corpus corpus;
  for (std::size_t k = 0; k < 250; ++k) {
    VerificationInstance inst;
    const std::size_t known = 1 + rng.below(3);
    for (std::size_t j = 0; j < known; ++j) inst.known_docs.push_back(docs[rng.below(docs.size())]);
    inst.unknown_doc = docs[rng.below(docs.size())];
    inst.label = static_cast<int>(rng.below(2));
    corpus.push_back(inst);
  }
  save_corpus(corpus, saved);
  std::istringstream in(saved.str());
  const auto loaded = load_corpus(in);
  c.expect(loaded.size() == corpus.size(), "corpus size changed");
  for (std::size_t k = 0; k < std::min(loaded.size(), corpus.size()); ++k) {
    std::string joined = corpus[k].known_docs[0];
    for (std::size_t j = 1; j < corpus[k].known_docs.size(); ++j) joined += "\n" + corpus[k].known_docs[j];
    round_trips += loaded[k] == corpus[k] && concatenate_known(loaded[k]) == joined &&
                   loaded[k].unknown_doc == corpus[k].unknown_doc;
  }
  std::ostringstream resaved;
  save_corpus(loaded, resaved);
  c.expect(round_trips == corpus.size() && resaved.str() == saved.str(), "JSONL round trip not byte-exact");

  EmbeddingTable table(7);
  for (const char* w : {"the", "cat", "sat", "on", "mat", "start", "<url>", "<email>", "<phone>", "."}) {
    table.insert(w, uniform_init(7, -1.0, 1.0, rng));
  }
  std::size_t shapes = 0;
  for (const auto& d : docs) {
    const std::size_t tw = 1 + rng.below(40);
    const std::size_t ts = 1 + rng.below(130);
    const auto enc = encode_text(d, table, tw, ts);
    shapes += enc.max_sentences() == ts && enc.max_words() == tw && enc.dim() == 7 &&
              enc.values().size() == ts * tw * 7 && enc.num_sentences() >= 1 &&
              enc.num_sentences() <= ts;
  }
  c.expect(shapes == docs.size(), "encoded shape differs from [T^s x T^w x D_w]");

  std::ostringstream d;
  d << idempotent << "/1000 normalizations idempotent, " << round_trips << "/" << corpus.size()
    << " JSONL round trips byte-exact, " << shapes << "/1000 encodings shaped [Ts x Tw x Dw]";
  return {c.ok, d.str()};
}

}  // namespace

int main() {
  int failures = 0;
  failures += report(1, "lstm gradients", 30.0, lstm_gradients);
  failures += report(2, "pipeline gradients", 30.0, pipeline_gradients);
  failures += report(3, "padding invariance", 10.0, padding_invariance);
  failures += report(4, "loss shape", 5.0, loss_shape);
  failures += report(5, "clipping and adadelta", 1.0, clip_and_adadelta);

  std::optional<SyntheticRun> run;
  try {
    run = run_synthetic_cv();
  } catch (const std::exception& e) {
    std::printf("synthetic cross-validation failed: %s\n", e.what());
  }
  const auto with_run = [&](Outcome (*f)(const SyntheticRun&)) {
    return [&run, f] {
      if (!run) return Outcome{false, "no synthetic run"};
      return f(*run);
    };
  };
  failures += report(6, "synthetic separability", 0.0, with_run(synthetic_separability));
  failures += report(7, "determinism", 0.0, with_run(determinism));
  failures += report(8, "metrics oracle", 0.0, with_run(metrics_oracle));
  failures += report(9, "data pipeline fidelity", 0.0, pipeline_fidelity);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
