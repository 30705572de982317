#include "hrsn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "hrsn/rng.hpp"

namespace hrsn {
namespace {

using nlohmann::ordered_json;

constexpr const char* kReportFormat = "hrsn-cv-report";
constexpr int kReportVersion = 1;

ThresholdResult score_at(const EvalResult& eval, std::span<const EncodedPair> pairs,
                         double threshold) {
  ThresholdResult r;
  r.threshold = threshold;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    r.counts.add(pairs[p].label, decide(eval.distances[p], threshold).decision);
  }
  r.metrics = confusion_metrics(r.counts);
  return r;
}

FoldResult run_fold(const Corpus& corpus, const EmbeddingTable& table,
                    const TrainConfig& base, const CvSplit& split, std::uint64_t seed) {
  TrainConfig config = base;
  config.seed = seed;
  const FitResult fitted = fit(corpus, split, table, config);

  std::vector<EncodedPair> test_pairs;
  test_pairs.reserve(split.test_ids.size());
  for (std::size_t id : split.test_ids) {
    test_pairs.push_back(encode_instance(corpus.at(id), table, config));
  }
  const double tau = config.thresholds.decision_threshold();
  const EvalResult test = evaluate(fitted.params, test_pairs, config.thresholds, tau);

  FoldResult out;
  out.fold = split.fold_index;
  out.train_size = split.train_ids.size();
  out.dev_size = split.dev_ids.size();
  out.test_ids = split.test_ids;
  out.test_distances = test.distances;
  out.epochs_run = fitted.log.size();
  out.best_epoch = fitted.best_epoch;
  out.midpoint = score_at(test, test_pairs, tau);

  if (config.calibrate_tau) {
    std::vector<EncodedPair> dev_pairs;
    std::vector<int> dev_labels;
    for (std::size_t id : split.dev_ids) {
      dev_pairs.push_back(encode_instance(corpus.at(id), table, config));
      dev_labels.push_back(dev_pairs.back().label);
    }
    const EvalResult dev = evaluate(fitted.params, dev_pairs, config.thresholds, tau);
    const double tuned = calibrate_threshold(dev.distances, dev_labels, tau);
    out.calibrated = score_at(test, test_pairs, tuned);
  }
  return out;
}

ordered_json mean_std_json(const MeanStd& m) {
  return {{"mean", m.mean},
          {"std", m.stddev},
          {"mean_percent", 100.0 * m.mean},
          {"std_percent", 100.0 * m.stddev}};
}

ordered_json summary_json(const MetricSummary& s) {
  return {{"precision", mean_std_json(s.precision)},
          {"recall", mean_std_json(s.recall)},
          {"f1", mean_std_json(s.f1)},
          {"accuracy", mean_std_json(s.accuracy)}};
}

ordered_json threshold_json(const ThresholdResult& r) {
  const auto& m = r.metrics;
  return {{"threshold", r.threshold},
          {"counts", {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn}}},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"accuracy", m.accuracy},
          {"percent",
           {{"precision", 100.0 * m.precision},
            {"recall", 100.0 * m.recall},
            {"f1", 100.0 * m.f1},
            {"accuracy", 100.0 * m.accuracy}}},
          {"undefined",
           {{"precision", m.precision_undefined},
            {"recall", m.recall_undefined},
            {"f1", m.f1_undefined}}}};
}

std::string format_row(const std::string& label, const nlohmann::json& summary) {
  char buf[160];
  const auto cell = [&](const char* key) {
    return std::pair{summary.at(key).at("mean_percent").get<double>(),
                     summary.at(key).at("std_percent").get<double>()};
  };
  const auto [p, ps] = cell("precision");
  const auto [r, rs] = cell("recall");
  const auto [f, fs] = cell("f1");
  const auto [a, as] = cell("accuracy");
  std::snprintf(buf, sizeof(buf), "%-22s %6.1f +- %-4.1f %6.1f +- %-4.1f %6.1f +- %-4.1f %6.1f +- %-4.1f\n",
                label.c_str(), p, ps, r, rs, f, fs, a, as);
  return buf;
}

}  // namespace

MetricSummary summarize(std::span<const Metrics> per_fold) {
  std::vector<double> p, r, f, a;
  for (const auto& m : per_fold) {
    p.push_back(m.precision);
    r.push_back(m.recall);
    f.push_back(m.f1);
    a.push_back(m.accuracy);
  }
  return {mean_and_sample_std(p), mean_and_sample_std(r), mean_and_sample_std(f),
          mean_and_sample_std(a)};
}

double calibrate_threshold(std::span<const double> distances, std::span<const int> labels,
                           double preferred) {
  if (distances.size() != labels.size()) throw ShapeError("calibrate_threshold: size mismatch");
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> candidates{preferred};
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k] > sorted[k - 1]) candidates.push_back(0.5 * (sorted[k] + sorted[k - 1]));
  }
  if (!sorted.empty()) {
    candidates.push_back(sorted.front() * 0.5);
    candidates.push_back(sorted.back() + 1.0);
  }
  double best = preferred;
  std::size_t best_correct = 0;
  bool first = true;
  for (double t : candidates) {
    std::size_t correct = 0;
    for (std::size_t k = 0; k < distances.size(); ++k) {
      const bool same = decide(distances[k], t).decision == Decision::kSameAuthor;
      correct += same == (labels[k] == 1);
    }
    if (first || correct > best_correct ||
        (correct == best_correct && std::abs(t - preferred) < std::abs(best - preferred))) {
      best = t;
      best_correct = correct;
      first = false;
    }
  }
  return best;
}

CvReport cross_validate(const Corpus& corpus, const EmbeddingTable& table,
                        const TrainConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const auto splits = make_cv_splits(corpus.size(), config.folds, rng);
  std::vector<std::uint64_t> seeds(splits.size());
  for (auto& s : seeds) s = rng.next_u64();

  CvReport report;
  report.folds.resize(splits.size());
  const std::size_t workers =
      config.deterministic ? 1 : std::clamp<std::size_t>(config.threads, 1, splits.size());
  TrainConfig fold_config = config;
  if (workers > 1) fold_config.threads = 1;

  if (workers == 1) {
    for (std::size_t f = 0; f < splits.size(); ++f) {
      report.folds[f] = run_fold(corpus, table, fold_config, splits[f], seeds[f]);
    }
  } else {
    std::vector<std::exception_ptr> errors(splits.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t f = w; f < splits.size(); f += workers) {
          try {
            report.folds[f] = run_fold(corpus, table, fold_config, splits[f], seeds[f]);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<Metrics> mid;
  std::vector<Metrics> cal;
  for (const auto& f : report.folds) {
    mid.push_back(f.midpoint.metrics);
    if (f.calibrated) cal.push_back(f.calibrated->metrics);
  }
  report.midpoint = summarize(mid);
  if (!cal.empty()) report.calibrated = summarize(cal);
  return report;
}

ordered_json to_json(const CvReport& report) {
  ordered_json j;
  j["format"] = kReportFormat;
  j["version"] = kReportVersion;
  j["positive_class"] = "same_author";
  j["std"] = "sample";
  j["num_folds"] = report.folds.size();
  ordered_json folds = ordered_json::array();
  for (const auto& f : report.folds) {
    ordered_json row;
    row["fold"] = f.fold;
    row["train_size"] = f.train_size;
    row["dev_size"] = f.dev_size;
    row["test_size"] = f.test_ids.size();
    row["epochs_run"] = f.epochs_run;
    row["best_epoch"] = f.best_epoch;
    row["midpoint"] = threshold_json(f.midpoint);
    if (f.calibrated) row["calibrated"] = threshold_json(*f.calibrated);
    row["test_ids"] = f.test_ids;
    row["test_distances"] = f.test_distances;
    folds.push_back(std::move(row));
  }
  j["folds"] = std::move(folds);
  j["aggregate"] = {{"midpoint", summary_json(report.midpoint)}};
  if (report.calibrated) j["aggregate"]["calibrated"] = summary_json(*report.calibrated);
  return j;
}

std::string render_table(const nlohmann::json& report) {
  std::ostringstream out;
  const auto& folds = report.at("folds");
  out << "fold   tp   fp   tn   fn  precision  recall      f1  accuracy\n";
  for (const auto& f : folds) {
    const auto& m = f.at("midpoint");
    const auto& c = m.at("counts");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%4zu %4zu %4zu %4zu %4zu %10.1f %7.1f %7.1f %9.1f\n",
                  f.at("fold").get<std::size_t>(), c.at("tp").get<std::size_t>(),
                  c.at("fp").get<std::size_t>(), c.at("tn").get<std::size_t>(),
                  c.at("fn").get<std::size_t>(), 100.0 * m.at("precision").get<double>(),
                  100.0 * m.at("recall").get<double>(), 100.0 * m.at("f1").get<double>(),
                  100.0 * m.at("accuracy").get<double>());
    out << buf;
  }
  out << "\n" << std::string(22, ' ')
      << "   precision        recall            F1        accuracy\n";
  const auto& agg = report.at("aggregate");
  out << format_row("HRSN (tau midpoint)", agg.at("midpoint"));
  if (agg.contains("calibrated")) out << format_row("HRSN (tau on dev)", agg.at("calibrated"));
  out << "(mean +- sample std over " << folds.size() << " folds, percent)\n";
  return out.str();
}

PairScore verify_pair(const Model& model, const EmbeddingTable& table,
                      std::string_view doc_a, std::string_view doc_b) {
  const auto& c = model.config;
  if (table.dim() != c.dims.word) {
    throw ShapeError("verify_pair: embedding dim " + std::to_string(table.dim()) +
                     " != model word dim " + std::to_string(c.dims.word));
  }
  const auto a = encode_text(doc_a, table, c.max_words, c.max_sentences);
  const auto b = encode_text(doc_b, table, c.max_words, c.max_sentences);
  const double d = distance(encode_document(model.params, a), encode_document(model.params, b));
  return decide(d, c.thresholds);
}

ordered_json to_json(const PairScore& score, const Thresholds& thresholds) {
  return {{"format", "hrsn-pair-score"},
          {"version", 1},
          {"distance", score.distance},
          {"decision", std::string(to_string(score.decision))},
          {"threshold", thresholds.decision_threshold()},
          {"margin", score.margin},
          {"tau1", thresholds.tau1},
          {"tau2", thresholds.tau2}};
}

}  // namespace hrsn
