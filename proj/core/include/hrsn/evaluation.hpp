#pragma once

// Cross-validation driver, tabular reports and single-pair verification.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrsn/checkpoint.hpp"
#include "hrsn/corpus.hpp"
#include "hrsn/embeddings.hpp"
#include "hrsn/metrics.hpp"
#include "hrsn/siamese.hpp"
#include "hrsn/train.hpp"

namespace hrsn {

struct ThresholdResult {
  double threshold = 0.0;
  ConfusionCounts counts;
  Metrics metrics;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t dev_size = 0;
  std::vector<std::size_t> test_ids;
  std::vector<double> test_distances;  // aligned with test_ids
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  ThresholdResult midpoint;                  // tau = (tau1 + tau2) / 2
  std::optional<ThresholdResult> calibrated;  // tau tuned on the dev set
};

struct MetricSummary {
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
  MeanStd accuracy;
};

struct CvReport {
  std::vector<FoldResult> folds;
  MetricSummary midpoint;
  std::optional<MetricSummary> calibrated;
};

MetricSummary summarize(std::span<const Metrics> per_fold);

// Threshold maximizing accuracy on (distances, labels); ties go to the
// candidate closest to `preferred`. Candidates are midpoints between
// consecutive sorted distances plus `preferred` itself.
double calibrate_threshold(std::span<const double> distances, std::span<const int> labels,
                           double preferred);

// k-fold cross-validation with config.folds folds. Fold f trains with seed
// derived from config.seed, so folds are independent of execution order.
CvReport cross_validate(const Corpus& corpus, const EmbeddingTable& table,
                        const TrainConfig& config);

// Versioned JSON; identical inputs give byte-identical output.
nlohmann::ordered_json to_json(const CvReport& report);
std::string render_table(const nlohmann::json& report);

// Full inference pipeline for two raw documents.
PairScore verify_pair(const Model& model, const EmbeddingTable& table,
                      std::string_view doc_a, std::string_view doc_b);
nlohmann::ordered_json to_json(const PairScore& score, const Thresholds& thresholds);

}  // namespace hrsn
