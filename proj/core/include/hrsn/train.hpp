#pragma once

// Siamese training: both documents of a pair go through the same
// EncoderParams object, their gradients are summed, the batch loss is the
// mean over pairs, and the update is global-norm clipping followed by
// Adadelta.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hrsn/corpus.hpp"
#include "hrsn/embeddings.hpp"
#include "hrsn/encoder.hpp"
#include "hrsn/metrics.hpp"
#include "hrsn/optim.hpp"
#include "hrsn/siamese.hpp"
#include "hrsn/text.hpp"

namespace hrsn {

class Rng;

struct TrainConfig {
  EncoderDims dims;  // 300 / 150 / 75
  std::size_t max_words = 33;
  std::size_t max_sentences = 123;
  std::size_t batch_size = 32;
  double clip_norm = 5.0;
  double dropout_rate = 0.3;
  double init_range = 0.05;  // parameters ~ U[-init_range, init_range)
  AdadeltaConfig adadelta;
  Thresholds thresholds;
  std::size_t max_epochs = 50;
  std::size_t patience = 10;
  bool augment = true;
  std::size_t folds = 10;
  bool calibrate_tau = false;
  std::uint64_t seed = 0;
  bool deterministic = false;
  std::size_t threads = 1;

  // Throws Error on out-of-range values.
  void validate() const;
};

// A pair ready for the encoder.
struct EncodedPair {
  EncodedDocument first;
  EncodedDocument second;
  int label = 0;
};

// Known documents concatenated in their stored order, then both sides
// preprocessed.
EncodedPair encode_instance(const VerificationInstance& instance,
                            const EmbeddingTable& table, const TrainConfig& config);

struct PairForward {
  EncoderRun first;
  EncoderRun second;
  double distance = 0.0;
  double loss = 0.0;
};

PairForward forward_pair(const EncoderParams& params, const EncodedPair& pair,
                         const Thresholds& thresholds,
                         const DropoutMasks* first_masks = nullptr,
                         const DropoutMasks* second_masks = nullptr);

struct BatchGradient {
  double loss = 0.0;  // mean over the batch
  EncoderParams grads;
};

// Mean loss and its exact gradient. One mask set per document is drawn from
// `rng` (in batch order, first then second) when config.dropout_rate > 0.
BatchGradient batch_gradient(const EncoderParams& params,
                             std::span<const EncodedPair> batch,
                             const TrainConfig& config, Rng& rng);

struct StepResult {
  double loss = 0.0;
  double grad_norm = 0.0;  // global norm before clipping
};

StepResult train_step(EncoderParams& params, AdadeltaState& optimizer,
                      std::span<const EncodedPair> batch, const TrainConfig& config,
                      Rng& rng);

// Re-draws the concatenation order of every instance with more than one
// known document. Labels and unknown documents are untouched.
Corpus augment_epoch(const Corpus& instances, Rng& rng);

struct CvSplit {
  std::size_t fold_index = 0;
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> dev_ids;
  std::vector<std::size_t> test_ids;
};

// Shuffles [0, corpus_size) and cuts it into k folds whose sizes differ by at
// most one. Split f tests on fold f, develops on fold (f + 1) mod k and trains
// on the rest.
std::vector<CvSplit> make_cv_splits(std::size_t corpus_size, std::size_t k, Rng& rng);

struct EvalResult {
  double mean_loss = 0.0;
  ConfusionCounts counts;
  std::vector<double> distances;
};

EvalResult evaluate(const EncoderParams& params, std::span<const EncodedPair> pairs,
                    const Thresholds& thresholds, double decision_threshold);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_accuracy = 0.0;
  double grad_norm_mean = 0.0;
  double seconds = 0.0;
};

std::string to_json_line(const EpochLog& entry);

struct FitResult {
  EncoderParams params;  // best on the development set
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_dev_accuracy = 0.0;
  double best_dev_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Trains on split.train_ids and selects on split.dev_ids: the kept parameters
// are those of the epoch with the highest dev accuracy (ties: lower dev
// loss). Stops after `patience` epochs without improvement or at max_epochs.
FitResult fit(const Corpus& corpus, const CvSplit& split, const EmbeddingTable& table,
              const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace hrsn
