#include "hrsn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "hrsn/rng.hpp"

namespace hrsn {
namespace {

std::vector<std::span<const double>> read_only(const std::vector<std::span<double>>& v) {
  return {v.begin(), v.end()};
}

void add_into(EncoderParams& dst, const EncoderParams& src) {
  auto d = dst.tensors();
  auto s = src.tensors();
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (std::size_t j = 0; j < d[k].size(); ++j) d[k][j] += s[k][j];
  }
}

// Loss sum and gradient sum over pairs [begin, end).
void accumulate_pairs(const EncoderParams& params, std::span<const EncodedPair* const> batch,
                      std::span<const std::optional<DropoutMasks>> masks,
                      const Thresholds& thresholds, std::size_t begin, std::size_t end,
                      double& loss_sum, EncoderParams& grads) {
  for (std::size_t p = begin; p < end; ++p) {
    const auto& pair = *batch[p];
    const DropoutMasks* m1 = masks[2 * p] ? &*masks[2 * p] : nullptr;
    const DropoutMasks* m2 = masks[2 * p + 1] ? &*masks[2 * p + 1] : nullptr;
    const PairForward fwd = forward_pair(params, pair, thresholds, m1, m2);
    loss_sum += fwd.loss;
    if (fwd.loss == 0.0) continue;
    const auto [g1, g2] = contrastive_loss_grad(fwd.first.embedding, fwd.second.embedding,
                                                pair.label, thresholds);
    // Shared weights: both branches accumulate into the same gradient.
    encoder_backward_accumulate(params, fwd.first.tape, g1.values(), grads);
    encoder_backward_accumulate(params, fwd.second.tape, g2.values(), grads);
  }
}

BatchGradient batch_gradient_impl(const EncoderParams& params,
                                  std::span<const EncodedPair* const> batch,
                                  const TrainConfig& config, Rng& rng) {
  if (batch.empty()) throw Error("train_step: empty batch");
  const EncoderDims dims = params.dims();

  std::vector<std::optional<DropoutMasks>> masks(2 * batch.size());
  if (config.dropout_rate > 0.0) {
    for (auto& m : masks) m = sample_dropout_masks(dims, config.dropout_rate, rng);
  }

  const std::size_t workers =
      config.deterministic ? 1 : std::clamp<std::size_t>(config.threads, 1, batch.size());

  BatchGradient out{0.0, EncoderParams::zeros(dims)};
  if (workers == 1) {
    accumulate_pairs(params, batch, masks, config.thresholds, 0, batch.size(), out.loss,
                     out.grads);
  } else {
    std::vector<double> losses(workers, 0.0);
    std::vector<EncoderParams> partial(workers, EncoderParams::zeros(dims));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (batch.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = std::min(batch.size(), w * chunk);
      const std::size_t e = std::min(batch.size(), b + chunk);
      pool.emplace_back([&, w, b, e] {
        try {
          accumulate_pairs(params, batch, masks, config.thresholds, b, e, losses[w],
                           partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (std::size_t w = 0; w < workers; ++w) {
      if (errors[w]) std::rethrow_exception(errors[w]);
      out.loss += losses[w];
      add_into(out.grads, partial[w]);
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (auto t : out.grads.tensors()) {
    for (double& v : t) v *= inv;
  }
  return out;
}

StepResult train_step_impl(EncoderParams& params, AdadeltaState& optimizer,
                           std::span<const EncodedPair* const> batch,
                           const TrainConfig& config, Rng& rng) {
  BatchGradient bg = batch_gradient_impl(params, batch, config, rng);
  if (!std::isfinite(bg.loss)) throw NumericError("train_step: non-finite loss");
  if (optimizer.num_tensors() == 0) optimizer = AdadeltaState(params.tensors());

  auto grads = bg.grads.tensors();
  const double norm = clip_by_global_norm(grads, config.clip_norm);
  const auto deltas = adadelta_update(optimizer, read_only(grads), config.adadelta);
  apply_update(params.tensors(), deltas);
  return {bg.loss, norm};
}

std::vector<const EncodedPair*> pointers(std::span<const EncodedPair> pairs) {
  std::vector<const EncodedPair*> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(&p);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid training config: ") + what);
  };
  require(dims.word > 0 && dims.sentence > 0 && dims.document > 0, "dimensions must be > 0");
  require(max_words >= 1 && max_sentences >= 1, "max_words and max_sentences must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(clip_norm > 0.0, "clip_norm must be > 0");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate must be in [0, 1)");
  require(init_range > 0.0, "init_range must be > 0");
  require(adadelta.learning_rate > 0.0, "learning_rate must be > 0");
  require(adadelta.rho >= 0.0 && adadelta.rho < 1.0, "rho must be in [0, 1)");
  require(adadelta.epsilon > 0.0, "epsilon must be > 0");
  require(max_epochs >= 1, "max_epochs must be >= 1");
  require(folds >= 2, "folds must be >= 2");
  require(threads >= 1, "threads must be >= 1");
  thresholds.validate();
}

EncodedPair encode_instance(const VerificationInstance& instance,
                            const EmbeddingTable& table, const TrainConfig& config) {
  instance.validate();
  return {encode_text(concatenate_known(instance), table, config.max_words,
                      config.max_sentences),
          encode_text(instance.unknown_doc, table, config.max_words, config.max_sentences),
          instance.label};
}

PairForward forward_pair(const EncoderParams& params, const EncodedPair& pair,
                         const Thresholds& thresholds, const DropoutMasks* first_masks,
                         const DropoutMasks* second_masks) {
  PairForward out;
  out.first = encode_document_with_tape(params, pair.first, first_masks);
  out.second = encode_document_with_tape(params, pair.second, second_masks);
  out.distance = distance(out.first.embedding, out.second.embedding);
  out.loss = contrastive_loss(out.distance, pair.label, thresholds);
  return out;
}

BatchGradient batch_gradient(const EncoderParams& params,
                             std::span<const EncodedPair> batch,
                             const TrainConfig& config, Rng& rng) {
  const auto ptrs = pointers(batch);
  return batch_gradient_impl(params, ptrs, config, rng);
}

StepResult train_step(EncoderParams& params, AdadeltaState& optimizer,
                      std::span<const EncodedPair> batch, const TrainConfig& config,
                      Rng& rng) {
  const auto ptrs = pointers(batch);
  return train_step_impl(params, optimizer, ptrs, config, rng);
}

Corpus augment_epoch(const Corpus& instances, Rng& rng) {
  Corpus out = instances;
  for (auto& inst : out) {
    if (inst.known_docs.size() > 1) rng.shuffle(inst.known_docs);
  }
  return out;
}

std::vector<CvSplit> make_cv_splits(std::size_t corpus_size, std::size_t k, Rng& rng) {
  if (k < 2) throw Error("make_cv_splits: need k >= 2");
  if (corpus_size < k) {
    throw Error("make_cv_splits: corpus of " + std::to_string(corpus_size) +
                " instances is smaller than k = " + std::to_string(k));
  }
  const auto perm = rng.permutation(corpus_size);
  std::vector<std::vector<std::size_t>> folds(k);
  const std::size_t base = corpus_size / k;
  const std::size_t extra = corpus_size % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                    perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(folds[f].begin(), folds[f].end());
    pos += len;
  }
  std::vector<CvSplit> splits(k);
  for (std::size_t f = 0; f < k; ++f) {
    CvSplit& s = splits[f];
    s.fold_index = f;
    s.test_ids = folds[f];
    s.dev_ids = folds[(f + 1) % k];
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f || g == (f + 1) % k) continue;
      s.train_ids.insert(s.train_ids.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(s.train_ids.begin(), s.train_ids.end());
  }
  return splits;
}

EvalResult evaluate(const EncoderParams& params, std::span<const EncodedPair> pairs,
                    const Thresholds& thresholds, double decision_threshold) {
  EvalResult out;
  if (pairs.empty()) return out;
  double loss = 0.0;
  out.distances.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const double d = distance(encode_document(params, pair.first),
                              encode_document(params, pair.second));
    out.distances.push_back(d);
    loss += contrastive_loss(d, pair.label, thresholds);
    out.counts.add(pair.label, decide(d, decision_threshold).decision);
  }
  out.mean_loss = loss / static_cast<double>(pairs.size());
  return out;
}

std::string to_json_line(const EpochLog& e) {
  nlohmann::ordered_json j;
  j["epoch"] = e.epoch;
  j["train_loss"] = e.train_loss;
  j["dev_loss"] = e.dev_loss;
  j["dev_accuracy"] = e.dev_accuracy;
  j["grad_norm_mean"] = e.grad_norm_mean;
  j["seconds"] = e.seconds;
  return j.dump();
}

FitResult fit(const Corpus& corpus, const CvSplit& split, const EmbeddingTable& table,
              const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (split.train_ids.empty()) throw Error("fit: empty training set");
  if (split.dev_ids.empty()) throw Error("fit: empty development set");
  if (table.dim() != config.dims.word) {
    throw ShapeError("fit: embedding dim " + std::to_string(table.dim()) +
                     " != configured word dim " + std::to_string(config.dims.word));
  }

  Rng rng(config.seed);
  FitResult result;
  EncoderParams params =
      EncoderParams::uniform(config.dims, -config.init_range, config.init_range, rng);
  AdadeltaState optimizer(params.tensors());

  Corpus train_set;
  train_set.reserve(split.train_ids.size());
  for (std::size_t id : split.train_ids) train_set.push_back(corpus.at(id));
  std::vector<EncodedPair> train_pairs;
  train_pairs.reserve(train_set.size());
  for (const auto& inst : train_set) train_pairs.push_back(encode_instance(inst, table, config));

  std::vector<EncodedPair> dev_pairs;
  dev_pairs.reserve(split.dev_ids.size());
  for (std::size_t id : split.dev_ids) {
    dev_pairs.push_back(encode_instance(corpus.at(id), table, config));
  }

  const double tau = config.thresholds.decision_threshold();
  result.params = params;
  result.best_dev_accuracy = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();

    if (config.augment) {
      const Corpus shuffled = augment_epoch(train_set, rng);
      for (std::size_t p = 0; p < shuffled.size(); ++p) {
        if (shuffled[p].known_docs.size() > 1) {
          train_pairs[p].first = encode_text(concatenate_known(shuffled[p]), table,
                                             config.max_words, config.max_sentences);
        }
      }
    }

    const auto order = rng.permutation(train_pairs.size());
    double loss_sum = 0.0;
    double norm_sum = 0.0;
    std::size_t steps = 0;
    std::vector<const EncodedPair*> batch;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      batch.clear();
      for (std::size_t j = b; j < std::min(order.size(), b + config.batch_size); ++j) {
        batch.push_back(&train_pairs[order[j]]);
      }
      const StepResult step = train_step_impl(params, optimizer, batch, config, rng);
      loss_sum += step.loss * static_cast<double>(batch.size());
      norm_sum += step.grad_norm;
      ++steps;
    }

    const EvalResult dev = evaluate(params, dev_pairs, config.thresholds, tau);
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(train_pairs.size());
    entry.dev_loss = dev.mean_loss;
    entry.dev_accuracy = confusion_metrics(dev.counts).accuracy;
    entry.grad_norm_mean = norm_sum / static_cast<double>(steps);
    entry.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    const bool improved =
        entry.dev_accuracy > result.best_dev_accuracy ||
        (entry.dev_accuracy == result.best_dev_accuracy && entry.dev_loss < result.best_dev_loss);
    if (improved) {
      result.params = params;
      result.best_epoch = epoch;
      result.best_dev_accuracy = entry.dev_accuracy;
      result.best_dev_loss = entry.dev_loss;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= config.patience) break;
  }
  return result;
}

}  // namespace hrsn
