#include "hrsn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hrsn/encoder.hpp"
#include "hrsn/lstm.hpp"
#include "hrsn/rng.hpp"
#include "hrsn/siamese.hpp"
#include "hrsn/text.hpp"

namespace hrsn {
namespace {

std::vector<std::span<const double>> read_only(const std::vector<std::span<double>>& v) {
  return {v.begin(), v.end()};
}

Vector random_vector(std::size_t dim, double range, Rng& rng) {
  return uniform_init(dim, -range, range, rng);
}

}  // namespace

void GradCheckStats::merge(const GradCheckStats& other) {
  checked += other.checked;
  failed += other.failed;
  max_relative_error = std::max(max_relative_error, other.max_relative_error);
  max_absolute_error = std::max(max_absolute_error, other.max_absolute_error);
  if (worst.empty()) worst = other.worst;
}

bool gradient_matches(double analytic, double numeric, const GradTolerance& tol) {
  const double diff = std::abs(analytic - numeric);
  if (std::abs(analytic) < tol.tiny) return diff < tol.absolute;
  return diff / std::max(std::abs(analytic), std::abs(numeric)) < tol.relative;
}

GradCheckStats check_gradient(const std::function<double()>& loss,
                              std::span<const std::span<double>> params,
                              std::span<const std::span<const double>> analytic,
                              const GradTolerance& tol, const std::string& label) {
  GradCheckStats stats;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t j = 0; j < params[k].size(); ++j) {
      double& x = params[k][j];
      const double saved = x;
      x = saved + tol.step;
      const double up = loss();
      x = saved - tol.step;
      const double down = loss();
      x = saved;
      const double numeric = (up - down) / (2.0 * tol.step);
      const double a = analytic[k][j];
      const double diff = std::abs(a - numeric);
      ++stats.checked;
      if (std::abs(a) < tol.tiny) {
        stats.max_absolute_error = std::max(stats.max_absolute_error, diff);
      } else {
        stats.max_relative_error = std::max(
            stats.max_relative_error, diff / std::max(std::abs(a), std::abs(numeric)));
      }
      if (!gradient_matches(a, numeric, tol)) {
        ++stats.failed;
        if (stats.worst.empty()) {
          stats.worst = label + " tensor " + std::to_string(k) + " entry " +
                        std::to_string(j) + ": analytic " + std::to_string(a) +
                        " numeric " + std::to_string(numeric);
        }
      }
    }
  }
  return stats;
}

GradCheckStats lstm_gradcheck(std::size_t configs, std::uint64_t seed,
                              const GradTolerance& tol) {
  Rng rng(seed);
  GradCheckStats total;
  for (std::size_t n = 0; n < configs; ++n) {
    const std::size_t in = 1 + rng.below(4);
    const std::size_t out = 1 + rng.below(4);
    const std::size_t unrolled = 1 + rng.below(5);
    const std::size_t true_len = 1 + rng.below(unrolled);

    LstmParams params = LstmParams::uniform(in, out, -0.8, 0.8, rng);
    std::vector<double> inputs(unrolled * in);
    for (double& v : inputs) v = rng.uniform(-1.0, 1.0);
    LstmState init{random_vector(out, 0.5, rng), random_vector(out, 0.5, rng)};
    const Vector w_h = random_vector(out, 1.0, rng);
    const Vector w_c = random_vector(out, 1.0, rng);
    std::optional<StepMasks> masks;
    if (n % 2 == 1) {
      masks = StepMasks{sample_dropout_mask(in, 0.3, rng), sample_dropout_mask(out, 0.3, rng)};
    }
    const StepMasks* mask_ptr = masks ? &*masks : nullptr;

    // L = w_h . h_final + w_c . c_final
    const auto loss = [&] {
      const auto run = lstm_run_frozen(params, inputs, true_len, unrolled, init, mask_ptr);
      return dot(w_h.values(), run.final.h.values()) + dot(w_c.values(), run.final.c.values());
    };

    const auto run = lstm_run_frozen(params, inputs, true_len, unrolled, init, mask_ptr);
    const LstmGrads g = lstm_backward(params, run.tape, w_h, w_c);

    const std::string label = "lstm config " + std::to_string(n);
    total.merge(check_gradient(loss, params.tensors(), g.params.tensors(), tol,
                               label + " params"));

    std::vector<double> d_inputs;
    for (const auto& v : g.inputs) d_inputs.insert(d_inputs.end(), v.values().begin(), v.values().end());
    std::vector<std::span<double>> in_tensors{std::span<double>(inputs)};
    std::vector<std::span<const double>> in_grads{std::span<const double>(d_inputs)};
    total.merge(check_gradient(loss, in_tensors, in_grads, tol, label + " inputs"));

    std::vector<std::span<double>> state_tensors{init.h.values(), init.c.values()};
    std::vector<std::span<const double>> state_grads{g.h0.values(), g.c0.values()};
    total.merge(check_gradient(loss, state_tensors, state_grads, tol, label + " state"));
  }
  return total;
}

GradCheckStats pipeline_gradcheck(int label, std::uint64_t seed, const GradTolerance& tol) {
  Rng rng(seed);
  const EncoderDims dims{3, 2, 2};
  EncoderParams params = EncoderParams::uniform(dims, -0.8, 0.8, rng);

  const auto make_doc = [&] {
    EncodedDocument doc(2, 2, dims.word);
    for (int s = 0; s < 2; ++s) {
      const Vector w1 = random_vector(dims.word, 1.0, rng);
      const Vector w2 = random_vector(dims.word, 1.0, rng);
      const std::vector<std::span<const double>> words{w1.values(), w2.values()};
      doc.add_sentence(words);
    }
    return doc;
  };
  const EncodedDocument a = make_doc();
  const EncodedDocument b = make_doc();

  // Keep the loss active and away from its kinks.
  const double d0 = distance(encode_document(params, a), encode_document(params, b));
  const Thresholds thresholds = label == 1 ? Thresholds{0.5 * d0, 0.5 * d0 + 1.0}
                                           : Thresholds{0.0, 2.0 * d0 + 0.5};

  const auto loss = [&] {
    return contrastive_loss(encode_document(params, a), encode_document(params, b), label,
                            thresholds);
  };

  const auto ra = encode_document_with_tape(params, a);
  const auto rb = encode_document_with_tape(params, b);
  const auto [ga, gb] = contrastive_loss_grad(ra.embedding, rb.embedding, label, thresholds);
  EncoderParams grads = EncoderParams::zeros(dims);
  encoder_backward_accumulate(params, ra.tape, ga.values(), grads);
  encoder_backward_accumulate(params, rb.tape, gb.values(), grads);

  return check_gradient(loss, params.tensors(), read_only(grads.tensors()), tol,
                        "pipeline label " + std::to_string(label));
}

}  // namespace hrsn
