#pragma once

// Single LSTM cell without peepholes:
//
//   f  = sigmoid(W_f h + U_f x + b_f)
//   i  = sigmoid(W_i h + U_i x + b_i)
//   o  = sigmoid(W_o h + U_o x + b_o)
//   g  = tanh   (W_c h + U_c x + b_c)
//   c' = f * c + i * g
//   h' = o * tanh(c')
//
// Sequences are unrolled to a fixed length; past the true length the state is
// copied unchanged (an explicit branch, so padded and unpadded runs agree
// bitwise). No forget-gate bias offset is applied.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hrsn/numeric.hpp"

namespace hrsn {

class Rng;

enum Gate : std::size_t { kForget = 0, kInput = 1, kOutput = 2, kCandidate = 3 };
inline constexpr std::size_t kNumGates = 4;

struct LstmParams {
  std::array<Matrix, kNumGates> W;  // recurrent, [out x out]
  std::array<Matrix, kNumGates> U;  // input, [out x in]
  std::array<Vector, kNumGates> b;  // [out]

  static LstmParams zeros(std::size_t input_dim, std::size_t output_dim);
  static LstmParams uniform(std::size_t input_dim, std::size_t output_dim, double lo,
                            double hi, Rng& rng);

  std::size_t input_dim() const { return U[0].cols(); }
  std::size_t output_dim() const { return W[0].rows(); }
  std::size_t parameter_count() const;

  // Throws ShapeError unless all four gates agree on (input_dim, output_dim).
  void validate() const;

  // Every tensor in a fixed order: W_f..W_c, U_f..U_c, b_f..b_c.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t dim) { return {Vector(dim), Vector(dim)}; }
  friend bool operator==(const LstmState&, const LstmState&) = default;
};

// Variational dropout masks for one sequence: `input` scales x, `hidden`
// scales the recurrent h entering the gate pre-activations. Constant over all
// steps of the sequence.
struct StepMasks {
  Vector input;
  Vector hidden;
};

// Activations of one non-frozen step, as needed by the backward pass.
struct LstmStepCache {
  Vector x;       // input after masking
  Vector h_prev;  // recurrent input after masking
  Vector c_prev;
  std::array<Vector, kNumGates> gates;  // f, i, o, g
  Vector c;
  Vector tanh_c;
};

struct LstmTape {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::size_t true_len = 0;
  std::size_t unrolled_len = 0;
  std::vector<LstmStepCache> steps;  // one per non-frozen step
  std::optional<StepMasks> masks;

  std::size_t length() const { return unrolled_len; }
};

LstmState lstm_step(const LstmParams& params, const Vector& x, const LstmState& state);

// Masked variant; fills `cache` when given.
LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    const LstmState& state, const StepMasks* masks,
                    LstmStepCache* cache);

struct LstmRun {
  LstmState final;
  LstmTape tape;
};

// `inputs` is row-major [n x input_dim] with n >= true_len; rows past
// true_len are never read. Requires 1 <= true_len <= unrolled_len.
LstmRun lstm_run_frozen(const LstmParams& params, std::span<const double> inputs,
                        std::size_t true_len, std::size_t unrolled_len,
                        const LstmState& init, const StepMasks* masks = nullptr);
LstmRun lstm_run_frozen(const LstmParams& params, std::span<const Vector> inputs,
                        std::size_t true_len, std::size_t unrolled_len,
                        const LstmState& init, const StepMasks* masks = nullptr);

struct LstmGrads {
  LstmParams params;
  std::vector<Vector> inputs;  // unrolled_len entries, zero past true_len
  Vector h0;
  Vector c0;
};

LstmGrads lstm_backward(const LstmParams& params, const LstmTape& tape,
                        const Vector& d_h_final, const Vector& d_c_final);

// Accumulates parameter gradients into `grads`. `d_inputs` (row-major
// [>= true_len x input_dim]) is accumulated into when non-empty; `d_h0` and
// `d_c0` are overwritten when non-empty.
void lstm_backward_accumulate(const LstmParams& params, const LstmTape& tape,
                              std::span<const double> d_h_final,
                              std::span<const double> d_c_final, LstmParams& grads,
                              std::span<double> d_inputs, std::span<double> d_h0,
                              std::span<double> d_c0);

}  // namespace hrsn
