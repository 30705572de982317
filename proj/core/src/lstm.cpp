#include "hrsn/lstm.hpp"

#include <cmath>

#include "hrsn/rng.hpp"

namespace hrsn {
namespace {

void check_step_shapes(const LstmParams& p, std::size_t x_dim, const LstmState& s) {
  if (x_dim != p.input_dim() || s.h.dim() != p.output_dim() ||
      s.c.dim() != p.output_dim()) {
    throw ShapeError("lstm_step: params [in " + std::to_string(p.input_dim()) + ", out " +
                     std::to_string(p.output_dim()) + "] vs input [" +
                     std::to_string(x_dim) + "], state h" + shape_string(s.h) + " c" +
                     shape_string(s.c));
  }
}

void check_masks(const LstmParams& p, const StepMasks* masks) {
  if (masks && (masks->input.dim() != p.input_dim() ||
                masks->hidden.dim() != p.output_dim())) {
    throw ShapeError("lstm: dropout masks input" + shape_string(masks->input) +
                     " hidden" + shape_string(masks->hidden) +
                     " do not match params [in " + std::to_string(p.input_dim()) +
                     ", out " + std::to_string(p.output_dim()) + "]");
  }
}

Vector masked(std::span<const double> v, const Vector* mask) {
  Vector out(v);
  if (mask) {
    for (std::size_t k = 0; k < out.dim(); ++k) out[k] *= (*mask)[k];
  }
  return out;
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t output_dim) {
  LstmParams p;
  for (std::size_t g = 0; g < kNumGates; ++g) {
    p.W[g] = Matrix(output_dim, output_dim);
    p.U[g] = Matrix(output_dim, input_dim);
    p.b[g] = Vector(output_dim);
  }
  return p;
}

LstmParams LstmParams::uniform(std::size_t input_dim, std::size_t output_dim, double lo,
                               double hi, Rng& rng) {
  LstmParams p;
  for (std::size_t g = 0; g < kNumGates; ++g) p.W[g] = uniform_init(output_dim, output_dim, lo, hi, rng);
  for (std::size_t g = 0; g < kNumGates; ++g) p.U[g] = uniform_init(output_dim, input_dim, lo, hi, rng);
  for (std::size_t g = 0; g < kNumGates; ++g) p.b[g] = uniform_init(output_dim, lo, hi, rng);
  return p;
}

std::size_t LstmParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

void LstmParams::validate() const {
  const std::size_t out = W[0].rows();
  const std::size_t in = U[0].cols();
  for (std::size_t g = 0; g < kNumGates; ++g) {
    if (W[g].rows() != out || W[g].cols() != out || U[g].rows() != out ||
        U[g].cols() != in || b[g].dim() != out) {
      throw ShapeError("LstmParams: gate " + std::to_string(g) + " has W" +
                       shape_string(W[g]) + " U" + shape_string(U[g]) + " b" +
                       shape_string(b[g]) + ", expected out=" + std::to_string(out) +
                       " in=" + std::to_string(in));
    }
  }
}

std::vector<std::span<double>> LstmParams::tensors() {
  std::vector<std::span<double>> out;
  for (auto& m : W) out.push_back(m.values());
  for (auto& m : U) out.push_back(m.values());
  for (auto& v : b) out.push_back(v.values());
  return out;
}

std::vector<std::span<const double>> LstmParams::tensors() const {
  std::vector<std::span<const double>> out;
  for (const auto& m : W) out.push_back(m.values());
  for (const auto& m : U) out.push_back(m.values());
  for (const auto& v : b) out.push_back(v.values());
  return out;
}

LstmState lstm_step(const LstmParams& params, const Vector& x, const LstmState& state) {
  return lstm_step(params, x.values(), state, nullptr, nullptr);
}

LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    const LstmState& state, const StepMasks* masks,
                    LstmStepCache* cache) {
  check_step_shapes(params, x.size(), state);
  check_masks(params, masks);
  const std::size_t d = params.output_dim();

  Vector xm = masked(x, masks ? &masks->input : nullptr);
  Vector hm = masked(state.h.values(), masks ? &masks->hidden : nullptr);

  std::array<Vector, kNumGates> gates;
  for (std::size_t g = 0; g < kNumGates; ++g) {
    Vector z = params.b[g];
    matvec_add(params.W[g], hm.values(), z.values());
    matvec_add(params.U[g], xm.values(), z.values());
    for (std::size_t k = 0; k < d; ++k) {
      z[k] = g == kCandidate ? std::tanh(z[k]) : sigmoid(z[k]);
    }
    gates[g] = std::move(z);
  }

  LstmState next{Vector(d), Vector(d)};
  Vector tanh_c(d);
  for (std::size_t k = 0; k < d; ++k) {
    next.c[k] = gates[kForget][k] * state.c[k] + gates[kInput][k] * gates[kCandidate][k];
    tanh_c[k] = std::tanh(next.c[k]);
    next.h[k] = gates[kOutput][k] * tanh_c[k];
  }

  if (cache) {
    cache->x = std::move(xm);
    cache->h_prev = std::move(hm);
    cache->c_prev = state.c;
    cache->gates = std::move(gates);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

LstmRun lstm_run_frozen(const LstmParams& params, std::span<const double> inputs,
                        std::size_t true_len, std::size_t unrolled_len,
                        const LstmState& init, const StepMasks* masks) {
  if (true_len == 0) throw Error("lstm_run_frozen: true length must be >= 1");
  if (true_len > unrolled_len) {
    throw Error("lstm_run_frozen: true length " + std::to_string(true_len) +
                " exceeds unrolled length " + std::to_string(unrolled_len));
  }
  const std::size_t in = params.input_dim();
  if (inputs.size() < true_len * in) {
    throw ShapeError("lstm_run_frozen: " + std::to_string(inputs.size()) +
                     " input values for " + std::to_string(true_len) + " steps of dim " +
                     std::to_string(in));
  }
  check_masks(params, masks);

  LstmRun run;
  run.tape.input_dim = in;
  run.tape.output_dim = params.output_dim();
  run.tape.true_len = true_len;
  run.tape.unrolled_len = unrolled_len;
  if (masks) run.tape.masks = *masks;
  run.tape.steps.resize(true_len);

  LstmState state = init;
  for (std::size_t t = 0; t < unrolled_len; ++t) {
    if (t < true_len) {
      state = lstm_step(params, inputs.subspan(t * in, in), state, masks,
                        &run.tape.steps[t]);
    }
    // t >= true_len: frozen, the state is carried over unchanged.
  }
  run.final = std::move(state);
  return run;
}

LstmRun lstm_run_frozen(const LstmParams& params, std::span<const Vector> inputs,
                        std::size_t true_len, std::size_t unrolled_len,
                        const LstmState& init, const StepMasks* masks) {
  if (inputs.size() < true_len) {
    throw ShapeError("lstm_run_frozen: fewer inputs than the true length");
  }
  const std::size_t in = params.input_dim();
  std::vector<double> flat;
  flat.reserve(true_len * in);
  for (std::size_t t = 0; t < true_len; ++t) {
    if (inputs[t].dim() != in) {
      throw ShapeError("lstm_run_frozen: input " + std::to_string(t) + " has dim " +
                       std::to_string(inputs[t].dim()) + ", expected " +
                       std::to_string(in));
    }
    flat.insert(flat.end(), inputs[t].values().begin(), inputs[t].values().end());
  }
  return lstm_run_frozen(params, flat, true_len, unrolled_len, init, masks);
}

void lstm_backward_accumulate(const LstmParams& params, const LstmTape& tape,
                              std::span<const double> d_h_final,
                              std::span<const double> d_c_final, LstmParams& grads,
                              std::span<double> d_inputs, std::span<double> d_h0,
                              std::span<double> d_c0) {
  const std::size_t d = params.output_dim();
  const std::size_t in = params.input_dim();
  if (tape.output_dim != d || tape.input_dim != in || tape.steps.size() != tape.true_len) {
    throw ShapeError("lstm_backward: tape does not match params");
  }
  if (grads.output_dim() != d || grads.input_dim() != in) {
    throw ShapeError("lstm_backward: gradient accumulator does not match params");
  }
  if (d_h_final.size() != d || d_c_final.size() != d) {
    throw ShapeError("lstm_backward: upstream gradient has wrong dim");
  }
  if (!d_inputs.empty() && d_inputs.size() < tape.true_len * in) {
    throw ShapeError("lstm_backward: input gradient buffer too small");
  }
  const Vector* in_mask = tape.masks ? &tape.masks->input : nullptr;
  const Vector* h_mask = tape.masks ? &tape.masks->hidden : nullptr;

  // Frozen steps have an identity Jacobian, so the upstream gradient lands
  // unchanged on the last real step.
  Vector dh(d_h_final);
  Vector dc(d_c_final);
  std::array<Vector, kNumGates> dz;
  for (auto& v : dz) v = Vector(d);
  Vector dh_prev(d);
  Vector dx(in);

  for (std::size_t t = tape.true_len; t-- > 0;) {
    const LstmStepCache& s = tape.steps[t];
    const Vector& f = s.gates[kForget];
    const Vector& i = s.gates[kInput];
    const Vector& o = s.gates[kOutput];
    const Vector& g = s.gates[kCandidate];
    for (std::size_t k = 0; k < d; ++k) {
      const double dc_total = dc[k] + dh[k] * o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
      dz[kOutput][k] = dh[k] * s.tanh_c[k] * o[k] * (1.0 - o[k]);
      dz[kForget][k] = dc_total * s.c_prev[k] * f[k] * (1.0 - f[k]);
      dz[kInput][k] = dc_total * g[k] * i[k] * (1.0 - i[k]);
      dz[kCandidate][k] = dc_total * i[k] * (1.0 - g[k] * g[k]);
      dc[k] = dc_total * f[k];
    }
    dh_prev.fill(0.0);
    dx.fill(0.0);
    for (std::size_t gate = 0; gate < kNumGates; ++gate) {
      outer_add(dz[gate].values(), s.h_prev.values(), grads.W[gate]);
      outer_add(dz[gate].values(), s.x.values(), grads.U[gate]);
      for (std::size_t k = 0; k < d; ++k) grads.b[gate][k] += dz[gate][k];
      matvec_transposed_add(params.W[gate], dz[gate].values(), dh_prev.values());
      if (!d_inputs.empty()) {
        matvec_transposed_add(params.U[gate], dz[gate].values(), dx.values());
      }
    }
    if (h_mask) {
      for (std::size_t k = 0; k < d; ++k) dh_prev[k] *= (*h_mask)[k];
    }
    if (!d_inputs.empty()) {
      auto row = d_inputs.subspan(t * in, in);
      for (std::size_t k = 0; k < in; ++k) {
        row[k] += in_mask ? dx[k] * (*in_mask)[k] : dx[k];
      }
    }
    std::swap(dh, dh_prev);
  }

  if (!d_h0.empty()) std::copy(dh.values().begin(), dh.values().end(), d_h0.begin());
  if (!d_c0.empty()) std::copy(dc.values().begin(), dc.values().end(), d_c0.begin());
}

LstmGrads lstm_backward(const LstmParams& params, const LstmTape& tape,
                        const Vector& d_h_final, const Vector& d_c_final) {
  const std::size_t d = params.output_dim();
  const std::size_t in = params.input_dim();
  LstmGrads out{LstmParams::zeros(in, d), {}, Vector(d), Vector(d)};
  std::vector<double> d_inputs(tape.true_len * in, 0.0);
  lstm_backward_accumulate(params, tape, d_h_final.values(), d_c_final.values(),
                           out.params, d_inputs, out.h0.values(), out.c0.values());
  out.inputs.reserve(tape.unrolled_len);
  for (std::size_t t = 0; t < tape.unrolled_len; ++t) {
    out.inputs.push_back(t < tape.true_len
                             ? Vector(std::span<const double>(d_inputs).subspan(t * in, in))
                             : Vector(in));
  }
  return out;
}

}  // namespace hrsn
