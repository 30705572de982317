#pragma once

// Central finite differences against analytic gradients.
//
// Only forward passes are used to build the numeric side, so a check is
// independent of the backward implementation it validates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hrsn {

struct GradTolerance {
  double step = 1e-5;        // central-difference epsilon
  double relative = 1e-4;    // max relative error
  double absolute = 1e-7;    // max absolute error for tiny analytic values
  double tiny = 1e-6;        // |analytic| below this uses the absolute bound
};

struct GradCheckStats {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double max_relative_error = 0.0;  // over entries judged by the relative bound
  double max_absolute_error = 0.0;
  std::string worst;                // description of the worst failure

  bool ok() const { return failed == 0 && checked > 0; }
  void merge(const GradCheckStats& other);
};

bool gradient_matches(double analytic, double numeric, const GradTolerance& tol);

// Perturbs every entry of `params` in place (restoring it) and compares
// (loss(+h) - loss(-h)) / 2h with the matching entry of `analytic`.
GradCheckStats check_gradient(const std::function<double()>& loss,
                              std::span<const std::span<double>> params,
                              std::span<const std::span<const double>> analytic,
                              const GradTolerance& tol, const std::string& label);

// Random small LSTM configurations (input/output dims <= 4, unrolled length
// <= 5, random true length and initial state, masks on every other config):
// parameters, inputs and initial state are all checked.
GradCheckStats lstm_gradcheck(std::size_t configs, std::uint64_t seed,
                              const GradTolerance& tol = {});

// Encoder + contrastive loss on a pair of 2-sentence x 2-word documents
// (D_w = 3, D_s = 2, D_d = 2) for the given label, dropout off.
GradCheckStats pipeline_gradcheck(int label, std::uint64_t seed,
                                  const GradTolerance& tol = {});

}  // namespace hrsn
