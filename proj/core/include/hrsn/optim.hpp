#pragma once

// Adadelta:
//   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
//   dx       = -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
//   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
//   param   += lr * dx

#include <cstddef>
#include <span>
#include <vector>

#include "hrsn/error.hpp"

namespace hrsn {

struct AdadeltaConfig {
  double learning_rate = 1.0;
  double rho = 0.95;
  double epsilon = 1e-6;
};

class AdadeltaState {
 public:
  AdadeltaState() = default;
  // Zero accumulators shaped like `tensors`.
  explicit AdadeltaState(std::span<const std::span<const double>> tensors);
  explicit AdadeltaState(std::span<const std::span<double>> tensors);

  std::size_t num_tensors() const { return sq_grad_.size(); }
  const std::vector<std::vector<double>>& mean_sq_grad() const { return sq_grad_; }
  const std::vector<std::vector<double>>& mean_sq_update() const { return sq_update_; }

  friend std::vector<std::vector<double>> adadelta_update(
      AdadeltaState& state, std::span<const std::span<const double>> grads,
      const AdadeltaConfig& config);

  friend bool operator==(const AdadeltaState&, const AdadeltaState&) = default;

 private:
  std::vector<std::vector<double>> sq_grad_;
  std::vector<std::vector<double>> sq_update_;
};

// Advances `state` and returns the parameter increments lr * dx, shaped like
// `grads`. Throws ShapeError if the shapes differ from the state's.
std::vector<std::vector<double>> adadelta_update(
    AdadeltaState& state, std::span<const std::span<const double>> grads,
    const AdadeltaConfig& config);

// params[k] += deltas[k]
void apply_update(std::span<const std::span<double>> params,
                  const std::vector<std::vector<double>>& deltas);

}  // namespace hrsn
