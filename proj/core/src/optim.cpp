#include "hrsn/optim.hpp"

#include <cmath>

#include "hrsn/error.hpp"

namespace hrsn {

AdadeltaState::AdadeltaState(std::span<const std::span<const double>> tensors) {
  for (const auto& t : tensors) {
    sq_grad_.emplace_back(t.size(), 0.0);
    sq_update_.emplace_back(t.size(), 0.0);
  }
}

AdadeltaState::AdadeltaState(std::span<const std::span<double>> tensors) {
  for (const auto& t : tensors) {
    sq_grad_.emplace_back(t.size(), 0.0);
    sq_update_.emplace_back(t.size(), 0.0);
  }
}

std::vector<std::vector<double>> adadelta_update(
    AdadeltaState& state, std::span<const std::span<const double>> grads,
    const AdadeltaConfig& config) {
  if (grads.size() != state.sq_grad_.size()) {
    throw ShapeError("adadelta_update: " + std::to_string(grads.size()) +
                     " gradient tensors for a state of " +
                     std::to_string(state.sq_grad_.size()));
  }
  const double rho = config.rho;
  const double eps = config.epsilon;
  std::vector<std::vector<double>> deltas(grads.size());
  for (std::size_t k = 0; k < grads.size(); ++k) {
    const auto g = grads[k];
    auto& eg = state.sq_grad_[k];
    auto& ex = state.sq_update_[k];
    if (g.size() != eg.size()) {
      throw ShapeError("adadelta_update: tensor " + std::to_string(k) + " has " +
                       std::to_string(g.size()) + " entries, state has " +
                       std::to_string(eg.size()));
    }
    auto& out = deltas[k];
    out.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      eg[j] = rho * eg[j] + (1.0 - rho) * g[j] * g[j];
      const double dx = -std::sqrt(ex[j] + eps) / std::sqrt(eg[j] + eps) * g[j];
      ex[j] = rho * ex[j] + (1.0 - rho) * dx * dx;
      out[j] = config.learning_rate * dx;
    }
  }
  return deltas;
}

void apply_update(std::span<const std::span<double>> params,
                  const std::vector<std::vector<double>>& deltas) {
  if (params.size() != deltas.size()) throw ShapeError("apply_update: tensor count mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != deltas[k].size()) {
      throw ShapeError("apply_update: tensor " + std::to_string(k) + " size mismatch");
    }
    for (std::size_t j = 0; j < params[k].size(); ++j) params[k][j] += deltas[k][j];
  }
}

}  // namespace hrsn
