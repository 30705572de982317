#include "hrsn/siamese.hpp"

#include <algorithm>
#include <cmath>

namespace hrsn {
namespace {

void check_label(int label) {
  if (label != 0 && label != 1) {
    throw Error("contrastive loss: label must be 0 or 1, got " + std::to_string(label));
  }
}

}  // namespace

void Thresholds::validate() const {
  if (!(tau1 >= 0.0) || !(tau1 < tau2)) {
    throw Error("thresholds require 0 <= tau1 < tau2, got tau1=" + std::to_string(tau1) +
                " tau2=" + std::to_string(tau2));
  }
}

std::string_view to_string(Decision d) {
  return d == Decision::kSameAuthor ? "same_author" : "different_authors";
}

double distance(const Vector& x1, const Vector& x2) {
  if (x1.dim() != x2.dim()) {
    throw ShapeError("distance: " + shape_string(x1) + " vs " + shape_string(x2));
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < x1.dim(); ++i) {
    const double diff = x1[i] - x2[i];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

double contrastive_loss(double d, int label, const Thresholds& thresholds) {
  check_label(label);
  thresholds.validate();
  if (label == 1) {
    const double excess = std::max(d - thresholds.tau1, 0.0);
    return 0.5 * excess * excess;
  }
  const double shortfall = std::max(thresholds.tau2 - d, 0.0);
  return 0.5 * shortfall * shortfall;
}

double contrastive_loss(const Vector& x1, const Vector& x2, int label,
                        const Thresholds& thresholds) {
  return contrastive_loss(distance(x1, x2), label, thresholds);
}

std::pair<Vector, Vector> contrastive_loss_grad(const Vector& x1, const Vector& x2,
                                                int label, const Thresholds& thresholds) {
  check_label(label);
  thresholds.validate();
  const double d = distance(x1, x2);
  // dL/dd; dd/dx1 = (x1 - x2) / d.
  double dl_dd = 0.0;
  if (label == 1 && d > thresholds.tau1) {
    dl_dd = d - thresholds.tau1;
  } else if (label == 0 && d < thresholds.tau2) {
    dl_dd = -(thresholds.tau2 - d);
  }
  Vector g1(x1.dim());
  Vector g2(x1.dim());
  if (dl_dd != 0.0 && d > 0.0) {
    const double scale = dl_dd / d;
    for (std::size_t i = 0; i < x1.dim(); ++i) {
      g1[i] = scale * (x1[i] - x2[i]);
      g2[i] = -g1[i];
    }
  }
  return {std::move(g1), std::move(g2)};
}

PairScore decide(double d, double threshold) {
  PairScore s;
  s.distance = d;
  s.decision = d < threshold ? Decision::kSameAuthor : Decision::kDifferentAuthors;
  s.margin = d - threshold;
  return s;
}

PairScore decide(double d, const Thresholds& thresholds) {
  thresholds.validate();
  return decide(d, thresholds.decision_threshold());
}

}  // namespace hrsn
