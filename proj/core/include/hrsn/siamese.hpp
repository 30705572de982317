#pragma once

// Siamese head: Euclidean distance between document embeddings, the
// two-threshold contrastive loss
//
//   L = l/2 * max(d - tau1, 0)^2 + (1 - l)/2 * max(tau2 - d, 0)^2
//
// and the decision rule d < (tau1 + tau2) / 2  =>  same author.

#include <string_view>
#include <utility>

#include "hrsn/numeric.hpp"

namespace hrsn {

struct Thresholds {
  double tau1 = 1.0;  // same-author pairs should end up closer than this
  double tau2 = 3.0;  // different-author pairs should end up farther than this

  // Throws unless 0 <= tau1 < tau2.
  void validate() const;
  double decision_threshold() const { return 0.5 * (tau1 + tau2); }
};

enum class Decision { kSameAuthor, kDifferentAuthors };

std::string_view to_string(Decision d);

struct PairScore {
  double distance = 0.0;
  Decision decision = Decision::kDifferentAuthors;
  double margin = 0.0;  // distance - threshold
};

double distance(const Vector& x1, const Vector& x2);

double contrastive_loss(double distance, int label, const Thresholds& thresholds);
double contrastive_loss(const Vector& x1, const Vector& x2, int label,
                        const Thresholds& thresholds);

// (dL/dx1, dL/dx2). Zero in the flat regions and, for a different-author pair
// with identical embeddings (d = 0), zero by convention.
std::pair<Vector, Vector> contrastive_loss_grad(const Vector& x1, const Vector& x2,
                                                int label, const Thresholds& thresholds);

// Ties (d == threshold) go to kDifferentAuthors.
PairScore decide(double distance, double threshold);
PairScore decide(double distance, const Thresholds& thresholds);

}  // namespace hrsn
