#include <gtest/gtest.h>

#include <cmath>

#include "hrsn/rng.hpp"
#include "hrsn/siamese.hpp"
#include "support/finite_difference.hpp"

namespace hrsn {
namespace {

const Thresholds kDefault{1.0, 3.0};

TEST(Distance, Examples) {
  EXPECT_EQ(distance(Vector{1, 2}, Vector{1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(distance(Vector{1, 0}, Vector{0, 1}), std::sqrt(2.0));
  EXPECT_THROW(distance(Vector{1, 0}, Vector{1}), ShapeError);
}

TEST(Distance, Symmetric) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vector a = uniform_init(5, -1.0, 1.0, rng);
    const Vector b = uniform_init(5, -1.0, 1.0, rng);
    EXPECT_EQ(distance(a, b), distance(b, a));
  }
}

TEST(ContrastiveLoss, SatisfiedConstraintsAreZero) {
  EXPECT_EQ(contrastive_loss(0.5, 1, kDefault), 0.0);
  EXPECT_EQ(contrastive_loss(1.0, 1, kDefault), 0.0);
  EXPECT_EQ(contrastive_loss(3.0, 0, kDefault), 0.0);
  EXPECT_EQ(contrastive_loss(7.0, 0, kDefault), 0.0);
}

TEST(ContrastiveLoss, HandValue) {
  EXPECT_DOUBLE_EQ(contrastive_loss(2.5, 1, kDefault), 1.125);
  EXPECT_DOUBLE_EQ(contrastive_loss(1.0, 0, kDefault), 2.0);
}

TEST(ContrastiveLoss, InvalidInputs) {
  EXPECT_THROW(contrastive_loss(1.0, 2, kDefault), Error);
  EXPECT_THROW(contrastive_loss(1.0, 1, Thresholds{3.0, 1.0}), Error);
  EXPECT_THROW(contrastive_loss(1.0, 1, Thresholds{-1.0, 1.0}), Error);
}

TEST(ContrastiveLoss, MonotoneInDistance) {
  double prev_same = -1.0, prev_diff = 1e9;
  for (int k = 0; k <= 500; ++k) {
    const double d = 0.01 * k;
    const double same = contrastive_loss(d, 1, kDefault);
    const double diff = contrastive_loss(d, 0, kDefault);
    EXPECT_GE(same, prev_same);
    EXPECT_LE(diff, prev_diff);
    EXPECT_GE(same, 0.0);
    EXPECT_GE(diff, 0.0);
    prev_same = same;
    prev_diff = diff;
  }
}

TEST(ContrastiveLossGrad, FlatRegionsAreZero) {
  const auto [g1, g2] = contrastive_loss_grad(Vector{0, 0}, Vector{0.5, 0}, 1, kDefault);
  EXPECT_EQ(g1, Vector(2));
  EXPECT_EQ(g2, Vector(2));
  const auto [h1, h2] = contrastive_loss_grad(Vector{0, 0}, Vector{4, 0}, 0, kDefault);
  EXPECT_EQ(h1, Vector(2));
  EXPECT_EQ(h2, Vector(2));
}

TEST(ContrastiveLossGrad, CoincidentDifferentAuthorPairIsZero) {
  const auto [g1, g2] = contrastive_loss_grad(Vector{0.3, 0.3}, Vector{0.3, 0.3}, 0, kDefault);
  EXPECT_EQ(g1, Vector(2));
  EXPECT_EQ(g2, Vector(2));
}

TEST(ContrastiveLossGrad, MatchesFiniteDifferences) {
  Rng rng(2);
  for (int label : {0, 1}) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector a = uniform_init(3, -1.5, 1.5, rng);
      Vector b = uniform_init(3, -1.5, 1.5, rng);
      const double d = distance(a, b);
      if (std::abs(d - 1.0) < 1e-3 || std::abs(d - 3.0) < 1e-3) continue;
      const auto loss = [&] { return contrastive_loss(a, b, label, kDefault); };
      const auto [g1, g2] = contrastive_loss_grad(a, b, label, kDefault);
      EXPECT_TRUE(testing::compare_gradients(g1.values(), testing::numeric_gradient(loss, a.values()), 1e-6, 1e-9).ok);
      EXPECT_TRUE(testing::compare_gradients(g2.values(), testing::numeric_gradient(loss, b.values()), 1e-6, 1e-9).ok);
      for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g1[i] + g2[i], 0.0);
    }
  }
}

TEST(ContrastiveLoss, SwapSymmetric) {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vector a = uniform_init(4, -2.0, 2.0, rng);
    const Vector b = uniform_init(4, -2.0, 2.0, rng);
    for (int label : {0, 1}) {
      EXPECT_EQ(contrastive_loss(a, b, label, kDefault), contrastive_loss(b, a, label, kDefault));
    }
  }
}

TEST(Decide, Examples) {
  EXPECT_EQ(decide(1.5, kDefault).decision, Decision::kSameAuthor);
  EXPECT_EQ(decide(2.0, kDefault).decision, Decision::kDifferentAuthors);
  EXPECT_EQ(decide(0.0, Thresholds{0.0, 0.1}).decision, Decision::kSameAuthor);
  EXPECT_DOUBLE_EQ(decide(2.5, kDefault).margin, 0.5);
  EXPECT_EQ(to_string(Decision::kSameAuthor), "same_author");
  EXPECT_EQ(to_string(Decision::kDifferentAuthors), "different_authors");
}

}  // namespace
}  // namespace hrsn
