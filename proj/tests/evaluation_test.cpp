#include <gtest/gtest.h>

#include <set>

#include "hrsn/evaluation.hpp"
#include "hrsn/rng.hpp"
#include "hrsn/synthetic.hpp"

namespace hrsn {
namespace {

struct Fixture {
  SyntheticCorpus data;
  TrainConfig config;
};

Fixture tiny(std::uint64_t seed = 3) {
  SyntheticConfig sc;
  sc.authors = 4;
  sc.vocab = 20;
  sc.embedding_dim = 5;
  sc.instances = 30;
  sc.min_sentences = 2;
  sc.max_sentences = 3;
  sc.min_words = 2;
  sc.max_words = 4;
  Rng rng(seed);
  Fixture f{generate_synthetic(sc, rng), {}};
  f.config.dims = {5, 3, 2};
  f.config.max_words = 4;
  f.config.max_sentences = 6;
  f.config.max_epochs = 2;
  f.config.seed = seed;
  f.config.deterministic = true;
  return f;
}

TEST(Summarize, MeanAndSampleStd) {
  std::vector<Metrics> folds(3);
  folds[0].accuracy = 0.5;
  folds[1].accuracy = 0.7;
  folds[2].accuracy = 0.9;
  const auto s = summarize(folds);
  EXPECT_NEAR(s.accuracy.mean, 0.7, 1e-15);
  EXPECT_NEAR(s.accuracy.stddev, 0.2, 1e-15);
  EXPECT_EQ(s.precision.mean, 0.0);
}

TEST(CalibrateThreshold, SeparatesCleanly) {
  const std::vector<double> d{0.1, 0.2, 0.3, 1.0, 1.2};
  const std::vector<int> labels{1, 1, 1, 0, 0};
  const double t = calibrate_threshold(d, labels, 2.0);
  EXPECT_GT(t, 0.3);
  EXPECT_LE(t, 1.0);
}

TEST(CalibrateThreshold, KeepsPreferredWhenAlreadyBest) {
  const std::vector<double> d{0.5, 3.5};
  const std::vector<int> labels{1, 0};
  EXPECT_EQ(calibrate_threshold(d, labels, 2.0), 2.0);
}

TEST(CrossValidate, ReportStructure) {
  const auto f = tiny();
  const auto report = cross_validate(f.data.corpus, f.data.embeddings, f.config);
  ASSERT_EQ(report.folds.size(), 10u);
  std::set<std::size_t> seen;
  for (const auto& fold : report.folds) {
    EXPECT_EQ(fold.midpoint.counts.total(), fold.test_ids.size());
    EXPECT_EQ(fold.test_distances.size(), fold.test_ids.size());
    for (auto id : fold.test_ids) EXPECT_TRUE(seen.insert(id).second);
  }
  EXPECT_EQ(seen.size(), f.data.corpus.size());

  const auto j = to_json(report);
  EXPECT_EQ(j["format"], "hrsn-cv-report");
  EXPECT_EQ(j["folds"].size(), 10u);
  double sum = 0.0;
  for (const auto& row : j["folds"]) {
    const auto& c = row["midpoint"]["counts"];
    const double total = c["tp"].get<double>() + c["fp"].get<double>() + c["tn"].get<double>() +
                         c["fn"].get<double>();
    const double acc = (c["tp"].get<double>() + c["tn"].get<double>()) / total;
    EXPECT_EQ(row["midpoint"]["accuracy"].get<double>(), acc);
    sum += acc;
  }
  EXPECT_NEAR(j["aggregate"]["midpoint"]["accuracy"]["mean"].get<double>(), sum / 10.0, 1e-12);
  EXPECT_NE(render_table(nlohmann::json::parse(j.dump())).find("accuracy"), std::string::npos);
}

TEST(CrossValidate, DeterministicReport) {
  const auto f = tiny(4);
  const auto a = to_json(cross_validate(f.data.corpus, f.data.embeddings, f.config)).dump();
  const auto b = to_json(cross_validate(f.data.corpus, f.data.embeddings, f.config)).dump();
  EXPECT_EQ(a, b);
}

TEST(CrossValidate, CalibratedBlock) {
  auto f = tiny(5);
  f.config.calibrate_tau = true;
  f.config.max_epochs = 1;
  const auto j = to_json(cross_validate(f.data.corpus, f.data.embeddings, f.config));
  EXPECT_TRUE(j["aggregate"].contains("calibrated"));
  EXPECT_TRUE(j["folds"][0].contains("calibrated"));
}

TEST(VerifyPair, SelfAndSymmetry) {
  const auto f = tiny(6);
  Rng rng(7);
  Model model{ModelConfig::from(f.config), EncoderParams::uniform(f.config.dims, -0.5, 0.5, rng)};
  const std::string a = f.data.corpus[0].unknown_doc;
  const std::string b = f.data.corpus[1].unknown_doc;
  const auto self = verify_pair(model, f.data.embeddings, a, a);
  EXPECT_EQ(self.distance, 0.0);
  EXPECT_EQ(self.decision, Decision::kSameAuthor);
  EXPECT_EQ(verify_pair(model, f.data.embeddings, a, b).distance,
            verify_pair(model, f.data.embeddings, b, a).distance);
  EXPECT_THROW(verify_pair(model, f.data.embeddings, a, " \n "), Error);
}

TEST(PairScoreJson, Fields) {
  const auto j = to_json(decide(1.5, Thresholds{1.0, 3.0}), Thresholds{1.0, 3.0});
  EXPECT_EQ(j["format"], "hrsn-pair-score");
  EXPECT_EQ(j["decision"], "same_author");
  EXPECT_EQ(j["threshold"], 2.0);
  EXPECT_EQ(j["margin"], -0.5);
}

}  // namespace
}  // namespace hrsn
