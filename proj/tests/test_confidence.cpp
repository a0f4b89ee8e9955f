#include <gtest/gtest.h>

#include "conhyp/confidence.hpp"
#include "conhyp/synth.hpp"

using conhyp::Aggregator;
using Kind = conhyp::Aggregator::Kind;

namespace {

conhyp::InstanceBundle unlabeled(std::size_t m) {
  conhyp::InstanceBundle b;
  b.instance_id = "b";
  b.query = "q";
  for (std::size_t j = 0; j < m; ++j) {
    conhyp::GenerationRecord r;
    r.text = "same text";
    b.generations.push_back(r);
  }
  return b;
}

std::vector<double> values(const std::vector<conhyp::ConfidenceScore>& s) {
  std::vector<double> out;
  for (const auto& c : s) out.push_back(c.score);
  return out;
}

const conhyp::SimilarityMatrix kFixture(3, conhyp::Metric::jaccard, {1, 0.8, 0.2, 0.8, 1, 0.4, 0.2, 0.4, 1});

}  // namespace

TEST(ScoreByAggregation, IdenticalGenerationsScoreOne) {
  const auto b = unlabeled(4);
  const auto m = conhyp::pairwise_matrix(b, conhyp::Metric::jaccard);
  for (Kind k : {Kind::arithmetic, Kind::geometric, Kind::harmonic}) {
    EXPECT_EQ(values(conhyp::score_by_aggregation(b, m, Aggregator(k))), (std::vector<double>{1, 1, 1, 1}));
  }
}

TEST(ScoreByAggregation, ThreeGenerationFixture) {
  const auto arith = values(conhyp::score_by_aggregation(unlabeled(3), kFixture, Aggregator{}));
  ASSERT_EQ(arith.size(), 3u);
  EXPECT_DOUBLE_EQ(arith[0], 0.5);
  EXPECT_DOUBLE_EQ(arith[1], 0.6);
  EXPECT_DOUBLE_EQ(arith[2], 0.3);
  const auto harm = values(conhyp::score_by_aggregation(unlabeled(3), kFixture, Aggregator(Kind::harmonic)));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(harm[j], arith[j]);
}

TEST(ScoreByAggregation, IncludeSelfAddsUnitSimilarity) {
  const auto s = values(conhyp::score_by_aggregation(unlabeled(3), kFixture, Aggregator{}, true));
  EXPECT_DOUBLE_EQ(s[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s[2], 1.6 / 3.0);
}

TEST(ScoreByAggregation, CarriesIdentityAndLabels) {
  auto b = unlabeled(3);
  b.labels = {true, false, true};
  const auto s = conhyp::score_by_aggregation(b, kFixture, Aggregator(Kind::geometric));
  EXPECT_EQ(s[1].instance_id, "b");
  EXPECT_EQ(s[1].generation_index, 1u);
  EXPECT_EQ(s[1].method, conhyp::ScoreMethod::geom_agg);
  EXPECT_EQ(s[1].label, false);
  EXPECT_FALSE(conhyp::score_by_aggregation(unlabeled(3), kFixture, Aggregator{})[0].label.has_value());
}

TEST(ScoreByAggregation, Errors) {
  EXPECT_THROW(conhyp::score_by_aggregation(unlabeled(1), conhyp::SimilarityMatrix(1, conhyp::Metric::jaccard, {1}),
                                            Aggregator{}),
               conhyp::ConfidenceError);
  EXPECT_THROW(conhyp::score_by_aggregation(unlabeled(4), kFixture, Aggregator{}), conhyp::ConfidenceError);
}

TEST(ScoreProperties, OrderingPermutationAndLabelIndependence) {
  conhyp::PlantSpec spec;
  spec.n_instances = 15;
  spec.m_generations = 8;
  spec.effect = conhyp::Effect::weak;
  const auto corpus = conhyp::generate_planted(spec);
  for (const auto& b : corpus.instances) {
    const auto m = conhyp::pairwise_matrix(b, conhyp::Metric::jaccard);
    const auto a = values(conhyp::score_by_aggregation(b, m, Aggregator(Kind::arithmetic)));
    const auto g = values(conhyp::score_by_aggregation(b, m, Aggregator(Kind::geometric)));
    const auto h = values(conhyp::score_by_aggregation(b, m, Aggregator(Kind::harmonic)));
    for (std::size_t j = 0; j < b.size(); ++j) {
      EXPECT_LE(h[j], g[j] + 1e-15);
      EXPECT_LE(g[j], a[j] + 1e-15);
    }

    auto relabeled = b;
    relabeled.labels.assign(b.size(), true);
    EXPECT_EQ(values(conhyp::score_by_aggregation(relabeled, m, Aggregator{})), a);

    auto reversed = b;
    std::reverse(reversed.generations.begin(), reversed.generations.end());
    const auto r = values(
        conhyp::score_by_aggregation(reversed, conhyp::pairwise_matrix(reversed, conhyp::Metric::jaccard), Aggregator{}));
    for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(r[j], a[b.size() - 1 - j], 1e-15);

    auto extended = b;
    extended.generations.push_back(b.generations[0]);
    const auto e = values(conhyp::score_by_aggregation(
        extended, conhyp::pairwise_matrix(extended, conhyp::Metric::jaccard), Aggregator{}));
    EXPECT_GE(e[0], a[0]);
  }
}

TEST(ScoreAlwaysOne, ConstantScores) {
  EXPECT_EQ(values(conhyp::score_always_one(unlabeled(3))), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(values(conhyp::score_always_one(unlabeled(2))), (std::vector<double>{1, 1}));
}

TEST(ScoreAvgProb, ExponentiatesMeanLogProb) {
  auto b = unlabeled(3);
  b.generations[0].mean_log_prob = 0.0;
  b.generations[1].mean_log_prob = -0.693;
  b.generations[2].mean_log_prob = -std::log(4.0);
  const auto s = values(conhyp::score_avg_prob(b));
  EXPECT_EQ(s[0], 1.0);
  EXPECT_NEAR(s[1], 0.5, 1e-3);
  EXPECT_DOUBLE_EQ(s[2], 0.25);
  b.generations[1].mean_log_prob.reset();
  EXPECT_THROW(conhyp::score_avg_prob(b), conhyp::ConfidenceError);
}

TEST(ScoreMethod, Names) {
  for (auto m : {conhyp::ScoreMethod::arith_agg, conhyp::ScoreMethod::geom_agg, conhyp::ScoreMethod::harm_agg,
                 conhyp::ScoreMethod::always_one, conhyp::ScoreMethod::avg_prob}) {
    EXPECT_EQ(conhyp::parse_method(conhyp::method_name(m)), m);
  }
  EXPECT_THROW(conhyp::parse_method("ptrue"), conhyp::ConfigError);
}
