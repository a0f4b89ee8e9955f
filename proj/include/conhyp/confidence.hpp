#pragma once

// Per-generation confidence scores: similarity aggregation (black-box) and
// the always-one and average-token-probability baselines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conhyp/corpus.hpp"
#include "conhyp/error.hpp"
#include "conhyp/hypothesis.hpp"
#include "conhyp/similarity.hpp"

namespace conhyp {

enum class ScoreMethod { arith_agg, geom_agg, harm_agg, always_one, avg_prob };

inline std::string_view method_name(ScoreMethod m) {
  switch (m) {
    case ScoreMethod::arith_agg: return "arith_agg";
    case ScoreMethod::geom_agg: return "geom_agg";
    case ScoreMethod::harm_agg: return "harm_agg";
    case ScoreMethod::always_one: return "always_one";
    case ScoreMethod::avg_prob: return "avg_prob";
  }
  return "always_one";
}

inline ScoreMethod parse_method(std::string_view s) {
  for (auto m : {ScoreMethod::arith_agg, ScoreMethod::geom_agg, ScoreMethod::harm_agg, ScoreMethod::always_one,
                 ScoreMethod::avg_prob}) {
    if (method_name(m) == s) return m;
  }
  throw ConfigError("unknown scoring method '" + std::string(s) + "'");
}

inline ScoreMethod method_for(Aggregator::Kind kind) {
  switch (kind) {
    case Aggregator::Kind::arithmetic: return ScoreMethod::arith_agg;
    case Aggregator::Kind::geometric: return ScoreMethod::geom_agg;
    case Aggregator::Kind::harmonic: return ScoreMethod::harm_agg;
  }
  return ScoreMethod::arith_agg;
}

struct ConfidenceScore {
  std::string instance_id;
  std::size_t generation_index = 0;
  double score = 0.0;
  ScoreMethod method = ScoreMethod::always_one;
  /// Correctness label, when the bundle has been labeled.
  std::optional<bool> label;

  bool operator==(const ConfidenceScore&) const = default;
};

namespace detail {

inline ConfidenceScore make_score(const InstanceBundle& bundle, std::size_t j, double score, ScoreMethod method) {
  ConfidenceScore c{bundle.instance_id, j, score, method, std::nullopt};
  if (bundle.labeled()) c.label = static_cast<bool>(bundle.labels[j]);
  return c;
}

}  // namespace detail

/// score_j = f({s^{j,k} : k != j}). With include_self the constant
/// self-similarity s^{j,j} = 1 joins the pool.
inline std::vector<ConfidenceScore> score_by_aggregation(const InstanceBundle& bundle, const SimilarityMatrix& matrix,
                                                         const Aggregator& agg, bool include_self = false) {
  const std::size_t m = bundle.size();
  if (m < 2) throw ConfidenceError("instance '" + bundle.instance_id + "' needs >= 2 generations to score");
  if (matrix.size() != m) throw ConfidenceError("similarity matrix size does not match the instance");
  std::vector<ConfidenceScore> out;
  out.reserve(m);
  std::vector<double> pool;
  for (std::size_t j = 0; j < m; ++j) {
    pool.clear();
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j || include_self) pool.push_back(matrix(j, k));
    }
    out.push_back(detail::make_score(bundle, j, aggregate(pool, agg), method_for(agg.kind)));
  }
  return out;
}

inline std::vector<ConfidenceScore> score_always_one(const InstanceBundle& bundle) {
  std::vector<ConfidenceScore> out;
  out.reserve(bundle.size());
  for (std::size_t j = 0; j < bundle.size(); ++j) {
    out.push_back(detail::make_score(bundle, j, 1.0, ScoreMethod::always_one));
  }
  return out;
}

/// exp(mean token log-probability), clamped to [0, 1].
inline std::vector<ConfidenceScore> score_avg_prob(const InstanceBundle& bundle) {
  std::vector<ConfidenceScore> out;
  out.reserve(bundle.size());
  for (std::size_t j = 0; j < bundle.size(); ++j) {
    const auto& lp = bundle.generations[j].mean_log_prob;
    if (!lp) {
      throw ConfidenceError("instance '" + bundle.instance_id + "' generation " + std::to_string(j) +
                            " has no mean_log_prob");
    }
    if (!std::isfinite(*lp)) throw ConfidenceError("mean_log_prob must be finite");
    out.push_back(detail::make_score(bundle, j, std::clamp(std::exp(*lp), 0.0, 1.0), ScoreMethod::avg_prob));
  }
  return out;
}

}  // namespace conhyp
