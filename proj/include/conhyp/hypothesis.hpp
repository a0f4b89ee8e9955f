#pragma once

// Correct/incorrect similarity sets (S^C, S^I) for the three consistency
// hypotheses, in pairwise and aggregated form, and their pooling over groups.
//
//   sim_any      (H1): a correct generation is more similar to any other
//                      generation than an incorrect one is.
//   sim_correct  (H2): similarity to the correct generations only.
//   sim_separate (H3): within-correct vs within-incorrect similarity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conhyp/corpus.hpp"
#include "conhyp/error.hpp"
#include "conhyp/similarity.hpp"

namespace conhyp {

enum class Hypothesis { sim_any = 1, sim_correct = 2, sim_separate = 3 };
enum class Variant { pairwise, aggregated };
enum class Scope { instance, group, dataset };

/// `ordered` keeps both orientations (j,k) and (k,j) of a within-class pair;
/// `unordered` keeps one.
enum class PairOrientation { ordered, unordered };

inline std::string_view hypothesis_name(Hypothesis h) {
  switch (h) {
    case Hypothesis::sim_any: return "sim_any";
    case Hypothesis::sim_correct: return "sim_correct";
    case Hypothesis::sim_separate: return "sim_separate";
  }
  return "sim_any";
}

inline std::string_view variant_name(Variant v) { return v == Variant::pairwise ? "pairwise" : "aggregated"; }

inline std::string_view scope_name(Scope s) {
  switch (s) {
    case Scope::instance: return "instance";
    case Scope::group: return "group";
    case Scope::dataset: return "dataset";
  }
  return "instance";
}

inline std::string_view orientation_name(PairOrientation o) {
  return o == PairOrientation::ordered ? "ordered" : "unordered";
}

inline PairOrientation parse_orientation(std::string_view s) {
  if (s == "ordered") return PairOrientation::ordered;
  if (s == "unordered") return PairOrientation::unordered;
  throw ConfigError("unknown pair orientation '" + std::string(s) + "' (expected ordered or unordered)");
}

struct HypothesisSets {
  std::vector<double> correct_set;
  std::vector<double> incorrect_set;
  Hypothesis hypothesis = Hypothesis::sim_any;
  Variant variant = Variant::pairwise;
  Scope scope = Scope::instance;

  bool operator==(const HypothesisSets&) const = default;
};

struct Aggregator {
  enum class Kind { arithmetic, geometric, harmonic };

  Kind kind = Kind::arithmetic;
  double epsilon = 1e-12;

  Aggregator() = default;
  explicit Aggregator(Kind k, double eps = 1e-12) : kind(k), epsilon(eps) {
    if (!(eps > 0.0 && eps <= 1e-6)) throw HypothesisError("aggregator epsilon must lie in (0, 1e-6]");
  }

  bool operator==(const Aggregator&) const = default;
};

inline std::string_view aggregator_name(Aggregator::Kind k) {
  switch (k) {
    case Aggregator::Kind::arithmetic: return "arith";
    case Aggregator::Kind::geometric: return "geom";
    case Aggregator::Kind::harmonic: return "harm";
  }
  return "arith";
}

inline Aggregator::Kind parse_aggregator(std::string_view s) {
  if (s == "arith" || s == "arithmetic") return Aggregator::Kind::arithmetic;
  if (s == "geom" || s == "geometric") return Aggregator::Kind::geometric;
  if (s == "harm" || s == "harmonic") return Aggregator::Kind::harmonic;
  throw ConfigError("unknown aggregator '" + std::string(s) + "' (expected arith, geom or harm)");
}

/// Arithmetic, geometric or harmonic mean, clamped to [0, 1]. Geometric and
/// harmonic floor each value at epsilon so zeros stay finite.
inline double aggregate(std::span<const double> values, const Aggregator& agg) {
  if (values.empty()) throw HypothesisError("cannot aggregate an empty list");
  const double n = static_cast<double>(values.size());
  double result = 0.0;
  switch (agg.kind) {
    case Aggregator::Kind::arithmetic:
      result = std::accumulate(values.begin(), values.end(), 0.0) / n;
      break;
    case Aggregator::Kind::geometric: {
      double log_sum = 0.0;
      for (double v : values) log_sum += std::log(std::max(v, agg.epsilon));
      result = std::exp(log_sum / n);
      break;
    }
    case Aggregator::Kind::harmonic: {
      double inv_sum = 0.0;
      for (double v : values) inv_sum += 1.0 / std::max(v, agg.epsilon);
      result = n / inv_sum;
      break;
    }
  }
  return std::clamp(result, 0.0, 1.0);
}

namespace detail {

inline void require_labeled(const InstanceBundle& bundle, const SimilarityMatrix& matrix) {
  if (!bundle.labeled()) throw HypothesisError("instance '" + bundle.instance_id + "' is not labeled");
  if (matrix.size() != bundle.size()) {
    throw HypothesisError("similarity matrix size does not match instance '" + bundle.instance_id + "'");
  }
}

}  // namespace detail

/// Pairwise sets for one instance. With ordered orientation every ordered
/// pair (j,k), k != j, that satisfies the membership rule contributes once.
inline HypothesisSets build_pairwise_sets(const InstanceBundle& bundle, const SimilarityMatrix& matrix,
                                          Hypothesis hypothesis,
                                          PairOrientation orientation = PairOrientation::ordered) {
  detail::require_labeled(bundle, matrix);
  HypothesisSets sets;
  sets.hypothesis = hypothesis;
  sets.variant = Variant::pairwise;
  sets.scope = Scope::instance;
  const auto& lab = bundle.labels;
  const std::size_t m = bundle.size();
  const bool ordered = orientation == PairOrientation::ordered;

  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      const double s = matrix(j, k);
      const bool same_class = lab[j] == lab[k];
      // Unordered mode drops the (k, j) duplicate of each within-class pair.
      if (!ordered && same_class && k < j) continue;
      switch (hypothesis) {
        case Hypothesis::sim_any:
          (lab[j] ? sets.correct_set : sets.incorrect_set).push_back(s);
          break;
        case Hypothesis::sim_correct:
          if (lab[j] && lab[k]) sets.correct_set.push_back(s);
          if (!lab[j] && lab[k]) sets.incorrect_set.push_back(s);
          break;
        case Hypothesis::sim_separate:
          if (lab[j] && lab[k]) sets.correct_set.push_back(s);
          if (!lab[j] && !lab[k]) sets.incorrect_set.push_back(s);
          break;
      }
    }
  }
  return sets;
}

/// Aggregated sets for one instance: one value per generation whose
/// comparison pool is non-empty, filed under that generation's own label.
inline HypothesisSets build_aggregated_sets(const InstanceBundle& bundle, const SimilarityMatrix& matrix,
                                            Hypothesis hypothesis, const Aggregator& agg) {
  detail::require_labeled(bundle, matrix);
  HypothesisSets sets;
  sets.hypothesis = hypothesis;
  sets.variant = Variant::aggregated;
  sets.scope = Scope::instance;
  const auto& lab = bundle.labels;
  const std::size_t m = bundle.size();

  std::vector<double> pool;
  for (std::size_t j = 0; j < m; ++j) {
    pool.clear();
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      bool include = false;
      switch (hypothesis) {
        case Hypothesis::sim_any: include = true; break;
        case Hypothesis::sim_correct: include = lab[k]; break;
        case Hypothesis::sim_separate: include = lab[k] == lab[j]; break;
      }
      if (include) pool.push_back(matrix(j, k));
    }
    if (pool.empty()) continue;
    (lab[j] ? sets.correct_set : sets.incorrect_set).push_back(aggregate(pool, agg));
  }
  return sets;
}

/// Multiset union of the member instances' sets. The result has dataset
/// scope when the members cover every instance exactly once.
inline HypothesisSets pool_sets(std::span<const HypothesisSets> instance_sets,
                                std::span<const std::size_t> member_ids) {
  if (member_ids.empty()) throw HypothesisError("cannot pool an empty group");
  HypothesisSets pooled;
  std::vector<bool> seen(instance_sets.size(), false);
  std::size_t total_c = 0;
  std::size_t total_i = 0;
  for (std::size_t id : member_ids) {
    if (id >= instance_sets.size()) throw HypothesisError("group member index out of range");
    if (seen[id]) throw HypothesisError("group lists an instance twice");
    seen[id] = true;
    total_c += instance_sets[id].correct_set.size();
    total_i += instance_sets[id].incorrect_set.size();
  }
  const auto& first = instance_sets[member_ids.front()];
  pooled.hypothesis = first.hypothesis;
  pooled.variant = first.variant;
  pooled.correct_set.reserve(total_c);
  pooled.incorrect_set.reserve(total_i);
  for (std::size_t id : member_ids) {
    const auto& s = instance_sets[id];
    if (s.hypothesis != pooled.hypothesis || s.variant != pooled.variant) {
      throw HypothesisError("cannot pool sets from different hypotheses or variants");
    }
    pooled.correct_set.insert(pooled.correct_set.end(), s.correct_set.begin(), s.correct_set.end());
    pooled.incorrect_set.insert(pooled.incorrect_set.end(), s.incorrect_set.begin(), s.incorrect_set.end());
  }
  pooled.scope = member_ids.size() == instance_sets.size() ? Scope::dataset : Scope::group;
  return pooled;
}

/// Pools every instance (dataset scope).
inline HypothesisSets pool_all(std::span<const HypothesisSets> instance_sets) {
  std::vector<std::size_t> ids(instance_sets.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return pool_sets(instance_sets, ids);
}

}  // namespace conhyp
