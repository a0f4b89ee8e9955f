#pragma once

// AUROC / AUARC evaluation of confidence scores against correctness labels,
// plus repeated random-subset evaluation with error bars.
//
// AUARC conventions: items are retained in descending score order (ties in
// input order unless TieRule::expected), accuracy with everything rejected
// is 1, and the curve is integrated with the trapezoid rule over the
// rejected fraction r/n, r = 0..n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conhyp/confidence.hpp"
#include "conhyp/error.hpp"
#include "conhyp/random.hpp"

namespace conhyp {

namespace detail {

inline void check_lengths(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw EvalError("scores and labels differ in length");
}

}  // namespace detail

/// Probability that a random correct item outscores a random incorrect item,
/// ties counted 1/2 (Mann-Whitney U via midranks). nullopt when only one
/// class is present.
inline std::optional<double> auroc(std::span<const double> scores, const std::vector<bool>& labels) {
  detail::check_lengths(scores, labels);
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the positive rank sum, kept integral so the result is exact.
  std::uint64_t rank_sum_x2 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t midrank_x2 = i + j + 1;  // ranks i+1..j, midrank (i+1+j)/2
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) rank_sum_x2 += midrank_x2;
    }
    i = j;
  }
  const std::uint64_t u_x2 = rank_sum_x2 - static_cast<std::uint64_t>(n_pos) * (n_pos + 1);
  return (static_cast<double>(u_x2) / 2.0) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

enum class TieRule {
  /// Tied items are rejected in reverse input order (stable descending sort).
  stable_order,
  /// Within a block of tied scores, accuracy is the expectation over random
  /// orderings of the block.
  expected,
};

/// Area under the accuracy-rejection curve.
inline double auarc(std::span<const double> scores, const std::vector<bool>& labels,
                    TieRule ties = TieRule::stable_order) {
  detail::check_lengths(scores, labels);
  const std::size_t n = scores.size();
  if (n == 0) throw EvalError("AUARC of an empty set is undefined");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // correct_in_prefix[k] = number of correct items among the k retained.
  std::vector<double> correct_in_prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) correct_in_prefix[k + 1] = correct_in_prefix[k] + (labels[order[k]] ? 1.0 : 0.0);
  if (ties == TieRule::expected) {
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && scores[order[j]] == scores[order[i]]) ++j;
      const double base = correct_in_prefix[i];
      const double block = correct_in_prefix[j] - base;
      for (std::size_t k = i + 1; k < j; ++k) {
        correct_in_prefix[k] = base + block * static_cast<double>(k - i) / static_cast<double>(j - i);
      }
      i = j;
    }
  }

  const auto accuracy_after_rejecting = [&](std::size_t r) {
    const std::size_t kept = n - r;
    return kept == 0 ? 1.0 : correct_in_prefix[kept] / static_cast<double>(kept);
  };
  double area = 0.0;
  for (std::size_t r = 0; r < n; ++r) area += 0.5 * (accuracy_after_rejecting(r) + accuracy_after_rejecting(r + 1));
  return area / static_cast<double>(n);
}

enum class EvalUnit { generation, instance };

inline std::string_view unit_name(EvalUnit u) { return u == EvalUnit::generation ? "generation" : "instance"; }

inline EvalUnit parse_unit(std::string_view s) {
  if (s == "generation") return EvalUnit::generation;
  if (s == "instance") return EvalUnit::instance;
  throw ConfigError("unknown eval unit '" + std::string(s) + "' (expected generation or instance)");
}

struct EvalReport {
  std::string method;
  /// nullopt when no run contained both classes.
  std::optional<double> auroc_mean;
  double auroc_std = 0.0;
  double auarc_mean = 0.0;
  double auarc_std = 0.0;
  std::size_t runs = 1;
  /// Runs whose subset contained both classes.
  std::size_t auroc_runs = 0;
  double subset_fraction = 1.0;
  std::uint64_t seed = 0;
  EvalUnit unit = EvalUnit::generation;
};

/// Keeps the highest-scoring generation of each instance (first on ties),
/// in order of first appearance.
inline std::vector<ConfidenceScore> top_per_instance(std::span<const ConfidenceScore> scores) {
  std::vector<ConfidenceScore> out;
  std::map<std::string, std::size_t, std::less<>> slot;
  for (const auto& s : scores) {
    const auto [it, inserted] = slot.try_emplace(s.instance_id, out.size());
    if (inserted) {
      out.push_back(s);
    } else if (s.score > out[it->second].score) {
      out[it->second] = s;
    }
  }
  return out;
}

namespace detail {

inline void mean_std(std::span<const double> xs, double& mean, double& sd) {
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace detail

/// Seed for run `r` of a subset evaluation seeded with `seed`.
inline std::uint64_t eval_run_seed(std::uint64_t seed, std::size_t run) {
  return derive_seed(seed, {0x6576616cULL, static_cast<std::uint64_t>(run)});
}

/// Draws floor(fraction * N) items without replacement per run (kept in input
/// order), computes AUROC and AUARC, and reports mean and population std.
/// Runs whose subset is single-class are excluded from the AUROC mean.
inline EvalReport subset_eval(std::span<const ConfidenceScore> scores, double subset_fraction, std::size_t runs,
                              std::uint64_t seed, EvalUnit unit = EvalUnit::generation,
                              TieRule ties = TieRule::stable_order) {
  if (runs < 1) throw EvalError("eval runs must be >= 1");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) throw EvalError("subset fraction must lie in (0, 1]");
  if (scores.empty()) throw EvalError("no scores to evaluate");

  std::vector<ConfidenceScore> items =
      unit == EvalUnit::instance ? top_per_instance(scores) : std::vector<ConfidenceScore>(scores.begin(), scores.end());
  std::vector<double> all_scores;
  std::vector<bool> all_labels;
  for (const auto& s : items) {
    if (!s.label) throw EvalError("instance '" + s.instance_id + "' has an unlabeled score");
    all_scores.push_back(s.score);
    all_labels.push_back(*s.label);
  }
  const auto k = static_cast<std::size_t>(std::floor(subset_fraction * static_cast<double>(items.size())));
  if (k == 0) throw EvalError("subset fraction selects no items");

  EvalReport report;
  report.method = std::string(method_name(scores.front().method));
  report.runs = runs;
  report.subset_fraction = subset_fraction;
  report.seed = seed;
  report.unit = unit;

  std::vector<double> aurocs;
  std::vector<double> auarcs;
  std::vector<double> sub_scores(k);
  std::vector<bool> sub_labels(k);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(eval_run_seed(seed, r));
    const auto idx = rng.sample_indices(items.size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      sub_scores[i] = all_scores[idx[i]];
      sub_labels[i] = all_labels[idx[i]];
    }
    if (const auto a = auroc(sub_scores, sub_labels)) aurocs.push_back(*a);
    auarcs.push_back(auarc(sub_scores, sub_labels, ties));
  }
  report.auroc_runs = aurocs.size();
  if (!aurocs.empty()) {
    double mean = 0.0;
    detail::mean_std(aurocs, mean, report.auroc_std);
    report.auroc_mean = mean;
  }
  detail::mean_std(auarcs, report.auarc_mean, report.auarc_std);
  return report;
}

}  // namespace conhyp
