#pragma once

// One-sided two-sample t-tests of mu_C > mu_I, randomized group-splitting
// verification (fraction of verified groups rho(n_g)), and conformity
// metrics: mean difference and the maximum relative group count theta*.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conhyp/error.hpp"
#include "conhyp/hypothesis.hpp"
#include "conhyp/parallel.hpp"
#include "conhyp/random.hpp"

namespace conhyp {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2); callers use the symmetry relation otherwise.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw StatsError("incomplete beta continued fraction did not converge");
}

// x^a (1-x)^b / (a B(a, b)), with 1 - x supplied separately for accuracy.
inline double beta_prefactor(double a, double b, double x, double one_minus_x) {
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp(a * std::log(x) + b * std::log(one_minus_x) - log_beta) / a;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0, x in [0, 1].
/// `one_minus_x` lets callers pass an accurately computed complement.
inline double regularized_incomplete_beta(double a, double b, double x, double one_minus_x) {
  if (!(a > 0.0 && b > 0.0)) throw StatsError("incomplete beta requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw StatsError("incomplete beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (one_minus_x == 0.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return detail::beta_prefactor(a, b, x, one_minus_x) * detail::beta_continued_fraction(a, b, x);
  }
  return 1.0 - detail::beta_prefactor(b, a, one_minus_x, x) * detail::beta_continued_fraction(b, a, one_minus_x);
}

inline double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

/// P(T > t) for Student's t with `df` > 0 degrees of freedom.
inline double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw StatsError("degrees of freedom must be positive");
  if (std::isnan(t)) throw StatsError("t statistic is NaN");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double t2 = t * t;
  // I_{df/(df+t^2)}(df/2, 1/2) is the two-sided tail mass.
  const double x = df / (df + t2);
  const double one_minus_x = t2 / (df + t2);
  const double two_sided = regularized_incomplete_beta(df / 2.0, 0.5, x, one_minus_x);
  return t >= 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
}

enum class TTestKind { welch, student };

inline std::string_view ttest_name(TTestKind k) { return k == TTestKind::welch ? "welch" : "student"; }

inline TTestKind parse_ttest(std::string_view s) {
  if (s == "welch") return TTestKind::welch;
  if (s == "student") return TTestKind::student;
  throw ConfigError("unknown t-test '" + std::string(s) + "' (expected welch or student)");
}

enum class Verdict { verified, not_verified, inconclusive };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::not_verified: return "not_verified";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct TestResult {
  /// 0 with df 0 when the test could not be run (inconclusive).
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  Verdict verdict = Verdict::inconclusive;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
};

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1)
  std::size_t n = 0;
};

inline SampleMoments moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  // A constant sample must report exactly zero spread; summation rounding
  // would otherwise leave a residue near 1e-33 and bypass the zero-variance rules.
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    m.mean = xs.front();
    return m;
  }
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m.n);
  if (m.n < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / static_cast<double>(m.n - 1);
  return m;
}

/// One-sided two-sample t-test of H0: mu_C <= mu_I against mu_C > mu_I.
///
/// Fewer than two samples on either side, or zero variance on both sides
/// with equal means, yields `inconclusive` (p = 1). Zero variance on both
/// sides with distinct means is decided by the sign of the difference:
/// verified with p = 0, or not_verified with p = 1.
inline TestResult one_sided_t_test(std::span<const double> correct, std::span<const double> incorrect,
                                   double alpha = 0.05, TTestKind kind = TTestKind::welch) {
  TestResult r;
  r.n_correct = correct.size();
  r.n_incorrect = incorrect.size();
  if (correct.size() < 2 || incorrect.size() < 2) return r;

  const SampleMoments c = moments(correct);
  const SampleMoments i = moments(incorrect);
  const double nc = static_cast<double>(c.n);
  const double ni = static_cast<double>(i.n);
  const double diff = c.mean - i.mean;

  double se2 = 0.0;
  double df = 0.0;
  if (kind == TTestKind::welch) {
    const double qc = c.variance / nc;
    const double qi = i.variance / ni;
    se2 = qc + qi;
    const double denom = qc * qc / (nc - 1.0) + qi * qi / (ni - 1.0);
    df = denom > 0.0 ? se2 * se2 / denom : nc + ni - 2.0;
  } else {
    df = nc + ni - 2.0;
    const double pooled = ((nc - 1.0) * c.variance + (ni - 1.0) * i.variance) / df;
    se2 = pooled * (1.0 / nc + 1.0 / ni);
  }

  if (se2 == 0.0) {
    if (diff == 0.0) return r;
    r.degrees_of_freedom = nc + ni - 2.0;
    r.t_statistic = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p_value = diff > 0 ? 0.0 : 1.0;
    r.verdict = diff > 0 ? Verdict::verified : Verdict::not_verified;
    return r;
  }

  r.t_statistic = diff / std::sqrt(se2);
  r.degrees_of_freedom = df;
  r.p_value = std::clamp(student_t_upper_tail(r.t_statistic, df), 0.0, 1.0);
  r.verdict = r.p_value <= alpha ? Verdict::verified : Verdict::not_verified;
  return r;
}

inline TestResult one_sided_t_test(const HypothesisSets& sets, double alpha = 0.05,
                                   TTestKind kind = TTestKind::welch) {
  return one_sided_t_test(sets.correct_set, sets.incorrect_set, alpha, kind);
}

/// mean(S^C) - mean(S^I).
inline double mean_difference(const HypothesisSets& sets) {
  if (sets.correct_set.empty() || sets.incorrect_set.empty()) {
    throw StatsError("mean difference needs both similarity sets to be non-empty");
  }
  return moments(sets.correct_set).mean - moments(sets.incorrect_set).mean;
}

/// Shuffles [0, n) with the seeded generator and deals indices round-robin
/// into n_groups groups, so sizes differ by at most one.
inline std::vector<std::vector<std::size_t>> split_into_groups(std::size_t n, std::size_t n_groups,
                                                               std::uint64_t seed) {
  if (n_groups < 1 || n_groups > n) {
    throw StatsError("number of groups must lie in [1, " + std::to_string(n) + "], got " + std::to_string(n_groups));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::size_t>> groups(n_groups);
  for (std::size_t i = 0; i < n; ++i) groups[i % n_groups].push_back(order[i]);
  return groups;
}

struct RhoPoint {
  std::size_t n_groups = 1;
  double rho_mean = 0.0;
  /// Population variance of rho_r over repetitions (0 when R = 1).
  double rho_variance = 0.0;
  std::size_t repetitions = 1;

  double rho_std() const { return std::sqrt(rho_variance); }
};

struct VerifyOptions {
  double alpha = 0.05;
  TTestKind t_test = TTestKind::welch;
  std::size_t threads = 1;
};

/// Seed for repetition `r` of a verification run seeded with `seed`.
inline std::uint64_t repetition_seed(std::uint64_t seed, std::size_t repetition) {
  return derive_seed(seed, {static_cast<std::uint64_t>(repetition)});
}

/// Fraction of randomly formed groups whose pooled sets pass the one-sided
/// t-test, averaged over `repetitions` independent splits. Inconclusive
/// groups count as not verified.
inline RhoPoint fraction_verified(std::span<const HypothesisSets> corpus_sets, std::size_t n_groups,
                                  std::size_t repetitions, std::uint64_t seed, const VerifyOptions& options = {}) {
  if (corpus_sets.empty()) throw StatsError("no instance sets to verify");
  if (n_groups < 1 || n_groups > corpus_sets.size()) {
    throw StatsError("number of groups (" + std::to_string(n_groups) + ") must lie in [1, " +
                     std::to_string(corpus_sets.size()) + "]");
  }
  if (repetitions < 1) throw StatsError("repetitions must be >= 1");

  std::vector<std::uint64_t> verified_counts(repetitions, 0);
  parallel_for(repetitions, options.threads, [&](std::size_t r) {
    const auto groups = split_into_groups(corpus_sets.size(), n_groups, repetition_seed(seed, r));
    std::uint64_t verified = 0;
    for (const auto& members : groups) {
      const HypothesisSets pooled = pool_sets(corpus_sets, members);
      if (one_sided_t_test(pooled, options.alpha, options.t_test).verdict == Verdict::verified) ++verified;
    }
    verified_counts[r] = verified;
  });

  // Moments from integer counts: the mean is exact when every repetition
  // agrees and the variance is then exactly zero.
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
  for (std::uint64_t c : verified_counts) {
    sum += c;
    sum_sq += c * c;
  }
  const auto reps = static_cast<std::uint64_t>(repetitions);
  const auto g = static_cast<double>(n_groups);
  RhoPoint point;
  point.n_groups = n_groups;
  point.repetitions = repetitions;
  point.rho_mean = static_cast<double>(sum) / (static_cast<double>(reps) * g);
  point.rho_variance = static_cast<double>(reps * sum_sq - sum * sum) / (static_cast<double>(reps * reps) * g * g);
  return point;
}

/// Seed used for grid point `grid_index` of a curve seeded with `seed`.
inline std::uint64_t grid_point_seed(std::uint64_t seed, std::size_t grid_index) {
  return derive_seed(seed, {0x67726964ULL, static_cast<std::uint64_t>(grid_index)});
}

inline void validate_grid(std::span<const std::size_t> grid, std::size_t n) {
  if (grid.empty()) throw StatsError("group grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1 || grid[i] > n) {
      throw StatsError("group count " + std::to_string(grid[i]) + " outside [1, " + std::to_string(n) + "]");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) throw StatsError("group grid must be strictly increasing");
  }
}

/// {1} plus `points` log-spaced counts up to n, rounded and deduplicated.
inline std::vector<std::size_t> default_grid(std::size_t n, std::size_t points = 20) {
  if (n < 1) throw StatsError("default grid needs n >= 1");
  std::vector<std::size_t> grid{1};
  const double log_n = std::log(static_cast<double>(n));
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = std::exp(log_n * static_cast<double>(i) / static_cast<double>(points));
    grid.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(x)), 1, n));
  }
  grid.push_back(n);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// rho(n_g) at each grid point; point i is seeded with grid_point_seed(seed, i).
inline std::vector<RhoPoint> rho_curve(std::span<const HypothesisSets> corpus_sets, std::span<const std::size_t> grid,
                                       std::size_t repetitions, std::uint64_t seed, const VerifyOptions& options = {}) {
  validate_grid(grid, corpus_sets.size());
  std::vector<RhoPoint> curve(grid.size());
  VerifyOptions inner = options;
  inner.threads = 1;
  parallel_for(grid.size(), options.threads, [&](std::size_t i) {
    curve[i] = fraction_verified(corpus_sets, grid[i], repetitions, grid_point_seed(seed, i), inner);
  });
  return curve;
}

/// Which grid point defines n_g*.
enum class ThetaRule {
  /// Largest evaluated n_g with rho >= rho*.
  largest_qualifying,
  /// Largest n_g of the leading run of qualifying points.
  maximal_prefix,
};

/// theta* = n_g* / n, or nullopt when no grid point reaches rho_threshold.
inline std::optional<double> theta_star(std::span<const RhoPoint> curve, std::size_t n, double rho_threshold,
                                        ThetaRule rule = ThetaRule::largest_qualifying) {
  if (curve.empty()) throw StatsError("theta* needs a non-empty curve");
  if (n == 0) throw StatsError("theta* needs n >= 1");
  std::optional<std::size_t> best;
  for (const auto& p : curve) {
    if (p.rho_mean >= rho_threshold) {
      best = std::max(best.value_or(0), p.n_groups);
    } else if (rule == ThetaRule::maximal_prefix) {
      break;
    }
  }
  if (!best) return std::nullopt;
  return static_cast<double>(*best) / static_cast<double>(n);
}

struct MetricSummary {
  std::optional<double> mean_difference;
  std::vector<RhoPoint> rho_curve;
  std::optional<double> theta_star;
  double rho_threshold = 0.8;
};

/// Delta-mu at dataset scope, the rho curve, and theta*.
inline MetricSummary summarize(std::span<const HypothesisSets> corpus_sets, std::span<const std::size_t> grid,
                               std::size_t repetitions, std::uint64_t seed, double rho_threshold,
                               const VerifyOptions& options = {}) {
  MetricSummary summary;
  summary.rho_threshold = rho_threshold;
  const HypothesisSets pooled = pool_all(corpus_sets);
  if (!pooled.correct_set.empty() && !pooled.incorrect_set.empty()) summary.mean_difference = mean_difference(pooled);
  summary.rho_curve = rho_curve(corpus_sets, grid, repetitions, seed, options);
  summary.theta_star = theta_star(summary.rho_curve, corpus_sets.size(), rho_threshold);
  return summary;
}

}  // namespace conhyp
