#pragma once

// Batch pipeline behind the `conhyp` CLI: ingest -> label -> similarity ->
// hypothesis sets -> verification / metrics -> scoring -> evaluation ->
// CSV + manifest emission. Every command is deterministic given its config.
//
// Randomness derivation (root seed S):
//   rho curve grid point i, repetition r: repetition_seed(grid_point_seed(S, i), r)
//   instance-level rho outside the grid:  grid_point_seed(S, grid.size())
//   eval method index q, run r:           eval_run_seed(derive_seed(S, {q}), r)
//   synth instance i:                     derive_seed(S, {i})

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "conhyp/confidence.hpp"
#include "conhyp/corpus.hpp"
#include "conhyp/error.hpp"
#include "conhyp/eval.hpp"
#include "conhyp/format.hpp"
#include "conhyp/hypothesis.hpp"
#include "conhyp/parallel.hpp"
#include "conhyp/similarity.hpp"
#include "conhyp/stats.hpp"
#include "conhyp/synth.hpp"

namespace conhyp {

inline constexpr std::string_view kVersion = "1.0.0";

struct RunConfig {
  std::string input_path;
  std::string task_tag = "other";
  Metric similarity = Metric::jaccard;
  Aggregator::Kind aggregator = Aggregator::Kind::arithmetic;
  double epsilon = 1e-12;
  std::vector<Hypothesis> hypotheses{Hypothesis::sim_any, Hypothesis::sim_correct, Hypothesis::sim_separate};
  std::vector<Variant> variants{Variant::pairwise, Variant::aggregated};
  Labeler labeler;
  double alpha = 0.05;
  std::size_t repetitions = 10;
  /// nullopt selects default_grid(n).
  std::optional<std::vector<std::size_t>> groups;
  double rho_threshold = 0.8;
  double subset_fraction = 0.5;
  std::size_t eval_runs = 5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::size_t threads = 0;
  PairOrientation pair_orientation = PairOrientation::ordered;
  bool include_self = false;
  EvalUnit eval_unit = EvalUnit::generation;
  TTestKind t_test = TTestKind::welch;
  /// Directory for per-instance similarity matrix CSVs; empty disables.
  std::string matrix_cache;

  PlantSpec synth;
  /// Corpus path written by `synth`; empty means <out_dir>/corpus.jsonl.
  std::string synth_output;
};

/// Parses "1", "2", "3" or "all".
inline std::vector<Hypothesis> parse_hypotheses(std::string_view s) {
  if (s == "all") return {Hypothesis::sim_any, Hypothesis::sim_correct, Hypothesis::sim_separate};
  if (s == "1" || s == "sim_any") return {Hypothesis::sim_any};
  if (s == "2" || s == "sim_correct") return {Hypothesis::sim_correct};
  if (s == "3" || s == "sim_separate") return {Hypothesis::sim_separate};
  throw ConfigError("unknown hypothesis '" + std::string(s) + "' (expected 1, 2, 3 or all)");
}

inline std::vector<Variant> parse_variants(std::string_view s) {
  if (s == "both") return {Variant::pairwise, Variant::aggregated};
  if (s == "pairwise") return {Variant::pairwise};
  if (s == "aggregated") return {Variant::aggregated};
  throw ConfigError("unknown variant '" + std::string(s) + "' (expected pairwise, aggregated or both)");
}

/// Parses "auto" or a comma-separated list of group counts.
inline std::optional<std::vector<std::size_t>> parse_groups(std::string_view s) {
  if (s == "auto") return std::nullopt;
  std::vector<std::size_t> out;
  std::stringstream ss{std::string(s)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || item.front() == '-') {
      throw ConfigError("invalid group count '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("empty group list");
  return out;
}

/// Rejects configurations that cannot run, before any corpus work.
inline void validate_config(const RunConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (!(c.rho_threshold > 0.0 && c.rho_threshold < 1.0)) throw ConfigError("rho threshold must lie in (0, 1)");
  if (!(c.subset_fraction > 0.0 && c.subset_fraction <= 1.0)) throw ConfigError("subset fraction must lie in (0, 1]");
  if (c.eval_runs < 1) throw ConfigError("eval runs must be >= 1");
  if (c.hypotheses.empty() || c.variants.empty()) throw ConfigError("no hypothesis/variant selected");
  Aggregator(c.aggregator, c.epsilon);
  if (c.groups) {
    std::vector<std::size_t> sorted = *c.groups;
    if (!std::is_sorted(sorted.begin(), sorted.end()) ||
        std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 1) {
      throw ConfigError("group counts must be >= 1 and strictly increasing");
    }
  }
}

/// One (hypothesis, variant) combination and its per-instance sets.
struct SetFamily {
  Hypothesis hypothesis;
  Variant variant;
  std::vector<HypothesisSets> instance_sets;
};

struct Analysis {
  Corpus corpus;
  Labeler labeler;
  bool labeled = false;
  std::vector<SetFamily> families;
  /// scores[method] concatenated over instances in corpus order.
  std::vector<std::pair<ScoreMethod, std::vector<ConfidenceScore>>> scores;
};

namespace detail {

inline std::string cache_path(const RunConfig& c, std::size_t index, const InstanceBundle& b) {
  std::string safe;
  for (char ch : b.instance_id) {
    safe += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
  }
  return (std::filesystem::path(c.matrix_cache) /
          (std::to_string(index) + "-" + safe + "." + std::string(metric_name(c.similarity)) + ".csv"))
      .string();
}

inline SimilarityMatrix matrix_for(const RunConfig& c, std::size_t index, const InstanceBundle& b) {
  if (c.matrix_cache.empty()) return pairwise_matrix(b, c.similarity);
  const std::string path = cache_path(c, index, b);
  if (std::ifstream in(path); in) {
    SimilarityMatrix cached = read_matrix_csv(in);
    if (cached.size() == b.size() && cached.metric() == c.similarity) return cached;
  }
  SimilarityMatrix matrix = pairwise_matrix(b, c.similarity);
  std::ofstream out(path);
  if (!out) throw SimilarityError("cannot write matrix cache file '" + path + "'");
  write_matrix_csv(out, matrix);
  return matrix;
}

inline std::vector<ScoreMethod> score_methods(const Corpus& corpus) {
  std::vector<ScoreMethod> methods{ScoreMethod::arith_agg, ScoreMethod::geom_agg, ScoreMethod::harm_agg,
                                   ScoreMethod::always_one};
  const bool has_log_probs = std::all_of(corpus.instances.begin(), corpus.instances.end(), [](const auto& b) {
    return std::all_of(b.generations.begin(), b.generations.end(),
                       [](const auto& g) { return g.mean_log_prob.has_value(); });
  });
  if (has_log_probs) methods.push_back(ScoreMethod::avg_prob);
  return methods;
}

}  // namespace detail

/// Loads and labels the corpus and validates the similarity choice. Throws
/// before any similarity is computed when the configuration cannot run.
/// With `require_labels` false, a corpus whose labels cannot be resolved is
/// returned unlabeled.
inline Analysis prepare(const RunConfig& config, bool require_labels) {
  validate_config(config);
  Analysis a;
  a.corpus = load_corpus(config.input_path, LoadOptions{config.task_tag, 2});
  if (config.similarity == Metric::cosine) {
    for (const auto& b : a.corpus.instances) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!b.generations[j].embedding) {
          throw ConfigError("cosine similarity requested but instance '" + b.instance_id + "' generation " +
                            std::to_string(j) + " has no embedding");
        }
      }
    }
  }
  if (config.groups) {
    for (std::size_t g : *config.groups) {
      if (g > a.corpus.size()) {
        throw ConfigError("group count " + std::to_string(g) + " exceeds the number of instances (" +
                          std::to_string(a.corpus.size()) + ")");
      }
    }
  }
  if (!config.matrix_cache.empty()) std::filesystem::create_directories(config.matrix_cache);
  try {
    a.labeler = resolve_labeler(config.labeler, a.corpus);
    a.corpus = label_corpus(std::move(a.corpus), a.labeler);
    a.labeled = true;
  } catch (const Error&) {
    if (require_labels) throw;
  }
  return a;
}

/// Computes per-instance matrices and, from each, the requested hypothesis
/// sets and/or confidence scores. Matrices are dropped after use.
inline void analyze(const RunConfig& config, Analysis& a, bool want_sets, bool want_scores) {
  const std::size_t n = a.corpus.size();
  const Aggregator agg(config.aggregator, config.epsilon);
  if (want_sets) {
    a.families.clear();
    for (Hypothesis h : config.hypotheses) {
      for (Variant v : config.variants) a.families.push_back({h, v, std::vector<HypothesisSets>(n)});
    }
  }
  const std::vector<ScoreMethod> methods = want_scores ? detail::score_methods(a.corpus) : std::vector<ScoreMethod>{};
  std::vector<std::vector<std::vector<ConfidenceScore>>> per_instance(methods.size(),
                                                                       std::vector<std::vector<ConfidenceScore>>(n));

  parallel_for(n, config.threads, [&](std::size_t i) {
    const InstanceBundle& b = a.corpus.instances[i];
    const SimilarityMatrix matrix = detail::matrix_for(config, i, b);
    for (auto& fam : a.families) {
      fam.instance_sets[i] = fam.variant == Variant::pairwise
                                 ? build_pairwise_sets(b, matrix, fam.hypothesis, config.pair_orientation)
                                 : build_aggregated_sets(b, matrix, fam.hypothesis, agg);
    }
    for (std::size_t q = 0; q < methods.size(); ++q) {
      switch (methods[q]) {
        case ScoreMethod::arith_agg:
          per_instance[q][i] = score_by_aggregation(b, matrix, Aggregator(Aggregator::Kind::arithmetic, config.epsilon),
                                                    config.include_self);
          break;
        case ScoreMethod::geom_agg:
          per_instance[q][i] = score_by_aggregation(b, matrix, Aggregator(Aggregator::Kind::geometric, config.epsilon),
                                                    config.include_self);
          break;
        case ScoreMethod::harm_agg:
          per_instance[q][i] = score_by_aggregation(b, matrix, Aggregator(Aggregator::Kind::harmonic, config.epsilon),
                                                    config.include_self);
          break;
        case ScoreMethod::always_one: per_instance[q][i] = score_always_one(b); break;
        case ScoreMethod::avg_prob: per_instance[q][i] = score_avg_prob(b); break;
      }
    }
  });

  a.scores.clear();
  for (std::size_t q = 0; q < methods.size(); ++q) {
    std::vector<ConfidenceScore> flat;
    for (auto& v : per_instance[q]) flat.insert(flat.end(), v.begin(), v.end());
    a.scores.emplace_back(methods[q], std::move(flat));
  }
}

inline std::vector<std::size_t> resolve_grid(const RunConfig& c, std::size_t n) {
  return c.groups ? *c.groups : default_grid(n);
}

/// FNV-1a digest of every group assignment a rho curve with this seed and
/// grid uses; changes whenever any split changes.
inline std::uint64_t group_assignment_digest(std::size_t n, std::span<const std::size_t> grid, std::size_t repetitions,
                                             std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (std::size_t r = 0; r < repetitions; ++r) {
      for (const auto& group : split_into_groups(n, grid[gi], repetition_seed(grid_point_seed(seed, gi), r))) {
        for (std::size_t id : group) mix(id);
        mix(~std::uint64_t{0});
      }
    }
  }
  return h;
}

namespace detail {

inline std::string aggregator_column(const RunConfig& c, Variant v) {
  return v == Variant::pairwise ? "none" : std::string(aggregator_name(c.aggregator));
}

inline std::ofstream open_output(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  const auto path = std::filesystem::path(c.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  return out;
}

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["input"] = c.input_path;
  j["task_tag"] = c.task_tag;
  j["similarity"] = metric_name(c.similarity);
  j["aggregator"] = aggregator_name(c.aggregator);
  j["epsilon"] = c.epsilon;
  std::vector<std::string> hs;
  for (auto h : c.hypotheses) hs.emplace_back(hypothesis_name(h));
  j["hypotheses"] = hs;
  std::vector<std::string> vs;
  for (auto v : c.variants) vs.emplace_back(variant_name(v));
  j["variants"] = vs;
  j["labeler"] = c.labeler.name();
  j["alpha"] = c.alpha;
  j["repetitions"] = c.repetitions;
  if (c.groups) {
    j["groups"] = *c.groups;
  } else {
    j["groups"] = "auto";
  }
  j["rho_threshold"] = c.rho_threshold;
  j["subset_fraction"] = c.subset_fraction;
  j["eval_runs"] = c.eval_runs;
  j["seed"] = c.seed;
  j["pair_orientation"] = orientation_name(c.pair_orientation);
  j["include_self"] = c.include_self;
  j["eval_unit"] = unit_name(c.eval_unit);
  j["t_test"] = ttest_name(c.t_test);
  j["matrix_cache"] = c.matrix_cache;
  j["threads"] = c.threads;
  return j;
}

inline void write_manifest(const RunConfig& c, std::string_view command, const nlohmann::ordered_json& extra) {
  nlohmann::ordered_json m;
  m["tool"] = "conhyp";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = config_json(c);
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  auto out = open_output(c, std::string(command) + "_manifest.json");
  out << m.dump(2) << '\n';
}

inline nlohmann::ordered_json corpus_json(const Analysis& a) {
  nlohmann::ordered_json j;
  std::size_t gens = 0;
  std::size_t correct = 0;
  for (const auto& b : a.corpus.instances) {
    gens += b.size();
    correct += static_cast<std::size_t>(std::count(b.labels.begin(), b.labels.end(), true));
  }
  j["n_instances"] = a.corpus.size();
  j["n_generations"] = gens;
  j["labeler_resolved"] = a.labeled ? a.labeler.name() : "none";
  if (a.labeled) j["n_correct"] = correct;
  return j;
}

inline void write_curve_header(std::ostream& out) {
  out << "hypothesis,variant,similarity,aggregator,n_groups,relative_n_groups,rho_mean,rho_variance,repetitions,"
         "alpha,rho_std,seed,t_test,pair_orientation\n";
}

inline void write_curve_rows(std::ostream& out, const RunConfig& c, const SetFamily& fam,
                             std::span<const RhoPoint> curve, std::size_t n) {
  for (const auto& p : curve) {
    out << hypothesis_name(fam.hypothesis) << ',' << variant_name(fam.variant) << ',' << metric_name(c.similarity)
        << ',' << aggregator_column(c, fam.variant) << ',' << p.n_groups << ','
        << format_real(static_cast<double>(p.n_groups) / static_cast<double>(n)) << ',' << format_real(p.rho_mean)
        << ',' << format_real(p.rho_variance) << ',' << p.repetitions << ',' << format_real(c.alpha) << ','
        << format_real(p.rho_std()) << ',' << c.seed << ',' << ttest_name(c.t_test) << ','
        << orientation_name(c.pair_orientation) << '\n';
  }
}

}  // namespace detail

/// Writes verify.csv: the rho curve for every requested (hypothesis, variant).
inline void cmd_verify(const RunConfig& config) {
  Analysis a = prepare(config, true);
  const std::size_t n = a.corpus.size();
  const auto grid = resolve_grid(config, n);
  analyze(config, a, true, false);
  const VerifyOptions options{config.alpha, config.t_test, config.threads};

  auto out = detail::open_output(config, "verify.csv");
  detail::write_curve_header(out);
  for (const auto& fam : a.families) {
    const auto curve = rho_curve(fam.instance_sets, grid, config.repetitions, config.seed, options);
    detail::write_curve_rows(out, config, fam, curve, n);
  }
  auto extra = detail::corpus_json(a);
  extra["grid"] = grid;
  extra["group_assignment_digest"] = std::to_string(group_assignment_digest(n, grid, config.repetitions, config.seed));
  extra["outputs"] = {"verify.csv"};
  detail::write_manifest(config, "verify", extra);
}

/// Writes metrics.csv (delta-mu, theta*, instance-level rho per combination)
/// and metrics_curve.csv (the underlying rho curves).
inline void cmd_metrics(const RunConfig& config) {
  Analysis a = prepare(config, true);
  const std::size_t n = a.corpus.size();
  const auto grid = resolve_grid(config, n);
  analyze(config, a, true, false);
  const VerifyOptions options{config.alpha, config.t_test, config.threads};

  auto out = detail::open_output(config, "metrics.csv");
  auto curve_out = detail::open_output(config, "metrics_curve.csv");
  out << "hypothesis,variant,similarity,aggregator,delta_mu,theta_star,rho_threshold,rho_instance,n_instances,"
         "repetitions,alpha,seed\n";
  detail::write_curve_header(curve_out);
  for (const auto& fam : a.families) {
    const MetricSummary summary =
        summarize(fam.instance_sets, grid, config.repetitions, config.seed, config.rho_threshold, options);
    double rho_instance = 0.0;
    if (grid.back() == n) {
      rho_instance = summary.rho_curve.back().rho_mean;
    } else {
      rho_instance =
          fraction_verified(fam.instance_sets, n, config.repetitions, grid_point_seed(config.seed, grid.size()), options)
              .rho_mean;
    }
    out << hypothesis_name(fam.hypothesis) << ',' << variant_name(fam.variant) << ',' << metric_name(config.similarity)
        << ',' << detail::aggregator_column(config, fam.variant) << ',' << format_real(summary.mean_difference) << ','
        << format_real(summary.theta_star) << ',' << format_real(config.rho_threshold) << ','
        << format_real(rho_instance) << ',' << n << ',' << config.repetitions << ',' << format_real(config.alpha)
        << ',' << config.seed << '\n';
    detail::write_curve_rows(curve_out, config, fam, summary.rho_curve, n);
  }
  auto extra = detail::corpus_json(a);
  extra["grid"] = grid;
  extra["theta_rule"] = "largest_qualifying";
  extra["group_assignment_digest"] = std::to_string(group_assignment_digest(n, grid, config.repetitions, config.seed));
  extra["outputs"] = {"metrics.csv", "metrics_curve.csv"};
  detail::write_manifest(config, "metrics", extra);
}

namespace detail {

inline std::string method_aggregator(ScoreMethod m) {
  switch (m) {
    case ScoreMethod::arith_agg: return "arith";
    case ScoreMethod::geom_agg: return "geom";
    case ScoreMethod::harm_agg: return "harm";
    default: return "none";
  }
}

inline bool is_aggregation(ScoreMethod m) { return method_aggregator(m) != "none"; }

}  // namespace detail

/// Writes scores.csv: one row per (method, generation).
inline void cmd_score(const RunConfig& config) {
  Analysis a = prepare(config, false);
  analyze(config, a, false, true);
  auto out = detail::open_output(config, "scores.csv");
  out << "instance_id,generation_index,method,score,label,similarity,aggregator,hypothesis,variant,include_self,seed,"
         "alpha\n";
  for (const auto& [method, scores] : a.scores) {
    const bool agg = detail::is_aggregation(method);
    for (const auto& s : scores) {
      out << csv_field(s.instance_id) << ',' << s.generation_index << ',' << method_name(method) << ','
          << format_real(s.score) << ',' << (s.label ? (*s.label ? "true" : "false") : "") << ','
          << (agg ? metric_name(config.similarity) : "none") << ',' << detail::method_aggregator(method) << ','
          << (agg ? "sim_any" : "none") << ',' << (agg ? "aggregated" : "none") << ','
          << (config.include_self ? "true" : "false") << ',' << config.seed << ',' << format_real(config.alpha)
          << '\n';
    }
  }
  auto extra = detail::corpus_json(a);
  extra["outputs"] = {"scores.csv"};
  detail::write_manifest(config, "score", extra);
}

/// Evaluates every scoring method; returns the reports in method order.
inline std::vector<EvalReport> evaluate_methods(const RunConfig& config, const Analysis& a) {
  std::vector<EvalReport> reports;
  for (std::size_t q = 0; q < a.scores.size(); ++q) {
    const auto seed = derive_seed(config.seed, {static_cast<std::uint64_t>(q)});
    EvalReport r = subset_eval(a.scores[q].second, config.subset_fraction, config.eval_runs, seed, config.eval_unit);
    r.seed = config.seed;
    reports.push_back(std::move(r));
  }
  return reports;
}

/// Writes eval.csv: AUROC / AUARC mean and std per method.
inline void cmd_eval(const RunConfig& config) {
  Analysis a = prepare(config, true);
  analyze(config, a, false, true);
  const auto reports = evaluate_methods(config, a);
  auto out = detail::open_output(config, "eval.csv");
  out << "method,similarity,aggregator,auroc_mean,auroc_std,auarc_mean,auarc_std,runs,subset_fraction,unit,seed,"
         "auroc_runs,hypothesis,variant,alpha\n";
  for (std::size_t q = 0; q < reports.size(); ++q) {
    const auto& r = reports[q];
    const ScoreMethod m = a.scores[q].first;
    const bool agg = detail::is_aggregation(m);
    out << r.method << ',' << (agg ? metric_name(config.similarity) : "none") << ',' << detail::method_aggregator(m)
        << ',' << format_real(r.auroc_mean, "na") << ',' << format_real(r.auroc_std) << ','
        << format_real(r.auarc_mean) << ',' << format_real(r.auarc_std) << ',' << r.runs << ','
        << format_real(r.subset_fraction) << ',' << unit_name(r.unit) << ',' << r.seed << ',' << r.auroc_runs << ','
        << (agg ? "sim_any" : "none") << ',' << (agg ? "aggregated" : "none") << ',' << format_real(config.alpha)
        << '\n';
  }
  auto extra = detail::corpus_json(a);
  extra["auroc_ties"] = "midrank (ties count 1/2)";
  extra["auarc_conventions"] = {{"order", "descending score, ties in input order"},
                                {"accuracy_at_full_rejection", 1},
                                {"integration", "trapezoid over rejected fraction r/n, r = 0..n"},
                                {"subset", "floor(fraction * N) items without replacement, input order kept"},
                                {"std", "population standard deviation over runs"}};
  extra["outputs"] = {"eval.csv"};
  detail::write_manifest(config, "eval", extra);
}

/// Writes simdist.csv: dataset-level S^C / S^I values for box plots.
inline void cmd_simdist(const RunConfig& config) {
  Analysis a = prepare(config, true);
  analyze(config, a, true, false);
  auto out = detail::open_output(config, "simdist.csv");
  out << "hypothesis,variant,side,value,similarity,aggregator,seed,alpha\n";
  for (const auto& fam : a.families) {
    const HypothesisSets pooled = pool_all(fam.instance_sets);
    const auto emit = [&](char side, const std::vector<double>& values) {
      for (double v : values) {
        out << hypothesis_name(fam.hypothesis) << ',' << variant_name(fam.variant) << ',' << side << ','
            << format_real(v) << ',' << metric_name(config.similarity) << ','
            << detail::aggregator_column(config, fam.variant) << ',' << config.seed << ','
            << format_real(config.alpha) << '\n';
      }
    };
    emit('C', pooled.correct_set);
    emit('I', pooled.incorrect_set);
  }
  auto extra = detail::corpus_json(a);
  extra["outputs"] = {"simdist.csv"};
  detail::write_manifest(config, "simdist", extra);
}

/// Writes a planted synthetic corpus in the JSONL input format.
inline std::string cmd_synth(const RunConfig& config) {
  const Corpus corpus = generate_planted(config.synth);
  std::string path = config.synth_output;
  if (path.empty()) path = (std::filesystem::path(config.out_dir) / "corpus.jsonl").string();
  if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write corpus file '" + path + "'");
  write_corpus(out, corpus);

  nlohmann::ordered_json spec;
  spec["n_instances"] = config.synth.n_instances;
  spec["m_generations"] = config.synth.m_generations;
  spec["correct_rate"] = config.synth.correct_rate;
  spec["effect"] = effect_name(config.synth.effect);
  spec["vocab_size"] = config.synth.vocab_size;
  spec["answer_length"] = config.synth.answer_length;
  spec["label_noise"] = config.synth.label_noise;
  spec["embedding_dim"] = config.synth.embedding_dim;
  spec["seed"] = config.synth.seed;
  nlohmann::ordered_json extra;
  extra["plant_spec"] = spec;
  extra["outputs"] = {path};
  detail::write_manifest(config, "synth", extra);
  return path;
}

}  // namespace conhyp
