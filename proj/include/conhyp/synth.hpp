#pragma once

// Synthetic corpora with planted consistency effects, and brute-force
// oracles used by the acceptance suite.
//
// strong: correct generations are 20%-perturbed copies (token dropout or
//         substitution) of a per-instance answer; incorrect generations are
//         fresh uniform token strings.
// weak:   correct copies are 60%-perturbed; incorrect strings borrow 30% of
//         their tokens from the answer.
// null:   every generation is an independent uniform token string and labels
//         are drawn independently of content.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conhyp/corpus.hpp"
#include "conhyp/error.hpp"
#include "conhyp/random.hpp"

namespace conhyp {

enum class Effect { strong, weak, null };

inline std::string_view effect_name(Effect e) {
  switch (e) {
    case Effect::strong: return "strong";
    case Effect::weak: return "weak";
    case Effect::null: return "null";
  }
  return "strong";
}

inline Effect parse_effect(std::string_view s) {
  if (s == "strong") return Effect::strong;
  if (s == "weak") return Effect::weak;
  if (s == "null") return Effect::null;
  throw ConfigError("unknown effect '" + std::string(s) + "' (expected strong, weak or null)");
}

struct PlantSpec {
  std::size_t n_instances = 200;
  std::size_t m_generations = 10;
  double correct_rate = 0.6;
  Effect effect = Effect::strong;
  std::size_t vocab_size = 2000;
  std::uint64_t seed = 0;
  std::size_t answer_length = 12;
  /// Probability that a label is replaced by a fair coin flip.
  double label_noise = 0.0;
  /// 0 disables embeddings.
  std::size_t embedding_dim = 0;
};

namespace detail {

inline std::string word(std::uint64_t id) { return "w" + std::to_string(id); }

inline std::string join(const std::vector<std::uint64_t>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += word(ids[i]);
  }
  return out;
}

inline std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

inline std::vector<double> jitter_unit(Rng& rng, const std::vector<double>& centre, double spread) {
  std::vector<double> v = centre;
  const double scale = spread / std::sqrt(static_cast<double>(centre.size()));
  double norm = 0.0;
  for (auto& x : v) {
    x += scale * rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace detail

inline void validate(const PlantSpec& spec) {
  if (spec.n_instances < 1) throw ConfigError("synthetic corpus needs n_instances >= 1");
  if (spec.m_generations < 2) throw ConfigError("synthetic corpus needs m_generations >= 2");
  if (!(spec.correct_rate >= 0.0 && spec.correct_rate <= 1.0)) throw ConfigError("correct_rate must lie in [0, 1]");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) throw ConfigError("label_noise must lie in [0, 1]");
  if (spec.vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
  if (spec.answer_length < 1) throw ConfigError("answer_length must be >= 1");
}

/// Deterministic in the PlantSpec fields: instance i draws from derive_seed(seed, {i}).
inline Corpus generate_planted(const PlantSpec& spec) {
  validate(spec);
  Corpus corpus;
  corpus.task_tag = "synthetic";
  corpus.embedding_dim = spec.embedding_dim;
  corpus.instances.reserve(spec.n_instances);

  const double perturb = spec.effect == Effect::weak ? 0.6 : 0.2;
  for (std::size_t i = 0; i < spec.n_instances; ++i) {
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(i)}));
    InstanceBundle bundle;
    bundle.instance_id = "q" + std::to_string(i);
    bundle.query = "synthetic query " + std::to_string(i);

    std::vector<std::uint64_t> answer(spec.answer_length);
    for (auto& t : answer) t = rng.below(spec.vocab_size);
    bundle.references.push_back(detail::join(answer));
    std::vector<double> centre;
    if (spec.embedding_dim > 0) centre = detail::random_unit(rng, spec.embedding_dim);

    for (std::size_t j = 0; j < spec.m_generations; ++j) {
      const bool content_correct = rng.bernoulli(spec.correct_rate);
      std::vector<std::uint64_t> tokens;
      if (spec.effect == Effect::null || !content_correct) {
        for (std::size_t t = 0; t < spec.answer_length; ++t) {
          const bool borrow = spec.effect == Effect::weak && rng.bernoulli(0.3);
          tokens.push_back(borrow ? answer[rng.below(answer.size())] : rng.below(spec.vocab_size));
        }
      } else {
        for (std::uint64_t t : answer) {
          const double u = rng.uniform();
          if (u < perturb / 2) continue;
          tokens.push_back(u < perturb ? rng.below(spec.vocab_size) : t);
        }
        if (tokens.empty()) tokens.push_back(answer.front());
      }

      GenerationRecord rec;
      rec.text = detail::join(tokens);
      bool label = content_correct;
      if (rng.bernoulli(spec.label_noise)) label = rng.bernoulli(0.5);
      rec.label = label;
      const bool looks_correct = spec.effect != Effect::null && content_correct;
      rec.mean_log_prob = spec.effect == Effect::null ? -rng.uniform(0.05, 1.5)
                          : looks_correct             ? -rng.uniform(0.05, 0.6)
                                                      : -rng.uniform(0.3, 1.5);
      rec.temperature = 0.25 * static_cast<double>(1 + j % 6);
      if (spec.embedding_dim > 0) {
        rec.embedding = looks_correct ? detail::jitter_unit(rng, centre, 0.5) : detail::random_unit(rng, spec.embedding_dim);
      }
      bundle.generations.push_back(std::move(rec));
    }
    corpus.instances.push_back(std::move(bundle));
  }
  return corpus;
}

namespace oracle {

/// Explicit double loop over (correct, incorrect) pairs: wins + ties/2 over
/// the pair count. nullopt when a class is missing.
inline std::optional<double> brute_force_auroc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw EvalError("scores and labels differ in length");
  double wins = 0.0;
  std::uint64_t pairs = 0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (!labels[p]) continue;
    for (std::size_t q = 0; q < scores.size(); ++q) {
      if (labels[q]) continue;
      ++pairs;
      if (scores[p] > scores[q]) {
        wins += 1.0;
      } else if (scores[p] == scores[q]) {
        wins += 0.5;
      }
    }
  }
  if (pairs == 0) return std::nullopt;
  return wins / static_cast<double>(pairs);
}

}  // namespace oracle

}  // namespace conhyp
