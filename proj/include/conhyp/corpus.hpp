#pragma once

// Corpus data model, JSONL ingestion/serialization, and correctness labeling.
//
// One JSON object per line:
//   instance_id (string, required)   query (string, required)
//   generation (string, required)    reference (string | string array)
//   embedding (number array)         mean_log_prob (number)
//   label (bool)                     temperature (number >= 0)
//   generation_index (integer >= 0, only used to detect duplicates)
// Records sharing an instance_id form one bundle, in file order.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "conhyp/error.hpp"
#include "conhyp/overlap.hpp"

namespace conhyp {

struct GenerationRecord {
  std::string text;
  std::optional<std::vector<double>> embedding;
  std::optional<double> mean_log_prob;
  std::optional<bool> label;
  std::optional<double> temperature;

  bool operator==(const GenerationRecord&) const = default;
};

struct InstanceBundle {
  std::string instance_id;
  std::string query;
  std::vector<std::string> references;
  std::vector<GenerationRecord> generations;
  /// Resolved correctness, one entry per generation; empty until labeled.
  std::vector<bool> labels;

  std::size_t size() const { return generations.size(); }
  bool labeled() const { return !generations.empty() && labels.size() == generations.size(); }

  bool operator==(const InstanceBundle&) const = default;
};

struct Corpus {
  std::vector<InstanceBundle> instances;
  std::string task_tag = "other";
  /// Common embedding dimension, 0 when no record carries an embedding.
  std::size_t embedding_dim = 0;

  std::size_t size() const { return instances.size(); }
  bool operator==(const Corpus&) const = default;
};

struct LoadOptions {
  std::string task_tag = "other";
  std::size_t min_generations = 2;
};

namespace detail {

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

inline const nlohmann::json* optional_field(const nlohmann::json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string required_string(const nlohmann::json& obj, const char* name, std::size_t line) {
  const auto* field = optional_field(obj, name);
  if (field == nullptr) throw CorpusError(line_prefix(line) + "missing required field '" + name + "'");
  if (!field->is_string()) throw CorpusError(line_prefix(line) + "field '" + name + "' must be a string");
  return field->get<std::string>();
}

inline double finite_number(const nlohmann::json& v, const char* name, std::size_t line) {
  if (!v.is_number()) throw CorpusError(line_prefix(line) + "field '" + name + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw CorpusError(line_prefix(line) + "field '" + name + "' must be finite");
  return x;
}

}  // namespace detail

/// Parses a JSONL corpus from a stream. `source` names the stream in errors.
inline Corpus read_corpus(std::istream& in, const LoadOptions& options = {},
                          const std::string& source = "<stream>") {
  using nlohmann::json;
  Corpus corpus;
  corpus.task_tag = options.task_tag;
  std::map<std::string, std::size_t, std::less<>> index_of;
  std::vector<std::set<long long>> seen_indices;
  std::optional<std::size_t> dim;

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (detail::blank(text)) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw CorpusError(source + ": " + detail::line_prefix(line) + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw CorpusError(source + ": " + detail::line_prefix(line) + "record must be a JSON object");

    try {
      const std::string id = detail::required_string(obj, "instance_id", line);
      const std::string query = detail::required_string(obj, "query", line);
      GenerationRecord rec;
      rec.text = detail::required_string(obj, "generation", line);
      if (detail::blank(rec.text)) {
        throw CorpusError(detail::line_prefix(line) + "empty generation text for instance '" + id + "'");
      }

      std::vector<std::string> refs;
      if (const auto* r = detail::optional_field(obj, "reference")) {
        if (r->is_string()) {
          refs.push_back(r->get<std::string>());
        } else if (r->is_array()) {
          for (const auto& item : *r) {
            if (!item.is_string()) throw CorpusError(detail::line_prefix(line) + "reference entries must be strings");
            refs.push_back(item.get<std::string>());
          }
        } else {
          throw CorpusError(detail::line_prefix(line) + "field 'reference' must be a string or array");
        }
      }
      if (const auto* e = detail::optional_field(obj, "embedding")) {
        if (!e->is_array()) throw CorpusError(detail::line_prefix(line) + "field 'embedding' must be an array");
        std::vector<double> vec;
        vec.reserve(e->size());
        for (const auto& x : *e) vec.push_back(detail::finite_number(x, "embedding", line));
        if (vec.empty()) throw CorpusError(detail::line_prefix(line) + "embedding must be non-empty");
        if (dim && *dim != vec.size()) {
          throw CorpusError(detail::line_prefix(line) + "mixed embedding dimensions (" + std::to_string(*dim) +
                            " and " + std::to_string(vec.size()) + ")");
        }
        dim = vec.size();
        rec.embedding = std::move(vec);
      }
      if (const auto* p = detail::optional_field(obj, "mean_log_prob")) {
        rec.mean_log_prob = detail::finite_number(*p, "mean_log_prob", line);
        if (*rec.mean_log_prob > 0.0) {
          throw CorpusError(detail::line_prefix(line) + "mean_log_prob must be <= 0");
        }
      }
      if (const auto* l = detail::optional_field(obj, "label")) {
        if (!l->is_boolean()) throw CorpusError(detail::line_prefix(line) + "field 'label' must be a boolean");
        rec.label = l->get<bool>();
      }
      if (const auto* t = detail::optional_field(obj, "temperature")) {
        rec.temperature = detail::finite_number(*t, "temperature", line);
        if (*rec.temperature < 0.0) throw CorpusError(detail::line_prefix(line) + "temperature must be >= 0");
      }

      auto [it, inserted] = index_of.try_emplace(id, corpus.instances.size());
      if (inserted) {
        InstanceBundle bundle;
        bundle.instance_id = id;
        bundle.query = query;
        corpus.instances.push_back(std::move(bundle));
        seen_indices.emplace_back();
      }
      InstanceBundle& bundle = corpus.instances[it->second];
      if (bundle.query != query) {
        throw CorpusError(detail::line_prefix(line) + "conflicting query text for instance '" + id + "'");
      }
      if (const auto* g = detail::optional_field(obj, "generation_index")) {
        if (!g->is_number_integer() || g->get<long long>() < 0) {
          throw CorpusError(detail::line_prefix(line) + "generation_index must be a non-negative integer");
        }
        if (!seen_indices[it->second].insert(g->get<long long>()).second) {
          throw CorpusError(detail::line_prefix(line) + "duplicate generation " + std::to_string(g->get<long long>()) +
                            " for instance '" + id + "'");
        }
      }
      for (auto& ref : refs) {
        if (std::find(bundle.references.begin(), bundle.references.end(), ref) == bundle.references.end()) {
          bundle.references.push_back(std::move(ref));
        }
      }
      bundle.generations.push_back(std::move(rec));
    } catch (const CorpusError& e) {
      throw CorpusError(source + ": " + e.what());
    }
  }

  if (corpus.instances.empty()) throw CorpusError(source + ": corpus contains no instances");
  for (const auto& b : corpus.instances) {
    if (b.size() < std::max<std::size_t>(options.min_generations, 2)) {
      throw CorpusError(source + ": instance '" + b.instance_id + "' has " + std::to_string(b.size()) +
                        " generation(s); instance requires >= 2 generations");
    }
  }
  corpus.embedding_dim = dim.value_or(0);
  return corpus;
}

inline Corpus load_corpus(const std::string& path, const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read corpus file '" + path + "'");
  return read_corpus(in, options, path);
}

/// Writes one record per generation. Resolved `labels` are not written;
/// per-record labels are. Reloading the output yields an equal Corpus.
inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& b : corpus.instances) {
    for (const auto& g : b.generations) {
      nlohmann::ordered_json rec;
      rec["instance_id"] = b.instance_id;
      rec["query"] = b.query;
      rec["generation"] = g.text;
      if (!b.references.empty()) rec["reference"] = b.references;
      if (g.embedding) rec["embedding"] = *g.embedding;
      if (g.mean_log_prob) rec["mean_log_prob"] = *g.mean_log_prob;
      if (g.label) rec["label"] = *g.label;
      if (g.temperature) rec["temperature"] = *g.temperature;
      out << rec.dump() << '\n';
    }
  }
}

/// labels[j] = max over references of Rouge-L F1(generation j, reference) >= threshold.
inline InstanceBundle label_by_rouge_l(InstanceBundle bundle, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw CorpusError("Rouge-L threshold must lie in [0, 1]");
  }
  if (bundle.references.empty()) {
    throw CorpusError("instance '" + bundle.instance_id + "' has no reference for Rouge-L labeling");
  }
  std::vector<TokenSequence> refs;
  refs.reserve(bundle.references.size());
  for (const auto& r : bundle.references) refs.push_back(tokenize(r));
  bundle.labels.assign(bundle.size(), false);
  for (std::size_t j = 0; j < bundle.size(); ++j) {
    const TokenSequence gen = tokenize(bundle.generations[j].text);
    double best = 0.0;
    for (const auto& ref : refs) best = std::max(best, rouge_l_f(gen, ref));
    bundle.labels[j] = best >= threshold;
  }
  return bundle;
}

/// Adopts labels supplied on the records themselves.
inline InstanceBundle label_external(InstanceBundle bundle) {
  bundle.labels.assign(bundle.size(), false);
  for (std::size_t j = 0; j < bundle.size(); ++j) {
    const auto& label = bundle.generations[j].label;
    if (!label) {
      throw CorpusError("instance '" + bundle.instance_id + "' generation " + std::to_string(j) +
                        " has no label");
    }
    bundle.labels[j] = *label;
  }
  return bundle;
}

/// How correctness labels are resolved for a whole corpus.
struct Labeler {
  enum class Kind { automatic, rouge_l, external };
  Kind kind = Kind::automatic;
  double threshold = 0.5;

  /// "auto" | "external" | "rougel:<t>"
  static Labeler parse(std::string_view spec) {
    if (spec == "auto") return {Kind::automatic, 0.5};
    if (spec == "external") return {Kind::external, 0.0};
    constexpr std::string_view prefix = "rougel:";
    if (spec.substr(0, prefix.size()) == prefix) {
      const std::string value(spec.substr(prefix.size()));
      std::size_t used = 0;
      double t = 0.0;
      try {
        t = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size() || !(t >= 0.0 && t <= 1.0)) {
        throw ConfigError("labeler threshold must be a number in [0, 1]: '" + std::string(spec) + "'");
      }
      return {Kind::rouge_l, t};
    }
    throw ConfigError("unknown labeler '" + std::string(spec) + "' (expected auto, external or rougel:<t>)");
  }

  std::string name() const {
    switch (kind) {
      case Kind::automatic: return "auto";
      case Kind::external: return "external";
      case Kind::rouge_l: {
        std::ostringstream os;
        os << "rougel:" << threshold;
        return os.str();
      }
    }
    return "auto";
  }
};

/// Resolves the labeler actually used for a corpus. `auto` adopts record
/// labels when every record has one, otherwise uses the task's Rouge-L
/// threshold (qa 0.5, summarization 0.2).
inline Labeler resolve_labeler(const Labeler& requested, const Corpus& corpus) {
  if (requested.kind != Labeler::Kind::automatic) return requested;
  const bool all_labeled = std::all_of(corpus.instances.begin(), corpus.instances.end(), [](const auto& b) {
    return std::all_of(b.generations.begin(), b.generations.end(), [](const auto& g) { return g.label.has_value(); });
  });
  if (all_labeled) return {Labeler::Kind::external, 0.0};
  if (corpus.task_tag == "qa") return {Labeler::Kind::rouge_l, 0.5};
  if (corpus.task_tag == "summarization") return {Labeler::Kind::rouge_l, 0.2};
  throw ConfigError("cannot infer a labeler for task '" + corpus.task_tag +
                    "' without per-record labels; pass --labeler rougel:<t> or supply labels");
}

inline Corpus label_corpus(Corpus corpus, const Labeler& requested) {
  const Labeler labeler = resolve_labeler(requested, corpus);
  for (auto& b : corpus.instances) {
    b = labeler.kind == Labeler::Kind::external ? label_external(std::move(b))
                                                : label_by_rouge_l(std::move(b), labeler.threshold);
  }
  return corpus;
}

}  // namespace conhyp
