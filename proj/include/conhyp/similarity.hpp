#pragma once

// Similarity metrics on [0, 1] and per-instance pairwise similarity matrices.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conhyp/corpus.hpp"
#include "conhyp/error.hpp"
#include "conhyp/format.hpp"
#include "conhyp/overlap.hpp"

namespace conhyp {

enum class Metric { jaccard, rouge1, rougel, cosine };

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::jaccard: return "jaccard";
    case Metric::rouge1: return "rouge1";
    case Metric::rougel: return "rougel";
    case Metric::cosine: return "cosine";
  }
  return "jaccard";
}

inline Metric parse_metric(std::string_view name) {
  if (name == "jaccard") return Metric::jaccard;
  if (name == "rouge1") return Metric::rouge1;
  if (name == "rougel") return Metric::rougel;
  if (name == "cosine" || name == "embedding-cosine") return Metric::cosine;
  throw ConfigError("unknown similarity '" + std::string(name) + "' (expected jaccard, rouge1, rougel or cosine)");
}

/// Cosine similarity clamped to [0, 1]; negative cosines map to 0.
inline double embedding_cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw SimilarityError("embedding dimension mismatch (" + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw SimilarityError("cosine similarity of a zero vector is undefined");
  if (std::equal(u.begin(), u.end(), v.begin())) return 1.0;
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), 0.0, 1.0);
}

/// Symmetric m x m matrix with unit diagonal and entries in [0, 1].
/// Immutable once built.
class SimilarityMatrix {
 public:
  /// Validates the invariants; `values` is row-major.
  SimilarityMatrix(std::size_t m, Metric metric, std::vector<double> values)
      : m_(m), metric_(metric), values_(std::move(values)) {
    if (values_.size() != m_ * m_) throw SimilarityError("matrix value count does not match m*m");
    for (std::size_t j = 0; j < m_; ++j) {
      if (at(j, j) != 1.0) throw SimilarityError("similarity matrix diagonal must be 1");
      for (std::size_t k = 0; k < m_; ++k) {
        const double v = at(j, k);
        if (!(v >= 0.0 && v <= 1.0)) throw SimilarityError("similarity values must lie in [0, 1]");
        if (v != at(k, j)) throw SimilarityError("similarity matrix must be symmetric");
      }
    }
  }

  std::size_t size() const { return m_; }
  Metric metric() const { return metric_; }
  double operator()(std::size_t j, std::size_t k) const { return at(j, k); }
  std::span<const double> row(std::size_t j) const { return {values_.data() + j * m_, m_}; }
  std::span<const double> values() const { return values_; }

  bool operator==(const SimilarityMatrix&) const = default;

 private:
  double at(std::size_t j, std::size_t k) const { return values_[j * m_ + k]; }

  std::size_t m_;
  Metric metric_;
  std::vector<double> values_;
};

namespace detail {

// Maps tokens to dense ids so the overlap templates compare integers.
inline std::vector<std::vector<std::uint32_t>> intern_tokens(const InstanceBundle& bundle) {
  std::map<std::string, std::uint32_t, std::less<>> ids;
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(bundle.size());
  for (const auto& g : bundle.generations) {
    std::vector<std::uint32_t> seq;
    for (auto& tok : tokenize(g.text)) {
      const auto [it, _] = ids.try_emplace(std::move(tok), static_cast<std::uint32_t>(ids.size()));
      seq.push_back(it->second);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace detail

/// Builds values[j][k] = s(y^j, y^k), evaluating each unordered pair once.
inline SimilarityMatrix pairwise_matrix(const InstanceBundle& bundle, Metric metric) {
  const std::size_t m = bundle.size();
  std::vector<double> values(m * m, 1.0);
  const auto fill = [&](auto&& pair_similarity) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        const double s = pair_similarity(j, k);
        values[j * m + k] = s;
        values[k * m + j] = s;
      }
    }
  };
  if (metric == Metric::cosine) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!bundle.generations[j].embedding) {
        throw SimilarityError("instance '" + bundle.instance_id + "' generation " + std::to_string(j) +
                              " has no embedding for cosine similarity");
      }
    }
    fill([&](std::size_t j, std::size_t k) {
      return embedding_cosine(*bundle.generations[j].embedding, *bundle.generations[k].embedding);
    });
  } else {
    const auto tokens = detail::intern_tokens(bundle);
    fill([&](std::size_t j, std::size_t k) {
      switch (metric) {
        case Metric::rouge1: return rouge1_f(tokens[j], tokens[k]);
        case Metric::rougel: return rouge_l_f(tokens[j], tokens[k]);
        default: return jaccard(tokens[j], tokens[k]);
      }
    });
  }
  return SimilarityMatrix(m, metric, std::move(values));
}

/// Cache format: first line is the metric name, then m comma-separated rows.
inline void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  out << metric_name(matrix.metric()) << '\n';
  for (std::size_t j = 0; j < matrix.size(); ++j) {
    const auto row = matrix.row(j);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      out << format_real(row[k]);
    }
    out << '\n';
  }
}

inline SimilarityMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SimilarityError("empty matrix cache file");
  const Metric metric = parse_metric(line);
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw SimilarityError("malformed matrix cache cell '" + cell + "'");
      }
      values.push_back(v);
    }
  }
  return SimilarityMatrix(rows, metric, std::move(values));
}

}  // namespace conhyp
