#pragma once

#include <stdexcept>
#include <string>

namespace conhyp {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag ("corpus", "similarity", ...) used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct CorpusError : Error {
  explicit CorpusError(const std::string& what) : Error("corpus", what) {}
};

struct SimilarityError : Error {
  explicit SimilarityError(const std::string& what) : Error("similarity", what) {}
};

struct HypothesisError : Error {
  explicit HypothesisError(const std::string& what) : Error("hypothesis", what) {}
};

struct StatsError : Error {
  explicit StatsError(const std::string& what) : Error("stats", what) {}
};

struct ConfidenceError : Error {
  explicit ConfidenceError(const std::string& what) : Error("confidence", what) {}
};

struct EvalError : Error {
  explicit EvalError(const std::string& what) : Error("eval", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace conhyp
