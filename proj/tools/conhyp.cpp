// conhyp: command-line front end for the consistency-hypothesis toolkit.
//
//   conhyp verify  --input corpus.jsonl --out results/
//   conhyp synth   --n 200 --m 10 --effect strong --output corpus.jsonl
//
// A flat key=value file passed with --config supplies defaults; flags given
// on the command line win. Errors are reported as one JSON line on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "conhyp/pipeline.hpp"

namespace {

std::string join_csv(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw conhyp::ConfigError("expected true or false, got '" + s + "'");
}

void report_error(std::string_view kind, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistency-hypothesis verification and black-box confidence scoring"};
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string input, similarity = "jaccard", aggregator = "arith", hypothesis = "all", variant = "both";
  std::string labeler = "auto", out = ".", orientation = "ordered", include_self = "false";
  std::string eval_unit = "generation", t_test = "welch", task = "other", matrix_cache, effect = "strong", output;
  std::vector<std::string> groups{"auto"};
  conhyp::RunConfig cfg;

  app.add_option("--input", input, "Input corpus (JSONL)");
  app.add_option("--task", task, "Task tag for labeler defaults (qa, summarization, other)");
  app.add_option("--similarity", similarity, "jaccard | rouge1 | rougel | cosine");
  app.add_option("--aggregator", aggregator, "arith | geom | harm");
  app.add_option("--epsilon", cfg.epsilon, "Floor for geometric/harmonic aggregation");
  app.add_option("--hypothesis", hypothesis, "1 | 2 | 3 | all");
  app.add_option("--variant", variant, "pairwise | aggregated | both");
  app.add_option("--labeler", labeler, "auto | rougel:<threshold> | external");
  app.add_option("--alpha", cfg.alpha, "Significance level");
  app.add_option("--repetitions", cfg.repetitions, "Random group splits per grid point");
  app.add_option("--groups", groups, "Comma-separated group counts, or auto")->delimiter(',');
  app.add_option("--rho-threshold", cfg.rho_threshold, "Threshold for theta*");
  app.add_option("--subset-fraction", cfg.subset_fraction, "Fraction of items per evaluation run");
  app.add_option("--eval-runs", cfg.eval_runs, "Random evaluation subsets");
  app.add_option("--seed", cfg.seed, "Root seed");
  app.add_option("--out", out, "Output directory");
  app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  app.add_option("--pair-orientation", orientation, "ordered | unordered");
  app.add_option("--include-self", include_self, "true | false");
  app.add_option("--eval-unit", eval_unit, "generation | instance");
  app.add_option("--t-test", t_test, "welch | student");
  app.add_option("--matrix-cache", matrix_cache, "Directory for cached similarity matrices");

  app.add_option("--n", cfg.synth.n_instances, "Synthetic instances");
  app.add_option("--m", cfg.synth.m_generations, "Generations per instance");
  app.add_option("--correct-rate", cfg.synth.correct_rate, "Probability a generation is correct");
  app.add_option("--effect", effect, "strong | weak | null");
  app.add_option("--vocab", cfg.synth.vocab_size, "Synthetic vocabulary size");
  app.add_option("--answer-length", cfg.synth.answer_length, "Tokens per synthetic answer");
  app.add_option("--label-noise", cfg.synth.label_noise, "Probability a label is replaced by a coin flip");
  app.add_option("--embedding-dim", cfg.synth.embedding_dim, "Synthetic embedding dimension (0 = none)");
  app.add_option("--output", output, "Corpus path written by synth");

  app.add_subcommand("verify", "Fraction of verified groups across the group-count grid");
  app.add_subcommand("metrics", "Mean similarity gap and theta* per hypothesis and variant");
  app.add_subcommand("score", "Per-generation confidence scores");
  app.add_subcommand("eval", "AUROC and AUARC of each scoring method over random subsets");
  app.add_subcommand("simdist", "Raw within-class and cross-class similarity values");
  app.add_subcommand("synth", "Write a planted synthetic corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    cfg.input_path = input;
    cfg.task_tag = task;
    cfg.similarity = conhyp::parse_metric(similarity);
    cfg.aggregator = conhyp::parse_aggregator(aggregator);
    cfg.hypotheses = conhyp::parse_hypotheses(hypothesis);
    cfg.variants = conhyp::parse_variants(variant);
    cfg.labeler = conhyp::Labeler::parse(labeler);
    cfg.groups = conhyp::parse_groups(join_csv(groups));
    cfg.out_dir = out;
    cfg.pair_orientation = conhyp::parse_orientation(orientation);
    cfg.include_self = parse_bool(include_self);
    cfg.eval_unit = conhyp::parse_unit(eval_unit);
    cfg.t_test = conhyp::parse_ttest(t_test);
    cfg.matrix_cache = matrix_cache;
    cfg.synth.effect = conhyp::parse_effect(effect);
    cfg.synth.seed = cfg.seed;
    cfg.synth_output = output;

    const std::string command = app.get_subcommands().front()->get_name();
    if (command != "synth" && cfg.input_path.empty()) throw conhyp::ConfigError("--input is required");
    if (command == "verify") {
      conhyp::cmd_verify(cfg);
    } else if (command == "metrics") {
      conhyp::cmd_metrics(cfg);
    } else if (command == "score") {
      conhyp::cmd_score(cfg);
    } else if (command == "eval") {
      conhyp::cmd_eval(cfg);
    } else if (command == "simdist") {
      conhyp::cmd_simdist(cfg);
    } else {
      std::cout << conhyp::cmd_synth(cfg) << '\n';
    }
  } catch (const conhyp::Error& e) {
    report_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
