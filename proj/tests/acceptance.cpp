// Acceptance suite: one PASS/FAIL line per criterion, each timed against its
// runtime budget. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "conhyp/pipeline.hpp"
#include "fixtures/rouge_reference.hpp"
#include "fixtures/t_reference.hpp"

namespace fs = std::filesystem;
using namespace conhyp;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.ok && secs >= budget_s) {
    out.ok = false;
    out.detail = "exceeded runtime budget";
  }
  if (!out.ok) ++failures;
  std::printf("%s [%2d] %s (%.2f s, budget %.0f s)%s%s\n", out.ok ? "PASS" : "FAIL", id, title.c_str(), secs, budget_s,
              out.detail.empty() ? "" : ": ", out.detail.c_str());
  std::fflush(stdout);
}

Corpus planted(Effect effect, std::size_t n, std::size_t m, std::uint64_t seed, double label_noise = 0.0) {
  PlantSpec spec;
  spec.effect = effect;
  spec.n_instances = n;
  spec.m_generations = m;
  spec.seed = seed;
  spec.label_noise = label_noise;
  return label_corpus(generate_planted(spec), Labeler::parse("external"));
}

std::vector<HypothesisSets> pairwise_sets(const Corpus& c, Hypothesis h) {
  std::vector<HypothesisSets> out;
  for (const auto& b : c.instances) out.push_back(build_pairwise_sets(b, pairwise_matrix(b, Metric::jaccard), h));
  return out;
}

constexpr Hypothesis kAll[] = {Hypothesis::sim_any, Hypothesis::sim_correct, Hypothesis::sim_separate};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CONHYP_CLI_PATH + "\" " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

// rho_mean per (hypothesis, variant, n_groups) row of a verify CSV.
std::vector<std::pair<std::string, std::pair<double, double>>> rho_rows(const fs::path& csv) {
  std::vector<std::pair<std::string, std::pair<double, double>>> rows;
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back({cells[0] + "/" + cells[1] + "/" + cells[4], {std::stod(cells[6]), std::stod(cells[10])}});
  }
  return rows;
}

}  // namespace

int main() {
  run(1, "similarity axioms on 1000 random pairs per metric; overlap metrics match reference to 1e-9", 5, [] {
    Outcome o;
    std::mt19937_64 gen(1);
    const std::vector<std::string> words{"The", "cat", "sat", "on", "mat.", "A", "dog,", "ran", "(far)", "*",
                                         "paris", "France!", "x", "y", "z", "\xC3\x89t\xC3\xA9"};
    std::uniform_int_distribution<std::size_t> word(0, words.size() - 1);
    std::uniform_int_distribution<int> len(1, 14);
    const auto text = [&] {
      std::string s;
      for (int i = len(gen); i > 0; --i) s += words[word(gen)] + " ";
      return s;
    };
    std::normal_distribution<double> normal;
    for (Metric metric : {Metric::jaccard, Metric::rouge1, Metric::rougel, Metric::cosine}) {
      for (int t = 0; t < 1000; ++t) {
        InstanceBundle b;
        b.instance_id = "p";
        b.generations.resize(2);
        for (auto& g : b.generations) {
          g.text = text();
          g.embedding = std::vector<double>(8);
          for (auto& x : *g.embedding) x = normal(gen);
        }
        const SimilarityMatrix m = pairwise_matrix(b, metric);
        std::swap(b.generations[0], b.generations[1]);
        const SimilarityMatrix swapped = pairwise_matrix(b, metric);
        o.require(m(0, 0) == 1.0 && m(1, 1) == 1.0, std::string(metric_name(metric)) + " self-similarity != 1");
        o.require(m(0, 1) == m(1, 0) && swapped(0, 1) == m(0, 1), std::string(metric_name(metric)) + " asymmetric");
        o.require(m(0, 1) >= 0.0 && m(0, 1) <= 1.0, std::string(metric_name(metric)) + " out of [0, 1]");
      }
    }
    o.require(fixtures::kOverlap.size() == 100, "expected 100 reference fixtures");
    double worst = 0.0;
    for (const auto& c : fixtures::kOverlap) {
      worst = std::max({worst, std::abs(jaccard(c.a, c.b) - c.jaccard), std::abs(rouge1_f(c.a, c.b) - c.rouge1),
                        std::abs(rouge_l_f(c.a, c.b) - c.rougel)});
    }
    o.require(worst <= 1e-9, "max reference deviation " + fmt(worst));
    o.detail = o.ok ? "max reference deviation " + fmt(worst) : o.detail;
    return o;
  });

  run(2, "Welch one-sided p-values match 20 reference fixtures to 1e-6; p(A,B)+p(B,A)=1 on 100 fixtures", 1, [] {
    Outcome o;
    o.require(fixtures::kWelch.size() == 20, "expected 20 reference fixtures");
    double worst = 0.0;
    for (const auto& c : fixtures::kWelch) {
      worst = std::max(worst, std::abs(one_sided_t_test(c.correct, c.incorrect).p_value - c.p));
    }
    o.require(worst <= 1e-6, "max p deviation " + fmt(worst));
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> len(2, 40);
    double worst_sum = 0.0;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> a(static_cast<std::size_t>(len(gen)));
      std::vector<double> b(static_cast<std::size_t>(len(gen)));
      for (auto& x : a) x = u(gen);
      for (auto& x : b) x = u(gen);
      worst_sum = std::max(worst_sum, std::abs(one_sided_t_test(a, b).p_value + one_sided_t_test(b, a).p_value - 1.0));
    }
    o.require(worst_sum <= 1e-12, "identity deviation " + fmt(worst_sum));
    return o;
  });

  run(3, "null calibration: dataset-level verified frequency in [0, 0.12] over 50 null corpora (n=100, m=10)", 60,
      [] {
        // Default pipeline: pairwise Jaccard, ordered pairs, every hypothesis.
        // Unordered and aggregated rates are reported alongside for context.
        Outcome o;
        std::size_t ordered[3] = {0, 0, 0};
        std::size_t unordered[3] = {0, 0, 0};
        std::size_t aggregated[3] = {0, 0, 0};
        const auto verified = [](const std::vector<HypothesisSets>& sets) {
          return one_sided_t_test(pool_all(sets)).verdict == Verdict::verified ? 1u : 0u;
        };
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
          const Corpus c = planted(Effect::null, 100, 10, 7000 + seed);
          for (int h = 0; h < 3; ++h) {
            std::vector<HypothesisSets> o_sets, u_sets, a_sets;
            for (const auto& b : c.instances) {
              const auto m = pairwise_matrix(b, Metric::jaccard);
              o_sets.push_back(build_pairwise_sets(b, m, kAll[h]));
              u_sets.push_back(build_pairwise_sets(b, m, kAll[h], PairOrientation::unordered));
              a_sets.push_back(build_aggregated_sets(b, m, kAll[h], Aggregator{}));
            }
            ordered[h] += verified(o_sets);
            unordered[h] += verified(u_sets);
            aggregated[h] += verified(a_sets);
          }
        }
        std::string summary;
        for (int h = 0; h < 3; ++h) {
          const double freq = static_cast<double>(ordered[h]) / 50.0;
          summary += std::string(h ? ", " : "") + std::string(hypothesis_name(kAll[h])) + " " + fmt(freq) +
                     " (unordered " + fmt(static_cast<double>(unordered[h]) / 50.0) + ", aggregated " +
                     fmt(static_cast<double>(aggregated[h]) / 50.0) + ")";
        }
        for (int h = 0; h < 3; ++h) {
          const double freq = static_cast<double>(ordered[h]) / 50.0;
          o.require(freq >= 0.0 && freq <= 0.12, std::string(hypothesis_name(kAll[h])) + " out of band; " + summary);
        }
        if (o.ok) o.detail = summary;
        return o;
      });

  run(4, "power: rho(1) = 1 and rho(n_g) >= 0.8 for every n_g <= 0.1 n on planted-strong (n=200, m=10)", 120, [] {
    Outcome o;
    const Corpus c = planted(Effect::strong, 200, 10, 0);
    std::vector<std::size_t> grid;
    for (std::size_t g = 1; g <= 20; ++g) grid.push_back(g);
    double lowest = 1.0;
    for (Hypothesis h : kAll) {
      const auto curve = rho_curve(pairwise_sets(c, h), grid, 10, 0);
      o.require(curve[0].rho_mean == 1.0, std::string(hypothesis_name(h)) + " rho(1) = " + fmt(curve[0].rho_mean));
      for (const auto& p : curve) {
        lowest = std::min(lowest, p.rho_mean);
        o.require(p.rho_mean >= 0.8, std::string(hypothesis_name(h)) + " rho(" + std::to_string(p.n_groups) +
                                         ") = " + fmt(p.rho_mean));
      }
    }
    if (o.ok) o.detail = "lowest rho " + fmt(lowest);
    return o;
  });

  run(5, "mean differences on planted-strong: dmu(H2) >= dmu(H1) - 0.01, dmu(H1) > 0, dmu(H3) > 0", 60, [] {
    Outcome o;
    const Corpus c = planted(Effect::strong, 200, 10, 0);
    std::string summary;
    for (Variant v : {Variant::pairwise, Variant::aggregated}) {
      double d[3];
      for (int h = 0; h < 3; ++h) {
        std::vector<HypothesisSets> sets;
        for (const auto& b : c.instances) {
          const auto m = pairwise_matrix(b, Metric::jaccard);
          sets.push_back(v == Variant::pairwise ? build_pairwise_sets(b, m, kAll[h])
                                                : build_aggregated_sets(b, m, kAll[h], Aggregator{}));
        }
        d[h] = mean_difference(pool_all(sets));
      }
      summary += std::string(summary.empty() ? "" : "; ") + std::string(variant_name(v)) + " " + fmt(d[0]) + "/" +
                 fmt(d[1]) + "/" + fmt(d[2]);
      o.require(d[0] > 0.0 && d[2] > 0.0 && d[1] >= d[0] - 0.01, "ordering violated: " + summary);
    }
    if (o.ok) o.detail = "H1/H2/H3 " + summary;
    return o;
  });

  run(6, "harmonic <= geometric <= arithmetic on 10000 positive lists, equality iff constant (1e-12)", 10, [] {
    Outcome o;
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    std::uniform_int_distribution<int> len(1, 20);
    std::bernoulli_distribution constant(0.1);
    for (int t = 0; t < 10000; ++t) {
      std::vector<double> v(static_cast<std::size_t>(len(gen)));
      const bool is_constant = v.size() == 1 || constant(gen);
      const double c = u(gen);
      for (auto& x : v) x = is_constant ? c : u(gen);
      const bool all_equal = std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
      const double a = aggregate(v, Aggregator(Aggregator::Kind::arithmetic));
      const double g = aggregate(v, Aggregator(Aggregator::Kind::geometric));
      const double h = aggregate(v, Aggregator(Aggregator::Kind::harmonic));
      o.require(h <= g + 1e-12 && g <= a + 1e-12, "ordering violated on list " + std::to_string(t));
      if (all_equal) {
        o.require(std::abs(a - g) <= 1e-12 && std::abs(g - h) <= 1e-12, "constant list not equal " + std::to_string(t));
      } else {
        o.require(a - g > 1e-12 && g - h > 1e-12, "non-constant list with equality " + std::to_string(t));
      }
    }
    return o;
  });

  run(7, "AUROC equals pair-counting oracle exactly on 200 tied fixtures; AUARC (T,F)/(0.9,0.1) = 0.875", 10, [] {
    Outcome o;
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> len(2, 200);
    std::uniform_int_distribution<int> level(0, 12);
    for (int t = 0; t < 200; ++t) {
      const auto n = static_cast<std::size_t>(len(gen));
      std::vector<double> s(n);
      std::vector<bool> l(n);
      std::bernoulli_distribution coin(0.2 + 0.6 * (t % 5) / 4.0);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = level(gen) / 12.0;
        l[i] = coin(gen);
      }
      o.require(auroc(s, l) == oracle::brute_force_auroc(s, l), "mismatch on fixture " + std::to_string(t));
    }
    const double a = auarc(std::vector<double>{0.9, 0.1}, {true, false});
    o.require(a == 0.875, "AUARC hand fixture gave " + fmt(a));
    return o;
  });

  run(8, "aggregation AUROC >= 0.75 with 30% label noise; geom/harm >= arith - 0.02 (planted-strong)", 60, [] {
    Outcome o;
    const Corpus c = planted(Effect::strong, 200, 10, 0, 0.3);
    RunConfig config;
    Analysis a;
    a.corpus = c;
    a.labeled = true;
    analyze(config, a, false, true);
    const auto reports = evaluate_methods(config, a);
    double arith = 0.0;
    double baseline = 0.0;
    std::string summary;
    for (const auto& r : reports) {
      o.require(r.auroc_mean.has_value(), r.method + " has no AUROC");
      if (r.method == "arith_agg") arith = *r.auroc_mean;
      if (r.method == "always_one") baseline = *r.auroc_mean;
      summary += std::string(summary.empty() ? "" : ", ") + r.method + " " + fmt(*r.auroc_mean);
    }
    o.require(baseline == 0.5, "always_one AUROC " + fmt(baseline));
    for (const auto& r : reports) {
      if (r.method == "arith_agg" || r.method == "geom_agg" || r.method == "harm_agg") {
        o.require(*r.auroc_mean >= baseline + 0.25, summary);
      }
      if (r.method == "geom_agg" || r.method == "harm_agg") o.require(*r.auroc_mean >= arith - 0.02, summary);
    }
    if (o.ok) o.detail = summary;
    return o;
  });

  const fs::path work = fs::temp_directory_path() / "conhyp_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  run(9, "determinism: repeated verify+eval byte-identical; a new seed changes groups, rho moves < 3 std", 300, [&] {
    Outcome o;
    const std::string corpus = (work / "det.jsonl").string();
    o.require(cli("synth --n 200 --m 10 --output \"" + corpus + "\" --out \"" + (work / "det_synth").string() + "\"") ==
                  0,
              "synth failed");
    for (const char* run_dir : {"a", "b"}) {
      const std::string out = (work / run_dir).string();
      o.require(cli("verify --input \"" + corpus + "\" --out \"" + out + "\"") == 0, "verify failed");
      o.require(cli("eval --input \"" + corpus + "\" --out \"" + out + "\"") == 0, "eval failed");
    }
    for (const char* f : {"verify.csv", "eval.csv", "verify_manifest.json", "eval_manifest.json"}) {
      o.require(slurp(work / "a" / f) == slurp(work / "b" / f), std::string(f) + " differs between runs");
    }
    const std::string out_c = (work / "c").string();
    o.require(cli("verify --seed 1 --input \"" + corpus + "\" --out \"" + out_c + "\"") == 0, "reseeded verify failed");
    const auto digest = [](const fs::path& p) {
      return nlohmann::json::parse(slurp(p))["group_assignment_digest"].get<std::string>();
    };
    o.require(digest(work / "a" / "verify_manifest.json") != digest(work / "c" / "verify_manifest.json"),
              "group assignment digest unchanged by reseeding");
    const auto base = rho_rows(work / "a" / "verify.csv");
    const auto moved = rho_rows(work / "c" / "verify.csv");
    o.require(base.size() == moved.size() && !base.empty(), "row count changed");
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size() && i < moved.size(); ++i) {
      const double delta = std::abs(base[i].second.first - moved[i].second.first);
      const double spread = 3.0 * std::max(base[i].second.second, moved[i].second.second);
      // Identical means satisfy the bound even when both runs have zero spread.
      o.require(delta == 0.0 || delta < spread, base[i].first + " moved " + fmt(delta) + " vs 3 std " + fmt(spread));
      worst = std::max(worst, delta);
    }
    if (o.ok) o.detail = "largest rho shift " + fmt(worst);
    return o;
  });

  run(10, "end-to-end synth -> verify -> metrics -> score -> eval with default config (n=200, m=10)", 300, [&] {
    Outcome o;
    const std::string corpus = (work / "e2e.jsonl").string();
    const std::string out = (work / "e2e").string();
    o.require(cli("synth --n 200 --m 10 --output \"" + corpus + "\" --out \"" + out + "\"") == 0, "synth exit != 0");
    for (const char* cmd : {"verify", "metrics", "score", "eval"}) {
      o.require(cli(std::string(cmd) + " --input \"" + corpus + "\" --out \"" + out + "\"") == 0,
                std::string(cmd) + " exit != 0");
    }
    for (const char* f : {"verify.csv", "metrics.csv", "scores.csv", "eval.csv"}) {
      o.require(fs::exists(fs::path(out) / f), std::string(f) + " missing");
    }
    return o;
  });

  fs::remove_all(work);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
