// Acceptance harness: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance --only N   run criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "crossgreed/cli.hpp"
#include "crossgreed/hardgen.hpp"
#include "crossgreed/joint_eval.hpp"
#include "crossgreed/nb_model.hpp"
#include "crossgreed/selector.hpp"
#include "crossgreed/theory_lab.hpp"
#include "support/oracles.hpp"

using namespace crossgreed;
using oracle::Q;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// The instance family shared by criteria 1 and 2.
std::vector<oracle::NbInstance> nb_suite() {
  oracle::Rng rng(1001);
  std::vector<oracle::NbInstance> out;
  for (int i = 0; i < 500; ++i) out.push_back(oracle::random_nb(rng, 1 + rng.below(6), 5));
  return out;
}

std::size_t support_size(const oracle::NbInstance& inst, const std::vector<ColumnId>& set) {
  std::size_t n = 1;
  for (auto a : set) {
    std::size_t s = 0;
    for (std::size_t v = 0; v < inst.p0[a].size(); ++v) s += (inst.p0[a][v] != 0 || inst.p1[a][v] != 0);
    n *= s;
  }
  return n;
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  JointOptions unbounded;
  unbounded.pair_cap = std::numeric_limits<std::uint64_t>::max();
  Verdict o;
  std::size_t checked = 0, mismatches = 0, largest = 0;
  for (const auto& inst : nb_suite()) {
    const auto models = oracle::exact_models(inst);
    std::vector<ConditionalPair<Rational>> pairs;
    std::vector<ColumnId> ids;
    for (const auto& m : models) {
      pairs.push_back(m.pair());
      ids.push_back(m.id());
    }
    const auto joint = naive_bayes_joint<Rational>(pairs, ids, Q(1, 2));
    const NbObjective<Rational> nb(models);
    for (const auto& set : oracle::subsets(inst.p0.size())) {
      ++checked;
      largest = std::max(largest, support_size(inst, set));
      if (nb.auc_star(set) != auc_star_joint(joint, set, unbounded)) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  o.pass = mismatches == 0 && secs < 60;
  o.detail = std::to_string(checked) + " subsets of 500 instances, " + std::to_string(mismatches) +
             " mismatches, largest support " + std::to_string(largest) + ", " + fmt("%.1f s", secs);
  return o;
}

Verdict criterion2() {
  Verdict o;
  std::size_t mono = 0, dr = 0, violations = 0;
  for (const auto& inst : nb_suite()) {
    const NbObjective<Rational> nb(oracle::exact_models(inst));
    const std::size_t n = inst.p0.size();
    const auto all = oracle::subsets(n);
    std::vector<Rational> f;
    for (const auto& s : all) f.push_back(nb.f_of(s));
    for (std::uint32_t a = 0; a < all.size(); ++a) {
      for (std::uint32_t b = a;; b = (b + 1) | a) {
        ++mono;
        if (f[a] > f[b]) ++violations;
        if (b == all.size() - 1) break;
      }
      for (std::uint32_t x = 0; x < n; ++x) {
        for (std::uint32_t y = x + 1; y < n; ++y) {
          const std::uint32_t bx = 1u << x, by = 1u << y;
          if ((a & bx) || (a & by)) continue;
          ++dr;
          if (f[a | bx] - f[a] < f[a | bx | by] - f[a | by]) ++violations;
        }
      }
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(mono) + " monotonicity pairs, " + std::to_string(dr) + " diminishing-returns triples, " +
             std::to_string(violations) + " violations";
  return o;
}

Verdict criterion3() {
  // 1 − 1/e < 632120558828557679 / 10^18, so clearing this bound implies the
  // real one.
  const Rational bound(mpz_class("632120558828557679"), mpz_class("1000000000000000000"));
  oracle::Rng rng(1003);
  Verdict o;
  double worst = 1.0;
  std::size_t failures = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 4 + rng.below(5);
    const auto inst = oracle::random_nb(rng, n, 5);
    const NbObjective<Rational> nb(oracle::exact_models(inst));
    std::vector<ColumnId> u(n);
    std::iota(u.begin(), u.end(), 0u);
    const std::size_t k = 1 + rng.below(4);
    const auto g = greedy_select<Rational>(nb, u, k);
    const auto e = exhaustive_select<Rational>(nb, u, k);
    const Rational fg = g.f_trajectory.empty() ? Rational(0) : g.f_trajectory.back();
    const Rational fe = e.f_trajectory.back();
    if (fg < bound * fe) ++failures;
    if (sgn(fe) > 0) worst = std::min(worst, Rational(fg / fe).get_d());
  }
  o.pass = failures == 0;
  o.detail = "500 instances, " + std::to_string(failures) + " below 1-1/e, worst ratio " + fmt("%.6f", worst);
  return o;
}

Verdict criterion4() {
  oracle::Rng rng(1004);
  Verdict o;
  std::size_t above = 0, llr_misses = 0;
  const double inf = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 200; ++t) {
    const std::size_t cols = 1 + rng.below(3);
    std::vector<JointColumn> jc;
    std::vector<std::size_t> vocab;
    std::size_t cells = 1;
    for (std::size_t a = 0; a < cols; ++a) {
      vocab.push_back(2 + rng.below(3));
      cells *= vocab.back();
      JointColumn c{static_cast<ColumnId>(a), {}};
      for (std::size_t v = 0; v < vocab.back(); ++v) c.vocabulary.push_back(std::to_string(v));
      jc.push_back(c);
    }
    std::map<ValueTuple, ExactJointTable::LabelMasses> rows;
    Rational m0, m1;
    do {
      rows.clear();
      const auto m = rng.measure(2 * cells);
      m0 = m1 = 0;
      for (std::size_t i = 0; i < cells; ++i) {
        if (m[2 * i] == 0 && m[2 * i + 1] == 0) continue;
        ValueTuple tup(cols);
        for (std::size_t a = cols, r = i; a-- > 0; r /= vocab[a]) tup[a] = static_cast<std::uint32_t>(r % vocab[a]);
        rows[tup] = {m[2 * i], m[2 * i + 1]};
        m0 += m[2 * i];
        m1 += m[2 * i + 1];
      }
    } while (m0 == 0 || m1 == 0);
    const ExactJointTable table(jc, rows);
    std::vector<ColumnId> set(cols);
    std::iota(set.begin(), set.end(), 0u);
    const Rational best = auc_star_joint(table, set);
    if (auc_of_scorer(table, set, log_likelihood_scorer(table, set)) != best) ++llr_misses;
    const auto support = project(table, set).outcomes;
    for (int s = 0; s < 50; ++s) {
      Scorer sigma;
      for (auto x : support) {
        const auto r = rng.below(12);
        sigma[x] = r == 0 ? -inf : r == 11 ? inf : rng.unit() * 4 - 2;
      }
      if (auc_of_scorer(table, set, sigma) > best) ++above;
    }
  }
  o.pass = above == 0 && llr_misses == 0;
  o.detail = "200 tables x 50 scorers, " + std::to_string(above) + " scorers above auc*, " +
             std::to_string(llr_misses) + " likelihood-ratio misses";
  return o;
}

Verdict criterion5() {
  oracle::Rng rng(1005);
  std::vector<Graph> graphs{Graph::complete(3)};
  for (std::size_t n = 2; n <= 8; ++n) {
    graphs.push_back(Graph::path(n));
    graphs.push_back(Graph::star(n));
  }
  for (int i = 0; i < 30; ++i) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<std::pair<std::size_t, std::size_t>> e;
    while (e.empty())
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
          if (rng.below(3) == 0) e.emplace_back(u, v);
    graphs.emplace_back(n, e);
  }
  Verdict o;
  // The stated identity is 2·auc* − 1 = φ. The distribution gives
  // 1 − (1 − φ)² instead, which is counted separately.
  std::size_t checked = 0, auc_bad = 0, mi_bad = 0, square_bad = 0;
  for (const auto& g : graphs) {
    for (const auto& s : oracle::subsets(g.vertex_count())) {
      if (s.size() > 5) continue;
      const std::vector<std::size_t> sub(s.begin(), s.end());
      const auto r = verify_reduction(g, sub);
      ++checked;
      auc_bad += !r.auc_matches;
      mi_bad += !r.mi_matches;
      square_bad += !r.auc_matches_predicted;
    }
  }
  std::vector<JointColumn> cols{{0, {"English", "Spanish"}}, {1, {"US", "Mexico"}}};
  std::map<ValueTuple, ExactJointTable::LabelMasses> rows;
  rows[{0, 0}] = {0, Q(1, 4)};
  rows[{1, 1}] = {0, Q(1, 4)};
  rows[{0, 1}] = {Q(1, 4), 0};
  rows[{1, 0}] = {Q(1, 4), 0};
  const ExactJointTable lc(cols, rows);
  const bool example = auc_star_joint(lc, std::vector<ColumnId>{0, 1}) == 1 &&
                       auc_star_joint(lc, std::vector<ColumnId>{0}) == Q(1, 2) &&
                       auc_star_joint(lc, std::vector<ColumnId>{1}) == Q(1, 2);
  o.pass = auc_bad == 0 && mi_bad == 0 && example;
  o.detail = std::to_string(graphs.size()) + " graphs, " + std::to_string(checked) + " subsets: 2auc-1=phi fails on " +
             std::to_string(auc_bad) + ", 2auc-1=1-(1-phi)^2 fails on " + std::to_string(square_bad) +
             ", I=phi fails on " + std::to_string(mi_bad) + "; language/country " +
             (example ? "1 crossed, 1/2 each" : "wrong");
  return o;
}

const theory::SuiteResult* find(const std::vector<theory::SuiteResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return &r;
  return nullptr;
}

std::vector<theory::SuiteResult> theory_results() {
  theory::TheoryConfig cfg;
  cfg.seed = 1006;
  cfg.trials = 1000;
  return theory::run_theory_suites(cfg);
}

Verdict criterion6() {
  const auto rs = theory_results();
  const auto* b = find(rs, "bernoulli_lemma");
  const auto* g = find(rs, "general_lemma");
  // Independent exact cross-check of the Bernoulli left-hand side.
  oracle::Rng rng(1016);
  std::size_t oracle_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(4);
    const auto p = rng.measure(n), q = rng.measure(n);
    const Rational r = Q(static_cast<long>(rng.below(13)), 12), s = Q(static_cast<long>(rng.below(13)), 12);
    const auto bern = [](const Rational& x) { return oracle::Masses{1 - x, x}; };
    using oracle::product;
    using oracle::tv;
    const Rational expected =
        tv(product({bern(r), bern(s), p, q}), product({bern(1 - r), bern(1 - s), q, p})) -
        tv(product({bern(r), p, q}), product({bern(1 - r), q, p})) -
        tv(product({bern(s), p, q}), product({bern(1 - s), q, p})) + tv(product({p, q}), product({q, p}));
    if (theory::bernoulli_lemma_lhs<Rational>(r, s, oracle::to_measure(p), oracle::to_measure(q)) != expected)
      ++oracle_mismatch;
  }
  Verdict o;
  o.pass = b && g && b->instances >= 1000 && g->instances >= 500 && b->failures == 0 && g->failures == 0 &&
           oracle_mismatch == 0;
  if (b && g) {
    o.detail = "bernoulli " + std::to_string(b->instances) + " instances max lhs " + fmt("%.3g", b->worst_margin) +
               ", general " + std::to_string(g->instances) + " instances max lhs " + fmt("%.3g", g->worst_margin) +
               ", failures " + std::to_string(b->failures + g->failures) + ", oracle mismatches " +
               std::to_string(oracle_mismatch);
  }
  return o;
}

Verdict criterion7() {
  const auto rs = theory_results();
  const auto* m = find(rs, "m_tilde_nonnegative");
  const auto* k = find(rs, "kernel_psd");
  const auto* f = find(rs, "inverse_fourier");
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(-10 + 0.2 * i);
  const auto fc = theory::inverse_fourier_check(theory::BernoulliParams(0.8, 0.6), grid, 1e-6);
  Verdict o;
  o.pass = m && k && f && m->instances >= 1000 && k->instances >= 1000 && f->instances > 0 && m->failures == 0 &&
           k->failures == 0 && f->failures == 0 && fc.passed && fc.max_deviation <= 1e-6;
  if (m && k && f) {
    o.detail = "min m~ " + fmt("%.3g", m->worst_margin) + " over " + std::to_string(m->instances) +
               " parameter pairs, min eigenvalue " + fmt("%.3g", k->worst_margin) + " over " +
               std::to_string(k->instances) + " kernels, Fourier max deviation " + fmt("%.3g", f->worst_margin) +
               " over " + std::to_string(f->instances) + " instances, constant " + fmt("%.12f", fc.fitted_constant);
  }
  return o;
}

std::string cli_output(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return std::to_string(code) + "\n" + out.str();
}

Verdict criterion8() {
  const auto dir = std::filesystem::temp_directory_path() / ("crossgreed_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto data = (dir / "data.csv").string();
  {
    std::mt19937_64 rng(1008);
    std::ofstream f(data);
    f << "a,b,c,d,e,label\n";
    for (int r = 0; r < 300; ++r) {
      const int label = static_cast<int>(rng() % 2);
      for (int c = 0; c < 5; ++c) f << "v" << (rng() % (3 + c) + (label && c % 2 ? 1 : 0)) << ',';
      f << label << '\n';
    }
  }
  bool same = true;
  std::size_t runs = 0;
  for (const std::string mode : {"exact", "float"}) {
    for (const std::string method : {"greedy", "lazy", "exhaustive"}) {
      const std::vector<std::string> args{"search", "--dataset", data, "--k", "3", "--mode", mode,
                                          "--method", method, "--seed", "17"};
      same = same && cli_output(args) == cli_output(args);
      runs += 2;
    }
  }
  const std::vector<std::string> theory{"verify-theory", "--seed", "17", "--trials", "100"};
  const auto first = cli_output(theory);
  setenv("CROSSGREED_THREADS", "1", 1);
  same = same && cli_output(theory) == first;
  unsetenv("CROSSGREED_THREADS");
  runs += 2;
  std::filesystem::remove_all(dir);
  Verdict o;
  o.pass = same && first.rfind("0\n", 0) == 0;
  o.detail = std::to_string(runs) + " runs, outputs " + (same ? "byte-identical" : "differ");
  return o;
}

Verdict criterion9() {
  // 200 columns, vocabularies of 2..20 values; P0 is Zipf(1.5) over a random
  // ordering of the values and P1 ∝ P0 · lognormal(0, 0.5).
  std::mt19937_64 rng(1009);
  std::vector<ColumnModel<double>> models;
  std::lognormal_distribution<double> noise(0.0, 0.5);
  for (ColumnId a = 0; a < 200; ++a) {
    const std::size_t v = 2 + rng() % 19;
    std::vector<double> p0(v), p1(v);
    std::vector<std::size_t> rank(v);
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);
    for (std::size_t i = 0; i < v; ++i) p0[i] = std::pow(static_cast<double>(rank[i] + 1), -1.5);
    for (std::size_t i = 0; i < v; ++i) p1[i] = p0[i] * noise(rng);
    const double s0 = std::accumulate(p0.begin(), p0.end(), 0.0), s1 = std::accumulate(p1.begin(), p1.end(), 0.0);
    for (auto& x : p0) x /= s0;
    for (auto& x : p1) x /= s1;
    models.emplace_back(a, ConditionalPair<double>{FloatMeasure::from_masses(p0), FloatMeasure::from_masses(p1)});
  }
  NbOptions opts;
  opts.convolve.prune_eps = 1e-12;
  const NbObjective<double> nb(std::move(models), opts);
  const auto universe = nb.column_ids();
  Verdict o;
  const auto t0 = Clock::now();
  try {
    const auto r = lazy_greedy_select<double>(nb, universe, 10);
    const double secs = seconds_since(t0);
    const double bound = nb.f_error_bound(std::vector<ColumnId>(r.selected.begin(), r.selected.end())) / 2;
    o.pass = secs < 10 && bound < 1e-6 && r.selected.size() == 10;
    o.detail = fmt("%.2f s", secs) + ", auc error bound " + fmt("%.3g", bound) + ", " +
               std::to_string(r.selected.size()) + " columns, " + std::to_string(r.evaluations) + " evaluations";
  } catch (const CapacityError& e) {
    o.pass = false;
    o.detail = fmt("%.2f s", seconds_since(t0)) + ", stopped: " + e.what();
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"auc-tv identity", criterion1},      {"monotone submodular", criterion2}, {"greedy guarantee", criterion3},
      {"scorer optimality", criterion4},    {"hardness identities", criterion5}, {"bernoulli lemma", criterion6},
      {"bochner chain", criterion7},        {"determinism", criterion8},         {"performance", criterion9},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "criterion must be 1.." << criteria.size() << "\n";
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Verdict o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): "
              << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
