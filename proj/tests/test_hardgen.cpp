#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crossgreed/hardgen.hpp"
#include "support/oracles.hpp"

using namespace crossgreed;
using oracle::Q;

namespace {

// Empirical joint table of the sampled rows.
ExactJointTable empirical(const LabeledRows& data) {
  std::vector<JointColumn> cols;
  for (std::size_t v = 0; v + 1 < data.header.size(); ++v) cols.push_back({static_cast<ColumnId>(v), kHardVocabulary});
  std::map<ValueTuple, ExactJointTable::LabelMasses> rows;
  const Rational w(1, static_cast<unsigned long>(data.rows.size()));
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    auto& cell = rows.try_emplace(data.rows[r], ExactJointTable::LabelMasses{Rational(0), Rational(0)}).first->second;
    cell[data.labels[r]] += w;
  }
  return ExactJointTable(cols, rows);
}

Graph random_graph(oracle::Rng& rng, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  while (e.empty()) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng.below(2)) e.emplace_back(u, v);
  }
  return Graph(n, e);
}

}  // namespace

TEST_CASE("graph construction and parsing") {
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), ContractError);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), ContractError);
  const Graph dup(3, {{0, 1}, {1, 0}, {2, 1}});
  CHECK(dup.edges().size() == 2);
  CHECK(Graph::complete(4).edges().size() == 6);
  CHECK(Graph::path(4).edges().size() == 3);
  CHECK(Graph::star(5).edges().size() == 4);

  std::istringstream in("# triangle\n0 1\n\n1 2\n  2 0\n");
  const Graph tri = Graph::parse_edge_list(in);
  CHECK(tri.vertex_count() == 3);
  CHECK(tri.edges().size() == 3);
  std::istringstream padded("0 1\n");
  CHECK(Graph::parse_edge_list(padded, 6).vertex_count() == 6);

  std::istringstream bad("0 1\n1 x\n");
  try {
    Graph::parse_edge_list(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream loop("2 2\n");
  CHECK_THROWS_AS(Graph::parse_edge_list(loop), ParseError);
  std::istringstream three("0 1 2\n");
  CHECK_THROWS_AS(Graph::parse_edge_list(three), ParseError);
}

TEST_CASE("single edge") {
  const Graph g(2, {{0, 1}});
  const auto inst = build_hard_instance(g);
  CHECK(inst.joint.rows().size() == 4);
  const std::vector<std::size_t> both{0, 1}, one{0};
  const auto r = verify_reduction(g, both);
  CHECK(r.phi == 1);
  CHECK(r.normalized_auc == 1);
  CHECK(r.predicted_auc == 1);
  CHECK(r.mi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.auc_matches);
  CHECK(r.mi_matches);
  const auto r1 = verify_reduction(g, one);
  CHECK(r1.phi == 0);
  CHECK(r1.normalized_auc == 0);
  CHECK(r1.mi_matches);

  std::ostringstream out;
  write_weighted_rows(out, inst);
  CHECK(out.str() == "x0,x1,label,mass\n0,0,0,1/4\n0,1,1,1/4\n1,0,1,1/4\n1,1,0,1/4\n");
  CHECK_THROWS_AS(build_hard_instance(Graph(3, {})), ContractError);
}

TEST_CASE("triangle values") {
  const Graph k3 = Graph::complete(3);
  const auto inst = build_hard_instance(k3);
  CHECK(inst.joint.rows().size() == 12);
  for (const auto& [t, m] : inst.joint.rows()) CHECK(m[0] + m[1] == Q(1, 12));
  const std::vector<std::size_t> edge{0, 1}, all{0, 1, 2};
  const auto r = verify_reduction(k3, edge);
  CHECK(r.phi == Q(1, 3));
  // Ties happen only when neither draw lands on edge (0, 1): 1 − (2/3)².
  CHECK(r.normalized_auc == Q(5, 9));
  CHECK(auc_star_joint(inst.joint, std::vector<ColumnId>{0, 1}) == Q(7, 9));
  CHECK(r.predicted_auc == Q(5, 9));
  CHECK(r.auc_matches_predicted);
  CHECK_FALSE(r.auc_matches);
  CHECK(r.mi == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(r.mi_matches);
  CHECK(verify_reduction(k3, all).normalized_auc == 1);
  // Crossing the features breaks conditional independence.
  CHECK_FALSE(is_conditionally_independent(inst.joint, std::vector<ColumnId>{0, 1}));
  CHECK(is_conditionally_independent(inst.joint, std::vector<ColumnId>{2}));
}

TEST_CASE("reduction identities on small graphs") {
  oracle::Rng rng(51);
  std::vector<Graph> graphs{Graph::complete(4), Graph::path(6), Graph::star(5)};
  for (int i = 0; i < 8; ++i) graphs.push_back(random_graph(rng, 3 + rng.below(4)));
  for (const auto& g : graphs) {
    std::vector<std::pair<std::size_t, std::size_t>> e(g.edges().begin(), g.edges().end());
    for (const auto& s : oracle::subsets(g.vertex_count())) {
      if (s.size() > 4) continue;
      const std::vector<std::size_t> sub(s.begin(), s.end());
      const auto r = verify_reduction(g, sub);
      CHECK(r.phi == Q(static_cast<long>(oracle::induced_edges(g.vertex_count(), e, sub)),
                       static_cast<long>(e.size())));
      CHECK(r.auc_matches_predicted);
      CHECK(r.auc_matches == (r.phi == 0 || r.phi == 1));
      CHECK(r.mi_matches);
    }
  }
}

TEST_CASE("sampling") {
  const Graph k3 = Graph::complete(3);
  const auto a = sample_hard_dataset(k3, 200, 7);
  const auto b = sample_hard_dataset(k3, 200, 7);
  const auto c = sample_hard_dataset(k3, 200, 8);
  CHECK(a.rows == b.rows);
  CHECK(a.labels == b.labels);
  CHECK((a.rows != c.rows || a.labels != c.labels));
  CHECK(a.header == std::vector<std::string>{"x0", "x1", "x2", "label"});
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    std::size_t hashes = 0, ones = 0;
    for (auto t : a.rows[r]) {
      hashes += t == kHash;
      ones += t == kBitOne;
    }
    CHECK(hashes == 1);
    CHECK(static_cast<int>(ones % 2) == a.labels[r]);
  }
  std::ostringstream csv;
  write_csv(csv, sample_hard_dataset(Graph(2, {{0, 1}}), 3, 1));
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x0,x1,label");
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 3);
  CHECK_THROWS_AS(sample_hard_dataset(k3, 0, 1), ContractError);
}

TEST_CASE("sampled instance converges to the exact values") {
  const Graph g = Graph::complete(4);
  const auto data = sample_hard_dataset(g, 100000, 2024);
  const auto table = empirical(data);
  const auto exact = build_hard_instance(g);
  const std::vector<ColumnId> edge{0, 1}, tri{0, 1, 2};
  const double f_edge = Rational(auc_star_joint(table, edge) * 2 - 1).get_d();
  const double f_tri = Rational(auc_star_joint(table, tri) * 2 - 1).get_d();
  CHECK(std::fabs(f_edge - Rational(auc_star_joint(exact.joint, edge) * 2 - 1).get_d()) <= 0.02);
  CHECK(std::fabs(f_tri - Rational(auc_star_joint(exact.joint, tri) * 2 - 1).get_d()) <= 0.02);
  CHECK(std::fabs(mutual_information(table, edge) - mutual_information(exact.joint, edge)) <= 0.02);
}
