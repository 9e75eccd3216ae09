#include "crossgreed/hardgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace crossgreed {

namespace {

// Unbiased draw from [0, n) using raw engine output only, so samples do not
// depend on the standard library's distribution implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::vector<ColumnId> as_columns(std::span<const std::size_t> subset) {
  std::vector<ColumnId> out;
  out.reserve(subset.size());
  for (std::size_t v : subset) out.push_back(static_cast<ColumnId>(v));
  return out;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) : n_(n) {
  std::set<std::pair<std::size_t, std::size_t>> unique;
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw ContractError("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                          ") outside vertex range 0.." + std::to_string(n));
    }
    if (u == v) throw ContractError("graph: self-loop on vertex " + std::to_string(u));
    unique.emplace(std::min(u, v), std::max(u, v));
  }
  edges_.assign(unique.begin(), unique.end());
}

Graph Graph::parse_edge_list(std::istream& in, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_vertex = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long u = -1, v = -1;
    std::string extra;
    if (!(fields >> u >> v) || (fields >> extra) || u < 0 || v < 0) {
      throw ParseError("edge list line " + std::to_string(line_no) + ": expected two vertex indices, got '" +
                       line + "'");
    }
    edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    max_vertex = std::max({max_vertex, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
    any = true;
  }
  const std::size_t count = std::max(n, any ? max_vertex + 1 : 0);
  try {
    return Graph(count, std::move(edges));
  } catch (const ContractError& e) {
    throw ParseError(e.what());
  }
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Graph(n, std::move(e));
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return Graph(n, std::move(e));
}

Graph Graph::star(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t v = 1; v < n; ++v) e.emplace_back(0, v);
  return Graph(n, std::move(e));
}

std::size_t Graph::induced_edges(std::span<const std::size_t> subset) const {
  std::vector<bool> in(n_, false);
  for (std::size_t v : subset) {
    if (v >= n_) throw ContractError("vertex " + std::to_string(v) + " outside the graph");
    in[v] = true;
  }
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [&](const auto& e) { return in[e.first] && in[e.second]; }));
}

HardInstance build_hard_instance(const Graph& g) {
  if (g.edges().empty()) throw ContractError("hard instance needs at least one edge");
  std::vector<JointColumn> columns;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    columns.push_back({static_cast<ColumnId>(v), kHardVocabulary});
  }
  const Rational mass(1, 4 * static_cast<unsigned long>(g.edges().size()));
  std::map<ValueTuple, ExactJointTable::LabelMasses> rows;
  for (auto [u, v] : g.edges()) {
    for (std::uint32_t bu = 0; bu < 2; ++bu) {
      for (std::uint32_t bv = 0; bv < 2; ++bv) {
        ValueTuple t(g.vertex_count(), kHash);
        t[u] = bu;
        t[v] = bv;
        auto& cell = rows.try_emplace(std::move(t), ExactJointTable::LabelMasses{Rational(0), Rational(0)})
                         .first->second;
        cell[bu ^ bv] += mass;
      }
    }
  }
  return {ExactJointTable(std::move(columns), std::move(rows)), g};
}

LabeledRows sample_hard_dataset(const Graph& g, std::size_t m_rows, std::uint64_t seed) {
  if (g.edges().empty()) throw ContractError("hard instance needs at least one edge");
  if (m_rows == 0) throw ContractError("sample size must be at least 1");
  LabeledRows out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) out.header.push_back("x" + std::to_string(v));
  out.header.push_back("label");
  std::mt19937_64 rng(seed);
  out.rows.reserve(m_rows);
  out.labels.reserve(m_rows);
  for (std::size_t i = 0; i < m_rows; ++i) {
    const auto& [u, v] = g.edges()[uniform_below(rng, g.edges().size())];
    const std::uint64_t bits = rng();
    const std::uint32_t bu = bits & 1u;
    const std::uint32_t bv = (bits >> 1) & 1u;
    std::vector<std::uint32_t> row(g.vertex_count(), kHash);
    row[u] = bu;
    row[v] = bv;
    out.rows.push_back(std::move(row));
    out.labels.push_back(static_cast<int>(bu ^ bv));
  }
  return out;
}

void write_csv(std::ostream& out, const LabeledRows& data) {
  for (std::size_t i = 0; i < data.header.size(); ++i) out << (i ? "," : "") << data.header[i];
  out << '\n';
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    for (std::uint32_t token : data.rows[r]) out << kHardVocabulary[token] << ',';
    out << data.labels[r] << '\n';
  }
}

void write_weighted_rows(std::ostream& out, const HardInstance& instance) {
  const auto& cols = instance.joint.columns();
  for (const auto& c : cols) out << 'x' << c.id << ',';
  out << "label,mass\n";
  for (const auto& [tuple, masses] : instance.joint.rows()) {
    for (int label = 0; label < 2; ++label) {
      if (sgn(masses[label]) == 0) continue;
      for (std::size_t i = 0; i < tuple.size(); ++i) out << cols[i].vocabulary[tuple[i]] << ',';
      out << label << ',' << masses[label].get_str() << '\n';
    }
  }
}

ReductionRecord verify_reduction(const Graph& g, std::span<const std::size_t> subset,
                                 const JointOptions& options) {
  const auto instance = build_hard_instance(g);
  const auto set = as_columns(subset);
  ReductionRecord rec;
  rec.phi = Rational(static_cast<unsigned long>(g.induced_edges(subset)),
                     static_cast<unsigned long>(g.edges().size()));
  rec.phi.canonicalize();
  rec.normalized_auc = auc_star_joint(instance.joint, set, options) * 2 - 1;
  rec.mi = mutual_information(instance.joint, set, options);
  rec.predicted_auc = 1 - (1 - rec.phi) * (1 - rec.phi);
  rec.auc_matches = rec.normalized_auc == rec.phi;
  rec.auc_matches_predicted = rec.normalized_auc == rec.predicted_auc;
  rec.mi_matches = std::fabs(rec.mi - rec.phi.get_d()) <= kMiTolerance;
  return rec;
}

bool is_conditionally_independent(const ExactJointTable& table, std::span<const ColumnId> set,
                                  const JointOptions& options) {
  return sgn(assumption_gap(table, set, options)) == 0;
}

}  // namespace crossgreed
