#pragma once

// Feature-cross instances built from graphs, reducing densest-k-subgraph to
// maximum-AUC cross search. Every vertex becomes a ternary column over
// {0, 1, #}; a uniformly random edge gets two independent uniform bits on its
// endpoints, all other columns read '#', and the label is the XOR of the bits.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crossgreed/joint_eval.hpp"

namespace crossgreed {

class Graph {
 public:
  Graph() = default;
  // Validates the range and rejects self-loops; duplicate edges (in either
  // orientation) are collapsed.
  Graph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);

  // One "u v" pair per line, 0-indexed; blank lines and '#' comments ignored.
  // The vertex count is max index + 1 unless `n` is larger.
  static Graph parse_edge_list(std::istream& in, std::size_t n = 0);
  static Graph complete(std::size_t n);
  static Graph path(std::size_t n);
  static Graph star(std::size_t n);

  std::size_t vertex_count() const { return n_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  // Number of edges with both endpoints in `subset`.
  std::size_t induced_edges(std::span<const std::size_t> subset) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;  // u < v, sorted
};

// Value tokens of every hardness column.
inline constexpr std::uint32_t kBitZero = 0;
inline constexpr std::uint32_t kBitOne = 1;
inline constexpr std::uint32_t kHash = 2;
inline const std::vector<std::string> kHardVocabulary = {"0", "1", "#"};

struct HardInstance {
  ExactJointTable joint;
  Graph source_graph;
};

// Exact distribution: 4|E| rows of mass 1/(4|E|). Column ids are vertex ids.
HardInstance build_hard_instance(const Graph& g);

struct LabeledRows {
  std::vector<std::string> header;              // feature names then "label"
  std::vector<std::vector<std::uint32_t>> rows;  // value tokens per feature
  std::vector<int> labels;
};

// m_rows i.i.d. draws from the instance distribution; identical for a fixed
// seed.
LabeledRows sample_hard_dataset(const Graph& g, std::size_t m_rows, std::uint64_t seed);

// Comma-separated with a header row; tokens rendered via kHardVocabulary.
void write_csv(std::ostream& out, const LabeledRows& data);

// Weighted-rows dump of an exact instance: header "x0,...,label,mass" and one
// line per nonzero (tuple, label) with the mass as a reduced fraction.
void write_weighted_rows(std::ostream& out, const HardInstance& instance);

// Two independent draws each land inside S with probability φ, and the pair is
// ranked at random only when both miss, so 2·auc*(S) − 1 = 1 − (1 − φ)². φ is
// the normalized accuracy 2·Pr[match label] − 1 instead.
struct ReductionRecord {
  Rational phi;                 // induced edges / |E|
  Rational normalized_auc;      // 2·auc*(S) − 1
  Rational predicted_auc;       // 1 − (1 − φ)²
  double mi = 0.0;              // I(X_S; C) in bits
  bool auc_matches = false;     // normalized_auc == phi
  bool auc_matches_predicted = false;
  bool mi_matches = false;      // within kMiTolerance
};

inline constexpr double kMiTolerance = 1e-12;

ReductionRecord verify_reduction(const Graph& g, std::span<const std::size_t> subset,
                                 const JointOptions& options = {});

// Whether Pr[X_A | C] factorizes over the columns of A for both labels.
bool is_conditionally_independent(const ExactJointTable& table, std::span<const ColumnId> set,
                                  const JointOptions& options = {});

}  // namespace crossgreed
