#pragma once

// Exact evaluation on an arbitrary joint distribution of (X_U, C) by explicit
// enumeration. No conditional independence is assumed; every operation is
// guarded by a cap on |V_A|².

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crossgreed/measures.hpp"
#include "crossgreed/nb_model.hpp"
#include "crossgreed/set_function.hpp"

namespace crossgreed {

struct JointColumn {
  ColumnId id;
  // Value tokens are positions in this list.
  std::vector<std::string> vocabulary;
};

using ValueTuple = std::vector<std::uint32_t>;

struct JointOptions {
  // Budget on |V_A|² (support size squared) for pairwise enumerations, and on
  // |V_A| for full-product enumerations.
  std::uint64_t pair_cap = 10'000'000;
};

// Sparse joint table: only tuples with nonzero mass are stored.
template <class Scalar>
class JointTable {
 public:
  // Mass of a value tuple jointly with label 0 and label 1.
  using LabelMasses = std::array<Scalar, 2>;

  JointTable(std::vector<JointColumn> columns, std::map<ValueTuple, LabelMasses> rows);

  const std::vector<JointColumn>& columns() const { return columns_; }
  const std::map<ValueTuple, LabelMasses>& rows() const { return rows_; }
  const Scalar& label_marginal(int label) const { return marginals_.at(label); }

  std::size_t position_of(ColumnId id) const;
  // Table positions of `set`, ordered by column id. Throws on unknown ids.
  std::vector<std::size_t> positions_of(std::span<const ColumnId> set) const;

  // Mixed-radix code of the tuple restricted to `positions` (last varies fastest).
  Outcome encode(const ValueTuple& row, std::span<const std::size_t> positions) const;
  ValueTuple decode(Outcome code, std::span<const std::size_t> positions) const;

 private:
  std::vector<JointColumn> columns_;
  std::map<ValueTuple, LabelMasses> rows_;
  std::array<Scalar, 2> marginals_;
};

using ExactJointTable = JointTable<Rational>;

// Joint masses of X_A and C on the support of X_A (outcomes ascending by code).
template <class Scalar>
struct Projection {
  std::vector<Outcome> outcomes;
  std::vector<Scalar> mass0;
  std::vector<Scalar> mass1;
};

template <class Scalar>
Projection<Scalar> project(const JointTable<Scalar>& table, std::span<const ColumnId> set);

// Pr[X_A | C = label] on the support of X_A (shared by both labels). Throws
// ContractError when Pr[C = label] = 0.
template <class Scalar>
Measure<Scalar> conditional_measure(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                                    int label);

// ½ + ½·d_TV(P1^A × P0^A, P0^A × P1^A).
template <class Scalar>
Scalar auc_star_joint(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                      const JointOptions& options = {});

// I(X_A; C) in bits.
template <class Scalar>
double mutual_information(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                          const JointOptions& options = {});

// Score for every value of V_A, keyed by its code under encode(); ±infinity
// allowed.
using Scorer = std::map<Outcome, double>;

// AUC of an arbitrary scorer by the double sum over V_A × V_A. Every support
// value must be scored.
template <class Scalar>
Scalar auc_of_scorer(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                     const Scorer& scorer, const JointOptions& options = {});

// log(P1^A(x) / P0^A(x)) on the support, ±infinity where one side vanishes.
template <class Scalar>
Scorer log_likelihood_scorer(const JointTable<Scalar>& table, std::span<const ColumnId> set);

// max over x in the full product V_A and label i of
// |Pr[x | C=i] − Π_a Pr[x_a | C=i]|. Zero for |A| ≤ 1.
template <class Scalar>
Scalar assumption_gap(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                      const JointOptions& options = {});

// Exact product joint Pr[x, c] = Pr[c]·Π_a P_c^a(x_a). Column a gets id
// ids[a] and vocabulary tokens in the order of pairs[a].p1.
template <class Scalar>
JointTable<Scalar> naive_bayes_joint(std::span<const ConditionalPair<Scalar>> pairs,
                                     std::span<const ColumnId> ids, const Scalar& prior1,
                                     std::uint64_t cell_cap = 10'000'000);

// 2·auc_star_joint(A) − 1 as a set function (no approximation guarantee).
template <class Scalar>
class JointObjective final : public SetFunction<Scalar> {
 public:
  JointObjective(const JointTable<Scalar>& table, JointOptions options = {})
      : table_(table), options_(options) {}
  Scalar evaluate(std::span<const ColumnId> set) const override {
    Scalar auc = auc_star_joint(table_, set, options_);
    return auc * 2 - 1;
  }

 private:
  const JointTable<Scalar>& table_;
  JointOptions options_;
};

}  // namespace crossgreed
