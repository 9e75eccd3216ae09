#pragma once

// Feature-cross objective under the naive Bayes factorization:
// F(A) = d_TV(P1^A × P0^A, P0^A × P1^A) = 2·auc*(A) − 1, evaluated through
// convolutions of cached per-column score distributions.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crossgreed/measures.hpp"
#include "crossgreed/score_dist.hpp"
#include "crossgreed/set_function.hpp"

namespace crossgreed {

// Label-conditional measures of one column on a shared vocabulary.
template <class Scalar>
struct ConditionalPair {
  Measure<Scalar> p0;
  Measure<Scalar> p1;
};

template <class Scalar>
class ColumnModel {
 public:
  ColumnModel(ColumnId id, ConditionalPair<Scalar> pair, std::vector<std::string> vocabulary = {});

  ColumnId id() const { return id_; }
  const ConditionalPair<Scalar>& pair() const { return pair_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const ScoreDistribution<Scalar>& score_distribution() const { return scores_; }

 private:
  ColumnId id_;
  ConditionalPair<Scalar> pair_;
  std::vector<std::string> vocabulary_;
  ScoreDistribution<Scalar> scores_;
};

struct NbOptions {
  ConvolveOptions convolve;
  // Pair budget |V_A|² for the brute-force oracle.
  std::uint64_t exact_pair_cap = 10'000'000;
};

template <class Scalar>
class NbObjective final : public SetFunction<Scalar> {
 public:
  explicit NbObjective(std::vector<ColumnModel<Scalar>> columns, NbOptions options = {});

  // F(A); F(∅) = 0. Counts one evaluation. Throws ContractError on unknown ids.
  Scalar f_of(std::span<const ColumnId> set) const;
  // ½ + ½·F(A).
  Scalar auc_star(std::span<const ColumnId> set) const;
  // Upper bound on |F_exact(A) − f_of(A)| caused by pruning (0 when exact).
  double f_error_bound(std::span<const ColumnId> set) const;

  // Score law of the cross over `set` (no evaluation counted).
  ScoreDistribution<Scalar> score_distribution(std::span<const ColumnId> set) const;

  Scalar evaluate(std::span<const ColumnId> set) const override { return f_of(set); }
  std::function<Scalar(ColumnId)> extension(std::span<const ColumnId> base) const override;
  bool guarantees_submodularity() const override { return true; }

  std::vector<ColumnId> column_ids() const;
  const ColumnModel<Scalar>& column(ColumnId id) const;
  const NbOptions& options() const { return options_; }
  std::uint64_t evaluations() const { return evaluations_.load(std::memory_order_relaxed); }

 private:
  std::map<ColumnId, ColumnModel<Scalar>> columns_;
  NbOptions options_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

// Brute-force oracle: materializes P_i^A = ⨉ P_i^a and returns
// ½ + ½·commutator_tv(P1^A, P0^A). Throws CapacityError above the pair cap.
Rational auc_star_exact(const NbObjective<Rational>& objective, std::span<const ColumnId> set);

}  // namespace crossgreed
