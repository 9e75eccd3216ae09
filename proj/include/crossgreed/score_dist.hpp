#pragma once

// Law of the log-likelihood-ratio score under both label-conditional
// measures. Under conditional independence the score of a feature cross is the
// sum of per-column scores, so the law of the cross is the convolution of the
// per-column laws.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crossgreed/measures.hpp"

namespace crossgreed {

enum class ScoreKind : std::uint8_t { NegInf, Finite, PosInf };

// Score on the extended real line. In exact mode a finite score is carried as
// the likelihood ratio P1/P0 itself (a positive rational, compared exactly); in
// float mode it is the natural log of that ratio.
template <class Scalar>
struct ExtendedScore {
  ScoreKind kind = ScoreKind::Finite;
  // Exact: ratio (> 0). Float: log ratio. Ignored for infinite kinds.
  Scalar value = ScoreIdentity();

  static Scalar ScoreIdentity() {
    if constexpr (ScalarTraits<Scalar>::kExact) {
      return Scalar(1);
    } else {
      return Scalar(0);
    }
  }

  static ExtendedScore neg_inf() { return {ScoreKind::NegInf, ScoreIdentity()}; }
  static ExtendedScore pos_inf() { return {ScoreKind::PosInf, ScoreIdentity()}; }
  static ExtendedScore zero() { return {ScoreKind::Finite, ScoreIdentity()}; }

  // Score of an outcome with masses w1 under P1 and w0 under P0; not both zero.
  static ExtendedScore from_masses(const Scalar& w1, const Scalar& w0);

  // Natural-log value (±infinity for the infinite kinds).
  double log_value() const;
};

// Extended-real addition. +inf ⊕ -inf is canonically finite 0; such atoms always
// carry zero mass and are discarded by convolve.
template <class Scalar>
ExtendedScore<Scalar> operator+(const ExtendedScore<Scalar>& a, const ExtendedScore<Scalar>& b);

// -1, 0, 1. NegInf < Finite < PosInf; finite exact scores compare as rationals,
// float scores by log value.
template <class Scalar>
int compare(const ExtendedScore<Scalar>& a, const ExtendedScore<Scalar>& b);

template <class Scalar>
struct ScoreAtom {
  ExtendedScore<Scalar> score;
  Scalar w1;  // mass under P1
  Scalar w0;  // mass under P0
};

struct ConvolveOptions {
  // Float mode: atoms with both masses below this are dropped after merging,
  // and the dropped mass is accumulated. Zero disables pruning.
  double prune_eps = 0.0;
  std::size_t atom_cap = 2'000'000;
};

// Float scores closer than this are merged into a single atom.
inline constexpr double kFloatScoreGrid = 1e-9;

// Atoms sorted ascending by score with unique keys. In float mode the pruned
// accumulators bound the mass discarded by convolve; the exact mode never
// prunes.
template <class Scalar>
class ScoreDistribution {
 public:
  // Single atom at score 0 with both masses 1 (identity of convolve).
  ScoreDistribution();
  // Validates sortedness, key uniqueness and mass totals.
  ScoreDistribution(std::vector<ScoreAtom<Scalar>> atoms, double pruned_w1 = 0.0,
                    double pruned_w0 = 0.0);

  const std::vector<ScoreAtom<Scalar>>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double pruned_w1() const { return pruned_w1_; }
  double pruned_w0() const { return pruned_w0_; }
  bool complete() const { return pruned_w1_ == 0.0 && pruned_w0_ == 0.0; }

 private:
  std::vector<ScoreAtom<Scalar>> atoms_;
  double pruned_w1_ = 0.0;
  double pruned_w0_ = 0.0;
};

template <class Scalar>
ScoreDistribution<Scalar> from_conditional_pair(const Measure<Scalar>& p1, const Measure<Scalar>& p0);

// Throws CapacityError when the merged result would exceed options.atom_cap.
template <class Scalar>
ScoreDistribution<Scalar> convolve(const ScoreDistribution<Scalar>& a,
                                   const ScoreDistribution<Scalar>& b,
                                   const ConvolveOptions& options = {});

// Σ_{s>t} w1(s)·w0(t) + ½ Σ_s w1(s)·w0(s). With pruning the exact value lies in
// [result, result + auc_error_bound(d)].
template <class Scalar>
Scalar auc_from_scores(const ScoreDistribution<Scalar>& d);

template <class Scalar>
double auc_error_bound(const ScoreDistribution<Scalar>& d) {
  return d.pruned_w1() + d.pruned_w0();
}

// 2·auc − 1.
template <class Scalar>
Scalar f_value_from_scores(const ScoreDistribution<Scalar>& d);

}  // namespace crossgreed
