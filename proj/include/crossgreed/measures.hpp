#pragma once

// Finite discrete probability measures and the total variation machinery
// built on them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "crossgreed/errors.hpp"
#include "crossgreed/scalar.hpp"

namespace crossgreed {

// Opaque outcome identifier. Callers own the mapping from data values to
// outcomes; products encode tuples positionally (see ProductMeasure).
using Outcome = std::uint64_t;

// Probability measure on a finite, ordered outcome set. Scalar is Rational
// (masses sum to exactly 1) or double (sum within 1e-12). Immutable.
template <class Scalar>
class Measure {
 public:
  // Point mass on outcome 0.
  Measure();
  Measure(std::vector<Outcome> outcomes, std::vector<Scalar> masses);

  // Outcomes 0..masses.size()-1.
  static Measure from_masses(std::vector<Scalar> masses);
  static Measure point_mass(Outcome outcome);
  static Measure uniform(std::size_t n);

  std::size_t size() const { return outcomes_.size(); }
  std::span<const Outcome> outcomes() const { return outcomes_; }
  std::span<const Scalar> masses() const { return masses_; }
  Outcome outcome(std::size_t i) const { return outcomes_[i]; }
  const Scalar& mass(std::size_t i) const { return masses_[i]; }

  std::optional<std::size_t> index_of(Outcome outcome) const;
  // Zero for outcomes outside the outcome set.
  Scalar mass_of(Outcome outcome) const;

  bool same_outcome_set(const Measure& other) const;

  // The same measure with its outcomes listed in `order`, which must be a
  // permutation of this measure's outcome set.
  Measure reordered(std::span<const Outcome> order) const;

 private:
  std::vector<Outcome> outcomes_;
  std::vector<Scalar> masses_;
  std::unordered_map<Outcome, std::size_t> index_;
};

using ExactMeasure = Measure<Rational>;
using FloatMeasure = Measure<double>;

// Lazily enumerable product of measures. Tuple (i_0, ..., i_{n-1}) of factor
// positions is encoded as the mixed-radix integer i_0 * stride_0 + ... with the
// last factor varying fastest.
template <class Scalar>
class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<Measure<Scalar>> factors);

  std::span<const Measure<Scalar>> factors() const { return factors_; }
  // Number of outcome tuples; throws CapacityError on overflow.
  std::size_t size() const;

  // Calls visit(positions, mass) for every tuple, in encoding order.
  void for_each(const std::function<void(std::span<const std::size_t>, const Scalar&)>& visit) const;

  Scalar mass_at(std::span<const std::size_t> positions) const;

  // Dense measure over the positional encoding; throws CapacityError when
  // size() exceeds `cap`.
  Measure<Scalar> materialize(std::size_t cap = std::size_t{1} << 24) const;

 private:
  std::vector<Measure<Scalar>> factors_;
};

// Self-inverse bijection on a finite outcome set.
class Involution {
 public:
  // Throws ContractError unless f(f(x)) = x for every x and the map is a
  // bijection on its key set.
  explicit Involution(std::unordered_map<Outcome, Outcome> mapping);

  static Involution identity(std::span<const Outcome> outcomes);
  static Involution swap(Outcome a, Outcome b);
  // (i, j) -> (j, i) on the positional encoding of an n-by-n product.
  static Involution transpose(std::size_t n);
  // Applies `first` to the leading factor and `second` to the trailing factor
  // of a two-factor positional encoding whose trailing factor has `inner_size`
  // outcomes. Both involutions must act on positions 0..size-1.
  static Involution product(const Involution& first, const Involution& second,
                            std::size_t inner_size);

  // Outcomes not in the key set map to themselves.
  Outcome operator()(Outcome x) const;
  const std::unordered_map<Outcome, Outcome>& mapping() const { return mapping_; }

 private:
  std::unordered_map<Outcome, Outcome> mapping_;
};

inline constexpr std::size_t kDefaultCommutatorCap = 4096;

// ½ Σ |p(ω) − q(ω)|. Throws DomainMismatchError if outcome sets differ.
template <class Scalar>
Scalar tv_distance(const Measure<Scalar>& p, const Measure<Scalar>& q);

// Total variation between two products with factor-wise identical outcome
// sets, enumerated without materializing either product.
template <class Scalar>
Scalar tv_distance(const ProductMeasure<Scalar>& p, const ProductMeasure<Scalar>& q,
                   std::size_t cap = std::size_t{1} << 26);

// ½ Σ_{x,y} |p(x)q(y) − q(x)p(y)| = d_TV(p×q, q×p). Outcomes are sorted by
// p/q (cross-multiplied), which fixes the sign of every term and reduces the
// double sum to prefix sums. Throws CapacityError above `cap` outcomes.
template <class Scalar>
Scalar commutator_tv(const Measure<Scalar>& p, const Measure<Scalar>& q,
                     std::size_t cap = kDefaultCommutatorCap);

// p(x) = q(f(x)) for every x (exact equality, or within 1e-12 for doubles).
template <class Scalar>
bool check_involution_equivalent(const Measure<Scalar>& p, const Measure<Scalar>& q,
                                 const Involution& f);

using BivariateFunction = std::function<double(double, double)>;

// Σ φ(p(x), q(x)) == Σ φ(q(x), p(x)) within 1e-10. Test harness helper for the
// swapping property of involution-equivalent measures.
template <class Scalar>
bool swap_sum_check(const Measure<Scalar>& p, const Measure<Scalar>& q, const Involution& f,
                    const BivariateFunction& phi);

}  // namespace crossgreed
