#include "crossgreed/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace crossgreed {

namespace {

template <class Scalar>
bool masses_match(const Scalar& a, const Scalar& b) {
  return ScalarTraits<Scalar>::equal(a, b);
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw CapacityError("product measure outcome count overflows");
  }
  return a * b;
}

}  // namespace

template <class Scalar>
Measure<Scalar>::Measure() : Measure({0}, {ScalarTraits<Scalar>::one()}) {}

template <class Scalar>
Measure<Scalar>::Measure(std::vector<Outcome> outcomes, std::vector<Scalar> masses)
    : outcomes_(std::move(outcomes)), masses_(std::move(masses)) {
  if (outcomes_.size() != masses_.size()) {
    throw ContractError("measure: outcome and mass counts differ");
  }
  if (outcomes_.empty()) {
    throw ContractError("measure: empty outcome set");
  }
  Scalar total = ScalarTraits<Scalar>::zero();
  index_.reserve(outcomes_.size());
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (masses_[i] < 0) {
      throw ContractError("measure: negative mass");
    }
    if (!index_.emplace(outcomes_[i], i).second) {
      throw ContractError("measure: duplicate outcome " + std::to_string(outcomes_[i]));
    }
    total += masses_[i];
  }
  if (!ScalarTraits<Scalar>::sums_to_one(total)) {
    std::ostringstream msg;
    msg << "measure: masses sum to " << ScalarTraits<Scalar>::to_string(total) << ", not 1";
    throw ContractError(msg.str());
  }
}

template <class Scalar>
Measure<Scalar> Measure<Scalar>::from_masses(std::vector<Scalar> masses) {
  std::vector<Outcome> outcomes(masses.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) outcomes[i] = i;
  return Measure(std::move(outcomes), std::move(masses));
}

template <class Scalar>
Measure<Scalar> Measure<Scalar>::point_mass(Outcome outcome) {
  return Measure({outcome}, {ScalarTraits<Scalar>::one()});
}

template <class Scalar>
Measure<Scalar> Measure<Scalar>::uniform(std::size_t n) {
  if (n == 0) throw ContractError("uniform measure on an empty set");
  Scalar each = ScalarTraits<Scalar>::one();
  each /= Scalar(static_cast<double>(n));
  std::vector<Scalar> masses(n, each);
  if constexpr (!ScalarTraits<Scalar>::kExact) {
    // keeps the float sum within tolerance for large n
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) rest -= masses[i];
    masses.back() = rest;
  }
  return from_masses(std::move(masses));
}

template <class Scalar>
std::optional<std::size_t> Measure<Scalar>::index_of(Outcome outcome) const {
  auto it = index_.find(outcome);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

template <class Scalar>
Scalar Measure<Scalar>::mass_of(Outcome outcome) const {
  auto idx = index_of(outcome);
  return idx ? masses_[*idx] : ScalarTraits<Scalar>::zero();
}

template <class Scalar>
bool Measure<Scalar>::same_outcome_set(const Measure& other) const {
  if (size() != other.size()) return false;
  if (outcomes_ == other.outcomes_) return true;
  return std::all_of(outcomes_.begin(), outcomes_.end(),
                     [&](Outcome o) { return other.index_.count(o) != 0; });
}

template <class Scalar>
Measure<Scalar> Measure<Scalar>::reordered(std::span<const Outcome> order) const {
  if (order.size() != size()) {
    throw DomainMismatchError("reorder: outcome count differs");
  }
  std::vector<Scalar> masses;
  masses.reserve(order.size());
  for (Outcome o : order) {
    auto idx = index_of(o);
    if (!idx) throw DomainMismatchError("reorder: unknown outcome " + std::to_string(o));
    masses.push_back(masses_[*idx]);
  }
  return Measure(std::vector<Outcome>(order.begin(), order.end()), std::move(masses));
}

template <class Scalar>
ProductMeasure<Scalar>::ProductMeasure(std::vector<Measure<Scalar>> factors)
    : factors_(std::move(factors)) {}

template <class Scalar>
std::size_t ProductMeasure<Scalar>::size() const {
  std::size_t n = 1;
  for (const auto& f : factors_) n = checked_mul(n, f.size());
  return n;
}

template <class Scalar>
void ProductMeasure<Scalar>::for_each(
    const std::function<void(std::span<const std::size_t>, const Scalar&)>& visit) const {
  const std::size_t depth = factors_.size();
  std::vector<std::size_t> pos(depth, 0);
  // prefix[d] is the product of the first d factor masses
  std::vector<Scalar> prefix(depth + 1, ScalarTraits<Scalar>::one());
  for (std::size_t d = 0; d < depth; ++d) prefix[d + 1] = prefix[d] * factors_[d].mass(0);
  while (true) {
    visit(pos, prefix[depth]);
    std::size_t d = depth;
    while (d > 0) {
      --d;
      if (++pos[d] < factors_[d].size()) break;
      pos[d] = 0;
      if (d == 0) return;
    }
    if (depth == 0) return;
    for (std::size_t e = d; e < depth; ++e) prefix[e + 1] = prefix[e] * factors_[e].mass(pos[e]);
  }
}

template <class Scalar>
Scalar ProductMeasure<Scalar>::mass_at(std::span<const std::size_t> positions) const {
  if (positions.size() != factors_.size()) {
    throw ContractError("product measure: tuple arity mismatch");
  }
  Scalar m = ScalarTraits<Scalar>::one();
  for (std::size_t d = 0; d < factors_.size(); ++d) m *= factors_[d].mass(positions[d]);
  return m;
}

template <class Scalar>
Measure<Scalar> ProductMeasure<Scalar>::materialize(std::size_t cap) const {
  const std::size_t n = size();
  if (n > cap) {
    throw CapacityError("product measure has " + std::to_string(n) +
                        " outcomes, above the cap of " + std::to_string(cap));
  }
  std::vector<Scalar> masses;
  masses.reserve(n);
  for_each([&](std::span<const std::size_t>, const Scalar& m) { masses.push_back(m); });
  return Measure<Scalar>::from_masses(std::move(masses));
}

Involution::Involution(std::unordered_map<Outcome, Outcome> mapping) : mapping_(std::move(mapping)) {
  for (const auto& [x, fx] : mapping_) {
    auto it = mapping_.find(fx);
    if (it == mapping_.end() || it->second != x) {
      throw ContractError("involution: f(f(" + std::to_string(x) + ")) != " + std::to_string(x));
    }
  }
}

Involution Involution::identity(std::span<const Outcome> outcomes) {
  std::unordered_map<Outcome, Outcome> m;
  for (Outcome o : outcomes) m.emplace(o, o);
  return Involution(std::move(m));
}

Involution Involution::swap(Outcome a, Outcome b) {
  return Involution({{a, b}, {b, a}});
}

Involution Involution::transpose(std::size_t n) {
  std::unordered_map<Outcome, Outcome> m;
  m.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m.emplace(i * n + j, j * n + i);
  }
  return Involution(std::move(m));
}

Involution Involution::product(const Involution& first, const Involution& second,
                               std::size_t inner_size) {
  std::unordered_map<Outcome, Outcome> m;
  for (const auto& [x, fx] : first.mapping_) {
    for (const auto& [y, gy] : second.mapping_) {
      if (y >= inner_size || gy >= inner_size) {
        throw ContractError("involution product: inner outcome outside 0..inner_size-1");
      }
      m.emplace(x * inner_size + y, fx * inner_size + gy);
    }
  }
  return Involution(std::move(m));
}

Outcome Involution::operator()(Outcome x) const {
  auto it = mapping_.find(x);
  return it == mapping_.end() ? x : it->second;
}

template <class Scalar>
Scalar tv_distance(const Measure<Scalar>& p, const Measure<Scalar>& q) {
  if (!p.same_outcome_set(q)) {
    throw DomainMismatchError("tv_distance: measures have different outcome sets");
  }
  Scalar sum = ScalarTraits<Scalar>::zero();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Scalar& qm = p.outcomes()[i] == q.outcomes()[i] ? q.mass(i) : q.mass(*q.index_of(p.outcome(i)));
    sum += ScalarTraits<Scalar>::abs(p.mass(i) - qm);
  }
  return sum / 2;
}

template <class Scalar>
Scalar tv_distance(const ProductMeasure<Scalar>& p, const ProductMeasure<Scalar>& q,
                   std::size_t cap) {
  if (p.factors().size() != q.factors().size()) {
    throw DomainMismatchError("tv_distance: products have different arity");
  }
  std::vector<Measure<Scalar>> aligned;
  aligned.reserve(q.factors().size());
  for (std::size_t d = 0; d < p.factors().size(); ++d) {
    const auto& pf = p.factors()[d];
    const auto& qf = q.factors()[d];
    if (!pf.same_outcome_set(qf)) {
      throw DomainMismatchError("tv_distance: product factor " + std::to_string(d) +
                                " has a different outcome set");
    }
    aligned.push_back(qf.reordered(pf.outcomes()));
  }
  ProductMeasure<Scalar> q_aligned(std::move(aligned));
  if (p.size() > cap) {
    throw CapacityError("tv_distance: product has " + std::to_string(p.size()) +
                        " outcomes, above the cap of " + std::to_string(cap));
  }
  Scalar sum = ScalarTraits<Scalar>::zero();
  p.for_each([&](std::span<const std::size_t> pos, const Scalar& pm) {
    sum += ScalarTraits<Scalar>::abs(pm - q_aligned.mass_at(pos));
  });
  return sum / 2;
}

template <class Scalar>
Scalar commutator_tv(const Measure<Scalar>& p, const Measure<Scalar>& q, std::size_t cap) {
  if (!p.same_outcome_set(q)) {
    throw DomainMismatchError("commutator_tv: measures have different outcome sets");
  }
  const std::size_t n = p.size();
  if (n > cap) {
    throw CapacityError("commutator_tv: " + std::to_string(n) + " outcomes exceed the cap of " +
                        std::to_string(cap) + "; use the score-distribution path instead");
  }
  const Measure<Scalar> qa = q.reordered(p.outcomes());
  // Outcomes with p = q = 0 contribute nothing and have no ratio.
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (!ScalarTraits<Scalar>::is_zero(p.mass(x)) || !ScalarTraits<Scalar>::is_zero(qa.mass(x))) order.push_back(x);
  }
  if constexpr (ScalarTraits<Scalar>::kExact) {
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return p.mass(x) * qa.mass(y) < p.mass(y) * qa.mass(x);
    });
  } else {
    std::vector<double> key(n);
    for (std::size_t x : order) key[x] = p.mass(x) / (p.mass(x) + qa.mass(x));
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });
  }
  // For x before y, p(x)q(y) ≤ q(x)p(y); the pair sum over x < y is the
  // whole commutator distance.
  Scalar sum = ScalarTraits<Scalar>::zero();
  Scalar p_before = ScalarTraits<Scalar>::zero();
  Scalar q_before = ScalarTraits<Scalar>::zero();
  for (std::size_t y : order) {
    sum += p.mass(y) * q_before - qa.mass(y) * p_before;
    p_before += p.mass(y);
    q_before += qa.mass(y);
  }
  if (sum < ScalarTraits<Scalar>::zero()) sum = ScalarTraits<Scalar>::zero();
  return sum;
}

template <class Scalar>
bool check_involution_equivalent(const Measure<Scalar>& p, const Measure<Scalar>& q,
                                 const Involution& f) {
  if (!p.same_outcome_set(q)) {
    throw DomainMismatchError("involution equivalence: measures have different outcome sets");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Outcome image = f(p.outcome(i));
    auto j = q.index_of(image);
    if (!j) {
      throw DomainMismatchError("involution maps " + std::to_string(p.outcome(i)) +
                                " outside the outcome set");
    }
    if (!masses_match(p.mass(i), q.mass(*j))) return false;
  }
  return true;
}

template <class Scalar>
bool swap_sum_check(const Measure<Scalar>& p, const Measure<Scalar>& q, const Involution& f,
                    const BivariateFunction& phi) {
  if (!p.same_outcome_set(q)) {
    throw DomainMismatchError("swap_sum_check: measures have different outcome sets");
  }
  double direct = 0.0;
  double through_f = 0.0;
  double swapped = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Outcome x = p.outcome(i);
    const double px = to_double(p.mass(i));
    const double qx = to_double(q.mass_of(x));
    direct += phi(px, qx);
    swapped += phi(qx, px);
    through_f += phi(to_double(q.mass_of(f(x))), to_double(p.mass_of(f(x))));
  }
  constexpr double kTol = 1e-10;
  return std::fabs(direct - swapped) <= kTol && std::fabs(direct - through_f) <= kTol;
}

#define CROSSGREED_INSTANTIATE_MEASURES(S)                                                  \
  template class Measure<S>;                                                                \
  template class ProductMeasure<S>;                                                         \
  template S tv_distance<S>(const Measure<S>&, const Measure<S>&);                          \
  template S tv_distance<S>(const ProductMeasure<S>&, const ProductMeasure<S>&, std::size_t); \
  template S commutator_tv<S>(const Measure<S>&, const Measure<S>&, std::size_t);           \
  template bool check_involution_equivalent<S>(const Measure<S>&, const Measure<S>&,        \
                                               const Involution&);                          \
  template bool swap_sum_check<S>(const Measure<S>&, const Measure<S>&, const Involution&,  \
                                  const BivariateFunction&);

CROSSGREED_INSTANTIATE_MEASURES(Rational)
CROSSGREED_INSTANTIATE_MEASURES(double)

}  // namespace crossgreed
