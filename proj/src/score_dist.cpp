#include "crossgreed/score_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace crossgreed {

template <class Scalar>
ExtendedScore<Scalar> ExtendedScore<Scalar>::from_masses(const Scalar& w1, const Scalar& w0) {
  const bool z1 = ScalarTraits<Scalar>::is_zero(w1);
  const bool z0 = ScalarTraits<Scalar>::is_zero(w0);
  if (z1 && z0) throw ContractError("score of an outcome with zero mass under both labels");
  if (z0) return pos_inf();
  if (z1) return neg_inf();
  if constexpr (ScalarTraits<Scalar>::kExact) {
    return {ScoreKind::Finite, Scalar(w1 / w0)};
  } else {
    return {ScoreKind::Finite, std::log(w1 / w0)};
  }
}

template <class Scalar>
double ExtendedScore<Scalar>::log_value() const {
  switch (kind) {
    case ScoreKind::NegInf:
      return -std::numeric_limits<double>::infinity();
    case ScoreKind::PosInf:
      return std::numeric_limits<double>::infinity();
    case ScoreKind::Finite:
      break;
  }
  if constexpr (ScalarTraits<Scalar>::kExact) {
    return std::log(value.get_d());
  } else {
    return value;
  }
}

template <class Scalar>
ExtendedScore<Scalar> operator+(const ExtendedScore<Scalar>& a, const ExtendedScore<Scalar>& b) {
  using E = ExtendedScore<Scalar>;
  if (a.kind == ScoreKind::Finite && b.kind == ScoreKind::Finite) {
    if constexpr (ScalarTraits<Scalar>::kExact) {
      return {ScoreKind::Finite, Scalar(a.value * b.value)};
    } else {
      return {ScoreKind::Finite, a.value + b.value};
    }
  }
  const bool has_pos = a.kind == ScoreKind::PosInf || b.kind == ScoreKind::PosInf;
  const bool has_neg = a.kind == ScoreKind::NegInf || b.kind == ScoreKind::NegInf;
  if (has_pos && has_neg) return E::zero();
  return has_pos ? E::pos_inf() : E::neg_inf();
}

template <class Scalar>
int compare(const ExtendedScore<Scalar>& a, const ExtendedScore<Scalar>& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind != ScoreKind::Finite) return 0;
  if constexpr (ScalarTraits<Scalar>::kExact) {
    return cmp(a.value, b.value) < 0 ? -1 : (cmp(a.value, b.value) > 0 ? 1 : 0);
  } else {
    return a.value < b.value ? -1 : (a.value > b.value ? 1 : 0);
  }
}

namespace {

// Whether `next` (>= anchor in sort order) joins the atom keyed by `anchor`.
template <class Scalar>
bool same_key(const ExtendedScore<Scalar>& anchor, const ExtendedScore<Scalar>& next) {
  if (anchor.kind != next.kind) return false;
  if (anchor.kind != ScoreKind::Finite) return true;
  if constexpr (ScalarTraits<Scalar>::kExact) {
    return anchor.value == next.value;
  } else {
    return next.value - anchor.value <= kFloatScoreGrid;
  }
}

template <class Scalar>
long double mass_total(const std::vector<ScoreAtom<Scalar>>& atoms, bool positive) {
  long double total = 0.0L;
  for (const auto& a : atoms) total += to_double(positive ? a.w1 : a.w0);
  return total;
}

// Accumulates a sorted stream of atoms, merging equal keys and pruning small
// merged atoms.
template <class Scalar>
class AtomSink {
 public:
  AtomSink(const ConvolveOptions& options) : options_(options) {}

  void push(const ExtendedScore<Scalar>& score, const Scalar& w1, const Scalar& w0) {
    if (ScalarTraits<Scalar>::is_zero(w1) && ScalarTraits<Scalar>::is_zero(w0)) return;
    if (has_open_ && same_key(open_.score, score)) {
      open_.w1 += w1;
      open_.w0 += w0;
      return;
    }
    flush();
    open_ = {score, w1, w0};
    has_open_ = true;
  }

  std::vector<ScoreAtom<Scalar>> finish() {
    flush();
    return std::move(out_);
  }

  double dropped_w1() const { return dropped_w1_; }
  double dropped_w0() const { return dropped_w0_; }

 private:
  void flush() {
    if (!has_open_) return;
    has_open_ = false;
    if constexpr (!ScalarTraits<Scalar>::kExact) {
      if (options_.prune_eps > 0.0 && open_.w1 < options_.prune_eps &&
          open_.w0 < options_.prune_eps) {
        dropped_w1_ += open_.w1;
        dropped_w0_ += open_.w0;
        return;
      }
    }
    if (out_.size() >= options_.atom_cap) {
      throw CapacityError("score distribution exceeds the atom cap of " +
                          std::to_string(options_.atom_cap));
    }
    out_.push_back(std::move(open_));
  }

  const ConvolveOptions& options_;
  std::vector<ScoreAtom<Scalar>> out_;
  ScoreAtom<Scalar> open_{};
  bool has_open_ = false;
  double dropped_w1_ = 0.0;
  double dropped_w0_ = 0.0;
};

}  // namespace

template <class Scalar>
ScoreDistribution<Scalar>::ScoreDistribution()
    : atoms_{{ExtendedScore<Scalar>::zero(), ScalarTraits<Scalar>::one(), ScalarTraits<Scalar>::one()}} {}

template <class Scalar>
ScoreDistribution<Scalar>::ScoreDistribution(std::vector<ScoreAtom<Scalar>> atoms, double pruned_w1,
                                             double pruned_w0)
    : atoms_(std::move(atoms)), pruned_w1_(pruned_w1), pruned_w0_(pruned_w0) {
  if (pruned_w1_ < 0.0 || pruned_w0_ < 0.0) {
    throw ContractError("score distribution: negative pruned mass");
  }
  if constexpr (ScalarTraits<Scalar>::kExact) {
    if (!complete()) throw ContractError("score distribution: exact mode cannot carry pruned mass");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (a.w1 < 0 || a.w0 < 0) throw ContractError("score distribution: negative atom mass");
    if (ScalarTraits<Scalar>::is_zero(a.w1) && ScalarTraits<Scalar>::is_zero(a.w0)) {
      throw ContractError("score distribution: atom with zero mass under both labels");
    }
    if (a.score.kind == ScoreKind::PosInf && !ScalarTraits<Scalar>::is_zero(a.w0)) {
      throw ContractError("score distribution: +inf atom with P0 mass");
    }
    if (a.score.kind == ScoreKind::NegInf && !ScalarTraits<Scalar>::is_zero(a.w1)) {
      throw ContractError("score distribution: -inf atom with P1 mass");
    }
    if (i > 0 && compare(atoms_[i - 1].score, a.score) >= 0) {
      throw ContractError("score distribution: atoms not strictly sorted by score");
    }
  }
  if constexpr (ScalarTraits<Scalar>::kExact) {
    Scalar t1 = 0, t0 = 0;
    for (const auto& a : atoms_) {
      t1 += a.w1;
      t0 += a.w0;
    }
    if (t1 != 1 || t0 != 1) throw ContractError("score distribution: masses do not sum to 1");
  } else {
    const long double t1 = mass_total(atoms_, true) + pruned_w1_;
    const long double t0 = mass_total(atoms_, false) + pruned_w0_;
    if (std::fabs(static_cast<double>(t1 - 1.0L)) > 1e-12 ||
        std::fabs(static_cast<double>(t0 - 1.0L)) > 1e-12) {
      throw ContractError("score distribution: masses do not sum to 1");
    }
  }
}

template <class Scalar>
ScoreDistribution<Scalar> from_conditional_pair(const Measure<Scalar>& p1, const Measure<Scalar>& p0) {
  if (!p1.same_outcome_set(p0)) {
    throw DomainMismatchError("from_conditional_pair: measures have different outcome sets");
  }
  std::vector<ScoreAtom<Scalar>> raw;
  raw.reserve(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const Scalar& w1 = p1.mass(i);
    const Scalar w0 = p0.mass_of(p1.outcome(i));
    if (ScalarTraits<Scalar>::is_zero(w1) && ScalarTraits<Scalar>::is_zero(w0)) continue;
    raw.push_back({ExtendedScore<Scalar>::from_masses(w1, w0), w1, w0});
  }
  std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return compare(a.score, b.score) < 0;
  });
  ConvolveOptions no_pruning;
  no_pruning.atom_cap = std::numeric_limits<std::size_t>::max();
  AtomSink<Scalar> sink(no_pruning);
  for (const auto& a : raw) sink.push(a.score, a.w1, a.w0);
  return ScoreDistribution<Scalar>(sink.finish());
}

template <class Scalar>
ScoreDistribution<Scalar> convolve(const ScoreDistribution<Scalar>& a,
                                   const ScoreDistribution<Scalar>& b,
                                   const ConvolveOptions& options) {
  // Each atom of the shorter operand shifts the longer one; a shift preserves
  // order, so the result is a k-way merge of sorted streams.
  const auto& inner = a.size() >= b.size() ? a.atoms() : b.atoms();
  const auto& outer = a.size() >= b.size() ? b.atoms() : a.atoms();

  struct Cursor {
    std::size_t stream;
    std::size_t pos;
    ExtendedScore<Scalar> score;
  };
  auto later = [](const Cursor& x, const Cursor& y) {
    const int c = compare(x.score, y.score);
    if (c != 0) return c > 0;
    return x.stream > y.stream;
  };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);

  // Skips pairs whose product masses are both zero (including +inf ⊕ -inf).
  auto advance = [&](std::size_t stream, std::size_t pos) {
    const auto& o = outer[stream];
    for (; pos < inner.size(); ++pos) {
      const auto& i = inner[pos];
      const bool zero1 = ScalarTraits<Scalar>::is_zero(i.w1) || ScalarTraits<Scalar>::is_zero(o.w1);
      const bool zero0 = ScalarTraits<Scalar>::is_zero(i.w0) || ScalarTraits<Scalar>::is_zero(o.w0);
      if (zero1 && zero0) continue;
      heap.push({stream, pos, i.score + o.score});
      return;
    }
  };
  for (std::size_t s = 0; s < outer.size(); ++s) advance(s, 0);

  AtomSink<Scalar> sink(options);
  while (!heap.empty()) {
    Cursor c = heap.top();
    heap.pop();
    const auto& i = inner[c.pos];
    const auto& o = outer[c.stream];
    sink.push(c.score, Scalar(i.w1 * o.w1), Scalar(i.w0 * o.w0));
    advance(c.stream, c.pos + 1);
  }
  auto atoms = sink.finish();
  const double p1 = a.pruned_w1() + b.pruned_w1() - a.pruned_w1() * b.pruned_w1() + sink.dropped_w1();
  const double p0 = a.pruned_w0() + b.pruned_w0() - a.pruned_w0() * b.pruned_w0() + sink.dropped_w0();
  return ScoreDistribution<Scalar>(std::move(atoms), p1, p0);
}

template <class Scalar>
Scalar auc_from_scores(const ScoreDistribution<Scalar>& d) {
  Scalar below_w0 = ScalarTraits<Scalar>::zero();
  Scalar auc = ScalarTraits<Scalar>::zero();
  for (const auto& atom : d.atoms()) {
    auc += atom.w1 * (below_w0 + atom.w0 / 2);
    below_w0 += atom.w0;
  }
  return auc;
}

template <class Scalar>
Scalar f_value_from_scores(const ScoreDistribution<Scalar>& d) {
  Scalar f = auc_from_scores(d);
  f *= 2;
  f -= 1;
  return f;
}

#define CROSSGREED_INSTANTIATE_SCORES(S)                                                          \
  template struct ExtendedScore<S>;                                                               \
  template ExtendedScore<S> operator+ <S>(const ExtendedScore<S>&, const ExtendedScore<S>&);      \
  template int compare<S>(const ExtendedScore<S>&, const ExtendedScore<S>&);                      \
  template class ScoreDistribution<S>;                                                            \
  template ScoreDistribution<S> from_conditional_pair<S>(const Measure<S>&, const Measure<S>&);   \
  template ScoreDistribution<S> convolve<S>(const ScoreDistribution<S>&,                          \
                                            const ScoreDistribution<S>&, const ConvolveOptions&); \
  template S auc_from_scores<S>(const ScoreDistribution<S>&);                                     \
  template S f_value_from_scores<S>(const ScoreDistribution<S>&);

CROSSGREED_INSTANTIATE_SCORES(Rational)
CROSSGREED_INSTANTIATE_SCORES(double)

}  // namespace crossgreed
