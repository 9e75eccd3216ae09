#include "crossgreed/joint_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace crossgreed {

namespace {

template <class Scalar>
void check_pair_cap(std::size_t support, const JointOptions& options, const char* op) {
  const auto n = static_cast<std::uint64_t>(support);
  if (n > 0 && n > options.pair_cap / n) {
    throw CapacityError(std::string(op) + ": |V_A|^2 = " + std::to_string(n) + "^2 exceeds the pair cap of " +
                        std::to_string(options.pair_cap));
  }
}

template <class Scalar>
void require_marginal(const JointTable<Scalar>& table, int label) {
  if (ScalarTraits<Scalar>::is_zero(table.label_marginal(label))) {
    throw ContractError("label " + std::to_string(label) + " has zero probability; cannot condition on it");
  }
}

}  // namespace

template <class Scalar>
JointTable<Scalar>::JointTable(std::vector<JointColumn> columns, std::map<ValueTuple, LabelMasses> rows)
    : columns_(std::move(columns)), marginals_{ScalarTraits<Scalar>::zero(), ScalarTraits<Scalar>::zero()} {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].vocabulary.empty()) {
      throw ContractError("joint table: column " + std::to_string(columns_[i].id) + " has an empty vocabulary");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (columns_[j].id == columns_[i].id) throw ContractError("joint table: duplicate column id");
    }
  }
  Scalar total = ScalarTraits<Scalar>::zero();
  for (auto& [tuple, masses] : rows) {
    if (tuple.size() != columns_.size()) throw ContractError("joint table: row arity mismatch");
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (tuple[i] >= columns_[i].vocabulary.size()) {
        throw ContractError("joint table: value token outside the vocabulary of column " +
                            std::to_string(columns_[i].id));
      }
    }
    for (int c = 0; c < 2; ++c) {
      if (masses[c] < 0) throw ContractError("joint table: negative mass");
      marginals_[c] += masses[c];
      total += masses[c];
    }
  }
  if (!ScalarTraits<Scalar>::sums_to_one(total)) {
    throw ContractError("joint table: masses sum to " + ScalarTraits<Scalar>::to_string(total) + ", not 1");
  }
  for (auto& [tuple, masses] : rows) {
    if (!ScalarTraits<Scalar>::is_zero(masses[0]) || !ScalarTraits<Scalar>::is_zero(masses[1])) {
      rows_.emplace(tuple, masses);
    }
  }
}

template <class Scalar>
std::size_t JointTable<Scalar>::position_of(ColumnId id) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].id == id) return i;
  }
  throw ContractError("unknown column id " + std::to_string(id));
}

template <class Scalar>
std::vector<std::size_t> JointTable<Scalar>::positions_of(std::span<const ColumnId> set) const {
  std::vector<ColumnId> ids(set.begin(), set.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::size_t> pos;
  pos.reserve(ids.size());
  std::uint64_t radix = 1;
  for (ColumnId id : ids) {
    pos.push_back(position_of(id));
    const std::uint64_t v = columns_[pos.back()].vocabulary.size();
    if (radix > std::numeric_limits<Outcome>::max() / v) {
      throw CapacityError("joint table: V_A does not fit a 64-bit outcome code");
    }
    radix *= v;
  }
  return pos;
}

template <class Scalar>
Outcome JointTable<Scalar>::encode(const ValueTuple& row, std::span<const std::size_t> positions) const {
  Outcome code = 0;
  for (std::size_t p : positions) code = code * columns_[p].vocabulary.size() + row[p];
  return code;
}

template <class Scalar>
ValueTuple JointTable<Scalar>::decode(Outcome code, std::span<const std::size_t> positions) const {
  ValueTuple out(positions.size());
  for (std::size_t i = positions.size(); i-- > 0;) {
    const auto v = columns_[positions[i]].vocabulary.size();
    out[i] = static_cast<std::uint32_t>(code % v);
    code /= v;
  }
  return out;
}

template <class Scalar>
Projection<Scalar> project(const JointTable<Scalar>& table, std::span<const ColumnId> set) {
  const auto positions = table.positions_of(set);
  std::map<Outcome, std::array<Scalar, 2>> acc;
  for (const auto& [tuple, masses] : table.rows()) {
    auto [it, inserted] = acc.try_emplace(table.encode(tuple, positions), masses);
    if (!inserted) {
      it->second[0] += masses[0];
      it->second[1] += masses[1];
    }
  }
  Projection<Scalar> out;
  for (auto& [code, masses] : acc) {
    out.outcomes.push_back(code);
    out.mass0.push_back(std::move(masses[0]));
    out.mass1.push_back(std::move(masses[1]));
  }
  return out;
}

template <class Scalar>
Measure<Scalar> conditional_measure(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                                    int label) {
  if (label != 0 && label != 1) throw ContractError("label must be 0 or 1");
  require_marginal(table, label);
  auto proj = project(table, set);
  auto& joint = label == 1 ? proj.mass1 : proj.mass0;
  const Scalar& marginal = table.label_marginal(label);
  std::vector<Scalar> masses;
  masses.reserve(joint.size());
  for (const auto& m : joint) masses.push_back(m / marginal);
  return Measure<Scalar>(std::move(proj.outcomes), std::move(masses));
}

template <class Scalar>
Scalar auc_star_joint(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                      const JointOptions& options) {
  const auto p1 = conditional_measure(table, set, 1);
  check_pair_cap<Scalar>(p1.size(), options, "auc_star_joint");
  const auto p0 = conditional_measure(table, set, 0);
  Scalar tv = commutator_tv(p1, p0, std::numeric_limits<std::size_t>::max());
  return (tv + 1) / 2;
}

template <class Scalar>
double mutual_information(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                          const JointOptions& options) {
  const auto proj = project(table, set);
  check_pair_cap<Scalar>(proj.outcomes.size(), options, "mutual_information");
  double bits = 0.0;
  for (std::size_t i = 0; i < proj.outcomes.size(); ++i) {
    // exact ratio p(x,c) / (p(x) p(c)) before taking the log
    const Scalar px = proj.mass0[i] + proj.mass1[i];
    for (int c = 0; c < 2; ++c) {
      const Scalar& pxc = c == 0 ? proj.mass0[i] : proj.mass1[i];
      if (ScalarTraits<Scalar>::is_zero(pxc)) continue;
      const Scalar ratio = pxc / (px * table.label_marginal(c));
      bits += to_double(pxc) * std::log2(to_double(ratio));
    }
  }
  return bits;
}

template <class Scalar>
Scalar auc_of_scorer(const JointTable<Scalar>& table, std::span<const ColumnId> set, const Scorer& scorer,
                     const JointOptions& options) {
  const auto p1 = conditional_measure(table, set, 1);
  check_pair_cap<Scalar>(p1.size(), options, "auc_of_scorer");
  const auto p0 = conditional_measure(table, set, 0);
  std::vector<double> score(p1.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    auto it = scorer.find(p1.outcome(i));
    if (it == scorer.end()) {
      throw ContractError("scorer has no value for outcome code " + std::to_string(p1.outcome(i)));
    }
    score[i] = it->second;
  }
  Scalar wins = ScalarTraits<Scalar>::zero();
  Scalar ties = ScalarTraits<Scalar>::zero();
  for (std::size_t x = 0; x < p1.size(); ++x) {
    if (ScalarTraits<Scalar>::is_zero(p1.mass(x))) continue;
    for (std::size_t y = 0; y < p0.size(); ++y) {
      if (ScalarTraits<Scalar>::is_zero(p0.mass(y))) continue;
      if (score[x] > score[y]) {
        wins += p1.mass(x) * p0.mass(y);
      } else if (score[x] == score[y]) {
        ties += p1.mass(x) * p0.mass(y);
      }
    }
  }
  return wins + ties / 2;
}

template <class Scalar>
Scorer log_likelihood_scorer(const JointTable<Scalar>& table, std::span<const ColumnId> set) {
  const auto p1 = conditional_measure(table, set, 1);
  const auto p0 = conditional_measure(table, set, 0);
  Scorer out;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const Scalar& a = p1.mass(i);
    const Scalar& b = p0.mass(i);
    double s;
    if (ScalarTraits<Scalar>::is_zero(b)) {
      s = std::numeric_limits<double>::infinity();
    } else if (ScalarTraits<Scalar>::is_zero(a)) {
      s = -std::numeric_limits<double>::infinity();
    } else {
      // log of the exact ratio, so equal ratios get equal scores
      const Scalar ratio = a / b;
      s = std::log(to_double(ratio));
    }
    out.emplace(p1.outcome(i), s);
  }
  return out;
}

template <class Scalar>
Scalar assumption_gap(const JointTable<Scalar>& table, std::span<const ColumnId> set,
                      const JointOptions& options) {
  const auto positions = table.positions_of(set);
  Scalar gap = ScalarTraits<Scalar>::zero();
  if (positions.size() <= 1) return gap;
  std::uint64_t cells = 1;
  for (std::size_t p : positions) {
    cells *= table.columns()[p].vocabulary.size();
    if (cells > options.pair_cap) {
      throw CapacityError("assumption_gap: |V_A| exceeds the cap of " + std::to_string(options.pair_cap));
    }
  }
  // Per-column conditional marginals, indexed by value token.
  std::array<std::vector<std::vector<Scalar>>, 2> marg;
  for (int c = 0; c < 2; ++c) {
    require_marginal(table, c);
    for (std::size_t p : positions) {
      std::vector<Scalar> m(table.columns()[p].vocabulary.size(), ScalarTraits<Scalar>::zero());
      for (const auto& [tuple, masses] : table.rows()) m[tuple[p]] += masses[c];
      for (auto& v : m) v /= table.label_marginal(c);
      marg[c].push_back(std::move(m));
    }
  }
  const auto proj = project(table, set);
  std::unordered_map<Outcome, std::size_t> where;
  for (std::size_t i = 0; i < proj.outcomes.size(); ++i) where.emplace(proj.outcomes[i], i);

  for (Outcome code = 0; code < cells; ++code) {
    const ValueTuple values = table.decode(code, positions);
    auto it = where.find(code);
    for (int c = 0; c < 2; ++c) {
      Scalar product = ScalarTraits<Scalar>::one();
      for (std::size_t k = 0; k < positions.size(); ++k) product *= marg[c][k][values[k]];
      Scalar joint = ScalarTraits<Scalar>::zero();
      if (it != where.end()) {
        joint = (c == 0 ? proj.mass0[it->second] : proj.mass1[it->second]) / table.label_marginal(c);
      }
      const Scalar diff = ScalarTraits<Scalar>::abs(joint - product);
      if (diff > gap) gap = diff;
    }
  }
  return gap;
}

template <class Scalar>
JointTable<Scalar> naive_bayes_joint(std::span<const ConditionalPair<Scalar>> pairs,
                                     std::span<const ColumnId> ids, const Scalar& prior1,
                                     std::uint64_t cell_cap) {
  if (pairs.size() != ids.size()) throw ContractError("naive_bayes_joint: ids and pairs differ in length");
  if (prior1 <= 0 || prior1 >= 1) throw ContractError("naive_bayes_joint: Pr[C=1] must lie in (0, 1)");
  std::vector<JointColumn> columns;
  std::vector<Measure<Scalar>> f0, f1;
  std::uint64_t cells = 1;
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    const auto& p1 = pairs[a].p1;
    f1.push_back(p1);
    f0.push_back(pairs[a].p0.reordered(p1.outcomes()));
    JointColumn col{ids[a], {}};
    for (Outcome o : p1.outcomes()) col.vocabulary.push_back(std::to_string(o));
    columns.push_back(std::move(col));
    cells *= p1.size();
    if (cells > cell_cap) throw CapacityError("naive_bayes_joint: product exceeds the cell cap");
  }
  const Scalar prior0 = ScalarTraits<Scalar>::one() - prior1;
  const ProductMeasure<Scalar> prod1(f1);
  const ProductMeasure<Scalar> prod0(f0);
  std::map<ValueTuple, typename JointTable<Scalar>::LabelMasses> rows;
  prod1.for_each([&](std::span<const std::size_t> pos, const Scalar& m1) {
    const Scalar m0 = prod0.mass_at(pos);
    if (ScalarTraits<Scalar>::is_zero(m1) && ScalarTraits<Scalar>::is_zero(m0)) return;
    ValueTuple t(pos.begin(), pos.end());
    rows.emplace(std::move(t), typename JointTable<Scalar>::LabelMasses{m0 * prior0, m1 * prior1});
  });
  return JointTable<Scalar>(std::move(columns), std::move(rows));
}

#define CROSSGREED_INSTANTIATE_JOINT(S)                                                                     \
  template class JointTable<S>;                                                                             \
  template Projection<S> project<S>(const JointTable<S>&, std::span<const ColumnId>);                       \
  template Measure<S> conditional_measure<S>(const JointTable<S>&, std::span<const ColumnId>, int);         \
  template S auc_star_joint<S>(const JointTable<S>&, std::span<const ColumnId>, const JointOptions&);       \
  template double mutual_information<S>(const JointTable<S>&, std::span<const ColumnId>,                    \
                                        const JointOptions&);                                               \
  template S auc_of_scorer<S>(const JointTable<S>&, std::span<const ColumnId>, const Scorer&,               \
                              const JointOptions&);                                                         \
  template Scorer log_likelihood_scorer<S>(const JointTable<S>&, std::span<const ColumnId>);                \
  template S assumption_gap<S>(const JointTable<S>&, std::span<const ColumnId>, const JointOptions&);       \
  template JointTable<S> naive_bayes_joint<S>(std::span<const ConditionalPair<S>>, std::span<const ColumnId>, \
                                              const S&, std::uint64_t);

CROSSGREED_INSTANTIATE_JOINT(Rational)
CROSSGREED_INSTANTIATE_JOINT(double)

}  // namespace crossgreed
