#include "crossgreed/nb_model.hpp"

#include <algorithm>
#include <memory>
#include <string>

namespace crossgreed {

namespace {

std::vector<ColumnId> normalized(std::span<const ColumnId> set) {
  std::vector<ColumnId> out(set.begin(), set.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

template <class Scalar>
ColumnModel<Scalar>::ColumnModel(ColumnId id, ConditionalPair<Scalar> pair,
                                 std::vector<std::string> vocabulary)
    : id_(id),
      pair_(std::move(pair)),
      vocabulary_(std::move(vocabulary)),
      scores_(from_conditional_pair(pair_.p1, pair_.p0)) {
  if (!vocabulary_.empty() && vocabulary_.size() != pair_.p0.size()) {
    throw ContractError("column " + std::to_string(id) + ": vocabulary size differs from measure size");
  }
}

template <class Scalar>
NbObjective<Scalar>::NbObjective(std::vector<ColumnModel<Scalar>> columns, NbOptions options)
    : options_(options) {
  for (auto& c : columns) {
    const ColumnId id = c.id();
    if (!columns_.emplace(id, std::move(c)).second) {
      throw ContractError("duplicate column id " + std::to_string(id));
    }
  }
}

template <class Scalar>
const ColumnModel<Scalar>& NbObjective<Scalar>::column(ColumnId id) const {
  auto it = columns_.find(id);
  if (it == columns_.end()) throw ContractError("unknown column id " + std::to_string(id));
  return it->second;
}

template <class Scalar>
std::vector<ColumnId> NbObjective<Scalar>::column_ids() const {
  std::vector<ColumnId> ids;
  ids.reserve(columns_.size());
  for (const auto& [id, _] : columns_) ids.push_back(id);
  return ids;
}

template <class Scalar>
ScoreDistribution<Scalar> NbObjective<Scalar>::score_distribution(std::span<const ColumnId> set) const {
  const auto ids = normalized(set);
  if (ids.empty()) return ScoreDistribution<Scalar>();
  ScoreDistribution<Scalar> acc = column(ids.front()).score_distribution();
  for (std::size_t i = 1; i < ids.size(); ++i) {
    acc = convolve(acc, column(ids[i]).score_distribution(), options_.convolve);
  }
  return acc;
}

template <class Scalar>
Scalar NbObjective<Scalar>::f_of(std::span<const ColumnId> set) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  if (set.empty()) return ScalarTraits<Scalar>::zero();
  return f_value_from_scores(score_distribution(set));
}

template <class Scalar>
Scalar NbObjective<Scalar>::auc_star(std::span<const ColumnId> set) const {
  Scalar f = f_of(set);
  return (f + 1) / 2;
}

template <class Scalar>
double NbObjective<Scalar>::f_error_bound(std::span<const ColumnId> set) const {
  if constexpr (ScalarTraits<Scalar>::kExact) {
    for (ColumnId id : set) column(id);
    return 0.0;
  } else {
    if (options_.convolve.prune_eps == 0.0) {
      for (ColumnId id : set) column(id);
      return 0.0;
    }
    return 2.0 * auc_error_bound(score_distribution(set));
  }
}

template <class Scalar>
std::function<Scalar(ColumnId)> NbObjective<Scalar>::extension(std::span<const ColumnId> base) const {
  auto base_ids = normalized(base);
  auto base_dist = std::make_shared<const ScoreDistribution<Scalar>>(score_distribution(base_ids));
  return [this, base_ids = std::move(base_ids), base_dist](ColumnId c) -> Scalar {
    if (std::binary_search(base_ids.begin(), base_ids.end(), c)) return f_of(base_ids);
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    return f_value_from_scores(convolve(*base_dist, column(c).score_distribution(), options_.convolve));
  };
}

Rational auc_star_exact(const NbObjective<Rational>& objective, std::span<const ColumnId> set) {
  const auto ids = normalized(set);
  std::vector<ExactMeasure> f1, f0;
  std::uint64_t outcomes = 1;
  for (ColumnId id : ids) {
    const auto& pair = objective.column(id).pair();
    f1.push_back(pair.p1);
    f0.push_back(pair.p0.reordered(pair.p1.outcomes()));
    outcomes *= pair.p1.size();
    if (outcomes * outcomes > objective.options().exact_pair_cap) {
      throw CapacityError("auc_star_exact: |V_A|^2 exceeds the pair cap of " +
                          std::to_string(objective.options().exact_pair_cap));
    }
  }
  const auto p1 = ProductMeasure<Rational>(std::move(f1)).materialize();
  const auto p0 = ProductMeasure<Rational>(std::move(f0)).materialize();
  Rational tv = commutator_tv(p1, p0, static_cast<std::size_t>(outcomes));
  return (tv + 1) / 2;
}

template class ColumnModel<Rational>;
template class ColumnModel<double>;
template class NbObjective<Rational>;
template class NbObjective<double>;

}  // namespace crossgreed
