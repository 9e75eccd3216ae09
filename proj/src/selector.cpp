#include "crossgreed/selector.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

#include "crossgreed/errors.hpp"
#include "crossgreed/scalar.hpp"

namespace crossgreed {

std::vector<ColumnId> with_column(std::span<const ColumnId> base, ColumnId extra) {
  std::vector<ColumnId> out(base.begin(), base.end());
  auto it = std::lower_bound(out.begin(), out.end(), extra);
  if (it == out.end() || *it != extra) out.insert(it, extra);
  return out;
}

std::string to_string(SearchMethod method) {
  switch (method) {
    case SearchMethod::Greedy:
      return "greedy";
    case SearchMethod::LazyGreedy:
      return "lazy_greedy";
    case SearchMethod::Exhaustive:
      return "exhaustive";
  }
  return "unknown";
}

SearchMethod parse_search_method(const std::string& name) {
  if (name == "greedy") return SearchMethod::Greedy;
  if (name == "lazy" || name == "lazy_greedy") return SearchMethod::LazyGreedy;
  if (name == "exhaustive") return SearchMethod::Exhaustive;
  throw ContractError("unknown search method '" + name + "'");
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(result);
}

namespace {

std::vector<ColumnId> sorted_universe(std::span<const ColumnId> universe) {
  std::vector<ColumnId> u(universe.begin(), universe.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

template <class Value>
Value zero_value() {
  return Value(0);
}

// Float gains carry rounding noise of a few ulps.
template <class Value>
bool exceeds_bound(const Value& gain, const Value& bound) {
  if constexpr (ScalarTraits<Value>::kExact) {
    return bound < gain;
  } else {
    return gain > bound + 1e-12;
  }
}

}  // namespace

template <class Value>
SearchReport<Value> greedy_select(const SetFunction<Value>& objective, std::span<const ColumnId> universe,
                                  std::size_t k, const SelectorOptions& options) {
  SearchReport<Value> report;
  report.method = SearchMethod::Greedy;
  report.guarantee_applies = objective.guarantees_submodularity();
  std::vector<ColumnId> remaining = sorted_universe(universe);
  k = std::min(k, remaining.size());
  std::vector<ColumnId> base;
  Value current = objective.evaluate(base);
  ++report.evaluations;

  while (report.selected.size() < k) {
    auto extend = objective.extension(base);
    std::size_t best = 0;
    Value best_value{};
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      Value v = extend(remaining[i]);
      ++report.evaluations;
      if (i == 0 || v > best_value) {
        best = i;
        best_value = std::move(v);
      }
    }
    Value gain = best_value - current;
    if (gain <= zero_value<Value>() && !options.pad_to_k) break;
    const ColumnId chosen = remaining[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    base = with_column(base, chosen);
    report.selected.push_back(chosen);
    report.gains.push_back(gain);
    report.f_trajectory.push_back(best_value);
    current = std::move(best_value);
  }
  return report;
}

template <class Value>
SearchReport<Value> lazy_greedy_select(const SetFunction<Value>& objective, std::span<const ColumnId> universe,
                                       std::size_t k, const SelectorOptions& options) {
  SearchReport<Value> report;
  report.method = SearchMethod::LazyGreedy;
  report.guarantee_applies = objective.guarantees_submodularity();
  const std::vector<ColumnId> cols = sorted_universe(universe);
  k = std::min(k, cols.size());

  struct Entry {
    Value bound;
    Value value;  // F(base ∪ {id}) when bound was computed
    ColumnId id;
    std::size_t round;  // selection round in which `bound` was computed
  };
  // Max-heap on bound, then smallest id.
  auto lower = [](const Entry& a, const Entry& b) {
    if (a.bound < b.bound) return true;
    if (b.bound < a.bound) return false;
    return a.id > b.id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);

  std::vector<ColumnId> base;
  Value current = objective.evaluate(base);
  ++report.evaluations;
  if (k == 0) return report;

  auto extend = objective.extension(base);
  for (ColumnId c : cols) {
    Value v = extend(c);
    ++report.evaluations;
    Value gain = v - current;
    heap.push({std::move(gain), std::move(v), c, 0});
  }

  std::size_t round = 0;
  while (report.selected.size() < k && !heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    if (top.round == round) {
      if (top.bound <= zero_value<Value>() && !options.pad_to_k) break;
      base = with_column(base, top.id);
      current = top.value;
      report.selected.push_back(top.id);
      report.gains.push_back(top.bound);
      report.f_trajectory.push_back(current);
      ++round;
      if (report.selected.size() < k) extend = objective.extension(base);
      continue;
    }
    Value v = extend(top.id);
    ++report.evaluations;
    Value gain = v - current;
    if (exceeds_bound(gain, top.bound)) ++report.stale_bound_violations;
    heap.push({std::move(gain), std::move(v), top.id, round});
  }
  return report;
}

template <class Value>
SearchReport<Value> exhaustive_select(const SetFunction<Value>& objective, std::span<const ColumnId> universe,
                                      std::size_t k, const SelectorOptions& options) {
  SearchReport<Value> report;
  report.method = SearchMethod::Exhaustive;
  report.guarantee_applies = true;
  const std::vector<ColumnId> cols = sorted_universe(universe);
  k = std::min(k, cols.size());
  const std::uint64_t count = binomial(cols.size(), k);
  if (count > options.exhaustive_cap) {
    throw CapacityError("exhaustive search over C(" + std::to_string(cols.size()) + ", " + std::to_string(k) +
                        ") subsets exceeds the cap of " + std::to_string(options.exhaustive_cap));
  }
  // Lexicographic enumeration of index combinations; strict improvement keeps
  // the first optimum found.
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<ColumnId> best_set;
  Value best_value{};
  bool have_best = false;
  std::vector<ColumnId> set(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) set[i] = cols[idx[i]];
    Value v = objective.evaluate(set);
    ++report.evaluations;
    if (!have_best || best_value < v) {
      best_value = std::move(v);
      best_set = set;
      have_best = true;
    }
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == cols.size() - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }

  std::vector<ColumnId> prefix;
  Value prev = objective.evaluate(prefix);
  ++report.evaluations;
  for (ColumnId c : best_set) {
    prefix.push_back(c);
    Value v = objective.evaluate(prefix);
    ++report.evaluations;
    report.selected.push_back(c);
    report.gains.push_back(v - prev);
    report.f_trajectory.push_back(v);
    prev = std::move(v);
  }
  return report;
}

template <class Value>
SearchReport<Value> run_selector(SearchMethod method, const SetFunction<Value>& objective,
                                 std::span<const ColumnId> universe, std::size_t k,
                                 const SelectorOptions& options) {
  switch (method) {
    case SearchMethod::Greedy:
      return greedy_select(objective, universe, k, options);
    case SearchMethod::LazyGreedy:
      return lazy_greedy_select(objective, universe, k, options);
    case SearchMethod::Exhaustive:
      return exhaustive_select(objective, universe, k, options);
  }
  throw std::logic_error("unreachable search method");
}

#define CROSSGREED_INSTANTIATE_SELECTOR(V)                                                                    \
  template SearchReport<V> greedy_select<V>(const SetFunction<V>&, std::span<const ColumnId>, std::size_t,    \
                                            const SelectorOptions&);                                          \
  template SearchReport<V> lazy_greedy_select<V>(const SetFunction<V>&, std::span<const ColumnId>,            \
                                                 std::size_t, const SelectorOptions&);                        \
  template SearchReport<V> exhaustive_select<V>(const SetFunction<V>&, std::span<const ColumnId>,             \
                                                std::size_t, const SelectorOptions&);                         \
  template SearchReport<V> run_selector<V>(SearchMethod, const SetFunction<V>&, std::span<const ColumnId>,    \
                                           std::size_t, const SelectorOptions&);

CROSSGREED_INSTANTIATE_SELECTOR(Rational)
CROSSGREED_INSTANTIATE_SELECTOR(double)

}  // namespace crossgreed
