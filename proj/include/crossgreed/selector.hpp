#pragma once

// Cardinality-constrained maximizers of a monotone set function.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crossgreed/set_function.hpp"

namespace crossgreed {

enum class SearchMethod { Greedy, LazyGreedy, Exhaustive };

std::string to_string(SearchMethod method);
// Accepts "greedy", "lazy" / "lazy_greedy", "exhaustive".
SearchMethod parse_search_method(const std::string& name);

template <class Value>
struct SearchReport {
  SearchMethod method = SearchMethod::Greedy;
  std::vector<ColumnId> selected;  // in selection order
  std::vector<Value> gains;         // marginal gain of each selection step
  std::vector<Value> f_trajectory;  // F of each selected prefix
  std::uint64_t evaluations = 0;    // F evaluations issued by the selector
  // The (1 − 1/e) guarantee holds only for objectives flagged submodular.
  bool guarantee_applies = false;
  // Lazy greedy: re-evaluated gains that exceeded their cached upper bound,
  // which a submodular objective never produces.
  std::uint64_t stale_bound_violations = 0;
};

struct SelectorOptions {
  // Keep adding columns (smallest id first among ties) after the best gain
  // drops to zero, so that |selected| = min(k, |universe|).
  bool pad_to_k = false;
  std::uint64_t exhaustive_cap = 1'000'000;
};

// Repeatedly adds the column with the largest marginal gain; ties go to the
// smallest id. Stops when the best gain is <= 0 unless pad_to_k is set.
template <class Value>
SearchReport<Value> greedy_select(const SetFunction<Value>& objective, std::span<const ColumnId> universe,
                                  std::size_t k, const SelectorOptions& options = {});

// Same selection as greedy_select on submodular objectives, using cached
// marginal gains as upper bounds.
template <class Value>
SearchReport<Value> lazy_greedy_select(const SetFunction<Value>& objective, std::span<const ColumnId> universe,
                                       std::size_t k, const SelectorOptions& options = {});

// Global optimum over all k-subsets; the lexicographically smallest optimal set
// wins ties. Throws CapacityError when C(|universe|, k) exceeds the cap.
template <class Value>
SearchReport<Value> exhaustive_select(const SetFunction<Value>& objective, std::span<const ColumnId> universe,
                                      std::size_t k, const SelectorOptions& options = {});

template <class Value>
SearchReport<Value> run_selector(SearchMethod method, const SetFunction<Value>& objective,
                                 std::span<const ColumnId> universe, std::size_t k,
                                 const SelectorOptions& options = {});

// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace crossgreed
