#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace crossgreed {

using ColumnId = std::uint32_t;

// Set function over column ids, as consumed by the selectors. Value is
// Rational or double.
template <class Value>
class SetFunction {
 public:
  virtual ~SetFunction() = default;

  // `set` is sorted ascending and duplicate free.
  virtual Value evaluate(std::span<const ColumnId> set) const = 0;

  // Returns c -> F(base ∪ {c}). Implementations may precompute work on `base`.
  virtual std::function<Value(ColumnId)> extension(std::span<const ColumnId> base) const;

  // Whether the objective is known to be monotone submodular, so that the
  // greedy (1 - 1/e) guarantee applies.
  virtual bool guarantees_submodularity() const { return false; }
};

// Sorted union of `base` and `extra`.
std::vector<ColumnId> with_column(std::span<const ColumnId> base, ColumnId extra);

// Adapts a plain callable. Used for joint-table objectives and test hooks.
template <class Value>
class CallbackSetFunction final : public SetFunction<Value> {
 public:
  using Callback = std::function<Value(std::span<const ColumnId>)>;
  CallbackSetFunction(Callback fn, bool submodular = false)
      : fn_(std::move(fn)), submodular_(submodular) {}

  Value evaluate(std::span<const ColumnId> set) const override { return fn_(set); }
  bool guarantees_submodularity() const override { return submodular_; }

 private:
  Callback fn_;
  bool submodular_;
};

template <class Value>
std::function<Value(ColumnId)> SetFunction<Value>::extension(std::span<const ColumnId> base) const {
  std::vector<ColumnId> kept(base.begin(), base.end());
  return [this, kept = std::move(kept)](ColumnId c) { return evaluate(with_column(kept, c)); };
}

}  // namespace crossgreed
