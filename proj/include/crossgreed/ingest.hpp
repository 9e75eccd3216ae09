#pragma once

// Delimited categorical datasets with a binary label: vocabularies, per-label
// counts, empirical conditionals and joint tables.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crossgreed/errors.hpp"
#include "crossgreed/joint_eval.hpp"
#include "crossgreed/nb_model.hpp"

namespace crossgreed {

// A class of the label never occurs.
class DegenerateLabelError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct DatasetSpec {
  std::string path;
  std::string label_column = "label";
  char delimiter = ',';
  // Empty: every non-label column, in file order.
  std::vector<std::string> feature_columns;
  Rational smoothing_alpha = 0;
};

struct ColumnStats {
  std::string name;
  ColumnId id = 0;                  // position among the feature columns
  std::vector<std::string> values;  // token -> value, first-occurrence order
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<std::array<std::uint64_t, 2>> counts_by_label;  // per token, [label 0, label 1]
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
};

struct Dataset {
  std::vector<ColumnStats> columns;
  std::size_t row_count = 0;
  // Row-major feature tokens and labels, kept for joint tables.
  std::vector<std::vector<std::uint32_t>> tokens;
  std::vector<int> labels;

  const ColumnStats& column(const std::string& name) const;  // ParseError when absent
  std::vector<ColumnId> column_ids() const;
};

// "0"/"1"/"true"/"false", case-insensitive, surrounding blanks ignored.
int parse_label(const std::string& text, std::size_t line_no);

Dataset load_dataset(std::istream& in, const DatasetSpec& spec);
Dataset load_dataset(const DatasetSpec& spec);

// P_i(v) = (count_i(v) + alpha) / (n_i + alpha·|V|), computed exactly.
template <class Scalar>
ConditionalPair<Scalar> build_conditionals(const ColumnStats& stats, const Rational& alpha = 0);

template <class Scalar>
std::vector<ColumnModel<Scalar>> build_column_models(const Dataset& data, const Rational& alpha = 0);

// Empirical joint of (X_A, C): masses are row frequencies. Column ids and
// vocabularies are those of `data`.
ExactJointTable build_joint_table(const Dataset& data, std::span<const ColumnId> set);
ExactJointTable build_joint_table(const DatasetSpec& spec, std::span<const ColumnId> set);

// Decimal ("0.25", "1e-3") or fraction ("1/4") to an exact rational.
Rational parse_rational(const std::string& text);

}  // namespace crossgreed
