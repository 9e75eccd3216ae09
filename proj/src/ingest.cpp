#include "crossgreed/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <regex>

namespace crossgreed {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == delimiter) {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

const ColumnStats& Dataset::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw ParseError("unknown column '" + name + "'");
}

std::vector<ColumnId> Dataset::column_ids() const {
  std::vector<ColumnId> ids;
  for (const auto& c : columns) ids.push_back(c.id);
  return ids;
}

int parse_label(const std::string& text, std::size_t line_no) {
  const std::string v = lower(trim(text));
  if (v == "0" || v == "false") return 0;
  if (v == "1" || v == "true") return 1;
  throw ParseError("line " + std::to_string(line_no) + ": unknown label value '" + text + "'");
}

Dataset load_dataset(std::istream& in, const DatasetSpec& spec) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw ParseError("empty dataset: no header row");
  const auto header = split(line, spec.delimiter);

  std::size_t label_pos = header.size();
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (!position.emplace(name, i).second) throw ParseError("duplicate column '" + name + "' in header");
    if (name == spec.label_column) label_pos = i;
  }
  if (label_pos == header.size()) throw ParseError("label column '" + spec.label_column + "' not in header");

  std::vector<std::size_t> feature_pos;
  if (spec.feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (i != label_pos) feature_pos.push_back(i);
  } else {
    for (const auto& name : spec.feature_columns) {
      auto it = position.find(name);
      if (it == position.end()) throw ParseError("feature column '" + name + "' not in header");
      if (it->second == label_pos) throw ParseError("label column '" + name + "' listed as a feature");
      feature_pos.push_back(it->second);
    }
  }

  Dataset data;
  for (std::size_t k = 0; k < feature_pos.size(); ++k) {
    ColumnStats c;
    c.name = trim(header[feature_pos[k]]);
    c.id = static_cast<ColumnId>(k);
    data.columns.push_back(std::move(c));
  }

  std::uint64_t n[2] = {0, 0};
  while (next_line()) {
    if (trim(line).empty()) continue;
    const auto fields = split(line, spec.delimiter);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    const int label = parse_label(fields[label_pos], line_no);
    ++n[label];
    std::vector<std::uint32_t> row(feature_pos.size());
    for (std::size_t k = 0; k < feature_pos.size(); ++k) {
      auto& c = data.columns[k];
      const std::string value = trim(fields[feature_pos[k]]);
      auto [it, fresh] = c.vocabulary.try_emplace(value, static_cast<std::uint32_t>(c.values.size()));
      if (fresh) {
        c.values.push_back(value);
        c.counts_by_label.push_back({0, 0});
      }
      ++c.counts_by_label[it->second][label];
      row[k] = it->second;
    }
    data.tokens.push_back(std::move(row));
    data.labels.push_back(label);
  }
  data.row_count = data.labels.size();
  if (data.row_count == 0) throw ParseError("dataset has a header but no rows");
  if (n[0] == 0 || n[1] == 0) {
    throw DegenerateLabelError("label class " + std::string(n[0] == 0 ? "0" : "1") + " has no rows");
  }
  for (auto& c : data.columns) {
    c.n0 = n[0];
    c.n1 = n[1];
  }
  return data;
}

Dataset load_dataset(const DatasetSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw ParseError("cannot open dataset '" + spec.path + "'");
  return load_dataset(in, spec);
}

template <class Scalar>
ConditionalPair<Scalar> build_conditionals(const ColumnStats& stats, const Rational& alpha) {
  if (sgn(alpha) < 0) throw ContractError("smoothing alpha must be nonnegative");
  if (stats.n0 == 0 || stats.n1 == 0) throw DegenerateLabelError("column '" + stats.name + "' has an empty label class");
  const std::size_t v = stats.values.size();
  std::array<std::vector<Scalar>, 2> masses;
  for (int label = 0; label < 2; ++label) {
    const Rational total = Rational(label ? stats.n1 : stats.n0) + alpha * static_cast<unsigned long>(v);
    for (std::size_t t = 0; t < v; ++t) {
      Rational q = (Rational(stats.counts_by_label[t][label]) + alpha) / total;
      if constexpr (ScalarTraits<Scalar>::kExact) {
        masses[label].push_back(q);
      } else {
        masses[label].push_back(q.get_d());
      }
    }
  }
  return {Measure<Scalar>::from_masses(std::move(masses[0])), Measure<Scalar>::from_masses(std::move(masses[1]))};
}

template <class Scalar>
std::vector<ColumnModel<Scalar>> build_column_models(const Dataset& data, const Rational& alpha) {
  std::vector<ColumnModel<Scalar>> out;
  for (const auto& c : data.columns) out.emplace_back(c.id, build_conditionals<Scalar>(c, alpha), c.values);
  return out;
}

template ConditionalPair<Rational> build_conditionals<Rational>(const ColumnStats&, const Rational&);
template ConditionalPair<double> build_conditionals<double>(const ColumnStats&, const Rational&);
template std::vector<ColumnModel<Rational>> build_column_models<Rational>(const Dataset&, const Rational&);
template std::vector<ColumnModel<double>> build_column_models<double>(const Dataset&, const Rational&);

ExactJointTable build_joint_table(const Dataset& data, std::span<const ColumnId> set) {
  std::vector<ColumnId> ids(set.begin(), set.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<JointColumn> columns;
  for (ColumnId id : ids) {
    if (id >= data.columns.size()) throw ContractError("unknown column id " + std::to_string(id));
    columns.push_back({id, data.columns[id].values});
  }
  std::map<ValueTuple, std::array<std::uint64_t, 2>> counts;
  for (std::size_t r = 0; r < data.row_count; ++r) {
    ValueTuple t;
    t.reserve(ids.size());
    for (ColumnId id : ids) t.push_back(data.tokens[r][id]);
    ++counts[std::move(t)][data.labels[r]];
  }
  const Rational total(static_cast<unsigned long>(data.row_count));
  std::map<ValueTuple, ExactJointTable::LabelMasses> rows;
  for (auto& [tuple, c] : counts) {
    rows.emplace(tuple, ExactJointTable::LabelMasses{Rational(c[0]) / total, Rational(c[1]) / total});
  }
  return ExactJointTable(std::move(columns), std::move(rows));
}

ExactJointTable build_joint_table(const DatasetSpec& spec, std::span<const ColumnId> set) {
  return build_joint_table(load_dataset(spec), set);
}

Rational parse_rational(const std::string& raw) {
  const std::string text = trim(raw);
  static const std::regex fraction(R"([+-]?\d+/\d+)");
  static const std::regex decimal(R"(([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?)");
  std::smatch m;
  if (std::regex_match(text, fraction)) {
    Rational q(text, 10);
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + raw + "'");
    q.canonicalize();
    return q;
  }
  if (!std::regex_match(text, m, decimal) || (m[2].length() == 0 && m[3].length() == 0)) {
    throw ParseError("not a number: '" + raw + "'");
  }
  const std::string digits = m[2].str() + m[3].str();
  long exponent = m[4].matched ? std::stol(m[4].str()) : 0;
  exponent -= static_cast<long>(m[3].length());
  if (exponent > 4000 || exponent < -4000) throw ParseError("exponent out of range in '" + raw + "'");
  mpz_class num(digits, 10), scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  q.canonicalize();
  return m[1].str() == "-" ? Rational(-q) : q;
}

}  // namespace crossgreed
