#include "crossgreed/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "crossgreed/hardgen.hpp"
#include "crossgreed/ingest.hpp"
#include "crossgreed/joint_eval.hpp"
#include "crossgreed/nb_model.hpp"
#include "crossgreed/selector.hpp"
#include "crossgreed/theory_lab.hpp"

namespace crossgreed::cli {

namespace {

using nlohmann::json;

// Raised for a failed identity or suite; maps to exit 1 after the report is
// written.
struct VerificationFailed {};

json value_json(const Rational& x) { return x.get_str(); }
json value_json(double x) { return x; }

template <class Value>
json values_json(const std::vector<Value>& xs) {
  json arr = json::array();
  for (const auto& x : xs) arr.push_back(value_json(x));
  return arr;
}

void emit(const json& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot write '" + path + "'");
  file << text;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

char delimiter_for(const std::string& path, const std::string& flag) {
  if (!flag.empty()) {
    if (flag == "tab" || flag == "\\t") return '\t';
    if (flag.size() != 1) throw ParseError("delimiter must be a single character or 'tab'");
    return flag[0];
  }
  const bool tsv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".tsv") == 0;
  return tsv ? '\t' : ',';
}

void check_thread_env() {
  const char* env = std::getenv("CROSSGREED_THREADS");
  if (!env) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    throw ParseError("CROSSGREED_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
}

struct DataOptions {
  std::string dataset;
  std::string label = "label";
  std::string delimiter;
  std::string alpha = "0";
  std::string mode = "exact";
  std::uint64_t seed = 0;
  std::string out;
  double prune_eps = 0.0;
  std::size_t atom_cap = 2'000'000;
  std::uint64_t pair_cap = 10'000'000;
};

void add_data_flags(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--dataset", o.dataset, "Delimited file with a header row")->required();
  cmd->add_option("--label", o.label, "Label column name")->capture_default_str();
  cmd->add_option("--delimiter", o.delimiter, "Field delimiter (default: tab for .tsv, else comma)");
  cmd->add_option("--alpha", o.alpha, "Additive smoothing, decimal or fraction")->capture_default_str();
  cmd->add_option("--mode", o.mode, "Arithmetic")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  cmd->add_option("--seed", o.seed, "Recorded in the report")->capture_default_str();
  cmd->add_option("--out", o.out, "Write the JSON report here instead of stdout");
  cmd->add_option("--prune-eps", o.prune_eps, "Float mode atom pruning threshold")->capture_default_str();
  cmd->add_option("--atom-cap", o.atom_cap, "Score atom budget per convolution")->capture_default_str();
  cmd->add_option("--pair-cap", o.pair_cap, "Joint enumeration budget")->capture_default_str();
}

Dataset load(const DataOptions& o) {
  DatasetSpec spec;
  spec.path = o.dataset;
  spec.label_column = o.label;
  spec.delimiter = delimiter_for(o.dataset, o.delimiter);
  return load_dataset(spec);
}

template <class Scalar>
NbObjective<Scalar> make_objective(const Dataset& data, const DataOptions& o) {
  NbOptions options;
  options.convolve.prune_eps = o.prune_eps;
  options.convolve.atom_cap = o.atom_cap;
  options.exact_pair_cap = o.pair_cap;
  return NbObjective<Scalar>(build_column_models<Scalar>(data, parse_rational(o.alpha)), options);
}

json base_report(const std::string& command, const DataOptions& o) {
  json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["dataset"] = o.dataset;
  r["label"] = o.label;
  r["mode"] = o.mode;
  r["alpha"] = parse_rational(o.alpha).get_str();
  r["seed"] = o.seed;
  return r;
}

// Joint-exact diagnostics for `set` on the empirical distribution; null
// entries when an enumeration cap is hit.
json joint_diagnostics(const Dataset& data, std::span<const ColumnId> set, std::uint64_t pair_cap) {
  json d;
  const auto table = build_joint_table(data, set);
  const JointOptions jo{pair_cap};
  try {
    const Rational auc = auc_star_joint(table, set, jo);
    d["auc_star_joint"] = auc.get_str();
    d["normalized_auc_joint"] = Rational(auc * 2 - 1).get_str();
    d["mutual_information"] = mutual_information(table, set, jo);
  } catch (const CapacityError& e) {
    d["auc_star_joint"] = nullptr;
    d["normalized_auc_joint"] = nullptr;
    d["mutual_information"] = nullptr;
    d["joint_skipped"] = e.what();
  }
  try {
    const Rational gap = assumption_gap(table, set, jo);
    d["assumption_gap"] = gap.get_str();
    d["assumption_check"] = sgn(gap) == 0 ? "passed" : "failed";
  } catch (const CapacityError& e) {
    d["assumption_gap"] = nullptr;
    d["assumption_check"] = "skipped";
    d["assumption_skipped"] = e.what();
  }
  return d;
}

json names_of(const Dataset& data, std::span<const ColumnId> ids) {
  json arr = json::array();
  for (ColumnId id : ids) arr.push_back(data.columns.at(id).name);
  return arr;
}

template <class Scalar>
json search_body(const Dataset& data, const DataOptions& o, SearchMethod method, std::size_t k, bool pad) {
  const auto objective = make_objective<Scalar>(data, o);
  const auto universe = objective.column_ids();
  SelectorOptions so;
  so.pad_to_k = pad;
  const auto report = run_selector<Scalar>(method, objective, universe, k, so);
  json r;
  r["method"] = to_string(report.method);
  r["k"] = k;
  r["universe_size"] = universe.size();
  r["selected"] = report.selected;
  r["selected_names"] = names_of(data, report.selected);
  r["gains"] = values_json(report.gains);
  r["f_trajectory"] = values_json(report.f_trajectory);
  r["evaluations"] = report.evaluations;
  r["guarantee_applies"] = report.guarantee_applies;
  r["stale_bound_violations"] = report.stale_bound_violations;
  r["auc_star"] = value_json(objective.auc_star(report.selected));
  r["normalized_auc"] = value_json(objective.f_of(report.selected));
  r["f_error_bound"] = objective.f_error_bound(report.selected);
  return r;
}

template <class Scalar>
json eval_body(const Dataset& data, const DataOptions& o, std::span<const ColumnId> set) {
  const auto objective = make_objective<Scalar>(data, o);
  json r;
  r["auc_star_nb"] = value_json(objective.auc_star(set));
  r["normalized_auc_nb"] = value_json(objective.f_of(set));
  r["f_error_bound"] = objective.f_error_bound(set);
  return r;
}

void merge(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

int cmd_search(const DataOptions& o, const std::string& method_name, std::size_t k, bool pad, bool timing,
               std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const SearchMethod method = parse_search_method(method_name);
  const Dataset data = load(o);
  json r = base_report("search", o);
  json body = o.mode == "exact" ? search_body<Rational>(data, o, method, k, pad)
                                : search_body<double>(data, o, method, k, pad);
  merge(r, body);
  const auto selected = body["selected"].get<std::vector<ColumnId>>();
  r["diagnostics"] = joint_diagnostics(data, selected, o.pair_cap);
  r["rows"] = data.row_count;
  if (timing) {
    r["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  emit(r, o.out, out);
  return kExitOk;
}

int cmd_eval(const DataOptions& o, const std::string& subset, std::ostream& out) {
  const Dataset data = load(o);
  std::vector<ColumnId> set;
  for (const auto& name : split_list(subset)) set.push_back(data.column(name).id);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  json r = base_report("eval", o);
  r["subset"] = set;
  r["subset_names"] = names_of(data, set);
  merge(r, o.mode == "exact" ? eval_body<Rational>(data, o, set) : eval_body<double>(data, o, set));
  merge(r, joint_diagnostics(data, set, o.pair_cap));
  r["conditionally_independent"] = r["assumption_check"] == "passed";
  r["rows"] = data.row_count;
  emit(r, o.out, out);
  return kExitOk;
}

struct HardOptions {
  std::string graph;
  std::string out;
  std::string subset;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

int cmd_gen_hard(const HardOptions& o, std::ostream& out) {
  std::ifstream in(o.graph);
  if (!in) throw ParseError("cannot open graph '" + o.graph + "'");
  const Graph g = Graph::parse_edge_list(in);
  if (g.edges().empty()) throw ParseError("graph '" + o.graph + "' has no edges");

  json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = "gen-hard";
  r["graph"] = o.graph;
  r["vertices"] = g.vertex_count();
  r["edges"] = g.edges().size();
  r["seed"] = o.seed;
  r["output"] = o.out.empty() ? json(nullptr) : json(o.out);
  if (o.samples > 0) {
    r["kind"] = "sampled";
    r["rows"] = o.samples;
    if (!o.out.empty()) {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw ParseError("cannot write '" + o.out + "'");
      write_csv(file, sample_hard_dataset(g, o.samples, o.seed));
    }
  } else {
    r["kind"] = "exact";
    r["rows"] = 4 * g.edges().size();
    if (!o.out.empty()) {
      std::ofstream file(o.out, std::ios::binary);
      if (!file) throw ParseError("cannot write '" + o.out + "'");
      write_weighted_rows(file, build_hard_instance(g));
    }
  }

  bool ok = true;
  if (!o.subset.empty()) {
    std::vector<std::size_t> vertices;
    for (const auto& v : split_list(o.subset)) {
      std::size_t pos = 0;
      unsigned long x = 0;
      try {
        x = std::stoul(v, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != v.size()) throw ParseError("subset entry '" + v + "' is not a vertex index");
      if (x >= g.vertex_count()) throw ParseError("vertex " + v + " outside the graph");
      vertices.push_back(x);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    const auto rec = verify_reduction(g, vertices);
    json s;
    s["vertices"] = vertices;
    s["induced_edges"] = g.induced_edges(vertices);
    s["phi"] = rec.phi.get_str();
    s["normalized_auc"] = rec.normalized_auc.get_str();
    s["predicted_normalized_auc"] = rec.predicted_auc.get_str();
    s["mutual_information"] = rec.mi;
    s["auc_matches"] = rec.auc_matches;
    s["auc_matches_predicted"] = rec.auc_matches_predicted;
    s["mi_matches"] = rec.mi_matches;
    r["subset"] = s;
    ok = rec.auc_matches_predicted && rec.mi_matches;
  }
  emit(r, "", out);
  return ok ? kExitOk : kExitVerificationFailed;
}

struct TheoryOptions {
  theory::TheoryConfig config;
  std::string out;
};

int cmd_verify_theory(const TheoryOptions& o, std::ostream& out) {
  const auto results = theory::run_theory_suites(o.config);
  json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = "verify-theory";
  r["seed"] = o.config.seed;
  r["trials"] = o.config.trials;
  r["tol"] = o.config.tol;
  r["eigen_tol"] = o.config.eigen_tol;
  r["quad_tol"] = o.config.quad_tol;
  json suites = json::array();
  json worst = json::object();
  bool ok = true;
  for (const auto& s : results) {
    json j;
    j["name"] = s.name;
    j["instances"] = s.instances;
    j["failures"] = s.failures;
    j["worst_margin"] = s.worst_margin;
    j["margin_kind"] = s.margin_kind;
    j["passed"] = s.failures == 0;
    if (!s.first_failure.empty()) j["first_failure"] = s.first_failure;
    suites.push_back(j);
    worst[s.name + "." + s.margin_kind] = s.worst_margin;
    ok = ok && s.failures == 0;
  }
  r["suites"] = suites;
  r["worst_margins"] = worst;
  r["passed"] = ok;
  emit(r, o.out, out);
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-cross search by maximum AUC", "crossgreed"};
  app.require_subcommand(1);

  DataOptions search_opts;
  std::string method = "greedy";
  std::size_t k = 1;
  bool pad = true, timing = false;
  auto* search = app.add_subcommand("search", "Select k columns maximizing 2auc*-1 under naive Bayes");
  add_data_flags(search, search_opts);
  search->add_option("--k", k, "Budget")->capture_default_str();
  search->add_option("--method", method, "greedy | lazy | exhaustive")->capture_default_str();
  search->add_flag("--pad,!--no-pad", pad, "Keep selecting after the best gain reaches zero (default on)");
  search->add_flag("--timing", timing, "Add wall_time_ms to the report");

  DataOptions eval_opts;
  std::string eval_subset;
  auto* eval = app.add_subcommand("eval", "Evaluate one column subset");
  add_data_flags(eval, eval_opts);
  eval->add_option("--subset", eval_subset, "Comma-separated column names")->required();

  HardOptions hard;
  bool exact_flag = false;
  auto* gen = app.add_subcommand("gen-hard", "Hardness instance from an edge list");
  gen->add_option("--graph", hard.graph, "Edge list, one 'u v' pair per line")->required();
  gen->add_option("--out", hard.out, "Data file: weighted rows (exact) or CSV (--samples)");
  gen->add_option("--samples", hard.samples, "Number of sampled rows; 0 writes the exact instance");
  gen->add_flag("--exact", exact_flag, "Write the exact weighted instance (default)");
  gen->add_option("--seed", hard.seed, "Sampling seed")->capture_default_str();
  gen->add_option("--subset", hard.subset, "Comma-separated vertex indices to verify");

  TheoryOptions theory_opts;
  theory_opts.config.trials = 1000;
  auto* verify = app.add_subcommand("verify-theory", "Randomized checks of the structural lemmas");
  verify->add_option("--seed", theory_opts.config.seed, "Suite seed")->capture_default_str();
  verify->add_option("--trials", theory_opts.config.trials, "Instances per suite")->capture_default_str();
  verify->add_option("--tol", theory_opts.config.tol, "Float tolerance for the lemma checks")->capture_default_str();
  verify->add_option("--eigen-tol", theory_opts.config.eigen_tol, "Eigenvalue tolerance")->capture_default_str();
  verify->add_option("--quad-tol", theory_opts.config.quad_tol, "Quadrature tolerance")->capture_default_str();
  verify->add_option("--out", theory_opts.out, "Write the JSON report here instead of stdout");
  verify->add_flag("--corrupt-mtilde", theory_opts.config.corrupt_mtilde_sign)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    check_thread_env();
    if (exact_flag && hard.samples > 0) throw ParseError("--exact and --samples are mutually exclusive");
    if (*search) return cmd_search(search_opts, method, k, pad, timing, out);
    if (*eval) return cmd_eval(eval_opts, eval_subset, out);
    if (*gen) return cmd_gen_hard(hard, out);
    if (*verify) return cmd_verify_theory(theory_opts, out);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kExitCapacityError;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  return kExitInputError;
}

}  // namespace crossgreed::cli
