#include "asp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "asp/asp_engine.hpp"
#include "asp/citation_graph.hpp"
#include "asp/corpus_io.hpp"
#include "asp/error.hpp"
#include "asp/hyper_tuner.hpp"
#include "asp/metrics.hpp"
#include "asp/table.hpp"

namespace asp::cli {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Settings: every option is a named string resolved with precedence
// flag > config file > default, and the winning source is recorded.

struct SettingSpec {
  const char* name;
  const char* fallback;
  const char* help;
};

constexpr SettingSpec kInputSettings[] = {
    {"articles", "", "article table (tab-separated, header row)"},
    {"edges", "", "edge list: citing_id<TAB>cited_id"},
    {"snapshot", "", "binary graph snapshot to load instead of articles/edges"},
    {"out", "out", "output directory"},
    {"format", "csv", "report format: csv or json"},
    {"threads", "0", "worker threads (0 = auto)"},
    {"analysis-years", "1990:2015", "reported years FIRST:LAST"},
    {"corpus-years", "1981:2020", "years kept in the graph FIRST:LAST"},
    {"drop-no-subject", "true", "remove articles without subjects"},
    {"drop-no-reference", "true", "remove articles without references"},
    {"drop-future-refs", "true", "remove references to later-year articles"},
    {"dedup-parallel-edges", "true", "merge repeated citing/cited pairs"},
};

constexpr SettingSpec kSolveSettings[] = {
    {"d", "0.5", "damping factor, 0 < d < 1"},
    {"window", "5", "citing window in years"},
    {"window-asp", "false", "restrict the ASP graph to the citing window"},
    {"epsilon", "0.01", "max-norm convergence threshold"},
    {"max-iterations", "100", "iteration cap"},
    {"deterministic", "true", "thread-count independent summation"},
};

constexpr SettingSpec kSweepSettings[] = {
    {"d-values", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "damping factors to sweep"},
    {"w-values", "1,2,3,4,5,6,7,8,9,10", "citing windows to sweep"},
    {"epsilon", "0.01", "max-norm convergence threshold"},
    {"max-iterations", "100", "iteration cap"},
    {"deviation-norm", "l1", "subject deviation aggregator: l1 or l2"},
    {"window-asp", "true", "restrict each cell's ASP graph to its citing window"},
};

constexpr SettingSpec kStatsSettings[] = {
    {"cluster-map", "", "subject-to-cluster mapping file"},
    {"grade-table", "", "journal grade table: journal,sjr_quartile,h_quartile"},
    {"top", "20", "number of top-ASP articles to list with percentiles"},
    {"tail-quantile", "0.9", "quantile used as the Pareto threshold"},
    {"intensity-scale", "1", "scale constant for cross-citation intensity"},
    {"intensity-diagonal", "true", "keep self-intensity on the diagonal"},
    {"high-asp-percentile", "", "share report: minimum ASP percentile (needs --low-ncit-percentile)"},
    {"low-ncit-percentile", "", "share report: maximum citation percentile (needs --high-asp-percentile)"},
};

constexpr SettingSpec kSynthSettings[] = {
    {"n-articles", "10000", "number of articles"},
    {"years", "1981:2020", "publication years FIRST:LAST"},
    {"subjects", "10", "number of subjects"},
    {"mean-out-degree", "10", "mean references per article"},
    {"attachment-exponent", "1", "preferential attachment exponent"},
    {"seed", "42", "random seed"},
    {"out", "out", "output directory"},
};

constexpr SettingSpec kGraphCheckSettings[] = {
    {"save-snapshot", "", "write the preprocessed graph to this snapshot file"},
};

struct Setting {
  std::string value;
  std::string source;
};

class Settings {
 public:
  void declare(const SettingSpec& spec) { values_[spec.name] = {spec.fallback, "default"}; }
  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value, const std::string& source) {
    values_[key] = {std::move(value), source};
  }
  const std::map<std::string, Setting>& all() const { return values_; }

  const std::string& str(const std::string& key) const { return values_.at(key).value; }

  bool flag(const std::string& key) const {
    const auto& v = str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InvalidParameter("--" + key + ": expected true or false, got '" + v + "'");
  }

  template <typename T>
  T number(const std::string& key) const {
    return parse_number<T>(key, str(key));
  }

  template <typename T>
  std::vector<T> list(const std::string& key) const {
    std::vector<T> out;
    std::stringstream in(str(key));
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) out.push_back(parse_number<T>(key, item));
    }
    return out;
  }

  YearRange years(const std::string& key) const {
    const auto& v = str(key);
    auto colon = v.find(':');
    if (colon == std::string::npos) throw InvalidParameter("--" + key + ": expected FIRST:LAST, got '" + v + "'");
    YearRange r{parse_number<int>(key, v.substr(0, colon)), parse_number<int>(key, v.substr(colon + 1))};
    if (r.first > r.last) throw InvalidParameter("--" + key + ": empty interval '" + v + "'");
    return r;
  }

 private:
  template <typename T>
  static T parse_number(const std::string& key, const std::string& text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
      throw InvalidParameter("--" + key + ": cannot parse '" + text + "' as a number");
    }
    return value;
  }

  std::map<std::string, Setting> values_;
};

std::string json_to_setting(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) joined += (joined.empty() ? "" : ",") + json_to_setting(item);
    return joined;
  }
  return v.dump();
}

void apply_config_file(Settings& settings, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(0, path.string() + ": config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!settings.has(key)) throw InvalidParameter(path.string() + ": unknown setting '" + key + "'");
    settings.set(key, json_to_setting(value), "file");
  }
}

// ---------------------------------------------------------------------------
// Shared plumbing

struct Context {
  std::string command;
  Settings settings;
  std::ostream& out;
  std::ostream& err;
};

struct Reports {
  fs::path dir;
  TableFormat format;

  void write(const std::string& stem, const Table& table) const {
    write_table(table, dir / (stem + extension(format)), format);
  }
};

Reports open_reports(const Context& ctx, const std::string& dir_key = "out") {
  fs::path dir = ctx.settings.str(dir_key);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");

  nlohmann::ordered_json banner;
  banner["command"] = ctx.command;
  banner["precedence"] = "flag > file > default";
  auto& settings = banner["settings"];
  for (const auto& [key, setting] : ctx.settings.all()) {
    settings[key] = {{"value", setting.value}, {"source", setting.source}};
  }
  write_file_atomic(dir / "provenance.json", banner.dump(2) + "\n");
  return {dir, parse_table_format(ctx.settings.str("format"))};
}

fs::path existing_input(const Settings& s, const std::string& key) {
  fs::path p = s.str(key);
  if (p.empty()) throw InvalidParameter("--" + key + " is required");
  if (!fs::exists(p)) throw IoError("input file '" + p.string() + "' (--" + key + ") does not exist");
  return p;
}

PreprocessPolicy policy_from(const Settings& s) {
  PreprocessPolicy p;
  p.drop_no_subject = s.flag("drop-no-subject");
  p.drop_no_reference = s.flag("drop-no-reference");
  p.drop_future_refs = s.flag("drop-future-refs");
  p.dedup_parallel_edges = s.flag("dedup-parallel-edges");
  p.analysis_years = s.years("analysis-years");
  p.corpus_years = s.years("corpus-years");
  validate(p);
  return p;
}

void print_report(std::ostream& out, const PreprocessReport& r) {
  out << "articles_in: " << r.articles_in << '\n'
      << "articles_dropped_out_of_years: " << r.articles_dropped_out_of_years << '\n'
      << "articles_dropped_no_subject: " << r.articles_dropped_no_subject << '\n'
      << "articles_dropped_no_reference: " << r.articles_dropped_no_reference << '\n'
      << "edges_in: " << r.edges_in << '\n'
      << "edges_dropped_dangling: " << r.edges_dropped_dangling << '\n'
      << "self_loops_removed: " << r.self_loops_removed << '\n'
      << "edges_dropped_future: " << r.edges_dropped_future << '\n'
      << "parallel_edges_merged: " << r.parallel_edges_merged << '\n'
      << "nodes_out: " << r.nodes_out << '\n'
      << "edges_out: " << r.edges_out << '\n';
}

Table report_table(const PreprocessReport& r) {
  Table t({"item", "count"});
  const std::pair<const char*, std::int64_t> items[] = {
      {"articles_in", r.articles_in},
      {"articles_dropped_out_of_years", r.articles_dropped_out_of_years},
      {"articles_dropped_no_subject", r.articles_dropped_no_subject},
      {"articles_dropped_no_reference", r.articles_dropped_no_reference},
      {"edges_in", r.edges_in},
      {"edges_dropped_dangling", r.edges_dropped_dangling},
      {"self_loops_removed", r.self_loops_removed},
      {"edges_dropped_future", r.edges_dropped_future},
      {"parallel_edges_merged", r.parallel_edges_merged},
      {"nodes_out", r.nodes_out},
      {"edges_out", r.edges_out},
  };
  for (const auto& [name, count] : items) t.add_row({std::string(name), count});
  return t;
}

CitationGraph load_graph(const Context& ctx, PreprocessReport* report_out = nullptr) {
  const Settings& s = ctx.settings;
  if (!s.str("snapshot").empty()) {
    return load_snapshot(existing_input(s, "snapshot"));
  }
  const fs::path articles_path = existing_input(s, "articles");
  const fs::path edges_path = existing_input(s, "edges");
  auto parsed = read_articles(articles_path);
  if (!parsed.errors.empty()) {
    for (const auto& e : parsed.errors) ctx.err << articles_path.string() << ": line " << e.line << ": " << e.message << '\n';
    throw ParseError(parsed.errors.front().line,
                     articles_path.string() + ": " + std::to_string(parsed.errors.size()) + " malformed rows");
  }
  auto edges = read_edges(edges_path);
  auto [graph, report] = build_graph(parsed.records, edges, policy_from(s));
  if (report_out) *report_out = report;
  return std::move(graph);
}

AspConfig asp_config_from(const Settings& s) {
  AspConfig c;
  c.d = s.number<double>("d");
  c.epsilon = s.number<double>("epsilon");
  c.max_iterations = s.number<int>("max-iterations");
  c.deterministic = s.flag("deterministic");
  c.threads = s.number<int>("threads");
  validate(c);
  return c;
}

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

Table stats_table(const std::vector<std::pair<std::string, std::vector<double>>>& metrics) {
  Table t({"metric", "n", "min", "q1", "median", "mean", "q3", "max"});
  for (const auto& [name, values] : metrics) {
    if (values.empty()) {
      t.add_row({name, std::int64_t{0}, {}, {}, {}, {}, {}, {}});
      continue;
    }
    auto s = summary_stats(values);
    t.add_row({name, static_cast<std::int64_t>(values.size()), s.min, s.q1, s.median, s.mean, s.q3, s.max});
  }
  return t;
}

/// ASP solve shared by `asp` and `stats`.
struct Solved {
  CitationGraph graph;
  AspResult asp;
  std::vector<std::int64_t> ncit;
  std::vector<NodeId> reported;  // nodes inside the analysis years
};

Solved solve(const Context& ctx) {
  const Settings& s = ctx.settings;
  const AspConfig config = asp_config_from(s);
  const int window = s.number<int>("window");
  if (window < 1) throw InvalidParameter("--window must be >= 1");
  const YearRange analysis = s.years("analysis-years");

  Solved solved{load_graph(ctx), {}, {}, {}};
  const CitationGraph& graph = solved.graph;
  if (s.flag("window-asp")) {
    solved.asp = compute_asp(filter_window(graph, window), config);
  } else {
    solved.asp = compute_asp(graph, config);
  }
  solved.ncit = citation_counts(graph, window);
  for (NodeId v = 0; v < graph.size(); ++v) {
    if (analysis.contains(graph.year(v))) solved.reported.push_back(v);
  }
  ctx.out << "nodes " << graph.size() << ", edges " << graph.edge_count() << ", iterations "
          << solved.asp.iterations << ", converged " << (solved.asp.converged ? "true" : "false") << '\n';
  return solved;
}

void write_convergence(const Reports& reports, const AspResult& asp) {
  Table log({"iteration", "residual"});
  for (std::size_t k = 0; k < asp.residuals.size(); ++k) {
    log.add_row({static_cast<std::int64_t>(k + 1), asp.residuals[k]});
  }
  reports.write("convergence", log);

  Table run({"key", "value"});
  run.add_row({std::string("converged"), std::string(asp.converged ? "true" : "false")});
  run.add_row({std::string("iterations"), static_cast<std::int64_t>(asp.iterations)});
  run.add_row({std::string("final_residual"), asp.residuals.empty() ? Cell{} : Cell{asp.residuals.back()}});
  run.add_row({std::string("mass_ratio"), asp.mass_ratio()});
  reports.write("run_summary", run);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_asp(Context& ctx) {
  Solved solved = solve(ctx);
  const Reports reports = open_reports(ctx);
  const auto& graph = solved.graph;

  Table table({"article_id", "year", "asp", "n_cit_windowed", "iterations_to_converge"});
  std::vector<double> asp_values, ncit_values;
  for (NodeId v : solved.reported) {
    table.add_row({graph.id(v), static_cast<std::int64_t>(graph.year(v)), solved.asp.values[v], solved.ncit[v],
                   static_cast<std::int64_t>(solved.asp.iterations)});
    asp_values.push_back(solved.asp.values[v]);
    ncit_values.push_back(static_cast<double>(solved.ncit[v]));
  }
  reports.write("asp", table);
  write_convergence(reports, solved.asp);
  reports.write("summary", stats_table({{"asp", asp_values}, {"ncit", ncit_values}}));
  return solved.asp.converged ? kSuccess : kNotConverged;
}

int cmd_sweep(Context& ctx) {
  const Settings& s = ctx.settings;
  SweepGrid grid;
  grid.d_values = s.list<double>("d-values");
  grid.w_values = s.list<int>("w-values");
  grid.years = s.years("analysis-years");
  validate(grid);

  SweepOptions options;
  options.asp.epsilon = s.number<double>("epsilon");
  options.asp.max_iterations = s.number<int>("max-iterations");
  options.asp.threads = s.number<int>("threads");
  options.window_asp_graph = s.flag("window-asp");
  const auto& norm = s.str("deviation-norm");
  if (norm == "l1") {
    options.norm = DeviationNorm::l1;
  } else if (norm == "l2") {
    options.norm = DeviationNorm::l2;
  } else {
    throw InvalidParameter("--deviation-norm must be l1 or l2, got '" + norm + "'");
  }
  validate(options.asp);

  const CitationGraph graph = load_graph(ctx);
  const SweepResult sweep = run_sweep(graph, grid, options);
  const Reports reports = open_reports(ctx);

  Table long_form({"d", "w", "year", "deviation", "valid"});
  for (const auto& cell : sweep.cells) {
    const std::string valid = cell.valid ? "true" : "false";
    for (std::size_t y = 0; y < sweep.years.size(); ++y) {
      long_form.add_row({cell.d, static_cast<std::int64_t>(cell.w), std::to_string(sweep.years[y]), cell.per_year[y], valid});
    }
    long_form.add_row({cell.d, static_cast<std::int64_t>(cell.w), std::string("total"), cell.total, valid});
  }
  reports.write("sweep", long_form);

  std::vector<std::string> columns{"d"};
  for (int w : sweep.w_values) columns.push_back("w" + std::to_string(w));
  Table heat(columns);
  for (std::size_t di = 0; di < sweep.d_values.size(); ++di) {
    std::vector<Cell> row{sweep.d_values[di]};
    for (std::size_t wi = 0; wi < sweep.w_values.size(); ++wi) {
      const auto& cell = sweep.cell(di, wi);
      row.push_back(cell.valid ? Cell{cell.total} : Cell{});
    }
    heat.add_row(std::move(row));
  }
  reports.write("sweep_heat", heat);

  Table optimum({"d", "w", "total_deviation", "tie_break"});
  if (sweep.optimum) {
    const auto [d, w] = *sweep.optimum;
    double total = 0.0;
    for (const auto& c : sweep.cells) {
      if (c.d == d && c.w == w) total = c.total;
    }
    optimum.add_row({d, static_cast<std::int64_t>(w), total, sweep.tie_break});
    ctx.out << "optimum d=" << format_double(d) << " w=" << w << '\n';
  }
  reports.write("optimum", optimum);
  if (!sweep.optimum) {
    ctx.err << "no sweep cell converged\n";
    return kNotConverged;
  }
  return kSuccess;
}

int cmd_stats(Context& ctx) {
  const Settings& s = ctx.settings;
  std::optional<ClusterMap> clusters;
  if (!s.str("cluster-map").empty()) clusters = read_cluster_map(existing_input(s, "cluster-map"));
  std::optional<GradeTable> grades;
  if (!s.str("grade-table").empty()) grades = read_grade_table(existing_input(s, "grade-table"));
  const auto top_n = s.number<int>("top");
  const auto tail_q = s.number<double>("tail-quantile");
  IntensityOptions intensity;
  intensity.scale = s.number<double>("intensity-scale");
  intensity.include_diagonal = s.flag("intensity-diagonal");
  std::optional<std::pair<double, double>> share_thresholds;
  if (s.str("high-asp-percentile").empty() != s.str("low-ncit-percentile").empty()) {
    throw InvalidParameter("--high-asp-percentile and --low-ncit-percentile must be given together");
  }
  if (!s.str("high-asp-percentile").empty()) {
    share_thresholds = {s.number<double>("high-asp-percentile"), s.number<double>("low-ncit-percentile")};
  }

  Solved solved = solve(ctx);
  const auto& graph = solved.graph;
  const auto& subject_labels = graph.subject_labels();

  std::vector<std::vector<std::string>> all_subjects(graph.size());
  for (NodeId v = 0; v < graph.size(); ++v) {
    for (auto sid : graph.subjects(v)) all_subjects[v].push_back(subject_labels[sid]);
  }
  if (clusters) {
    if (auto missing = unmapped_subjects(all_subjects, *clusters); !missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw InvalidParameter("cluster map has no entry for: " + list);
    }
  }

  // Analysis-year views aligned by position.
  std::vector<double> asp, ncit_d, refs, coauthors;
  std::vector<std::int64_t> ncit, refs_i, coauthors_i;
  std::vector<int> years;
  std::vector<std::string> groups;
  std::vector<std::vector<std::string>> subjects;
  std::vector<std::optional<std::string>> journals;
  for (NodeId v : solved.reported) {
    asp.push_back(solved.asp.values[v]);
    ncit.push_back(solved.ncit[v]);
    ncit_d.push_back(static_cast<double>(solved.ncit[v]));
    refs_i.push_back(graph.n_references_declared(v));
    refs.push_back(static_cast<double>(graph.n_references_declared(v)));
    coauthors_i.push_back(graph.n_coauthors(v));
    coauthors.push_back(static_cast<double>(graph.n_coauthors(v)));
    years.push_back(graph.year(v));
    subjects.push_back(all_subjects[v]);
    std::string group = "(none)";
    if (!all_subjects[v].empty()) group = clusters ? assign_cluster(all_subjects[v], *clusters) : all_subjects[v].front();
    groups.push_back(std::move(group));
    const auto j = graph.journal(v);
    journals.push_back(j < 0 ? std::nullopt : std::optional<std::string>(graph.journal_labels()[j]));
  }

  const Reports reports = open_reports(ctx);
  write_convergence(reports, solved.asp);
  reports.write("summary", stats_table({{"asp", asp}, {"ncit", ncit_d}, {"references", refs}, {"coauthors", coauthors}}));

  {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_group;
    for (std::size_t i = 0; i < asp.size(); ++i) {
      by_group[groups[i]].first.push_back(asp[i]);
      by_group[groups[i]].second.push_back(ncit_d[i]);
    }
    Table t({"group", "metric", "n", "min", "q1", "median", "mean", "q3", "max"});
    for (const auto& [group, values] : by_group) {
      for (const auto& [metric, sample] : {std::pair{"asp", &values.first}, std::pair{"ncit", &values.second}}) {
        auto st = summary_stats(*sample);
        t.add_row({group, std::string(metric), static_cast<std::int64_t>(sample->size()), st.min, st.q1, st.median,
                   st.mean, st.q3, st.max});
      }
    }
    reports.write("group_summary", t);
  }

  {
    Table t({"group", "year", "metric", "alpha", "x_min", "n_tail"});
    for (const auto& [metric, sample] : {std::pair{"asp", &asp}, std::pair{"ncit", &ncit_d}}) {
      for (const auto& row : tail_index_series(*sample, groups, years, tail_q)) {
        if (row.estimate) {
          t.add_row({row.group, static_cast<std::int64_t>(row.year), std::string(metric), row.estimate->alpha,
                     row.estimate->x_min, row.estimate->n_tail});
        } else {
          t.add_row({row.group, static_cast<std::int64_t>(row.year), std::string(metric), {}, {}, {}});
        }
      }
    }
    reports.write("tail_index", t);
  }

  {
    Table t({"group", "decile", "n", "r"});
    for (const auto& row : decile_correlations(asp, ncit, groups)) {
      t.add_row({row.group, static_cast<std::int64_t>(row.decile), row.n, opt(row.r)});
    }
    reports.write("decile_correlations", t);
  }

  {
    Table t({"group", "year", "ratio"});
    for (const auto& row : noncited_ratio(ncit, groups, years)) {
      t.add_row({row.group, static_cast<std::int64_t>(row.year), opt(row.value)});
    }
    reports.write("noncited_ratio", t);
  }

  auto write_intensity = [&](const std::string& stem, const IntensityMatrix& m) {
    Table long_form({"s", "t", "value"});
    std::vector<std::string> columns{"label"};
    columns.insert(columns.end(), m.labels.begin(), m.labels.end());
    Table square(columns);
    for (std::size_t a = 0; a < m.labels.size(); ++a) {
      std::vector<Cell> row{m.labels[a]};
      for (std::size_t b = 0; b < m.labels.size(); ++b) {
        long_form.add_row({m.labels[a], m.labels[b], m.at(a, b)});
        row.push_back(m.at(a, b));
      }
      square.add_row(std::move(row));
    }
    reports.write(stem + "_long", long_form);
    reports.write(stem + "_matrix", square);
  };
  write_intensity("intensity", cross_intensity(graph, intensity));
  if (clusters) {
    IntensityOptions cluster_level = intensity;
    cluster_level.level = IntensityLevel::cluster;
    write_intensity("cluster_intensity", cross_intensity(graph, cluster_level, &*clusters));
  }

  if (grades) {
    const auto agg = journal_aggregate(asp, ncit, journals, *grades);
    Table t({"grade_kind", "grade", "metric", "stat", "n_journals", "range_lo", "range_hi", "mean"});
    for (const auto& r : agg.rows) {
      t.add_row({r.grade_kind, r.grade, r.metric, r.stat, r.n_journals, r.range_lo, r.range_hi, r.mean});
    }
    reports.write("journal_grades", t);
    ctx.out << "journals without a grade: " << agg.journals_unmatched << " (" << agg.articles_unmatched
            << " articles excluded)\n";
  }

  {
    Table bins({"covariate", "bin", "n", "median_asp"});
    Table corr({"covariate", "r"});
    for (const auto& [name, cov] : {std::pair{"references", &refs_i}, std::pair{"coauthors", &coauthors_i}}) {
      const auto assoc = covariate_association(asp, *cov);
      corr.add_row({std::string(name), opt(assoc.r)});
      for (const auto& b : assoc.bins) bins.add_row({std::string(name), b.label, b.n, opt(b.median_asp)});
    }
    reports.write("covariate_bins", bins);
    reports.write("covariate_pearson", corr);
  }

  if (clusters) {
    Table t({"cluster", "year", "metric", "stat", "value"});
    for (const auto& [metric, sample] : {std::pair{"asp", &asp}, std::pair{"ncit", &ncit_d}}) {
      for (auto stat : {RollupStat::mean, RollupStat::median}) {
        for (const auto& row : cluster_rollup(*sample, subjects, *clusters, stat, years)) {
          t.add_row({row.group, static_cast<std::int64_t>(row.year), std::string(metric),
                     std::string(stat == RollupStat::mean ? "mean" : "median"), opt(row.value)});
        }
      }
    }
    reports.write("cluster_rollup", t);
  }

  if (share_thresholds) {
    const auto [hi, lo] = *share_thresholds;
    Table t({"high_asp_percentile", "low_ncit_percentile", "n", "share"});
    t.add_row({hi, lo, static_cast<std::int64_t>(asp.size()), high_asp_low_citation_share(asp, ncit_d, hi, lo)});
    reports.write("high_asp_low_citation", t);
  }

  {
    std::vector<std::size_t> order(asp.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return asp[a] > asp[b]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(top_n, 0))));
    Table t({"rank", "article_id", "year", "asp", "asp_percentile", "ncit", "ncit_percentile"});
    for (std::size_t r = 0; r < order.size(); ++r) {
      const std::size_t i = order[r];
      t.add_row({static_cast<std::int64_t>(r + 1), graph.id(solved.reported[i]), static_cast<std::int64_t>(years[i]),
                 asp[i], static_cast<std::int64_t>(std::floor(percentile_rank(asp, asp[i]))), ncit[i],
                 static_cast<std::int64_t>(std::floor(percentile_rank(ncit_d, ncit_d[i])))});
    }
    reports.write("top_articles", t);
  }
  return solved.asp.converged ? kSuccess : kNotConverged;
}

int cmd_synth(Context& ctx) {
  const Settings& s = ctx.settings;
  SyntheticSpec spec;
  spec.n_articles = s.number<std::int64_t>("n-articles");
  const YearRange years = s.years("years");
  spec.year_range = {years.first, years.last};
  spec.n_subjects = s.number<int>("subjects");
  spec.mean_out_degree = s.number<double>("mean-out-degree");
  spec.attachment_exponent = s.number<double>("attachment-exponent");
  spec.seed = s.number<std::uint64_t>("seed");
  validate(spec);

  const auto corpus = generate_synthetic(spec);
  fs::path dir = s.str("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  write_articles(corpus.articles, dir / "articles.tsv");
  write_edges(corpus.edges, dir / "edges.tsv");

  nlohmann::ordered_json banner;
  banner["command"] = ctx.command;
  banner["precedence"] = "flag > file > default";
  for (const auto& [key, setting] : s.all()) {
    banner["settings"][key] = {{"value", setting.value}, {"source", setting.source}};
  }
  write_file_atomic(dir / "provenance.json", banner.dump(2) + "\n");
  ctx.out << "wrote " << corpus.articles.size() << " articles and " << corpus.edges.size() << " edges to "
          << dir.string() << '\n';
  return kSuccess;
}

int cmd_graph_check(Context& ctx) {
  PreprocessReport report;
  const CitationGraph graph = load_graph(ctx, &report);
  if (ctx.settings.str("snapshot").empty()) print_report(ctx.out, report);

  const auto topo = topological_order(graph);
  if (topo.acyclic()) {
    ctx.out << "acyclic: true\n";
  } else {
    ctx.out << "acyclic: false (" << topo.cycle_nodes.size() << " nodes on cycles)\n";
  }
  if (!ctx.settings.str("save-snapshot").empty()) {
    save_snapshot(graph, ctx.settings.str("save-snapshot"));
    ctx.out << "snapshot written to " << ctx.settings.str("save-snapshot") << '\n';
  }
  if (ctx.settings.str("snapshot").empty()) {
    const Reports reports = open_reports(ctx);
    reports.write("preprocess_report", report_table(report));
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct Subcommand {
  const char* name;
  const char* description;
  std::vector<std::span<const SettingSpec>> settings;
  int (*handler)(Context&);
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<Subcommand> subcommands = {
      {"asp", "compute ASP for a corpus", {kInputSettings, kSolveSettings}, cmd_asp},
      {"sweep", "sweep damping factor and citing window", {kInputSettings, kSweepSettings}, cmd_sweep},
      {"stats", "descriptive and comparative statistics", {kInputSettings, kSolveSettings, kStatsSettings}, cmd_stats},
      {"synth", "generate a synthetic corpus", {kSynthSettings}, cmd_synth},
      {"graph-check", "preprocess and report", {kInputSettings, kGraphCheckSettings}, cmd_graph_check},
  };

  CLI::App app{"Article prestige over citation networks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  std::string config_path;
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> apps;
  for (const auto& sub : subcommands) {
    CLI::App* sc = app.add_subcommand(sub.name, sub.description);
    sc->add_option("--config", config_path, "JSON file of settings (flags override it)");
    auto& values = flag_values[sub.name];
    for (auto group : sub.settings) {
      for (const auto& spec : group) {
        if (values.contains(spec.name)) continue;
        values[spec.name];
        sc->add_option(std::string("--") + spec.name, values[spec.name], spec.help)->default_str(spec.fallback);
      }
    }
    apps[sub.name] = sc;
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  for (const auto& sub : subcommands) {
    CLI::App* sc = apps[sub.name];
    if (!sc->parsed()) continue;
    Context ctx{sub.name, {}, out, err};
    try {
      for (auto group : sub.settings) {
        for (const auto& spec : group) {
          if (!ctx.settings.has(spec.name)) ctx.settings.declare(spec);
        }
      }
      if (!config_path.empty()) apply_config_file(ctx.settings, config_path);
      for (const auto& [name, value] : flag_values[sub.name]) {
        if (sc->count("--" + name) > 0) ctx.settings.set(name, value, "flag");
      }
      return sub.handler(ctx);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kInputError;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kInputError;
    }
  }
  return kInputError;
}

}  // namespace asp::cli
