#include "asp/hyper_tuner.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "asp/error.hpp"

namespace asp {
namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// True when cell `a` should replace the current best `b`.
bool better(const SweepCell& a, const SweepCell& b) {
  if (!nearly_equal(a.total, b.total)) return a.total < b.total;
  if (a.w != b.w) return a.w > b.w;
  return std::abs(a.d - 0.5) < std::abs(b.d - 0.5);
}

}  // namespace

void validate(const SweepGrid& grid) {
  if (grid.d_values.empty() || grid.w_values.empty()) throw InvalidParameter("sweep grid must not be empty");
  for (double d : grid.d_values) {
    if (!(d > 0.0 && d < 1.0)) {
      throw InvalidParameter("damping factor must satisfy 0 < d < 1, got " + std::to_string(d));
    }
  }
  for (int w : grid.w_values) {
    if (w < 1) throw InvalidParameter("citing window must be >= 1, got " + std::to_string(w));
  }
  if (grid.years.first > grid.years.last) throw InvalidParameter("sweep year interval is empty");
}

Deviation subject_deviation(std::span<const double> asp_values, const CitationGraph& graph, int year,
                            DeviationNorm norm) {
  if (asp_values.size() != graph.size()) throw InvalidParameter("ASP vector does not match the graph");
  const std::size_t n_subjects = graph.subject_labels().size();
  std::vector<double> sum(n_subjects, 0.0);
  std::vector<std::int64_t> count(n_subjects, 0);
  double grand_sum = 0.0;
  std::int64_t grand_count = 0;
  for (NodeId v = 0; v < graph.size(); ++v) {
    if (graph.year(v) != year) continue;
    grand_sum += asp_values[v];
    ++grand_count;
    for (auto s : graph.subjects(v)) {
      sum[s] += asp_values[v];
      ++count[s];
    }
  }
  if (grand_count == 0) return {0.0, true};

  const double grand_mean = grand_sum / static_cast<double>(grand_count);
  double total = 0.0;
  for (std::size_t s = 0; s < n_subjects; ++s) {
    if (count[s] == 0) continue;
    const double gap = sum[s] / static_cast<double>(count[s]) - grand_mean;
    total += norm == DeviationNorm::l1 ? std::abs(gap) : gap * gap;
  }
  return {norm == DeviationNorm::l1 ? total : std::sqrt(total), false};
}

SweepResult run_sweep(const CitationGraph& graph, const SweepGrid& grid, const SweepOptions& options) {
  validate(grid);
  validate(options.asp);

  SweepResult result;
  result.d_values = grid.d_values;
  result.w_values = grid.w_values;
  for (int y = grid.years.first; y <= grid.years.last; ++y) result.years.push_back(y);
  result.tie_break = kTieBreakRule;

  const std::size_t n_w = grid.w_values.size();
  const std::size_t n_cells = grid.d_values.size() * n_w;
  result.cells.resize(n_cells);

  // Windowed graphs are shared by every d for the same w.
  std::vector<CitationGraph> windowed;
  if (options.window_asp_graph) {
    windowed.reserve(n_w);
    for (int w : grid.w_values) windowed.push_back(filter_window(graph, w));
  }

  const int threads = options.asp.threads;
  const bool across_cells = n_cells > 1 && threads != 1;
  AspConfig base = options.asp;
  if (across_cells) base.threads = 1;

  auto solve_cell = [&](std::size_t c) {
    SweepCell& cell = result.cells[c];
    const std::size_t wi = c % n_w;
    cell.d = grid.d_values[c / n_w];
    cell.w = grid.w_values[wi];
    AspConfig config = base;
    config.d = cell.d;
    const CitationGraph& target = options.window_asp_graph ? windowed[wi] : graph;
    const AspResult asp = compute_asp(target, config);
    cell.valid = asp.converged;
    cell.iterations = asp.iterations;
    for (int y : result.years) {
      const double dev = subject_deviation(asp.values, target, y, options.norm).value;
      cell.per_year.push_back(dev);
      cell.total += dev;
    }
  };

  if (across_cells) {
    const auto count = static_cast<std::int64_t>(n_cells);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (std::int64_t c = 0; c < count; ++c) solve_cell(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < n_cells; ++c) solve_cell(c);
  }

  if (std::any_of(result.cells.begin(), result.cells.end(), [](const SweepCell& c) { return c.valid; })) {
    result.optimum = select_optimal(result);
  }
  return result;
}

SweepResult run_sweep(const std::vector<ArticleRecord>& articles, const std::vector<RawEdge>& edges,
                      const PreprocessPolicy& policy, const SweepGrid& grid, const SweepOptions& options) {
  validate(grid);
  auto [graph, report] = build_graph(articles, edges, policy);
  return run_sweep(graph, grid, options);
}

std::pair<double, int> select_optimal(const SweepResult& sweep) {
  const SweepCell* best = nullptr;
  for (const auto& cell : sweep.cells) {
    if (!cell.valid) continue;
    if (best == nullptr || better(cell, *best)) best = &cell;
  }
  if (best == nullptr) throw InvalidParameter("no converged cell in the sweep");
  return {best->d, best->w};
}

}  // namespace asp
