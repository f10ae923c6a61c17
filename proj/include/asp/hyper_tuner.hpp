#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asp/asp_engine.hpp"
#include "asp/citation_graph.hpp"

namespace asp {

struct SweepGrid {
  std::vector<double> d_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<int> w_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  YearRange years{1990, 2015};
};

void validate(const SweepGrid& grid);

/// How per-subject gaps from the grand mean are combined.
enum class DeviationNorm {
  l1,  ///< sum of absolute gaps
  l2,  ///< square root of the sum of squared gaps
};

struct Deviation {
  double value = 0.0;
  /// The year had no articles; value is 0 by definition.
  bool empty_year = false;
};

/// Gap between per-subject mean ASP and the grand mean over one year's articles.
/// A multi-subject article counts fully toward every subject it lists.
Deviation subject_deviation(std::span<const double> asp_values, const CitationGraph& graph, int year,
                            DeviationNorm norm = DeviationNorm::l1);

struct SweepOptions {
  /// Template for each cell's solve; `d` is overwritten per cell.
  AspConfig asp{};
  DeviationNorm norm = DeviationNorm::l1;
  /// Restrict the ASP graph to the cell's citing window before solving.
  bool window_asp_graph = true;
};

struct SweepCell {
  double d = 0.0;
  int w = 0;
  bool valid = false;  ///< the solve converged
  int iterations = 0;
  double total = 0.0;
  std::vector<double> per_year;  ///< aligned with SweepResult::years
};

struct SweepResult {
  std::vector<double> d_values;
  std::vector<int> w_values;
  std::vector<int> years;
  /// Row-major over (d index, w index).
  std::vector<SweepCell> cells;
  std::optional<std::pair<double, int>> optimum;
  std::string tie_break;

  const SweepCell& cell(std::size_t d_index, std::size_t w_index) const {
    return cells[d_index * w_values.size() + w_index];
  }
};

inline constexpr const char* kTieBreakRule =
    "minimum total deviation; ties (relative 1e-12) prefer larger w, then d closest to 0.5";

/// Solves every (d, w) cell on `graph` and sums the subject deviation over the grid's
/// years. Cells whose solve does not converge are kept but marked invalid.
SweepResult run_sweep(const CitationGraph& graph, const SweepGrid& grid, const SweepOptions& options = {});

/// Preprocesses the corpus with `policy`, then runs the sweep.
SweepResult run_sweep(const std::vector<ArticleRecord>& articles, const std::vector<RawEdge>& edges,
                      const PreprocessPolicy& policy, const SweepGrid& grid, const SweepOptions& options = {});

/// Argmin of the valid cells under kTieBreakRule. Throws InvalidParameter when no
/// cell is valid.
std::pair<double, int> select_optimal(const SweepResult& sweep);

}  // namespace asp
