#pragma once

#include <span>
#include <vector>

#include "asp/citation_graph.hpp"

namespace asp {

struct AspConfig {
  double d = 0.5;
  double epsilon = 0.01;
  int max_iterations = 100;
  /// Pull-based summation in in-row order; bit-identical for any thread count.
  bool deterministic = true;
  /// Worker threads; 0 lets the runtime decide.
  int threads = 0;
};

/// Throws InvalidParameter unless 0 < d < 1, epsilon > 0, max_iterations > 0.
void validate(const AspConfig& config);

struct AspResult {
  std::vector<double> values;
  int iterations = 0;
  std::vector<double> residuals;
  bool converged = false;

  /// sum(values) / N; equals 1 only when no prestige leaks through dangling nodes.
  double mass_ratio() const;
};

/// Max-norm distance between two equally sized vectors.
double residual(std::span<const double> prev, std::span<const double> next);

/// Jacobi iteration of ASP_i = (1 - d) + d * sum_{j cites i} ASP_j / m_j from the
/// all-ones vector until the max-norm change drops below epsilon. Nodes without
/// references pass nothing on. Non-convergence is reported via `converged`.
AspResult compute_asp(const CitationGraph& graph, const AspConfig& config = {});

/// Exact fixed point by a single sweep in topological order. Throws InvalidParameter
/// when the graph has a cycle.
std::vector<double> compute_asp_dag_oracle(const CitationGraph& graph, double d);

/// Dense-matrix reference iteration to a 1e-12 residual; graphs above
/// kDenseOracleLimit nodes are rejected.
inline constexpr std::size_t kDenseOracleLimit = 2000;
std::vector<double> compute_asp_dense_oracle(const CitationGraph& graph, const AspConfig& config);

}  // namespace asp
