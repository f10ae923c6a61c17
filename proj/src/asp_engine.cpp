#include "asp/asp_engine.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <omp.h>

#include <Eigen/Dense>

#include "asp/error.hpp"

namespace asp {

void validate(const AspConfig& config) {
  if (!(config.d > 0.0 && config.d < 1.0)) {
    throw InvalidParameter("damping factor must satisfy 0 < d < 1, got " + std::to_string(config.d));
  }
  if (!(config.epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
  if (config.max_iterations < 1) throw InvalidParameter("max_iterations must be positive");
  if (config.threads < 0) throw InvalidParameter("thread count must be >= 0");
}

double AspResult::mass_ratio() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double residual(std::span<const double> prev, std::span<const double> next) {
  if (prev.size() != next.size()) {
    throw InvalidParameter("residual of vectors with lengths " + std::to_string(prev.size()) + " and " +
                           std::to_string(next.size()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) worst = std::max(worst, std::abs(next[i] - prev[i]));
  return worst;
}

AspResult compute_asp(const CitationGraph& graph, const AspConfig& config) {
  validate(config);
  const auto n = static_cast<std::int64_t>(graph.size());
  const double d = config.d;
  const double uncited = 1.0 - d;
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
  const Csr& in = graph.in();
  const Csr& out = graph.out();

  AspResult result;
  std::vector<double> prev(graph.size(), 1.0);
  std::vector<double> next(graph.size(), 0.0);
  std::vector<double> share(graph.size(), 0.0);

  while (result.iterations < config.max_iterations) {
    // share[j] = ASP_j / m_j, zero for nodes without references.
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
      const auto m = out.offsets[j + 1] - out.offsets[j];
      share[j] = m == 0 ? 0.0 : prev[j] / static_cast<double>(m);
    }

    if (config.deterministic) {
#pragma omp parallel for num_threads(threads) schedule(dynamic, 4096)
      for (std::int64_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (auto k = in.offsets[i]; k < in.offsets[i + 1]; ++k) sum += share[in.targets[k]];
        next[i] = uncited + d * sum;
      }
    } else {
      std::fill(next.begin(), next.end(), 0.0);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 4096)
      for (std::int64_t j = 0; j < n; ++j) {
        const double s = share[j];
        for (auto k = out.offsets[j]; k < out.offsets[j + 1]; ++k) {
#pragma omp atomic
          next[out.targets[k]] += s;
        }
      }
#pragma omp parallel for num_threads(threads) schedule(static)
      for (std::int64_t i = 0; i < n; ++i) next[i] = uncited + d * next[i];
    }

    double worst = 0.0;
#pragma omp parallel for num_threads(threads) schedule(static) reduction(max : worst)
    for (std::int64_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(next[i] - prev[i]));

    prev.swap(next);
    ++result.iterations;
    result.residuals.push_back(worst);
    if (worst < config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.values = std::move(prev);
  return result;
}

std::vector<double> compute_asp_dag_oracle(const CitationGraph& graph, double d) {
  if (!(d > 0.0 && d < 1.0)) throw InvalidParameter("damping factor must satisfy 0 < d < 1");
  const auto topo = topological_order(graph);
  if (!topo.acyclic()) {
    throw InvalidParameter("exact DAG solver needs an acyclic graph; " +
                           std::to_string(topo.cycle_nodes.size()) + " nodes lie on cycles");
  }
  std::vector<double> values(graph.size(), 0.0);
  // Citing articles come first, so every contributor is final when a node is reached.
  for (NodeId i : topo.order) {
    double sum = 0.0;
    for (NodeId j : graph.citations(i)) sum += values[j] / static_cast<double>(graph.out_degree(j));
    values[i] = (1.0 - d) + d * sum;
  }
  return values;
}

std::vector<double> compute_asp_dense_oracle(const CitationGraph& graph, const AspConfig& config) {
  validate(config);
  const auto n = static_cast<Eigen::Index>(graph.size());
  if (graph.size() > kDenseOracleLimit) {
    throw InvalidParameter("dense oracle limited to " + std::to_string(kDenseOracleLimit) + " nodes, graph has " +
                           std::to_string(graph.size()));
  }
  Eigen::MatrixXd transfer = Eigen::MatrixXd::Zero(n, n);
  for (NodeId j = 0; j < graph.size(); ++j) {
    const auto m = static_cast<double>(graph.out_degree(j));
    for (NodeId i : graph.references(j)) transfer(i, j) = config.d / m;
  }
  const Eigen::VectorXd base = Eigen::VectorXd::Constant(n, 1.0 - config.d);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd y = base + transfer * x;
    const double change = n == 0 ? 0.0 : (y - x).cwiseAbs().maxCoeff();
    x = std::move(y);
    if (change < 1e-12) break;
  }
  return {x.data(), x.data() + n};
}

}  // namespace asp
