#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "asp/error.hpp"
#include "asp/hyper_tuner.hpp"
#include "test_support.hpp"

namespace asp {
namespace {

using testing::make_graph;
using testing::random_graph;

// Independent recomputation: group (value, subject) pairs naively per subject.
double naive_deviation(const std::vector<double>& asp, const CitationGraph& g, int year) {
  std::map<std::string, std::vector<double>> per_subject;
  std::vector<double> all;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.year(v) != year) continue;
    all.push_back(asp[v]);
    for (auto s : g.subjects(v)) per_subject[g.subject_labels()[s]].push_back(asp[v]);
  }
  if (all.empty()) return 0.0;
  long double grand = 0;
  for (double x : all) grand += x;
  grand /= all.size();
  long double total = 0;
  for (const auto& [label, values] : per_subject) {
    long double m = 0;
    for (double x : values) m += x;
    m /= values.size();
    total += std::fabs(m - grand);
  }
  return static_cast<double>(total);
}

TEST(SubjectDeviation, ConstantValuesGiveZero) {
  auto g = make_graph({2000, 2000, 2000}, {}, {{"A"}, {"B"}, {"A", "C"}});
  EXPECT_NEAR(subject_deviation(std::vector<double>(3, 0.7), g, 2000).value, 0.0, 1e-15);
}

TEST(SubjectDeviation, TwoSubjects) {
  auto g = make_graph({2000, 2000}, {}, {{"A"}, {"B"}});
  const std::vector<double> asp{0.6, 0.8};
  EXPECT_NEAR(subject_deviation(asp, g, 2000).value, 0.2, 1e-15);
  EXPECT_NEAR(subject_deviation(asp, g, 2000, DeviationNorm::l2).value, std::sqrt(0.02), 1e-15);
}

TEST(SubjectDeviation, EmptyYearFlagged) {
  auto g = make_graph({2000}, {});
  auto dev = subject_deviation(std::vector<double>{0.5}, g, 1999);
  EXPECT_TRUE(dev.empty_year);
  EXPECT_EQ(dev.value, 0.0);
}

TEST(SubjectDeviation, MatchesNaiveRecomputation) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> value(0.5, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph({.n = 300, .first_year = 2000, .last_year = 2003, .n_subjects = 6}, rng);
    std::vector<double> asp(g.size());
    for (auto& x : asp) x = value(rng);
    for (int year = 2000; year <= 2003; ++year) {
      ASSERT_NEAR(subject_deviation(asp, g, year).value, naive_deviation(asp, g, year), 1e-12);
    }
  }
}

TEST(SubjectDeviation, ShiftAndRelabelInvariant) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> value(0.5, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_graph({.n = 200, .first_year = 2000, .last_year = 2000, .n_subjects = 5}, rng);
    std::vector<double> asp(g.size());
    for (auto& x : asp) x = value(rng);
    const double base = subject_deviation(asp, g, 2000).value;

    std::vector<double> shifted = asp;
    for (auto& x : shifted) x += 3.25;
    EXPECT_NEAR(subject_deviation(shifted, g, 2000).value, base, 1e-12);

    // Rename subjects through a random permutation.
    auto nodes = g.nodes();
    std::vector<std::string> renamed = nodes.subject_labels;
    std::shuffle(renamed.begin(), renamed.end(), rng);
    std::vector<std::vector<std::string>> subjects(g.size());
    for (NodeId v = 0; v < g.size(); ++v) {
      for (auto s : g.subjects(v)) subjects[v].push_back("X" + renamed[s]);
    }
    auto relabeled = make_graph(nodes.years, testing::edges_of(g), subjects);
    EXPECT_NEAR(subject_deviation(asp, relabeled, 2000).value, base, 1e-12);
  }
}

SweepResult fake_sweep(std::vector<std::tuple<double, int, double, bool>> cells) {
  SweepResult s;
  for (auto [d, w, total, valid] : cells) {
    SweepCell c;
    c.d = d;
    c.w = w;
    c.total = total;
    c.valid = valid;
    s.cells.push_back(c);
  }
  return s;
}

TEST(SelectOptimal, UniqueMinimum) {
  auto s = fake_sweep({{0.3, 2, 1.0, true}, {0.5, 5, 0.4, true}, {0.7, 5, 0.9, true}});
  EXPECT_EQ(select_optimal(s), std::make_pair(0.5, 5));
}

TEST(SelectOptimal, TiesPreferLargerWindowThenDNearHalf) {
  auto s = fake_sweep({{0.5, 3, 0.4, true}, {0.5, 5, 0.4, true}});
  EXPECT_EQ(select_optimal(s), std::make_pair(0.5, 5));
  auto t = fake_sweep({{0.2, 5, 0.4, true}, {0.6, 5, 0.4, true}, {0.9, 5, 0.4, true}});
  EXPECT_EQ(select_optimal(t), std::make_pair(0.6, 5));
}

TEST(SelectOptimal, InvalidCellsIgnored) {
  auto s = fake_sweep({{0.5, 3, 0.1, false}, {0.5, 5, 0.4, true}});
  EXPECT_EQ(select_optimal(s), std::make_pair(0.5, 5));
  auto none = fake_sweep({{0.5, 3, 0.1, false}});
  EXPECT_THROW(select_optimal(none), InvalidParameter);
}

TEST(RunSweep, GridValidation) {
  auto g = make_graph({2000}, {});
  SweepGrid grid;
  grid.d_values = {0.5, 1.0};
  EXPECT_THROW(run_sweep(g, grid), InvalidParameter);
  grid.d_values = {};
  EXPECT_THROW(run_sweep(g, grid), InvalidParameter);
  grid.d_values = {0.5};
  grid.w_values = {0};
  EXPECT_THROW(run_sweep(g, grid), InvalidParameter);
}

TEST(RunSweep, SingletonGridMatchesDirectComposition) {
  std::mt19937_64 rng(79);
  auto g = random_graph({.n = 2000, .mean_out_degree = 5, .first_year = 1990, .last_year = 2000,
                         .same_year_cycles = true, .n_subjects = 4},
                        rng);
  SweepGrid grid;
  grid.d_values = {0.5};
  grid.w_values = {5};
  grid.years = {1992, 1998};
  auto sweep = run_sweep(g, grid);
  ASSERT_EQ(sweep.cells.size(), 1u);
  ASSERT_TRUE(sweep.optimum.has_value());
  EXPECT_EQ(*sweep.optimum, std::make_pair(0.5, 5));

  const auto windowed = filter_window(g, 5);
  const auto asp = compute_asp(windowed, AspConfig{});
  double total = 0.0;
  for (int y = 1992; y <= 1998; ++y) total += subject_deviation(asp.values, windowed, y).value;
  EXPECT_EQ(sweep.cells[0].total, total);
  EXPECT_EQ(sweep.cells[0].per_year.size(), 7u);
}

TEST(RunSweep, CellsIndependentOfThreading) {
  std::mt19937_64 rng(83);
  auto g = random_graph({.n = 3000, .mean_out_degree = 5, .first_year = 1990, .last_year = 2000,
                         .n_subjects = 4},
                        rng);
  SweepGrid grid;
  grid.d_values = {0.2, 0.5, 0.8};
  grid.w_values = {2, 5};
  grid.years = {1990, 2000};
  SweepOptions serial;
  serial.asp.threads = 1;
  SweepOptions parallel;
  parallel.asp.threads = 4;
  auto a = run_sweep(g, grid, serial);
  auto b = run_sweep(g, grid, parallel);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    EXPECT_EQ(a.cells[c].total, b.cells[c].total);
    EXPECT_EQ(a.cells[c].d, grid.d_values[c / 2]);
    EXPECT_EQ(a.cells[c].w, grid.w_values[c % 2]);
  }
  EXPECT_EQ(a.optimum, b.optimum);
}

TEST(RunSweep, NonConvergedCellsMarkedInvalid) {
  std::vector<int> years;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 0; v < 30; ++v) {
    years.push_back(1990);
    if (v > 0) edges.emplace_back(v, v - 1);
  }
  auto g = make_graph(years, edges);
  SweepGrid grid;
  grid.d_values = {0.1, 0.9};
  grid.w_values = {1};
  grid.years = {1990, 1990};
  SweepOptions options;
  options.asp.epsilon = 1e-9;
  options.asp.max_iterations = 12;
  auto sweep = run_sweep(g, grid, options);
  EXPECT_TRUE(sweep.cells[0].valid);
  EXPECT_FALSE(sweep.cells[1].valid);
  EXPECT_EQ(*sweep.optimum, std::make_pair(0.1, 1));
}

// One subject attracts ten times the citations of the rest. ASP is 1 - d plus a
// first-order term in d, so for small d the total deviation is linear in d.
TEST(RunSweep, DominantSubjectDeviationLinearForSmallD) {
  std::mt19937_64 rng(89);
  const std::size_t n = 6000;
  std::vector<int> years(n);
  std::vector<std::vector<std::string>> subjects(n);
  for (std::size_t v = 0; v < n; ++v) {
    years[v] = 1990 + static_cast<int>(v * 10 / n);
    subjects[v] = {"S" + std::to_string(rng() % 4)};
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<NodeId> picked;
    while (picked.size() < std::min<std::size_t>(5, j)) {
      auto t = static_cast<NodeId>(rng() % j);
      // Rejection sampling: non-S0 targets kept with probability 1/10.
      if (subjects[t][0] != "S0" && rng() % 10 != 0) continue;
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
    }
    for (auto t : picked) edges.emplace_back(static_cast<NodeId>(j), t);
  }
  auto g = make_graph(years, edges, subjects);
  SweepGrid grid;
  grid.d_values = {1e-6, 1e-4};
  grid.w_values = {1, 3, 5};
  grid.years = {1991, 1998};
  SweepOptions opts;
  opts.asp.epsilon = 1e-15;
  auto sweep = run_sweep(g, grid, opts);
  for (std::size_t wi = 0; wi < grid.w_values.size(); ++wi) {
    const double slope_small = sweep.cell(0, wi).total / 1e-6;
    const double slope_large = sweep.cell(1, wi).total / 1e-4;
    EXPECT_GT(slope_small, 0.0);
    EXPECT_NEAR(slope_small, slope_large, 1e-2 * slope_small) << "w=" << grid.w_values[wi];
  }
}

}  // namespace
}  // namespace asp
