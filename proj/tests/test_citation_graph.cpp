#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "asp/citation_graph.hpp"
#include "asp/error.hpp"
#include "test_support.hpp"

namespace asp {
namespace {

using testing::edges_of;
using testing::make_graph;
using testing::random_graph;
using testing::RandomGraphSpec;

ArticleRecord article(std::string id, int year, std::int64_t refs = 1, std::vector<std::string> subjects = {"S"}) {
  ArticleRecord a;
  a.article_id = std::move(id);
  a.year = year;
  a.subjects = std::move(subjects);
  a.n_references_declared = refs;
  return a;
}

void expect_transpose_consistent(const CitationGraph& g) {
  std::set<std::pair<NodeId, NodeId>> out_edges, in_edges;
  for (NodeId j = 0; j < g.size(); ++j) {
    ASSERT_EQ(g.out_degree(j), g.references(j).size());
    for (NodeId i : g.references(j)) out_edges.emplace(j, i);
  }
  for (NodeId i = 0; i < g.size(); ++i) {
    for (NodeId j : g.citations(i)) in_edges.emplace(j, i);
  }
  EXPECT_EQ(out_edges, in_edges);
  EXPECT_EQ(out_edges.size(), g.edge_count());
}

TEST(BuildGraph, NoReferenceArticleAndItsEdgeDropped) {
  std::vector<ArticleRecord> articles{article("A", 1992), article("B", 1990, 0)};
  std::vector<RawEdge> edges{{"A", "B"}};
  auto [g, report] = build_graph(articles, edges);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.id(0), "A");
  EXPECT_EQ(report.articles_dropped_no_reference, 1);
  EXPECT_EQ(report.edges_dropped_dangling, 1);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraph, ArticleCitingSomethingCountsAsHavingReferences) {
  // B declares no references but the edge list shows it cites C (outside the data).
  std::vector<ArticleRecord> articles{article("A", 1992), article("B", 1990, 0)};
  std::vector<RawEdge> edges{{"A", "B"}, {"B", "C"}};
  auto [g, report] = build_graph(articles, edges);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(report.edges_dropped_dangling, 1);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(BuildGraph, SelfLoopRemoved) {
  std::vector<ArticleRecord> articles{article("A", 1990)};
  auto [g, report] = build_graph(articles, {{"A", "A"}});
  EXPECT_EQ(report.self_loops_removed, 1);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraph, FutureReferenceDropped) {
  std::vector<ArticleRecord> articles{article("A", 1990), article("B", 1995)};
  auto [g, report] = build_graph(articles, {{"A", "B"}});
  EXPECT_EQ(report.edges_dropped_future, 1);
  EXPECT_EQ(g.edge_count(), 0u);

  PreprocessPolicy keep;
  keep.drop_future_refs = false;
  auto [kept, kept_report] = build_graph(articles, {{"A", "B"}}, keep);
  EXPECT_EQ(kept_report.edges_dropped_future, 0);
  EXPECT_EQ(kept.edge_count(), 1u);
}

TEST(BuildGraph, ParallelEdgesMergedAndCounted) {
  std::vector<ArticleRecord> articles{article("A", 1991), article("B", 1990)};
  std::vector<RawEdge> edges{{"A", "B"}, {"A", "B"}, {"A", "B"}};
  auto [g, report] = build_graph(articles, edges);
  EXPECT_EQ(report.parallel_edges_merged, 2);
  EXPECT_EQ(g.edge_count(), 1u);

  PreprocessPolicy keep;
  keep.dedup_parallel_edges = false;
  auto [multi, multi_report] = build_graph(articles, edges, keep);
  EXPECT_EQ(multi.edge_count(), 3u);
  EXPECT_EQ(multi.out_degree(0), 3u);
}

TEST(BuildGraph, SubjectAndYearFilters) {
  std::vector<ArticleRecord> articles{article("A", 1990, 1, {}), article("B", 1970), article("C", 2000)};
  auto [g, report] = build_graph(articles, {});
  EXPECT_EQ(report.articles_dropped_no_subject, 1);
  EXPECT_EQ(report.articles_dropped_out_of_years, 1);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.id(0), "C");
}

TEST(BuildGraph, NodesSortedByIdRegardlessOfInputOrder) {
  std::vector<ArticleRecord> articles{article("z", 1990), article("a", 1991), article("m", 1992)};
  auto [g, report] = build_graph(articles, {{"m", "a"}, {"a", "z"}});
  EXPECT_EQ(g.ids(), (std::vector<std::string>{"a", "m", "z"}));
  EXPECT_EQ(g.find("m"), NodeId{1});
  EXPECT_FALSE(g.find("q").has_value());
  std::reverse(articles.begin(), articles.end());
  auto [again, again_report] = build_graph(articles, {{"a", "z"}, {"m", "a"}});
  EXPECT_EQ(g, again);
}

TEST(BuildGraph, PolicyValidation) {
  PreprocessPolicy bad;
  bad.analysis_years = {1980, 2015};
  EXPECT_THROW(build_graph({}, {}, bad), InvalidParameter);
}

TEST(BuildGraph, RandomCorporaSatisfyInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ArticleRecord> articles;
    const int n = 5 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      auto a = article("a" + std::to_string(i), 1985 + static_cast<int>(rng() % 20), static_cast<int>(rng() % 3));
      if (rng() % 10 == 0) a.subjects.clear();
      articles.push_back(a);
    }
    std::vector<RawEdge> edges;
    const int m = static_cast<int>(rng() % (4 * n));
    for (int e = 0; e < m; ++e) {
      edges.push_back({"a" + std::to_string(rng() % (n + 3)), "a" + std::to_string(rng() % (n + 3))});
    }
    auto [g, report] = build_graph(articles, edges);
    expect_transpose_consistent(g);
    for (const auto& [j, i] : edges_of(g)) {
      ASSERT_NE(j, i);
      ASSERT_GE(g.year(j), g.year(i));
    }
    EXPECT_EQ(report.edges_in, report.edges_dropped_dangling + report.self_loops_removed +
                                   report.edges_dropped_future + report.parallel_edges_merged + report.edges_out);
  }
}

TEST(FilterWindow, BoundaryInclusive) {
  auto g = make_graph({1990, 1995, 1996}, {{1, 0}, {2, 0}});
  auto w = filter_window(g, 5);
  EXPECT_EQ(edges_of(w), (std::vector<std::pair<NodeId, NodeId>>{{1, 0}}));
  EXPECT_EQ(w.out_degree(2), 0u);
  EXPECT_EQ(w.out_degree(1), 1u);
  EXPECT_EQ(w.size(), g.size());
}

TEST(FilterWindow, CorpusSpanIsIdentity) {
  std::mt19937_64 rng(3);
  auto g = random_graph({.n = 300, .first_year = 1981, .last_year = 2020}, rng);
  EXPECT_EQ(filter_window(g, 2020 - 1981), g);
}

TEST(FilterWindow, RejectsWindowBelowOne) {
  auto g = make_graph({1990}, {});
  EXPECT_THROW(filter_window(g, 0), InvalidParameter);
}

TEST(FilterWindow, IdempotentAndMonotone) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph({.n = 80, .mean_out_degree = 4, .first_year = 1990, .last_year = 2005,
                           .same_year_cycles = trial % 2 == 0},
                          rng);
    const int w1 = 1 + static_cast<int>(rng() % 8);
    const int w2 = w1 + static_cast<int>(rng() % 8);
    auto f1 = filter_window(g, w1);
    auto f2 = filter_window(g, w2);
    ASSERT_EQ(filter_window(f1, w1), f1);
    auto e1 = edges_of(f1);
    auto e2 = edges_of(f2);
    ASSERT_TRUE(std::includes(e2.begin(), e2.end(), e1.begin(), e1.end()));
    expect_transpose_consistent(f1);
  }
}

TEST(CitationCounts, Basics) {
  // Seven articles cite the target within the window, one outside it.
  std::vector<int> years{2000, 2001, 2001, 2002, 2003, 2004, 2005, 2005, 2010};
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId j = 1; j < years.size(); ++j) edges.emplace_back(j, 0);
  auto g = make_graph(years, edges);
  auto counts = citation_counts(g, 5);
  EXPECT_EQ(counts[0], 7);
  for (std::size_t v = 1; v < counts.size(); ++v) EXPECT_EQ(counts[v], 0);
}

TEST(CitationCounts, SumEqualsWindowedEdgeCount) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_graph({.n = 200, .first_year = 1990, .last_year = 2010}, rng);
    const int w = 1 + trial % 10;
    auto counts = citation_counts(g, w);
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    EXPECT_EQ(static_cast<std::size_t>(total), filter_window(g, w).edge_count());
  }
}

TEST(TopologicalOrder, Chain) {
  // Node 0 = A(1990), 1 = B(1992), 2 = C(1994); C cites B cites A.
  auto g = make_graph({1990, 1992, 1994}, {{2, 1}, {1, 0}});
  auto topo = topological_order(g);
  ASSERT_TRUE(topo.acyclic());
  EXPECT_EQ(topo.order, (std::vector<NodeId>{2, 1, 0}));
}

TEST(TopologicalOrder, SameYearPairIsACycle) {
  auto g = make_graph({1990, 1990, 1989}, {{0, 1}, {1, 0}, {1, 2}});
  auto topo = topological_order(g);
  ASSERT_FALSE(topo.acyclic());
  EXPECT_EQ(topo.cycle_nodes, (std::vector<NodeId>{0, 1}));
}

TEST(TopologicalOrder, RandomDagsGiveValidOrders) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_graph({.n = 1000, .mean_out_degree = 5}, rng);
    auto topo = topological_order(g);
    ASSERT_TRUE(topo.acyclic());
    ASSERT_EQ(topo.order.size(), g.size());
    std::vector<std::size_t> position(g.size());
    for (std::size_t p = 0; p < topo.order.size(); ++p) position[topo.order[p]] = p;
    for (const auto& [j, i] : edges_of(g)) ASSERT_LT(position[j], position[i]);
  }
}

TEST(TopologicalOrder, CycleNodesLieOnCycles) {
  std::mt19937_64 rng(29);
  auto g = random_graph({.n = 400, .mean_out_degree = 3, .first_year = 1990, .last_year = 1994,
                         .same_year_cycles = true},
                        rng);
  auto topo = topological_order(g);
  ASSERT_FALSE(topo.acyclic());
  // Each reported node reaches itself again.
  for (NodeId start : topo.cycle_nodes) {
    std::vector<char> seen(g.size(), 0);
    std::vector<NodeId> stack(g.references(start).begin(), g.references(start).end());
    bool back = false;
    while (!stack.empty() && !back) {
      NodeId v = stack.back();
      stack.pop_back();
      if (v == start) back = true;
      if (seen[v]) continue;
      seen[v] = 1;
      for (NodeId w : g.references(v)) stack.push_back(w);
    }
    ASSERT_TRUE(back) << "node " << start;
  }
}

TEST(Snapshot, RoundTrip) {
  std::mt19937_64 rng(31);
  auto g = random_graph({.n = 500, .same_year_cycles = true}, rng);
  auto path = std::filesystem::temp_directory_path() / "asp_snapshot_test.bin";
  save_snapshot(g, path);
  EXPECT_EQ(load_snapshot(path), g);
}

TEST(Snapshot, RejectsGarbage) {
  auto path = std::filesystem::temp_directory_path() / "asp_snapshot_garbage.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a snapshot at all";
  }
  EXPECT_THROW(load_snapshot(path), IoError);
}

TEST(FromParts, RejectsBadSubjectIndex) {
  auto g = make_graph({2000, 2001, 2002}, {{1, 0}}, {{"A"}, {"B"}, {"A", "B"}});
  auto nodes = g.nodes();
  nodes.subjects.offsets = {0, 2, 1, 4};
  EXPECT_THROW(CitationGraph::from_parts(nodes, edges_of(g)), InvalidParameter);
  nodes.subjects.offsets = {0, 1, 2, 3};
  EXPECT_THROW(CitationGraph::from_parts(nodes, edges_of(g)), InvalidParameter);
  nodes.subjects.offsets = {1, 1, 2, 4};
  EXPECT_THROW(CitationGraph::from_parts(nodes, edges_of(g)), InvalidParameter);
}

}  // namespace
}  // namespace asp
