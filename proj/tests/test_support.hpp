// Test-only graph builders shared by the unit and acceptance suites.
#pragma once

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "asp/citation_graph.hpp"

namespace asp::testing {

inline std::string node_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "N%06zu", i);
  return buf;
}

/// Graph over nodes N000000.. with the given years; node i carries subject
/// labels subjects[i] (defaults to a single "S0").
inline CitationGraph make_graph(const std::vector<int>& years,
                                const std::vector<std::pair<NodeId, NodeId>>& edges,
                                const std::vector<std::vector<std::string>>& subjects = {}) {
  CitationGraph::Nodes nodes;
  const std::size_t n = years.size();
  std::vector<std::string> labels;
  for (const auto& list : subjects) labels.insert(labels.end(), list.begin(), list.end());
  if (subjects.empty()) labels.push_back("S0");
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  for (std::size_t i = 0; i < n; ++i) {
    nodes.ids.push_back(node_name(i));
    nodes.years.push_back(years[i]);
    const auto& own = subjects.empty() ? std::vector<std::string>{"S0"} : subjects[i];
    for (const auto& s : own) {
      nodes.subjects.targets.push_back(
          static_cast<std::uint32_t>(std::lower_bound(labels.begin(), labels.end(), s) - labels.begin()));
    }
    nodes.subjects.offsets.push_back(nodes.subjects.targets.size());
    nodes.journals.push_back(-1);
    nodes.coauthors.push_back(1);
    nodes.refs_declared.push_back(1);
  }
  nodes.subject_labels = labels;
  return CitationGraph::from_parts(std::move(nodes), edges);
}

struct RandomGraphSpec {
  std::size_t n = 100;
  double mean_out_degree = 3.0;
  int first_year = 1990;
  int last_year = 1999;
  /// Allow same-year citations in both directions (creates cycles).
  bool same_year_cycles = false;
  int n_subjects = 3;
};

/// Random temporal graph: node years ascending with index; node j cites earlier
/// nodes (lower index) only, unless same_year_cycles also lets it cite any node of
/// its own year. Parallel edges and self-loops are never produced.
inline CitationGraph random_graph(const RandomGraphSpec& spec, std::mt19937_64& rng) {
  std::vector<int> years(spec.n);
  std::uniform_int_distribution<int> year_dist(spec.first_year, spec.last_year);
  for (auto& y : years) y = year_dist(rng);
  std::sort(years.begin(), years.end());

  std::vector<std::vector<std::string>> subjects(spec.n);
  std::uniform_int_distribution<int> subject_dist(0, spec.n_subjects - 1);
  std::bernoulli_distribution second_subject(0.2);
  for (auto& list : subjects) {
    list.push_back("S" + std::to_string(subject_dist(rng)));
    if (second_subject(rng)) {
      auto extra = "S" + std::to_string(subject_dist(rng));
      if (extra != list.front()) list.push_back(extra);
    }
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::poisson_distribution<int> degree(spec.mean_out_degree);
  for (std::size_t j = 1; j < spec.n; ++j) {
    std::size_t limit = j;
    if (spec.same_year_cycles) {
      while (limit < spec.n && years[limit] == years[j]) ++limit;
    }
    std::vector<NodeId> picked;
    const int want = std::min<int>(degree(rng), static_cast<int>(limit) - 1);
    std::uniform_int_distribution<std::size_t> target(0, limit - 1);
    int attempts = 0;
    while (static_cast<int>(picked.size()) < want && attempts++ < 50 * (want + 1)) {
      auto t = static_cast<NodeId>(target(rng));
      if (t == j || std::find(picked.begin(), picked.end(), t) != picked.end()) continue;
      picked.push_back(t);
    }
    for (NodeId t : picked) edges.emplace_back(static_cast<NodeId>(j), t);
  }
  return make_graph(years, edges, subjects);
}

/// All (citing, cited) pairs of a graph in CSR order.
inline std::vector<std::pair<NodeId, NodeId>> edges_of(const CitationGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId j = 0; j < g.size(); ++j) {
    for (NodeId i : g.references(j)) out.emplace_back(j, i);
  }
  return out;
}

}  // namespace asp::testing
