#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asp/corpus_io.hpp"

namespace asp {

using NodeId = std::uint32_t;

/// Compressed sparse rows: the neighbors of row r are targets[offsets[r] .. offsets[r+1]).
struct Csr {
  std::vector<std::uint64_t> offsets{0};
  std::vector<NodeId> targets;

  std::size_t rows() const { return offsets.size() - 1; }
  std::size_t edges() const { return targets.size(); }
  std::span<const NodeId> row(std::size_t r) const {
    return {targets.data() + offsets[r], static_cast<std::size_t>(offsets[r + 1] - offsets[r])};
  }
  bool operator==(const Csr&) const = default;
};

struct YearRange {
  int first = 0;
  int last = 0;
  bool contains(int year) const { return year >= first && year <= last; }
  int span() const { return last - first; }
  bool operator==(const YearRange&) const = default;
};

/// Immutable preprocessed citation network. Nodes are numbered by sorted article id.
/// `out` row j lists the articles j cites; `in` row i lists the articles citing i,
/// both sorted ascending.
class CitationGraph {
 public:
  std::size_t size() const { return ids_.size(); }
  std::size_t edge_count() const { return out_.edges(); }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(NodeId v) const { return ids_[v]; }
  std::optional<NodeId> find(const std::string& article_id) const;

  int year(NodeId v) const { return year_[v]; }
  const std::vector<int>& years() const { return year_; }

  /// Subject labels, sorted; node subjects are indexes into this table.
  const std::vector<std::string>& subject_labels() const { return subject_labels_; }
  std::span<const std::uint32_t> subjects(NodeId v) const;

  const std::vector<std::string>& journal_labels() const { return journal_labels_; }
  /// Index into journal_labels(), or -1 when the article has no journal.
  std::int32_t journal(NodeId v) const { return journal_[v]; }

  std::int64_t n_coauthors(NodeId v) const { return coauthors_[v]; }
  std::int64_t n_references_declared(NodeId v) const { return refs_declared_[v]; }

  const Csr& out() const { return out_; }
  const Csr& in() const { return in_; }
  std::span<const NodeId> references(NodeId v) const { return out_.row(v); }
  std::span<const NodeId> citations(NodeId v) const { return in_.row(v); }
  /// m_j, the number of retained references of j.
  std::uint64_t out_degree(NodeId v) const { return out_.offsets[v + 1] - out_.offsets[v]; }

  /// Same nodes, new edge set. Edges are (citing, cited) pairs; duplicates must
  /// already be removed.
  CitationGraph with_edges(std::vector<std::pair<NodeId, NodeId>> edges) const;

  /// Builds a graph directly from node attributes and index-based edges. Used by the
  /// snapshot loader and by tests; preprocessing rules are not applied.
  struct Nodes {
    std::vector<std::string> ids;
    std::vector<int> years;
    std::vector<std::string> subject_labels;
    Csr subjects;
    std::vector<std::string> journal_labels;
    std::vector<std::int32_t> journals;
    std::vector<std::int64_t> coauthors;
    std::vector<std::int64_t> refs_declared;
  };
  static CitationGraph from_parts(Nodes nodes, std::vector<std::pair<NodeId, NodeId>> edges);
  Nodes nodes() const;

  bool operator==(const CitationGraph&) const = default;

 private:
  void set_edges(std::vector<std::pair<NodeId, NodeId>> edges);

  std::vector<std::string> ids_;
  std::vector<int> year_;
  std::vector<std::string> subject_labels_;
  Csr subjects_;
  std::vector<std::string> journal_labels_;
  std::vector<std::int32_t> journal_;
  std::vector<std::int64_t> coauthors_;
  std::vector<std::int64_t> refs_declared_;
  Csr out_;
  Csr in_;
};

struct PreprocessPolicy {
  bool drop_no_subject = true;
  bool drop_no_reference = true;
  bool drop_future_refs = true;
  bool dedup_parallel_edges = true;
  YearRange analysis_years{1990, 2015};
  YearRange corpus_years{1981, 2020};
};

void validate(const PreprocessPolicy& policy);

struct PreprocessReport {
  std::int64_t articles_in = 0;
  std::int64_t articles_dropped_no_subject = 0;
  std::int64_t articles_dropped_no_reference = 0;
  std::int64_t articles_dropped_out_of_years = 0;
  std::int64_t edges_in = 0;
  std::int64_t edges_dropped_dangling = 0;
  std::int64_t edges_dropped_future = 0;
  std::int64_t self_loops_removed = 0;
  std::int64_t parallel_edges_merged = 0;
  std::int64_t nodes_out = 0;
  std::int64_t edges_out = 0;
};

/// Applies the preprocessing policy and builds the graph.
///
/// Article filters run first (corpus years, subjects, references); an article "has
/// references" when it declares a positive reference count or cites anything in the
/// edge list. Edge filters then run in order: dangling endpoint, self-loop, future
/// reference, parallel duplicate. Every removal is counted in the report.
std::pair<CitationGraph, PreprocessReport> build_graph(const std::vector<ArticleRecord>& articles,
                                                       const std::vector<RawEdge>& edges,
                                                       const PreprocessPolicy& policy = {});

/// Keeps exactly the edges with 0 <= year(citing) - year(cited) <= window.
CitationGraph filter_window(const CitationGraph& graph, int window);

/// Per node, the number of citations received with a year lag in [0, window].
std::vector<std::int64_t> citation_counts(const CitationGraph& graph, int window);

/// Either an order in which every article precedes its references, or the nodes
/// that lie on at least one cycle.
struct TopologicalResult {
  std::vector<NodeId> order;
  std::vector<NodeId> cycle_nodes;
  bool acyclic() const { return cycle_nodes.empty(); }
};
TopologicalResult topological_order(const CitationGraph& graph);

/// Binary snapshot (see docs/graph-snapshot.md).
void save_snapshot(const CitationGraph& graph, const std::filesystem::path& path);
CitationGraph load_snapshot(const std::filesystem::path& path);

}  // namespace asp
