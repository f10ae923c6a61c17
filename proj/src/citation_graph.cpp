#include "asp/citation_graph.hpp"

#include <algorithm>
#include <numeric>
#include <string_view>
#include <unordered_map>

#include "asp/error.hpp"

namespace asp {
namespace {

// Counting sort of (citing, cited) pairs into out/in CSR with ascending rows.
void build_csr(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges, Csr& out, Csr& in) {
  out.offsets.assign(n + 1, 0);
  in.offsets.assign(n + 1, 0);
  for (const auto& [from, to] : edges) {
    ++out.offsets[from + 1];
    ++in.offsets[to + 1];
  }
  std::partial_sum(out.offsets.begin(), out.offsets.end(), out.offsets.begin());
  std::partial_sum(in.offsets.begin(), in.offsets.end(), in.offsets.begin());

  out.targets.assign(edges.size(), 0);
  {
    std::vector<std::uint64_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
    for (const auto& [from, to] : edges) out.targets[cursor[from]++] = to;
  }
  for (std::size_t r = 0; r < n; ++r) {
    std::sort(out.targets.begin() + static_cast<std::ptrdiff_t>(out.offsets[r]),
              out.targets.begin() + static_cast<std::ptrdiff_t>(out.offsets[r + 1]));
  }
  // Scanning out-rows in ascending citing order leaves every in-row sorted.
  in.targets.assign(edges.size(), 0);
  std::vector<std::uint64_t> cursor(in.offsets.begin(), in.offsets.end() - 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto k = out.offsets[r]; k < out.offsets[r + 1]; ++k) {
      in.targets[cursor[out.targets[k]]++] = static_cast<NodeId>(r);
    }
  }
}

std::vector<std::pair<NodeId, NodeId>> edge_list(const CitationGraph& graph, auto keep) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(graph.edge_count());
  for (NodeId j = 0; j < graph.size(); ++j) {
    for (NodeId i : graph.references(j)) {
      if (keep(j, i)) edges.emplace_back(j, i);
    }
  }
  return edges;
}

void validate_window(int window) {
  if (window < 1) throw InvalidParameter("citing window must be >= 1, got " + std::to_string(window));
}

}  // namespace

std::optional<NodeId> CitationGraph::find(const std::string& article_id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), article_id);
  if (it == ids_.end() || *it != article_id) return std::nullopt;
  return static_cast<NodeId>(it - ids_.begin());
}

std::span<const std::uint32_t> CitationGraph::subjects(NodeId v) const { return subjects_.row(v); }

void CitationGraph::set_edges(std::vector<std::pair<NodeId, NodeId>> edges) {
  build_csr(ids_.size(), edges, out_, in_);
}

CitationGraph CitationGraph::with_edges(std::vector<std::pair<NodeId, NodeId>> edges) const {
  CitationGraph g;
  g.ids_ = ids_;
  g.year_ = year_;
  g.subject_labels_ = subject_labels_;
  g.subjects_ = subjects_;
  g.journal_labels_ = journal_labels_;
  g.journal_ = journal_;
  g.coauthors_ = coauthors_;
  g.refs_declared_ = refs_declared_;
  g.set_edges(std::move(edges));
  return g;
}

CitationGraph CitationGraph::from_parts(Nodes nodes, std::vector<std::pair<NodeId, NodeId>> edges) {
  const std::size_t n = nodes.ids.size();
  if (nodes.years.size() != n || nodes.subjects.rows() != n || nodes.journals.size() != n ||
      nodes.coauthors.size() != n || nodes.refs_declared.size() != n) {
    throw InvalidParameter("node attribute arrays disagree on the node count");
  }
  if (!std::is_sorted(nodes.ids.begin(), nodes.ids.end()) ||
      std::adjacent_find(nodes.ids.begin(), nodes.ids.end()) != nodes.ids.end()) {
    throw InvalidParameter("node ids must be unique and sorted");
  }
  const auto& so = nodes.subjects.offsets;
  if (so.front() != 0 || so.back() != nodes.subjects.targets.size() || !std::is_sorted(so.begin(), so.end())) {
    throw InvalidParameter("subject offsets are not a valid CSR index");
  }
  for (auto s : nodes.subjects.targets) {
    if (s >= nodes.subject_labels.size()) throw InvalidParameter("subject index out of range");
  }
  for (auto j : nodes.journals) {
    if (j < -1 || j >= static_cast<std::int64_t>(nodes.journal_labels.size())) {
      throw InvalidParameter("journal index out of range");
    }
  }
  for (const auto& [from, to] : edges) {
    if (from >= n || to >= n) throw InvalidParameter("edge endpoint out of range");
  }
  CitationGraph g;
  g.ids_ = std::move(nodes.ids);
  g.year_ = std::move(nodes.years);
  g.subject_labels_ = std::move(nodes.subject_labels);
  g.subjects_ = std::move(nodes.subjects);
  g.journal_labels_ = std::move(nodes.journal_labels);
  g.journal_ = std::move(nodes.journals);
  g.coauthors_ = std::move(nodes.coauthors);
  g.refs_declared_ = std::move(nodes.refs_declared);
  g.set_edges(std::move(edges));
  return g;
}

CitationGraph::Nodes CitationGraph::nodes() const {
  return Nodes{ids_, year_, subject_labels_, subjects_, journal_labels_, journal_, coauthors_, refs_declared_};
}

void validate(const PreprocessPolicy& policy) {
  const auto& a = policy.analysis_years;
  const auto& c = policy.corpus_years;
  if (a.first > a.last || c.first > c.last) throw InvalidParameter("year interval is empty");
  if (a.first < c.first || a.last > c.last) {
    throw InvalidParameter("analysis years must lie within corpus years");
  }
}

std::pair<CitationGraph, PreprocessReport> build_graph(const std::vector<ArticleRecord>& articles,
                                                       const std::vector<RawEdge>& edges,
                                                       const PreprocessPolicy& policy) {
  validate(policy);
  PreprocessReport report;
  report.articles_in = static_cast<std::int64_t>(articles.size());
  report.edges_in = static_cast<std::int64_t>(edges.size());

  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(articles.size());
  for (std::size_t a = 0; a < articles.size(); ++a) {
    if (!index.emplace(articles[a].article_id, a).second) {
      throw InvalidParameter("duplicate article id '" + articles[a].article_id + "'");
    }
  }

  std::vector<char> cites_something(articles.size(), 0);
  if (policy.drop_no_reference) {
    for (const auto& e : edges) {
      if (e.citing_id == e.cited_id) continue;
      if (auto it = index.find(e.citing_id); it != index.end()) cites_something[it->second] = 1;
    }
  }

  std::vector<std::size_t> kept;
  kept.reserve(articles.size());
  for (std::size_t a = 0; a < articles.size(); ++a) {
    const auto& rec = articles[a];
    if (!policy.corpus_years.contains(rec.year)) {
      ++report.articles_dropped_out_of_years;
    } else if (policy.drop_no_subject && rec.subjects.empty()) {
      ++report.articles_dropped_no_subject;
    } else if (policy.drop_no_reference && rec.n_references_declared <= 0 && !cites_something[a]) {
      ++report.articles_dropped_no_reference;
    } else {
      kept.push_back(a);
    }
  }
  std::sort(kept.begin(), kept.end(),
            [&](std::size_t x, std::size_t y) { return articles[x].article_id < articles[y].article_id; });

  constexpr NodeId kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> node_of(articles.size(), kAbsent);
  for (std::size_t v = 0; v < kept.size(); ++v) node_of[kept[v]] = static_cast<NodeId>(v);

  CitationGraph::Nodes nodes;
  const std::size_t n = kept.size();
  nodes.ids.reserve(n);
  nodes.years.reserve(n);
  for (std::size_t a : kept) {
    nodes.ids.push_back(articles[a].article_id);
    nodes.years.push_back(articles[a].year);
    nodes.coauthors.push_back(articles[a].n_coauthors);
    nodes.refs_declared.push_back(articles[a].n_references_declared);
  }

  std::vector<std::string> subjects;
  std::vector<std::string> journals;
  for (std::size_t a : kept) {
    for (const auto& s : articles[a].subjects) subjects.push_back(s);
    if (articles[a].journal_id) journals.push_back(*articles[a].journal_id);
  }
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  std::sort(journals.begin(), journals.end());
  journals.erase(std::unique(journals.begin(), journals.end()), journals.end());
  auto label_index = [](const std::vector<std::string>& labels, const std::string& s) {
    return static_cast<std::uint32_t>(std::lower_bound(labels.begin(), labels.end(), s) - labels.begin());
  };
  for (std::size_t a : kept) {
    std::vector<std::uint32_t> own;
    for (const auto& s : articles[a].subjects) {
      auto id = label_index(subjects, s);
      if (std::find(own.begin(), own.end(), id) == own.end()) own.push_back(id);
    }
    nodes.subjects.targets.insert(nodes.subjects.targets.end(), own.begin(), own.end());
    nodes.subjects.offsets.push_back(nodes.subjects.targets.size());
    const auto& j = articles[a].journal_id;
    nodes.journals.push_back(j ? static_cast<std::int32_t>(label_index(journals, *j)) : -1);
  }
  nodes.subject_labels = std::move(subjects);
  nodes.journal_labels = std::move(journals);

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(edges.size());
  for (const auto& e : edges) {
    auto from = index.find(e.citing_id);
    auto to = index.find(e.cited_id);
    NodeId u = from == index.end() ? kAbsent : node_of[from->second];
    NodeId v = to == index.end() ? kAbsent : node_of[to->second];
    if (u == kAbsent || v == kAbsent) {
      ++report.edges_dropped_dangling;
    } else if (u == v) {
      ++report.self_loops_removed;
    } else if (policy.drop_future_refs && nodes.years[u] < nodes.years[v]) {
      ++report.edges_dropped_future;
    } else {
      pairs.emplace_back(u, v);
    }
  }
  if (policy.dedup_parallel_edges) {
    std::sort(pairs.begin(), pairs.end());
    auto last = std::unique(pairs.begin(), pairs.end());
    report.parallel_edges_merged = pairs.end() - last;
    pairs.erase(last, pairs.end());
  }

  CitationGraph graph = CitationGraph::from_parts(std::move(nodes), std::move(pairs));
  report.nodes_out = static_cast<std::int64_t>(graph.size());
  report.edges_out = static_cast<std::int64_t>(graph.edge_count());
  return {std::move(graph), report};
}

CitationGraph filter_window(const CitationGraph& graph, int window) {
  validate_window(window);
  return graph.with_edges(edge_list(graph, [&](NodeId j, NodeId i) {
    const int lag = graph.year(j) - graph.year(i);
    return lag >= 0 && lag <= window;
  }));
}

std::vector<std::int64_t> citation_counts(const CitationGraph& graph, int window) {
  std::vector<std::int64_t> counts(graph.size(), 0);
  for (NodeId i = 0; i < graph.size(); ++i) {
    for (NodeId j : graph.citations(i)) {
      const int lag = graph.year(j) - graph.year(i);
      if (lag >= 0 && lag <= window) ++counts[i];
    }
  }
  return counts;
}

TopologicalResult topological_order(const CitationGraph& graph) {
  const std::size_t n = graph.size();
  TopologicalResult result;
  result.order.reserve(n);

  std::vector<std::uint64_t> pending(n);
  for (NodeId v = 0; v < n; ++v) {
    pending[v] = graph.citations(v).size();
    if (pending[v] == 0) result.order.push_back(v);
  }
  for (std::size_t head = 0; head < result.order.size(); ++head) {
    for (NodeId cited : graph.references(result.order[head])) {
      if (--pending[cited] == 0) result.order.push_back(cited);
    }
  }
  if (result.order.size() == n) return result;

  // Iterative Tarjan over the nodes left behind; cycle members are the nodes of
  // strongly connected components with more than one node (or a self-loop).
  constexpr std::uint32_t kUnvisited = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> stack;
  std::vector<std::pair<NodeId, std::size_t>> call;
  std::uint32_t counter = 0;
  std::vector<char> cyclic(n, 0);

  for (NodeId root = 0; root < n; ++root) {
    if (pending[root] == 0 || index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      auto refs = graph.references(v);
      if (pos < refs.size()) {
        NodeId w = refs[pos++];
        if (pending[w] == 0) continue;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      NodeId done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<NodeId> component;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != done);
        bool self_loop = false;
        for (NodeId r : graph.references(done)) self_loop |= (r == done);
        if (component.size() > 1 || self_loop) {
          for (NodeId c : component) cyclic[c] = 1;
        }
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (cyclic[v]) result.cycle_nodes.push_back(v);
  }
  result.order.clear();
  return result;
}

}  // namespace asp
