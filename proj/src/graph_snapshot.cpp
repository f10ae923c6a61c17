#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "asp/citation_graph.hpp"
#include "asp/error.hpp"
#include "asp/table.hpp"

namespace asp {
namespace {

constexpr std::array<char, 8> kMagic{'A', 'S', 'P', 'G', 'R', 'A', 'P', 'H'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto bits = static_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(T); ++b) buffer_.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
  void put(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    buffer_.append(s);
  }
  template <typename T>
  void put_all(const std::vector<T>& values) {
    for (const auto& v : values) put(v);
  }
  void raw(const char* data, std::size_t n) { buffer_.append(data, n); }
  const std::string& str() const { return buffer_; }

 private:
  std::string buffer_;
};

class Reader {
 public:
  Reader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    using U = std::make_unsigned_t<T>;
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      bits |= static_cast<U>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    }
    pos_ += sizeof(T);
    return static_cast<T>(bits);
  }
  std::string get_string() {
    auto len = get<std::uint32_t>();
    need(len);
    std::string s = data_.substr(pos_, len);
    pos_ += len;
    return s;
  }
  template <typename T>
  std::vector<T> get_all(std::uint64_t count) {
    need(count * sizeof(T));
    std::vector<T> out(count);
    for (auto& v : out) v = get<T>();
    return out;
  }
  std::vector<std::string> get_strings(std::uint64_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(get_string());
    return out;
  }
  void expect_magic() {
    need(kMagic.size());
    if (std::memcmp(data_.data(), kMagic.data(), kMagic.size()) != 0) fail("not a graph snapshot");
    pos_ += kMagic.size();
  }
  bool at_end() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const { throw IoError("'" + path_ + "': " + what); }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) fail("truncated snapshot");
  }
  std::string data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const CitationGraph& graph, const std::filesystem::path& path) {
  const auto nodes = graph.nodes();
  Writer w;
  w.raw(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(0);
  w.put<std::uint64_t>(graph.size());
  w.put<std::uint64_t>(graph.edge_count());
  w.put<std::uint64_t>(nodes.subject_labels.size());
  w.put<std::uint64_t>(nodes.subjects.targets.size());
  w.put<std::uint64_t>(nodes.journal_labels.size());
  for (const auto& s : nodes.ids) w.put(s);
  for (const auto& s : nodes.subject_labels) w.put(s);
  for (const auto& s : nodes.journal_labels) w.put(s);
  for (int y : nodes.years) w.put<std::int32_t>(y);
  w.put_all(nodes.subjects.offsets);
  w.put_all(nodes.subjects.targets);
  w.put_all(nodes.journals);
  w.put_all(nodes.coauthors);
  w.put_all(nodes.refs_declared);
  w.put_all(graph.out().offsets);
  w.put_all(graph.out().targets);
  write_file_atomic(path, w.str());
}

CitationGraph load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Reader r(buffer.str(), path.string());

  r.expect_magic();
  if (auto version = r.get<std::uint32_t>(); version != kVersion) {
    r.fail("unsupported snapshot version " + std::to_string(version));
  }
  r.get<std::uint32_t>();
  const auto n = r.get<std::uint64_t>();
  const auto m = r.get<std::uint64_t>();
  const auto n_subject_labels = r.get<std::uint64_t>();
  const auto n_subject_entries = r.get<std::uint64_t>();
  const auto n_journal_labels = r.get<std::uint64_t>();

  CitationGraph::Nodes nodes;
  nodes.ids = r.get_strings(n);
  nodes.subject_labels = r.get_strings(n_subject_labels);
  nodes.journal_labels = r.get_strings(n_journal_labels);
  for (auto y : r.get_all<std::int32_t>(n)) nodes.years.push_back(y);
  nodes.subjects.offsets = r.get_all<std::uint64_t>(n + 1);
  nodes.subjects.targets = r.get_all<std::uint32_t>(n_subject_entries);
  nodes.journals = r.get_all<std::int32_t>(n);
  nodes.coauthors = r.get_all<std::int64_t>(n);
  nodes.refs_declared = r.get_all<std::int64_t>(n);
  auto offsets = r.get_all<std::uint64_t>(n + 1);
  auto targets = r.get_all<std::uint32_t>(m);
  if (!r.at_end()) r.fail("trailing bytes after snapshot payload");
  if (nodes.subjects.offsets.back() != n_subject_entries || offsets.back() != m) {
    r.fail("inconsistent CSR offsets");
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(m);
  for (std::uint64_t j = 0; j < n; ++j) {
    if (offsets[j] > offsets[j + 1]) r.fail("inconsistent CSR offsets");
    for (auto k = offsets[j]; k < offsets[j + 1]; ++k) edges.emplace_back(static_cast<NodeId>(j), targets[k]);
  }
  try {
    return CitationGraph::from_parts(std::move(nodes), std::move(edges));
  } catch (const InvalidParameter& e) {
    r.fail(e.what());
  }
}

}  // namespace asp
