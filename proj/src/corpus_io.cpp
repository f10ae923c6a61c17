#include "asp/corpus_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "asp/error.hpp"
#include "asp/table.hpp"

namespace asp {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string trim(const std::string& s) {
  auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); });
  if (first >= last.base()) return {};
  return std::string(first, last.base());
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

template <typename Int>
std::optional<Int> parse_int(const std::string& text) {
  std::string s = trim(text);
  Int value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::vector<std::string> split_subjects(const std::string& field, char sep) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in(field);
  while (std::getline(in, current, sep)) {
    std::string label = trim(current);
    if (!label.empty()) out.push_back(std::move(label));
  }
  return out;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

char sniff_delimiter(const std::string& line) {
  return line.find('\t') != std::string::npos ? '\t' : ',';
}

}  // namespace

ArticleParse parse_articles(std::istream& in, const DelimiterSpec& format) {
  ArticleParse result;
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (is_blank(line)) continue;
    header = split_fields(line, format.field);
    break;
  }
  if (header.empty()) throw ParseError(0, "articles file has no header row");

  auto column = [&](const char* name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lowercase(trim(header[i])) == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("id");
  const auto year_col = column("year");
  if (!id_col || !year_col) throw ParseError(line_no, "header must name 'id' and 'year' columns");
  const auto subjects_col = column("subjects");
  const auto journal_col = column("journal");
  const auto authors_col = column("n_authors");
  const auto refs_col = column("n_refs");

  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (is_blank(line)) continue;
    auto fields = split_fields(line, format.field);
    if (fields.size() != header.size()) {
      result.errors.push_back({line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                            std::to_string(fields.size())});
      continue;
    }
    ArticleRecord rec;
    rec.article_id = trim(fields[*id_col]);
    if (rec.article_id.empty()) {
      result.errors.push_back({line_no, "empty article id"});
      continue;
    }
    auto year = parse_int<int>(fields[*year_col]);
    if (!year) {
      result.errors.push_back({line_no, "year '" + fields[*year_col] + "' is not an integer"});
      continue;
    }
    if (*year < format.min_year || *year > format.max_year) {
      result.errors.push_back({line_no, "year " + std::to_string(*year) + " outside [" +
                                            std::to_string(format.min_year) + ", " +
                                            std::to_string(format.max_year) + "]"});
      continue;
    }
    rec.year = *year;
    if (subjects_col) rec.subjects = split_subjects(fields[*subjects_col], format.subject);
    if (journal_col) {
      std::string journal = trim(fields[*journal_col]);
      if (!journal.empty()) rec.journal_id = std::move(journal);
    }
    bool bad_count = false;
    auto count = [&](std::optional<std::size_t> col, const char* name) -> std::int64_t {
      if (!col || trim(fields[*col]).empty()) return 0;
      auto v = parse_int<std::int64_t>(fields[*col]);
      if (!v || *v < 0) {
        if (!bad_count) {
          result.errors.push_back({line_no, std::string(name) + " '" + fields[*col] +
                                                "' is not a non-negative integer"});
        }
        bad_count = true;
        return 0;
      }
      return *v;
    };
    rec.n_coauthors = count(authors_col, "n_authors");
    rec.n_references_declared = count(refs_col, "n_refs");
    if (bad_count) continue;

    if (!seen.insert(rec.article_id).second) {
      throw ParseError(line_no, "duplicate article id '" + rec.article_id + "'");
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

ArticleParse read_articles(const std::filesystem::path& path, const DelimiterSpec& format) {
  auto in = open_input(path);
  try {
    return parse_articles(in, format);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::vector<RawEdge> parse_edges(std::istream& in, char delimiter) {
  std::vector<RawEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (is_blank(line)) continue;
    auto fields = split_fields(line, delimiter);
    if (fields.size() != 2) {
      throw ParseError(line_no, "edge row has " + std::to_string(fields.size()) + " fields, expected 2");
    }
    RawEdge edge{trim(fields[0]), trim(fields[1])};
    if (edge.citing_id.empty() || edge.cited_id.empty()) {
      throw ParseError(line_no, "edge row has an empty article id");
    }
    edges.push_back(std::move(edge));
  }
  return edges;
}

std::vector<RawEdge> read_edges(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  try {
    return parse_edges(in, delimiter);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

void format_articles(const std::vector<ArticleRecord>& records, std::ostream& out,
                     const DelimiterSpec& format) {
  const char d = format.field;
  out << "id" << d << "year" << d << "subjects" << d << "journal" << d << "n_authors" << d << "n_refs\n";
  for (const auto& r : records) {
    std::string subjects;
    for (std::size_t i = 0; i < r.subjects.size(); ++i) {
      if (i) subjects += format.subject;
      subjects += r.subjects[i];
    }
    out << quote_field(r.article_id, d) << d << r.year << d << quote_field(subjects, d) << d
        << quote_field(r.journal_id.value_or(""), d) << d << r.n_coauthors << d
        << r.n_references_declared << '\n';
  }
}

void format_edges(const std::vector<RawEdge>& edges, std::ostream& out, char delimiter) {
  for (const auto& e : edges) {
    out << quote_field(e.citing_id, delimiter) << delimiter << quote_field(e.cited_id, delimiter) << '\n';
  }
}

void write_articles(const std::vector<ArticleRecord>& records, const std::filesystem::path& path) {
  std::ostringstream buffer;
  format_articles(records, buffer);
  write_file_atomic(path, buffer.str());
}

void write_edges(const std::vector<RawEdge>& edges, const std::filesystem::path& path) {
  std::ostringstream buffer;
  format_edges(edges, buffer);
  write_file_atomic(path, buffer.str());
}

ClusterMap parse_cluster_map(std::istream& in) {
  ClusterMap map;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (is_blank(line)) continue;
    auto fields = split_fields(line, sniff_delimiter(line));
    if (fields.size() != 2) throw ParseError(line_no, "cluster map row must have 2 fields");
    std::string subject = trim(fields[0]);
    std::string cluster = trim(fields[1]);
    if (first && lowercase(subject) == "subject" && lowercase(cluster) == "cluster") {
      first = false;
      continue;
    }
    first = false;
    if (subject.empty()) throw ParseError(line_no, "empty subject label");
    if (cluster.empty()) throw ParseError(line_no, "empty cluster label for subject '" + subject + "'");
    auto [it, inserted] = map.emplace(subject, cluster);
    if (!inserted && it->second != cluster) {
      throw ParseError(line_no, "subject '" + subject + "' mapped to two clusters");
    }
  }
  return map;
}

ClusterMap read_cluster_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_cluster_map(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string normalize_journal(const std::string& name) { return lowercase(trim(name)); }

GradeTable parse_grade_table(std::istream& in) {
  GradeTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (is_blank(line)) continue;
    auto fields = split_fields(line, sniff_delimiter(line));
    if (fields.size() != 3) throw ParseError(line_no, "grade table row must have 3 fields");
    if (first && lowercase(trim(fields[0])) == "journal") {
      first = false;
      continue;
    }
    first = false;
    std::string key = normalize_journal(fields[0]);
    if (key.empty()) throw ParseError(line_no, "empty journal name");
    table[key] = JournalGrade{trim(fields[1]), trim(fields[2])};
  }
  return table;
}

GradeTable read_grade_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_grade_table(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

}  // namespace asp
