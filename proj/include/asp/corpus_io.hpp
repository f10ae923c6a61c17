#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace asp {

/// One publication.
struct ArticleRecord {
  std::string article_id;
  int year = 0;
  std::vector<std::string> subjects;
  std::optional<std::string> journal_id;
  std::int64_t n_coauthors = 0;
  std::int64_t n_references_declared = 0;

  bool operator==(const ArticleRecord&) const = default;
};

/// A raw reference link: `citing_id` lists `cited_id` among its references.
struct RawEdge {
  std::string citing_id;
  std::string cited_id;

  bool operator==(const RawEdge&) const = default;
};

struct DelimiterSpec {
  char field = '\t';
  char subject = ';';
  int min_year = 1000;
  int max_year = 9999;
};

/// Row-level problem found while parsing; the row is skipped.
struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ArticleParse {
  std::vector<ArticleRecord> records;
  std::vector<RowError> errors;
};

/// Parses an article table with a header row. Required columns: `id`, `year`.
/// Optional: `subjects`, `journal`, `n_authors`, `n_refs`; other columns are ignored.
/// Malformed rows are reported in `errors` with their line number and skipped.
/// A duplicate article id throws ParseError.
ArticleParse parse_articles(std::istream& in, const DelimiterSpec& format = {});
ArticleParse read_articles(const std::filesystem::path& path, const DelimiterSpec& format = {});

/// Parses a headerless two-column edge list. Blank lines are skipped; a row with
/// the wrong arity or an empty key throws ParseError naming the line.
std::vector<RawEdge> parse_edges(std::istream& in, char delimiter = '\t');
std::vector<RawEdge> read_edges(const std::filesystem::path& path, char delimiter = '\t');

/// Inverse of parse_articles (tab-separated, full header).
void format_articles(const std::vector<ArticleRecord>& records, std::ostream& out,
                     const DelimiterSpec& format = {});
void format_edges(const std::vector<RawEdge>& edges, std::ostream& out, char delimiter = '\t');
void write_articles(const std::vector<ArticleRecord>& records, const std::filesystem::path& path);
void write_edges(const std::vector<RawEdge>& edges, const std::filesystem::path& path);

/// subject label -> cluster label, read from a two-column file (`subject`, `cluster`
/// header optional). Tab or comma separated.
using ClusterMap = std::map<std::string, std::string>;
ClusterMap parse_cluster_map(std::istream& in);
ClusterMap read_cluster_map(const std::filesystem::path& path);

struct JournalGrade {
  std::string sjr_quartile;  // Q1..Q4
  std::string h_quartile;    // H1..H4
};

/// Keys are normalized with normalize_journal.
using GradeTable = std::map<std::string, JournalGrade>;
GradeTable parse_grade_table(std::istream& in);
GradeTable read_grade_table(const std::filesystem::path& path);

/// Case-folds and strips surrounding whitespace.
std::string normalize_journal(const std::string& name);

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SyntheticSpec {
  std::int64_t n_articles = 10000;
  std::pair<int, int> year_range{1981, 2020};
  int n_subjects = 10;
  double mean_out_degree = 10.0;
  double attachment_exponent = 1.0;
  std::uint64_t seed = 42;
};

void validate(const SyntheticSpec& spec);

struct SyntheticCorpus {
  std::vector<ArticleRecord> articles;
  std::vector<RawEdge> edges;
};

/// Grows a citation corpus article by article in year order. Each article draws a
/// Poisson(mean_out_degree) reference count and cites that many distinct earlier
/// articles, each picked with probability proportional to (in_degree + 1)^exponent.
/// The output is a pure function of `spec`.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace asp
