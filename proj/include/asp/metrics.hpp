#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asp/citation_graph.hpp"
#include "asp/corpus_io.hpp"
#include "asp/error.hpp"

namespace asp {

// ---------------------------------------------------------------------------
// Descriptive statistics

struct SummaryStats {
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};

/// Quantile by linear interpolation between order statistics: position p * (n - 1)
/// in the sorted sample. `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);
double median(std::vector<double> values);

/// Throws InvalidParameter on empty input.
SummaryStats summary_stats(std::span<const double> values);

// ---------------------------------------------------------------------------
// Pareto tail index

struct TailIndexEstimate {
  double alpha = 0;
  double x_min = 0;
  std::int64_t n_tail = 0;
};

inline constexpr std::int64_t kMinTailSamples = 20;

/// Hill estimator alpha = n_tail / sum(ln(x / x_min)) over samples x >= x_min, with
/// x_min the `tail_quantile` empirical quantile. Throws InvalidParameter with fewer
/// than kMinTailSamples tail samples, a non-positive threshold, or a zero log-sum.
TailIndexEstimate tail_index(std::span<const double> values, double tail_quantile = 0.90);

/// Same estimator with an explicit threshold; requires at least two tail samples.
TailIndexEstimate tail_index_at(std::span<const double> values, double x_min);

// ---------------------------------------------------------------------------
// Correlation

/// Thrown when a correlation is undefined (zero variance, too few points).
class UndefinedCorrelation : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// Pearson product-moment correlation (two-pass).
double pearson(std::span<const double> x, std::span<const double> y);

struct DecileRow {
  std::string group;
  int decile = 0;  ///< 1 = most cited
  std::int64_t n = 0;
  std::optional<double> r;  ///< empty when the bin is degenerate
};

/// Assignment of cited articles into deciles within one group: indexes ordered by
/// citations descending (ties by index ascending), cut into 10 bins whose sizes
/// differ by at most one, larger bins first.
std::vector<std::vector<std::size_t>> decile_bins(std::span<const std::int64_t> ncit,
                                                  std::span<const std::size_t> members);

/// Per group (sorted label order) and decile, the Pearson r between ASP and #Cit of
/// the group's cited articles.
std::vector<DecileRow> decile_correlations(std::span<const double> asp, std::span<const std::int64_t> ncit,
                                           std::span<const std::string> groups);

/// 100 * (share of values strictly below v).
double percentile_rank(std::span<const double> values, double v);

/// Share of articles whose ASP percentile rank is at least `asp_percentile_min` while
/// their citation percentile rank is at most `ncit_percentile_max`.
double high_asp_low_citation_share(std::span<const double> asp, std::span<const double> ncit,
                                   double asp_percentile_min, double ncit_percentile_max);

// ---------------------------------------------------------------------------
// Grouped series

struct GroupYearValue {
  std::string group;
  int year = 0;
  std::optional<double> value;
};

/// Share of never-cited articles per (group, year) over the cross product of the
/// groups and years present; empty cells yield no value.
std::vector<GroupYearValue> noncited_ratio(std::span<const std::int64_t> ncit, std::span<const std::string> groups,
                                           std::span<const int> years);

struct TailSeriesRow {
  std::string group;
  int year = 0;
  std::optional<TailIndexEstimate> estimate;
};

/// tail_index per (group, year); cells with too few tail samples yield no estimate.
std::vector<TailSeriesRow> tail_index_series(std::span<const double> values, std::span<const std::string> groups,
                                             std::span<const int> years, double tail_quantile = 0.90);

// ---------------------------------------------------------------------------
// Cross-subject intensity

enum class IntensityLevel { subject, cluster };

struct IntensityMatrix {
  std::vector<std::string> labels;
  /// Row-major labels.size() x labels.size(), symmetric.
  std::vector<double> values;

  double at(std::size_t s, std::size_t t) const { return values[s * labels.size() + t]; }
};

struct IntensityOptions {
  IntensityLevel level = IntensityLevel::subject;
  double scale = 1.0;
  bool include_diagonal = true;
};

/// intensity(s, t) = scale * (edges s->t + edges t->s) / (articles(s) + articles(t)),
/// counting every subject (or cluster) an article belongs to. Cluster level needs a
/// map covering every subject in the graph; otherwise InvalidParameter lists the gaps.
IntensityMatrix cross_intensity(const CitationGraph& graph, const IntensityOptions& options = {},
                                const ClusterMap* clusters = nullptr);

// ---------------------------------------------------------------------------
// Journal grades

struct FourStats {
  double min = 0, mean = 0, median = 0, max = 0;
};

struct JournalGradeRow {
  std::string grade_kind;  ///< "sjr" or "h"
  std::string grade;
  std::string metric;  ///< "asp" or "ncit"
  std::string stat;    ///< which per-journal statistic: min, mean, median, max
  std::int64_t n_journals = 0;
  double range_lo = 0;
  double range_hi = 0;
  double mean = 0;
};

struct JournalAggregate {
  std::vector<JournalGradeRow> rows;
  std::int64_t journals_unmatched = 0;
  std::int64_t articles_unmatched = 0;
};

/// Per journal, min/mean/median/max of each metric; per grade, the range and mean of
/// each journal-level statistic. Journals missing from `grades` are counted and left out.
JournalAggregate journal_aggregate(std::span<const double> asp, std::span<const std::int64_t> ncit,
                                   std::span<const std::optional<std::string>> journal_ids,
                                   const GradeTable& grades);

// ---------------------------------------------------------------------------
// Covariates

struct CovariateBin {
  std::string label;  ///< "0", "1" .. "10", "11+"
  std::int64_t n = 0;
  std::optional<double> median_asp;
};

struct CovariateAssociation {
  std::optional<double> r;
  std::vector<CovariateBin> bins;
};

/// Bin index of a covariate value: 0 for values below 1, then 1..10, 11 for 11+.
std::size_t covariate_bin(std::int64_t value);

CovariateAssociation covariate_association(std::span<const double> asp, std::span<const std::int64_t> covariate);

// ---------------------------------------------------------------------------
// Clusters

/// Cluster holding most of the article's subjects; ties go to the tied cluster that
/// appears first in the subject list. Throws InvalidParameter on unmapped subjects.
std::string assign_cluster(std::span<const std::string> subjects, const ClusterMap& clusters);

/// Subjects absent from `clusters`, sorted and unique.
std::vector<std::string> unmapped_subjects(std::span<const std::vector<std::string>> subjects,
                                           const ClusterMap& clusters);

enum class RollupStat { mean, median };

/// Statistic of `values` per (cluster, year), articles assigned by assign_cluster.
/// Articles without subjects are skipped.
std::vector<GroupYearValue> cluster_rollup(std::span<const double> values,
                                           std::span<const std::vector<std::string>> subjects,
                                           const ClusterMap& clusters, RollupStat stat, std::span<const int> years);

}  // namespace asp
