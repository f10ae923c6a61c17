#include "asp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace asp {
namespace {

template <typename T>
void require_aligned(std::size_t n, std::span<const T> other, const char* what) {
  if (other.size() != n) throw InvalidParameter(std::string(what) + " is not aligned with the value vector");
}

template <typename T>
std::vector<T> sorted_unique(std::span<const T> values) {
  std::vector<T> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename T>
std::size_t position(const std::vector<T>& sorted, const T& value) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), value) - sorted.begin());
}

FourStats four_stats(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  FourStats s;
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile_sorted(values, 0.5);
  return s;
}

TailIndexEstimate hill(std::span<const double> values, double x_min, std::int64_t min_tail) {
  if (!(x_min > 0.0)) throw InvalidParameter("tail threshold must be positive for a Pareto fit");
  TailIndexEstimate est;
  est.x_min = x_min;
  double log_sum = 0.0;
  for (double x : values) {
    if (x < x_min) continue;
    ++est.n_tail;
    if (x > x_min) log_sum += std::log(x / x_min);
  }
  if (est.n_tail < min_tail) {
    throw InvalidParameter("tail has " + std::to_string(est.n_tail) + " samples, need at least " +
                           std::to_string(min_tail));
  }
  if (!(log_sum > 0.0)) throw InvalidParameter("all tail samples equal the threshold");
  est.alpha = static_cast<double>(est.n_tail) / log_sum;
  return est;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidParameter("quantile of an empty sample");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.empty()) throw InvalidParameter("summary statistics of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryStats s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  // Guard the ordering against rounding in the mean of near-constant samples.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

TailIndexEstimate tail_index(std::span<const double> values, double tail_quantile) {
  if (!(tail_quantile >= 0.0 && tail_quantile < 1.0)) throw InvalidParameter("tail quantile must lie in [0, 1)");
  if (values.empty()) throw InvalidParameter("tail index of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return hill(values, quantile_sorted(sorted, tail_quantile), kMinTailSamples);
}

TailIndexEstimate tail_index_at(std::span<const double> values, double x_min) { return hill(values, x_min, 2); }

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidParameter("pearson: vectors differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw UndefinedCorrelation("pearson needs at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<std::vector<std::size_t>> decile_bins(std::span<const std::int64_t> ncit,
                                                  std::span<const std::size_t> members) {
  std::vector<std::size_t> cited;
  for (std::size_t i : members) {
    if (ncit[i] > 0) cited.push_back(i);
  }
  std::sort(cited.begin(), cited.end(), [&](std::size_t a, std::size_t b) {
    return ncit[a] != ncit[b] ? ncit[a] > ncit[b] : a < b;
  });
  std::vector<std::vector<std::size_t>> bins(10);
  const std::size_t base = cited.size() / 10;
  const std::size_t extra = cited.size() % 10;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < 10; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    bins[b].assign(cited.begin() + static_cast<std::ptrdiff_t>(pos),
                   cited.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return bins;
}

std::vector<DecileRow> decile_correlations(std::span<const double> asp, std::span<const std::int64_t> ncit,
                                           std::span<const std::string> groups) {
  require_aligned(asp.size(), ncit, "citation vector");
  require_aligned(asp.size(), groups, "group labels");
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < groups.size(); ++i) members[groups[i]].push_back(i);

  std::vector<DecileRow> rows;
  for (const auto& [group, idx] : members) {
    const auto bins = decile_bins(ncit, idx);
    for (std::size_t b = 0; b < bins.size(); ++b) {
      DecileRow row{group, static_cast<int>(b + 1), static_cast<std::int64_t>(bins[b].size()), std::nullopt};
      std::vector<double> x, y;
      for (std::size_t i : bins[b]) {
        x.push_back(asp[i]);
        y.push_back(static_cast<double>(ncit[i]));
      }
      try {
        row.r = pearson(x, y);
      } catch (const UndefinedCorrelation&) {
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double percentile_rank(std::span<const double> values, double v) {
  if (values.empty()) throw InvalidParameter("percentile rank within an empty sample");
  const auto below = std::count_if(values.begin(), values.end(), [v](double x) { return x < v; });
  return 100.0 * static_cast<double>(below) / static_cast<double>(values.size());
}

double high_asp_low_citation_share(std::span<const double> asp, std::span<const double> ncit,
                                   double asp_percentile_min, double ncit_percentile_max) {
  require_aligned(asp.size(), ncit, "citation counts");
  if (asp.empty()) throw InvalidParameter("share of an empty sample");
  for (double p : {asp_percentile_min, ncit_percentile_max}) {
    if (!(p >= 0.0 && p <= 100.0)) throw InvalidParameter("percentile thresholds must lie in [0, 100]");
  }
  std::vector<double> sorted_asp(asp.begin(), asp.end()), sorted_ncit(ncit.begin(), ncit.end());
  std::sort(sorted_asp.begin(), sorted_asp.end());
  std::sort(sorted_ncit.begin(), sorted_ncit.end());
  const double n = static_cast<double>(asp.size());
  auto rank = [n](const std::vector<double>& sorted, double v) {
    return 100.0 * static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()) / n;
  };
  std::size_t hits = 0;
  for (std::size_t i = 0; i < asp.size(); ++i) {
    if (rank(sorted_asp, asp[i]) >= asp_percentile_min && rank(sorted_ncit, ncit[i]) <= ncit_percentile_max) ++hits;
  }
  return static_cast<double>(hits) / n;
}

std::vector<GroupYearValue> noncited_ratio(std::span<const std::int64_t> ncit, std::span<const std::string> groups,
                                           std::span<const int> years) {
  require_aligned(ncit.size(), groups, "group labels");
  require_aligned(ncit.size(), years, "years");
  const auto group_labels = sorted_unique(groups);
  const auto year_labels = sorted_unique(years);
  const std::size_t ny = year_labels.size();
  std::vector<std::int64_t> total(group_labels.size() * ny, 0), uncited(group_labels.size() * ny, 0);
  for (std::size_t i = 0; i < ncit.size(); ++i) {
    const std::size_t cell = position(group_labels, groups[i]) * ny + position(year_labels, years[i]);
    ++total[cell];
    if (ncit[i] == 0) ++uncited[cell];
  }
  std::vector<GroupYearValue> out;
  for (std::size_t g = 0; g < group_labels.size(); ++g) {
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t cell = g * ny + y;
      GroupYearValue row{group_labels[g], year_labels[y], std::nullopt};
      if (total[cell] > 0) row.value = static_cast<double>(uncited[cell]) / static_cast<double>(total[cell]);
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::vector<TailSeriesRow> tail_index_series(std::span<const double> values, std::span<const std::string> groups,
                                             std::span<const int> years, double tail_quantile) {
  require_aligned(values.size(), groups, "group labels");
  require_aligned(values.size(), years, "years");
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  for (std::size_t i = 0; i < values.size(); ++i) cells[{groups[i], years[i]}].push_back(values[i]);
  std::vector<TailSeriesRow> out;
  for (const auto& [key, sample] : cells) {
    TailSeriesRow row{key.first, key.second, std::nullopt};
    try {
      row.estimate = tail_index(sample, tail_quantile);
    } catch (const InvalidParameter&) {
    }
    out.push_back(std::move(row));
  }
  return out;
}

IntensityMatrix cross_intensity(const CitationGraph& graph, const IntensityOptions& options,
                                const ClusterMap* clusters) {
  const auto& subjects = graph.subject_labels();
  IntensityMatrix matrix;
  // membership_of[s] = row in the matrix for subject s
  std::vector<std::uint32_t> membership_of(subjects.size());
  if (options.level == IntensityLevel::subject) {
    matrix.labels = subjects;
    std::iota(membership_of.begin(), membership_of.end(), 0u);
  } else {
    if (clusters == nullptr) throw InvalidParameter("cluster-level intensity needs a cluster map");
    std::vector<std::string> missing;
    for (const auto& s : subjects) {
      if (!clusters->contains(s)) missing.push_back(s);
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
      throw InvalidParameter("subjects missing from cluster map: " + list);
    }
    std::vector<std::string> labels;
    for (const auto& s : subjects) labels.push_back(clusters->at(s));
    matrix.labels = sorted_unique<std::string>(labels);
    for (std::size_t s = 0; s < subjects.size(); ++s) {
      membership_of[s] = static_cast<std::uint32_t>(position(matrix.labels, labels[s]));
    }
  }

  const std::size_t k = matrix.labels.size();
  std::vector<std::vector<std::uint32_t>> member(graph.size());
  std::vector<double> articles(k, 0.0);
  for (NodeId v = 0; v < graph.size(); ++v) {
    auto& m = member[v];
    for (auto s : graph.subjects(v)) m.push_back(membership_of[s]);
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    for (auto c : m) articles[c] += 1.0;
  }
  std::vector<double> directed(k * k, 0.0);
  for (NodeId j = 0; j < graph.size(); ++j) {
    for (NodeId i : graph.references(j)) {
      for (auto s : member[j]) {
        for (auto t : member[i]) directed[s * k + t] += 1.0;
      }
    }
  }
  matrix.values.assign(k * k, 0.0);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t t = 0; t < k; ++t) {
      if (s == t && !options.include_diagonal) continue;
      const double denom = articles[s] + articles[t];
      if (denom > 0.0) matrix.values[s * k + t] = options.scale * (directed[s * k + t] + directed[t * k + s]) / denom;
    }
  }
  return matrix;
}

JournalAggregate journal_aggregate(std::span<const double> asp, std::span<const std::int64_t> ncit,
                                   std::span<const std::optional<std::string>> journal_ids,
                                   const GradeTable& grades) {
  require_aligned(asp.size(), ncit, "citation vector");
  require_aligned(asp.size(), journal_ids, "journal ids");
  JournalAggregate result;

  std::map<std::string, std::vector<std::size_t>> by_journal;
  for (std::size_t i = 0; i < journal_ids.size(); ++i) {
    if (!journal_ids[i]) {
      ++result.articles_unmatched;
      continue;
    }
    by_journal[normalize_journal(*journal_ids[i])].push_back(i);
  }

  struct JournalStats {
    const JournalGrade* grade;
    FourStats asp;
    FourStats ncit;
  };
  std::vector<JournalStats> journals;
  for (const auto& [name, idx] : by_journal) {
    auto it = grades.find(name);
    if (it == grades.end()) {
      ++result.journals_unmatched;
      result.articles_unmatched += static_cast<std::int64_t>(idx.size());
      continue;
    }
    std::vector<double> a, c;
    for (std::size_t i : idx) {
      a.push_back(asp[i]);
      c.push_back(static_cast<double>(ncit[i]));
    }
    journals.push_back({&it->second, four_stats(std::move(a)), four_stats(std::move(c))});
  }

  const char* kinds[] = {"sjr", "h"};
  for (const char* kind : kinds) {
    auto grade_of = [&](const JournalStats& j) {
      return std::string(kind) == "sjr" ? j.grade->sjr_quartile : j.grade->h_quartile;
    };
    std::set<std::string> labels;
    for (const auto& j : journals) {
      if (!grade_of(j).empty()) labels.insert(grade_of(j));
    }
    for (const auto& label : labels) {
      for (const char* metric : {"asp", "ncit"}) {
        const std::pair<const char*, double FourStats::*> stats[] = {
            {"min", &FourStats::min}, {"mean", &FourStats::mean}, {"median", &FourStats::median}, {"max", &FourStats::max}};
        for (const auto& [stat_name, field] : stats) {
          std::vector<double> values;
          for (const auto& j : journals) {
            if (grade_of(j) != label) continue;
            const FourStats& fs = std::string(metric) == "asp" ? j.asp : j.ncit;
            values.push_back(fs.*field);
          }
          JournalGradeRow row{kind, label, metric, stat_name, static_cast<std::int64_t>(values.size()), 0, 0, 0};
          row.range_lo = *std::min_element(values.begin(), values.end());
          row.range_hi = *std::max_element(values.begin(), values.end());
          row.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  return result;
}

std::size_t covariate_bin(std::int64_t value) {
  if (value < 1) return 0;
  return static_cast<std::size_t>(std::min<std::int64_t>(value, 11));
}

CovariateAssociation covariate_association(std::span<const double> asp, std::span<const std::int64_t> covariate) {
  require_aligned(asp.size(), covariate, "covariate");
  CovariateAssociation result;
  std::vector<double> cov(covariate.begin(), covariate.end());
  try {
    result.r = pearson(asp, cov);
  } catch (const UndefinedCorrelation&) {
  }
  std::vector<std::vector<double>> bins(12);
  for (std::size_t i = 0; i < asp.size(); ++i) bins[covariate_bin(covariate[i])].push_back(asp[i]);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    CovariateBin bin{b == 11 ? "11+" : std::to_string(b), static_cast<std::int64_t>(bins[b].size()), std::nullopt};
    if (!bins[b].empty()) bin.median_asp = median(std::move(bins[b]));
    result.bins.push_back(std::move(bin));
  }
  return result;
}

std::string assign_cluster(std::span<const std::string> subjects, const ClusterMap& clusters) {
  if (subjects.empty()) throw InvalidParameter("article has no subjects to assign a cluster from");
  std::vector<std::pair<std::string, int>> tally;  // first-appearance order
  for (const auto& s : subjects) {
    auto it = clusters.find(s);
    if (it == clusters.end()) throw InvalidParameter("subject '" + s + "' is not in the cluster map");
    auto slot = std::find_if(tally.begin(), tally.end(), [&](const auto& p) { return p.first == it->second; });
    if (slot == tally.end()) {
      tally.emplace_back(it->second, 1);
    } else {
      ++slot->second;
    }
  }
  auto best = tally.begin();
  for (auto it = tally.begin(); it != tally.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

std::vector<std::string> unmapped_subjects(std::span<const std::vector<std::string>> subjects,
                                           const ClusterMap& clusters) {
  std::set<std::string> missing;
  for (const auto& list : subjects) {
    for (const auto& s : list) {
      if (!clusters.contains(s)) missing.insert(s);
    }
  }
  return {missing.begin(), missing.end()};
}

std::vector<GroupYearValue> cluster_rollup(std::span<const double> values,
                                           std::span<const std::vector<std::string>> subjects,
                                           const ClusterMap& clusters, RollupStat stat, std::span<const int> years) {
  require_aligned(values.size(), subjects, "subject lists");
  require_aligned(values.size(), years, "years");
  if (auto missing = unmapped_subjects(subjects, clusters); !missing.empty()) {
    std::string list;
    for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
    throw InvalidParameter("subjects missing from cluster map: " + list);
  }
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  std::set<std::string> cluster_labels;
  std::set<int> year_labels;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (subjects[i].empty()) continue;
    std::string cluster = assign_cluster(subjects[i], clusters);
    cluster_labels.insert(cluster);
    year_labels.insert(years[i]);
    cells[{std::move(cluster), years[i]}].push_back(values[i]);
  }
  std::vector<GroupYearValue> out;
  for (const auto& cluster : cluster_labels) {
    for (int year : year_labels) {
      GroupYearValue row{cluster, year, std::nullopt};
      auto it = cells.find({cluster, year});
      if (it != cells.end()) {
        const auto& v = it->second;
        row.value = stat == RollupStat::mean
                        ? std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())
                        : median(v);
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace asp
