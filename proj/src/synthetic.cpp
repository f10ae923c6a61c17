#include <algorithm>
#include <cmath>
#include <random>

#include "asp/corpus_io.hpp"
#include "asp/error.hpp"

namespace asp {
namespace {

// Fenwick tree over non-negative weights supporting prefix-sum sampling.
class WeightTree {
 public:
  explicit WeightTree(std::size_t n) : tree_(n + 1, 0.0), weight_(n, 0.0) {
    top_bit_ = 1;
    while (top_bit_ * 2 <= n) top_bit_ *= 2;
  }

  void set(std::size_t i, double w) {
    double delta = w - weight_[i];
    weight_[i] = w;
    total_ += delta;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  double total() const { return total_; }

  // Index of the first element whose inclusive prefix sum exceeds `target`.
  std::size_t find(double target, std::size_t limit) const {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos, limit - 1);
  }

 private:
  std::vector<double> tree_;
  std::vector<double> weight_;
  std::size_t top_bit_;
  double total_ = 0.0;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string padded(char prefix, std::int64_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.n_articles <= 0) throw InvalidParameter("n_articles must be positive");
  if (spec.year_range.first > spec.year_range.second) throw InvalidParameter("year_range is empty");
  if (spec.n_subjects <= 0) throw InvalidParameter("n_subjects must be positive");
  if (!(spec.mean_out_degree > 0.0)) throw InvalidParameter("mean_out_degree must be positive");
  if (!(spec.mean_out_degree < static_cast<double>(spec.n_articles))) {
    throw InvalidParameter("mean_out_degree must be smaller than n_articles");
  }
  if (!(spec.attachment_exponent >= 0.0)) throw InvalidParameter("attachment_exponent must be >= 0");
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  const auto n = static_cast<std::size_t>(spec.n_articles);
  std::mt19937_64 rng(spec.seed);

  std::vector<int> years(n);
  std::uniform_int_distribution<int> year_dist(spec.year_range.first, spec.year_range.second);
  for (auto& y : years) y = year_dist(rng);
  std::sort(years.begin(), years.end());

  const int id_width = std::max(1, static_cast<int>(std::to_string(n - 1).size()));
  const int subject_width = std::max(2, static_cast<int>(std::to_string(spec.n_subjects - 1).size()));
  const std::int64_t n_journals = std::max<std::int64_t>(1, spec.n_articles / 500);
  const int journal_width = static_cast<int>(std::to_string(n_journals - 1).size());

  std::uniform_int_distribution<int> subject_dist(0, spec.n_subjects - 1);
  std::uniform_int_distribution<std::int64_t> journal_dist(0, n_journals - 1);
  std::poisson_distribution<int> refs_dist(spec.mean_out_degree);
  std::geometric_distribution<int> authors_dist(0.3);

  SyntheticCorpus corpus;
  corpus.articles.resize(n);
  corpus.edges.reserve(static_cast<std::size_t>(spec.mean_out_degree * static_cast<double>(n) * 1.01));

  const double exponent = spec.attachment_exponent;
  auto weight_of = [exponent](std::int64_t in_degree) {
    return exponent == 0.0 ? 1.0 : std::pow(static_cast<double>(in_degree + 1), exponent);
  };

  WeightTree weights(n);
  std::vector<std::int64_t> in_degree(n, 0);
  std::vector<std::size_t> picked;

  for (std::size_t k = 0; k < n; ++k) {
    ArticleRecord& rec = corpus.articles[k];
    rec.article_id = padded('A', static_cast<std::int64_t>(k), id_width);
    rec.year = years[k];
    rec.subjects = {padded('S', subject_dist(rng), subject_width)};
    rec.journal_id = padded('J', journal_dist(rng), journal_width);
    rec.n_coauthors = 1 + authors_dist(rng);

    const int drawn = refs_dist(rng);
    rec.n_references_declared = drawn;
    const std::size_t wanted = std::min<std::size_t>(static_cast<std::size_t>(drawn), k);

    picked.clear();
    if (wanted == k) {
      for (std::size_t t = 0; t < k; ++t) picked.push_back(t);
    } else {
      while (picked.size() < wanted) {
        std::size_t target = exponent == 0.0
                                 ? static_cast<std::size_t>(uniform01(rng) * static_cast<double>(k))
                                 : weights.find(uniform01(rng) * weights.total(), k);
        target = std::min(target, k - 1);
        if (std::find(picked.begin(), picked.end(), target) == picked.end()) picked.push_back(target);
      }
    }
    for (std::size_t target : picked) {
      corpus.edges.push_back({rec.article_id, corpus.articles[target].article_id});
    }
    // In-degree updates take effect after the article's references are all drawn.
    for (std::size_t target : picked) {
      ++in_degree[target];
      if (exponent != 0.0) weights.set(target, weight_of(in_degree[target]));
    }
    if (exponent != 0.0) weights.set(k, weight_of(0));
  }
  return corpus;
}

}  // namespace asp
