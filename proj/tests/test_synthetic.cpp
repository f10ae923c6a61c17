#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "asp/corpus_io.hpp"
#include "asp/error.hpp"

namespace asp {
namespace {

std::size_t index_of(const std::string& id) { return std::stoul(id.substr(1)); }

std::string serialize(const SyntheticCorpus& c) {
  std::ostringstream out;
  format_articles(c.articles, out);
  format_edges(c.edges, out);
  return out.str();
}

TEST(Synthetic, SameSeedSameBytes) {
  SyntheticSpec spec;
  spec.n_articles = 3000;
  spec.attachment_exponent = 1.3;
  EXPECT_EQ(serialize(generate_synthetic(spec)), serialize(generate_synthetic(spec)));
  auto other = spec;
  other.seed = spec.seed + 1;
  EXPECT_NE(serialize(generate_synthetic(spec)), serialize(generate_synthetic(other)));
}

TEST(Synthetic, EdgesNeverPointForward) {
  SyntheticSpec spec;
  spec.n_articles = 5000;
  auto corpus = generate_synthetic(spec);
  std::map<std::string, int> year;
  for (const auto& a : corpus.articles) {
    year[a.article_id] = a.year;
    EXPECT_GE(a.year, spec.year_range.first);
    EXPECT_LE(a.year, spec.year_range.second);
    ASSERT_EQ(a.subjects.size(), 1u);
  }
  for (const auto& e : corpus.edges) {
    ASSERT_GE(year.at(e.citing_id), year.at(e.cited_id));
    ASSERT_NE(e.citing_id, e.cited_id);
  }
}

TEST(Synthetic, MeanOutDegreeWithinFivePercent) {
  SyntheticSpec spec;
  spec.n_articles = 100000;
  spec.mean_out_degree = 8.0;
  auto corpus = generate_synthetic(spec);
  const double mean = static_cast<double>(corpus.edges.size()) / static_cast<double>(spec.n_articles);
  EXPECT_NEAR(mean, spec.mean_out_degree, 0.05 * spec.mean_out_degree);
}

// With exponent 0 every earlier article is equally likely. Bin each pick by its
// relative position t/k among the k eligible targets and compare with the exact
// expected bin mass; 9 degrees of freedom, critical value 21.666 at alpha = 0.01.
TEST(Synthetic, ZeroExponentIsUniformOverEligibleTargets) {
  SyntheticSpec spec;
  spec.n_articles = 100000;
  spec.mean_out_degree = 5.0;
  spec.attachment_exponent = 0.0;
  spec.seed = 2024;
  auto corpus = generate_synthetic(spec);

  std::vector<double> observed(10, 0.0), expected(10, 0.0);
  std::map<std::size_t, int> picks_per_article;
  for (const auto& e : corpus.edges) {
    const std::size_t k = index_of(e.citing_id);
    const std::size_t t = index_of(e.cited_id);
    ASSERT_LT(t, k);
    observed[10 * t / k] += 1.0;
    ++picks_per_article[k];
  }
  for (const auto& [k, picks] : picks_per_article) {
    for (std::size_t b = 0; b < 10; ++b) {
      // #{t in [0,k) : floor(10 t / k) == b}
      const std::size_t lo = (b * k + 9) / 10;
      const std::size_t hi = ((b + 1) * k + 9) / 10;
      expected[b] += picks * static_cast<double>(hi - lo) / static_cast<double>(k);
    }
  }
  double chi2 = 0.0;
  for (std::size_t b = 0; b < 10; ++b) chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
  EXPECT_LT(chi2, 21.666) << "chi-square " << chi2;
}

TEST(Synthetic, AttachmentExponentHeavierTail) {
  SyntheticSpec spec;
  spec.n_articles = 20000;
  auto max_in_degree = [](const SyntheticCorpus& c) {
    std::map<std::string, int> in;
    int best = 0;
    for (const auto& e : c.edges) best = std::max(best, ++in[e.cited_id]);
    return best;
  };
  spec.attachment_exponent = 0.0;
  const int flat = max_in_degree(generate_synthetic(spec));
  spec.attachment_exponent = 1.0;
  const int skewed = max_in_degree(generate_synthetic(spec));
  EXPECT_GT(skewed, 3 * flat);
}

TEST(Synthetic, SpecValidation) {
  SyntheticSpec spec;
  spec.n_articles = 0;
  EXPECT_THROW(generate_synthetic(spec), InvalidParameter);
  spec.n_articles = 10;
  spec.mean_out_degree = 10.0;
  EXPECT_THROW(generate_synthetic(spec), InvalidParameter);
  spec.mean_out_degree = 2.0;
  spec.attachment_exponent = -1.0;
  EXPECT_THROW(generate_synthetic(spec), InvalidParameter);
  spec.attachment_exponent = 1.0;
  spec.year_range = {2000, 1990};
  EXPECT_THROW(generate_synthetic(spec), InvalidParameter);
}

}  // namespace
}  // namespace asp
