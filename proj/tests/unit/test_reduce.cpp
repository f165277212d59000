#include <doctest.h>

#include "oracles.hpp"

#include "tagbook/reduce.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace tagbook;

namespace {

std::vector<TagVector> random_rows(std::mt19937_64& rng, std::size_t count, std::size_t m) {
  std::vector<TagVector> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(oracle::random_vector(rng, m));
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

} // namespace

TEST_CASE("select_frequent") {
  std::vector<VideoRecord> videos{{"1", {1}, {"a", "b"}}, {"2", {1}, {"a"}}, {"3", {1}, {"a", "c"}}};
  const auto corpus = SourceCorpus::create(videos, TagVocabulary({"c", "b", "a"}));
  const auto two = select_frequent(corpus, 2);
  CHECK(reduced_tags(corpus.vocabulary(), two).tags() == std::vector<std::string>{"b", "a"});
  CHECK(two.parent_size == 3);
  CHECK(two.parent_hash == corpus.vocabulary().hash());
  const auto all = select_frequent(corpus, 3);
  CHECK(all.selected == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(select_frequent(corpus, 4), SizeTooLarge);
  CHECK(kRecommendedFewExampleSize == 2000);
}

TEST_CASE("select_frequent is nested and matches a hand count") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto corpus = oracle::random_corpus(rng, 40, 25, 3, 0.0, 0.15);
    std::vector<std::pair<std::size_t, std::string>> counted;
    for (std::size_t t = 0; t < corpus.vocabulary().size(); ++t) {
      std::size_t df = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i)
        df += oracle::label(corpus, i, t) > 0;
      counted.emplace_back(df, corpus.vocabulary()[t]);
    }
    std::sort(counted.begin(), counted.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::set<std::size_t> previous;
    for (std::size_t size = 1; size <= 25; ++size) {
      const auto r = select_frequent(corpus, size);
      std::set<std::size_t> got(r.selected.begin(), r.selected.end());
      std::set<std::size_t> want;
      for (std::size_t i = 0; i < size; ++i)
        want.insert(corpus.vocabulary().index_of(counted[i].second));
      CHECK(got == want);
      CHECK(std::is_sorted(r.selected.begin(), r.selected.end()));
      CHECK(std::includes(got.begin(), got.end(), previous.begin(), previous.end()));
      previous = got;
    }
  }
}

TEST_CASE("project_vocabulary") {
  ReducedVocabulary r{{0, 2}, 3, ""};
  CHECK(project_vocabulary(TagVector{5, 6, 7}, r) == TagVector{5, 7});
  ReducedVocabulary id{{0, 1, 2}, 3, ""};
  CHECK(project_vocabulary(TagVector{5, 6, 7}, id) == TagVector{5, 6, 7});
  CHECK_THROWS_AS(project_vocabulary(TagVector{5, 6}, r), DimensionMismatch);
}

TEST_CASE("pca on collinear data") {
  std::vector<TagVector> line;
  for (double t : {-2.0, -1.0, 0.5, 3.0})
    line.push_back({1 + 2 * t, -1 + t});
  const auto model = pca_fit(line, 1);
  const auto c = model.component(0);
  CHECK(c[0] == doctest::Approx(2 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-12));
  const auto both = pca_fit(line, 2);
  CHECK(std::abs(both.explained_variance[1]) < 1e-12);
}

TEST_CASE("pca matches a Jacobi eigen-solver") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t count = 20, m = 8;
    const auto data = random_rows(rng, count, m);
    const auto model = pca_fit(data, m);
    std::vector<double> mean(m, 0.0);
    for (const auto& v : data)
      for (std::size_t c = 0; c < m; ++c)
        mean[c] += v[c] / count;
    std::vector<std::vector<double>> cov(m, std::vector<double>(m, 0.0));
    for (const auto& v : data)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          cov[a][b] += (v[a] - mean[a]) * (v[b] - mean[b]) / (count - 1);
    const auto eig = oracle::jacobi(cov);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(model.explained_variance[i] == doctest::Approx(eig.values[i]).epsilon(1e-6));
      // same axis up to sign
      CHECK(std::abs(dot(model.component(i), eig.vectors[i])) == doctest::Approx(1.0).epsilon(1e-6));
      for (std::size_t j = 0; j < m; ++j)
        CHECK(dot(model.component(i), model.component(j)) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8).scale(1.0));
      const auto comp = model.component(i);
      const auto big = std::max_element(comp.begin(), comp.end(),
                                         [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(*big > 0);
    }
  }
}

TEST_CASE("pca project and reconstruct") {
  std::mt19937_64 rng(31);
  const auto data = random_rows(rng, 12, 5);
  const auto model = pca_fit(data, 5);
  for (double x : pca_project(model.mean, model))
    CHECK(std::abs(x) < 1e-12);
  for (const auto& v : data) {
    const auto back = pca_reconstruct(pca_project(v, model), model);
    for (std::size_t c = 0; c < v.size(); ++c)
      CHECK(back[c] == doctest::Approx(v[c]).epsilon(1e-6));
  }
  TagVector shifted = model.mean;
  for (std::size_t c = 0; c < shifted.size(); ++c)
    shifted[c] += model.component(0)[c];
  const auto coords = pca_project(shifted, model);
  CHECK(coords[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < coords.size(); ++i)
    CHECK(std::abs(coords[i]) < 1e-12);
  CHECK_THROWS_AS(pca_project(TagVector{1, 2}, model), DimensionMismatch);
}

TEST_CASE("pca contract") {
  std::mt19937_64 rng(37);
  const auto data = random_rows(rng, 4, 6);
  CHECK_THROWS_AS(pca_fit(data, 4), InsufficientData);
  CHECK_THROWS_AS(pca_fit(std::vector<TagVector>{{1, 2}}, 1), InsufficientData);
  CHECK_THROWS_AS(pca_fit(data, 7), SizeTooLarge);
  CHECK(pca_fit(data, 3).output_dim() == 3);
}
