#include "tagbook/simsearch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tagbook {

FeatureVector average_pool_frames(std::span<const FeatureVector> frames) {
  if (frames.empty())
    throw EmptyInput("average_pool_frames needs at least one frame");
  const std::size_t d = frames.front().size();
  FeatureVector sum(d, 0.0);
  for (const auto& f : frames) {
    if (f.size() != d)
      throw DimensionMismatch("frames have differing dimensions");
    for (std::size_t i = 0; i < d; ++i)
      sum[i] += f[i];
  }
  const double n = static_cast<double>(frames.size());
  for (double& x : sum)
    x /= n;
  return sum;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

double l2_norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double cosine_from_parts(double dot_xy, double norm_x, double norm_y) {
  if (norm_x == 0.0 || norm_y == 0.0)
    return 0.0;
  return std::clamp(dot_xy / (norm_x * norm_y), -1.0, 1.0);
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DimensionMismatch("cosine_similarity: dimensions " + std::to_string(x.size()) +
                            " and " + std::to_string(y.size()));
  return cosine_from_parts(dot(x, y), l2_norm(x), l2_norm(y));
}

namespace detail {

void similarity_row(const SourceCorpus& corpus, std::span<const double> query,
                    std::span<double> out) {
  if (query.size() != corpus.dim())
    throw DimensionMismatch("query has dimension " + std::to_string(query.size()) +
                            ", corpus has " + std::to_string(corpus.dim()));
  const double qn = l2_norm(query);
  for (std::size_t j = 0; j < corpus.size(); ++j)
    out[j] = cosine_from_parts(dot(query, corpus.feature(j)), qn, corpus.feature_norm(j));
}

std::vector<std::size_t> top_k(const SourceCorpus& corpus, std::span<const double> sims,
                               std::size_t k, std::optional<std::size_t> exclude) {
  std::vector<std::size_t> idx;
  idx.reserve(sims.size());
  for (std::size_t j = 0; j < sims.size(); ++j)
    if (!exclude || *exclude != j)
      idx.push_back(j);
  const std::size_t keep = std::min(k, idx.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b])
      return sims[a] > sims[b];
    return corpus.id_rank(a) < corpus.id_rank(b);
  };
  if (keep < idx.size())
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                     better);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end(), better);
  return idx;
}

} // namespace detail

NeighborList knn(const SourceCorpus& corpus, std::span<const double> query, std::size_t k,
                 std::optional<std::string_view> exclude) {
  if (k == 0)
    throw InvalidArgument("knn: k must be positive");
  std::vector<double> sims(corpus.size());
  detail::similarity_row(corpus, query, sims);
  std::optional<std::size_t> skip;
  if (exclude)
    skip = corpus.find(*exclude);
  NeighborList out;
  out.k = k;
  for (std::size_t j : detail::top_k(corpus, sims, k, skip))
    out.entries.push_back({j, corpus.id(j), sims[j]});
  return out;
}

std::vector<std::pair<VideoId, double>> all_similarities(const SourceCorpus& corpus,
                                                         std::span<const double> query) {
  std::vector<double> sims(corpus.size());
  detail::similarity_row(corpus, query, sims);
  std::vector<std::pair<VideoId, double>> out;
  out.reserve(sims.size());
  for (std::size_t j = 0; j < sims.size(); ++j)
    out.emplace_back(corpus.id(j), sims[j]);
  return out;
}

} // namespace tagbook
