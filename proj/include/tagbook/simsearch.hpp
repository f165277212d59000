#pragma once

#include "tagbook/corpus.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace tagbook {

struct Neighbor {
  std::size_t index = 0; // position in the corpus
  VideoId id;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Nearest neighbors in descending similarity, ties by ascending id.
struct NeighborList {
  std::vector<Neighbor> entries;
  std::size_t k = 0;
};

FeatureVector average_pool_frames(std::span<const FeatureVector> frames);

/// Cosine of the angle between x and y; 0 when either has zero norm.
/// Clamped to [-1, 1].
double cosine_similarity(std::span<const double> x, std::span<const double> y);

/// Same value as cosine_similarity when the norms are sqrt(x.x), sqrt(y.y).
double cosine_from_parts(double dot, double norm_x, double norm_y);

double dot(std::span<const double> x, std::span<const double> y);
double l2_norm(std::span<const double> x);

/// Exact top-k by full scan.
NeighborList knn(const SourceCorpus& corpus, std::span<const double> query, std::size_t k,
                 std::optional<std::string_view> exclude = std::nullopt);

/// Similarity to every corpus video, in corpus order.
std::vector<std::pair<VideoId, double>> all_similarities(const SourceCorpus& corpus,
                                                         std::span<const double> query);

namespace detail {

/// Similarities in corpus order, written into `out` (size N).
void similarity_row(const SourceCorpus& corpus, std::span<const double> query,
                    std::span<double> out);

/// Indices of the top-k entries of `sims` ordered by (similarity desc, id asc).
/// `exclude` is skipped when set.
std::vector<std::size_t> top_k(const SourceCorpus& corpus, std::span<const double> sims,
                               std::size_t k, std::optional<std::size_t> exclude);

} // namespace detail

} // namespace tagbook
