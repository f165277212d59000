#pragma once

#include "tagbook/corpus.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace tagbook {

/// How neighbors are weighted and which source relevance is propagated.
///   hard   - weight 1 inside the top-k, binary labels
///   soft   - cosine similarity weights, binary labels
///   refine - cosine similarity weights, refined relevance matrix
enum class Variant { hard, soft, refine };

/// Prior term of the hard variant: `literal` reuses the rank weight (only
/// the top-k contribute), `full_set` counts every source video with weight 1.
enum class HardPriorMode { literal, full_set };

struct PropagationConfig {
  std::size_t k = 500;
  std::size_t k_r = 500;
  Variant variant = Variant::refine;
  HardPriorMode hard_prior_mode = HardPriorMode::literal;
};

std::string_view to_string(Variant variant);
std::string_view to_string(HardPriorMode mode);
/// Throws InvalidArgument for unknown names.
Variant parse_variant(std::string_view name);
HardPriorMode parse_hard_prior_mode(std::string_view name);

/// Contribution of the neighbor at 1-based `rank` to the top-k sum.
double neighbor_weight(Variant variant, std::size_t rank, double similarity, std::size_t k);

/// Neighbor-voted relevance of every tag for every source video, with the
/// video itself left out of its own k_r neighbors but kept in the prior.
/// Work is split across `threads`; the result does not depend on it.
RelevanceMatrix refine_source(const SourceCorpus& corpus, const PropagationConfig& config,
                              unsigned threads = 1);

/// TagBook vector of one video.
TagVector propagate(const SourceCorpus& corpus, std::span<const double> query,
                    const PropagationConfig& config);

using Query = std::pair<VideoId, FeatureVector>;
using TagBookEntry = std::pair<VideoId, TagVector>;

/// propagate() over many videos, bit-identical to calling it per video.
std::vector<TagBookEntry> propagate_batch(const SourceCorpus& corpus,
                                          std::span<const Query> queries,
                                          const PropagationConfig& config,
                                          unsigned threads = 1);

} // namespace tagbook
