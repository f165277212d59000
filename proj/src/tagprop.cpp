#include "tagbook/tagprop.hpp"

#include "tagbook/log.hpp"
#include "tagbook/parallel.hpp"
#include "tagbook/simsearch.hpp"

#include <algorithm>
#include <string>

namespace tagbook {

std::string_view to_string(Variant variant) {
  switch (variant) {
  case Variant::hard:
    return "hard";
  case Variant::soft:
    return "soft";
  case Variant::refine:
    return "refine";
  }
  return "?";
}

std::string_view to_string(HardPriorMode mode) {
  return mode == HardPriorMode::literal ? "literal" : "full_set";
}

Variant parse_variant(std::string_view name) {
  if (name == "hard")
    return Variant::hard;
  if (name == "soft")
    return Variant::soft;
  if (name == "refine")
    return Variant::refine;
  throw InvalidArgument("unknown variant '" + std::string(name) + "' (hard|soft|refine)");
}

HardPriorMode parse_hard_prior_mode(std::string_view name) {
  if (name == "literal")
    return HardPriorMode::literal;
  if (name == "full_set")
    return HardPriorMode::full_set;
  throw InvalidArgument("unknown hard prior mode '" + std::string(name) +
                        "' (literal|full_set)");
}

double neighbor_weight(Variant variant, std::size_t rank, double similarity, std::size_t k) {
  if (rank == 0 || rank > k)
    return 0.0;
  return variant == Variant::hard ? 1.0 : similarity;
}

namespace {

// Queries whose prior over a dense relevance matrix share one pass over it.
constexpr std::size_t kQueryBlock = 8;

std::size_t clamp_k(std::size_t k, std::size_t limit, const char* name) {
  if (k == 0)
    throw InvalidArgument(std::string(name) + " must be positive");
  if (k > limit) {
    log::warn(std::string(name) + " = " + std::to_string(k) + " exceeds the " +
              std::to_string(limit) + " available source videos; using " +
              std::to_string(limit));
    return limit;
  }
  return k;
}

void check_refined(const SourceCorpus& corpus, const PropagationConfig& config) {
  if (config.variant == Variant::refine && !corpus.refined())
    throw MissingRefinement("variant 'refine' needs a refined source corpus (run refine first)");
}

// Adds `weight` to acc[t] for every tag t on source video j.
inline void add_labels(const SourceCorpus& corpus, std::size_t j, double weight,
                       std::span<double> acc) {
  for (auto t : corpus.tag_indices(j))
    acc[t] += weight;
}

inline void add_row(std::span<const double> row, double weight, std::span<double> acc) {
  const std::size_t m = row.size();
  const double* r = row.data();
  double* a = acc.data();
  for (std::size_t i = 0; i < m; ++i)
    a[i] += weight * r[i];
}

// Top-k term for one query, summed in rank order.
void top_term(const SourceCorpus& corpus, const PropagationConfig& config,
              std::span<const double> sims, std::span<const std::size_t> top,
              std::span<double> acc) {
  for (std::size_t rank = 1; rank <= top.size(); ++rank) {
    const std::size_t j = top[rank - 1];
    const double w = neighbor_weight(config.variant, rank, sims[j], top.size());
    if (config.variant == Variant::refine)
      add_row(corpus.refined()->row(j), w, acc);
    else
      add_labels(corpus, j, w, acc);
  }
}

// Prior term over binary labels for one query, summed in corpus order.
void label_prior(const SourceCorpus& corpus, const PropagationConfig& config,
                 std::span<const double> sims, std::span<const std::size_t> top,
                 std::span<double> acc) {
  const std::size_t n = corpus.size();
  if (config.variant == Variant::soft) {
    for (std::size_t j = 0; j < n; ++j)
      add_labels(corpus, j, sims[j], acc);
    return;
  }
  if (config.hard_prior_mode == HardPriorMode::full_set) {
    for (std::size_t j = 0; j < n; ++j)
      add_labels(corpus, j, 1.0, acc);
    return;
  }
  std::vector<char> in_top(n, 0);
  for (std::size_t j : top)
    in_top[j] = 1;
  for (std::size_t j = 0; j < n; ++j)
    if (in_top[j])
      add_labels(corpus, j, 1.0, acc);
}

// Propagates a block of queries whose similarity rows are already computed.
// sims: block x N, out: block x m.
void propagate_block(const SourceCorpus& corpus, const PropagationConfig& config,
                     std::size_t k, std::size_t block, std::span<const double> sims,
                     std::span<double> out) {
  const std::size_t n = corpus.size();
  const std::size_t m = corpus.vocabulary().size();
  std::vector<double> top_acc(block * m, 0.0);
  std::vector<double> prior_acc(block * m, 0.0);
  std::vector<std::vector<std::size_t>> tops(block);

  for (std::size_t q = 0; q < block; ++q) {
    auto row = sims.subspan(q * n, n);
    tops[q] = detail::top_k(corpus, row, k, std::nullopt);
    top_term(corpus, config, row, tops[q], std::span(top_acc).subspan(q * m, m));
  }

  if (config.variant == Variant::refine) {
    const auto& r = *corpus.refined();
    for (std::size_t j = 0; j < n; ++j) {
      const auto rj = r.row(j);
      for (std::size_t q = 0; q < block; ++q)
        add_row(rj, sims[q * n + j], std::span(prior_acc).subspan(q * m, m));
    }
  } else {
    for (std::size_t q = 0; q < block; ++q)
      label_prior(corpus, config, sims.subspan(q * n, n), tops[q],
                  std::span(prior_acc).subspan(q * m, m));
  }

  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < block * m; ++i)
    out[i] = top_acc[i] / kd - prior_acc[i] / nd;
}

} // namespace

RelevanceMatrix refine_source(const SourceCorpus& corpus, const PropagationConfig& config,
                              unsigned threads) {
  const std::size_t n = corpus.size();
  const std::size_t m = corpus.vocabulary().size();
  std::size_t k_r = config.k_r;
  if (k_r == 0)
    throw InvalidArgument("k_r must be positive");
  if (k_r > n - 1) {
    log::warn("k_r = " + std::to_string(k_r) + " exceeds the " + std::to_string(n - 1) +
              " other source videos; using " + std::to_string(n - 1));
    k_r = n - 1;
  }
  RelevanceMatrix out(n, m);
  parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sims(n);
    std::vector<double> top_acc(m), prior_acc(m);
    for (std::size_t v = begin; v < end; ++v) {
      detail::similarity_row(corpus, corpus.feature(v), sims);
      std::fill(top_acc.begin(), top_acc.end(), 0.0);
      std::fill(prior_acc.begin(), prior_acc.end(), 0.0);
      const auto top = detail::top_k(corpus, sims, k_r, v);
      for (std::size_t j : top)
        add_labels(corpus, j, sims[j], top_acc);
      for (std::size_t j = 0; j < n; ++j)
        add_labels(corpus, j, sims[j], prior_acc);
      auto row = out.row(v);
      const double kd = static_cast<double>(k_r);
      const double nd = static_cast<double>(n);
      for (std::size_t t = 0; t < m; ++t)
        row[t] = (k_r > 0 ? top_acc[t] / kd : 0.0) - prior_acc[t] / nd;
    }
  });
  return out;
}

TagVector propagate(const SourceCorpus& corpus, std::span<const double> query,
                    const PropagationConfig& config) {
  check_refined(corpus, config);
  const std::size_t k = clamp_k(config.k, corpus.size(), "k");
  std::vector<double> sims(corpus.size());
  detail::similarity_row(corpus, query, sims);
  TagVector out(corpus.vocabulary().size());
  propagate_block(corpus, config, k, 1, sims, out);
  return out;
}

std::vector<TagBookEntry> propagate_batch(const SourceCorpus& corpus,
                                          std::span<const Query> queries,
                                          const PropagationConfig& config, unsigned threads) {
  if (queries.empty())
    return {};
  check_refined(corpus, config);
  for (const auto& [id, feature] : queries)
    if (feature.size() != corpus.dim())
      throw DimensionMismatch("query '" + id + "' has dimension " +
                              std::to_string(feature.size()) + ", corpus has " +
                              std::to_string(corpus.dim()));
  const std::size_t k = clamp_k(config.k, corpus.size(), "k");
  const std::size_t n = corpus.size();
  const std::size_t m = corpus.vocabulary().size();

  std::vector<TagBookEntry> out(queries.size());
  const std::size_t blocks = (queries.size() + kQueryBlock - 1) / kQueryBlock;
  parallel_chunks(blocks, threads, [&](std::size_t first_block, std::size_t last_block) {
    std::vector<double> sims(kQueryBlock * n);
    std::vector<double> values(kQueryBlock * m);
    for (std::size_t b = first_block; b < last_block; ++b) {
      const std::size_t begin = b * kQueryBlock;
      const std::size_t count = std::min(kQueryBlock, queries.size() - begin);
      for (std::size_t q = 0; q < count; ++q)
        detail::similarity_row(corpus, queries[begin + q].second,
                               std::span(sims).subspan(q * n, n));
      propagate_block(corpus, config, k, count, std::span(sims).first(count * n),
                      std::span(values).first(count * m));
      for (std::size_t q = 0; q < count; ++q) {
        auto& entry = out[begin + q];
        entry.first = queries[begin + q].first;
        entry.second.assign(values.begin() + static_cast<std::ptrdiff_t>(q * m),
                            values.begin() + static_cast<std::ptrdiff_t>((q + 1) * m));
      }
    }
  });
  return out;
}

} // namespace tagbook
