#pragma once

#include "tagbook/corpus.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tagbook {

/// Recommended Frequent-tags sizes: few-example and one-example detection.
inline constexpr std::size_t kRecommendedFewExampleSize = 2000;
inline constexpr std::size_t kRecommendedOneExampleSize = 2500;

/// Subset of a parent vocabulary, kept in parent order.
struct ReducedVocabulary {
  std::vector<std::size_t> selected;
  std::size_t parent_size = 0;
  std::string parent_hash;

  std::size_t size() const { return selected.size(); }
  friend bool operator==(const ReducedVocabulary&, const ReducedVocabulary&) = default;
};

/// The `target` most frequent source tags (ties lexicographic), returned in
/// parent vocabulary order. Throws SizeTooLarge when target > m.
ReducedVocabulary select_frequent(const SourceCorpus& corpus, std::size_t target);

/// Tag strings of a reduced vocabulary.
TagVocabulary reduced_tags(const TagVocabulary& parent, const ReducedVocabulary& reduced);

TagVector project_vocabulary(std::span<const double> vector, const ReducedVocabulary& reduced);

struct PcaModel {
  std::vector<double> mean;        // length m
  std::vector<double> components;  // target x m, row-major, rows orthonormal
  std::vector<double> explained_variance;

  std::size_t input_dim() const { return mean.size(); }
  std::size_t output_dim() const { return explained_variance.size(); }
  std::span<const double> component(std::size_t i) const {
    return {components.data() + i * input_dim(), input_dim()};
  }
  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

/// Principal axes of the sample covariance (divisor count - 1). Each axis is
/// signed so its largest-magnitude entry is positive.
PcaModel pca_fit(std::span<const TagVector> vectors, std::size_t target);

/// components * (vector - mean)
TagVector pca_project(std::span<const double> vector, const PcaModel& model);

/// mean + components^T * coords
TagVector pca_reconstruct(std::span<const double> coords, const PcaModel& model);

} // namespace tagbook
