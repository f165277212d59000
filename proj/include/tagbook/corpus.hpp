#pragma once

#include "tagbook/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tagbook {

using VideoId = std::string;
using FeatureVector = std::vector<double>;
using TagVector = std::vector<double>;
using Stoplist = std::unordered_set<std::string>;

/// Ordered set of distinct tags; position i is axis i of the tag space.
class TagVocabulary {
public:
  TagVocabulary() = default;
  /// Throws InvalidArgument on duplicates or tags that are empty, upper-case
  /// or contain whitespace.
  explicit TagVocabulary(std::vector<std::string> tags);

  std::size_t size() const { return tags_.size(); }
  bool empty() const { return tags_.empty(); }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::string& operator[](std::size_t i) const { return tags_[i]; }

  std::optional<std::size_t> find(std::string_view tag) const;
  /// Like find() but throws UnknownTag.
  std::size_t index_of(std::string_view tag) const;

  /// FNV-1a 64 over the newline-joined tag list, as 16 hex digits. Used to
  /// tie persisted artifacts to the vocabulary they were built against.
  std::string hash() const;

  friend bool operator==(const TagVocabulary& a, const TagVocabulary& b) {
    return a.tags_ == b.tags_;
  }

private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Annotation {
  VideoId video;
  std::vector<std::string> tags;
};

/// Refined tag relevance r(v_s, t) for every source video and tag, stored
/// video-major.
class RelevanceMatrix {
public:
  RelevanceMatrix() = default;
  RelevanceMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  RelevanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  const std::vector<double>& values() const { return values_; }

  /// Copy with every entry rounded through float, i.e. what survives the
  /// on-disk f32 layout.
  RelevanceMatrix quantized() const;

  friend bool operator==(const RelevanceMatrix&, const RelevanceMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// One source video as handed to SourceCorpus::create.
struct VideoRecord {
  VideoId id;
  FeatureVector feature;
  std::vector<std::string> tags;
};

/// The socially tagged source set. Immutable once built; safe to share
/// across threads for reading.
class SourceCorpus {
public:
  SourceCorpus() = default;

  /// Validates ids, dimensions and finiteness. Tags not in the vocabulary
  /// are dropped; videos left without tags are kept.
  static SourceCorpus create(std::vector<VideoRecord> videos, TagVocabulary vocabulary);

  /// Returns a copy carrying the refined relevance matrix. Throws
  /// DimensionMismatch if its shape is not N x m.
  SourceCorpus with_refined(RelevanceMatrix refined) const&;
  SourceCorpus with_refined(RelevanceMatrix refined) &&;

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const TagVocabulary& vocabulary() const { return vocabulary_; }

  const std::vector<VideoId>& ids() const { return ids_; }
  const VideoId& id(std::size_t i) const { return ids_[i]; }
  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  std::span<const double> feature(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  double feature_norm(std::size_t i) const { return norms_[i]; }
  /// Position of id(i) in ascending lexicographic order of all ids.
  std::uint32_t id_rank(std::size_t i) const { return id_rank_[i]; }

  /// Ascending vocabulary indices of the tags on video i.
  std::span<const std::uint32_t> tag_indices(std::size_t i) const { return tags_[i]; }
  /// Number of videos carrying each tag.
  const std::vector<std::size_t>& document_frequency() const { return df_; }

  const std::optional<RelevanceMatrix>& refined() const { return refined_; }

  /// Annotation of video i spelled out as tag strings (vocabulary order).
  Annotation annotation(std::size_t i) const;

  friend bool operator==(const SourceCorpus&, const SourceCorpus&);

private:
  std::size_t dim_ = 0;
  std::vector<VideoId> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::uint32_t> id_rank_;
  std::vector<double> features_;
  std::vector<double> norms_;
  std::vector<std::vector<std::uint32_t>> tags_;
  std::vector<std::size_t> df_;
  TagVocabulary vocabulary_;
  std::optional<RelevanceMatrix> refined_;
};

/// Lowercase ASCII alphanumeric runs (non-ASCII bytes count as word
/// characters), deduplicated in first-occurrence order, with stoplist
/// members and tokens shorter than two code points removed.
std::vector<std::string> tokenize_caption(std::string_view text, const Stoplist& stoplist);

/// Tags with document frequency >= min_df, ordered by frequency descending
/// then lexicographically. Throws EmptyVocabulary.
TagVocabulary build_vocabulary(std::span<const Annotation> annotations, std::size_t min_df);

/// 1 iff `tag` is on `video`. Throws UnknownVideo / UnknownTag.
int binary_label(const SourceCorpus& corpus, std::string_view video, std::string_view tag);

Stoplist load_stoplist(const std::filesystem::path& path);

/// Reads the JSON Lines feature and annotation files and assembles a frozen
/// corpus. Frame-level rows are average pooled.
SourceCorpus load_corpus(const std::filesystem::path& feature_file,
                         const std::filesystem::path& annotation_file,
                         const std::optional<std::filesystem::path>& stoplist_file,
                         std::size_t min_df = 1);

/// Lower-level pieces of load_corpus, reused by the tools.
struct FeatureRow {
  VideoId id;
  FeatureVector feature;
};
std::vector<FeatureRow> read_feature_file(const std::filesystem::path& path);
std::vector<Annotation> read_annotation_file(const std::filesystem::path& path,
                                             const Stoplist& stoplist);

} // namespace tagbook
