#pragma once

#include "tagbook/corpus.hpp"
#include "tagbook/events.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tagbook {

struct GroundTruth {
  std::string event_id;
  std::set<VideoId> positives;
  /// Empty means every ranked video counts as judged.
  std::set<VideoId> judged;
};

enum class UnjudgedPolicy {
  negative, // unjudged videos stay in the ranking as non-relevant
  skip,     // unjudged videos are removed before scoring
};

/// Non-interpolated AP: mean over positives of precision at the rank where
/// each is found; positives never retrieved contribute 0. Throws NoPositives.
double average_precision(const RankedList& ranked, const GroundTruth& truth,
                         UnjudgedPolicy policy = UnjudgedPolicy::negative);

/// Throws EmptyInput.
double mean_average_precision(std::span<const double> per_event);

struct Description {
  VideoId video;
  std::vector<std::string> tags;
};

/// Top-kappa tags by descending relevance, ties by ascending tag.
Description describe_video(std::span<const double> vector, const TagVocabulary& vocabulary,
                           std::size_t kappa, VideoId video = {});

/// Fraction of unique reference tokens found among the generated tags.
/// Throws EmptyReference when the reference has no tokens.
double rouge1_recall(const Description& generated, std::string_view reference_text,
                     const Stoplist& stoplist);

/// Mean ROUGE-1 recall for kappa = 1..max_kappa over a set of videos, each
/// paired with its reference text.
std::vector<double> rouge_curve(std::span<const std::pair<TagVector, std::string>> videos,
                                const TagVocabulary& vocabulary, std::size_t max_kappa,
                                const Stoplist& stoplist);

// ---------------------------------------------------------------------------
// Synthetic planted-event benchmark

struct SynthSpec {
  std::size_t n_events = 10;
  std::size_t videos_per_event = 30;   // source videos per event
  std::size_t n_background = 2000;     // source background videos
  std::size_t d = 32;                  // feature dimension
  std::size_t m = 400;                 // tag pool size
  double tag_noise = 0.3;
  double feature_noise = 0.5;
  std::uint64_t seed = 0;

  double center_norm = 1.0 / 3.0;      // cluster centers lie on this sphere
  std::size_t signature_size = 4;      // tags per event signature
  std::size_t distractors = 80;        // random tags added per source video
  std::size_t test_per_event = 10;
  std::size_t test_background = 300;
  std::size_t train_per_event = 10;    // positives per event for 10Ex
  std::size_t train_background = 100; // shared negatives for few-example

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

struct SynthEvent {
  std::string event_id;
  std::string name;
  std::string description;
};

struct SynthLabel {
  std::string event_id;
  VideoId video;
  int label = 0;
};

struct SynthDataset {
  std::vector<VideoRecord> source;           // raw source videos and tags
  SourceCorpus corpus;                       // built with min_df = 1
  std::vector<std::pair<VideoId, FeatureVector>> test;
  std::vector<std::pair<VideoId, FeatureVector>> train;
  std::vector<GroundTruth> truths;           // one per event, over `test`
  std::vector<SynthLabel> train_labels;      // +1 / -1 per event over `train`
  std::vector<SynthEvent> events;
};

/// Planted clusters: each event has a feature-space center and a signature
/// tag set; background videos come from their own topic clusters. Source
/// tags are the signature with each tag dropped (and replaced by a random
/// tag) with probability tag_noise, plus random distractors. Deterministic
/// in spec.seed.
SynthDataset synth_corpus(const SynthSpec& spec);

/// Training set of one event from a dataset's labels and the TagBooks of
/// its training videos (looked up by id).
LabeledSet labeled_set_for(std::string_view event_id, std::span<const SynthLabel> labels,
                           std::span<const std::pair<VideoId, TagVector>> tagbooks);

} // namespace tagbook
