#pragma once

#include "tagbook/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tagbook {

enum class EventMode { zero, few };

std::string_view to_string(EventMode mode);
EventMode parse_event_mode(std::string_view name);

struct SvmHyper {
  double lambda = 1e-4;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  /// Scale every training vector to unit length before training.
  bool normalize_inputs = false;

  friend bool operator==(const SvmHyper&, const SvmHyper&) = default;
};

struct EventModel {
  std::string event_id;
  TagVector vector;
  EventMode mode = EventMode::zero;
  std::optional<SvmHyper> training_meta;
  /// Hash of the vocabulary the vector is laid out against; may be empty.
  std::string vocab_hash;

  friend bool operator==(const EventModel&, const EventModel&) = default;
};

struct LabeledSample {
  VideoId video;
  TagVector vector;
  int label = 0; // +1 or -1
};

using LabeledSet = std::vector<LabeledSample>;

struct RankedEntry {
  VideoId video;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Descending by score, ties by ascending video id.
struct RankedList {
  std::vector<RankedEntry> entries;
};

/// Binary bag-of-words vector of the event description over the vocabulary.
/// Throws EmptyModel when no description word is in the vocabulary.
EventModel zero_example_model(std::string event_id, std::string_view description,
                              const TagVocabulary& vocabulary, const Stoplist& stoplist);

/// Output of the primal solver together with its convergence trace.
struct SvmFit {
  TagVector weights;
  /// Mean over the steps of epoch e of the full regularized hinge objective
  /// evaluated after each step.
  std::vector<double> epoch_mean_objective;
};

/// Pegasos: hinge loss, L2 regularization, no bias, step 1/(lambda t), one
/// uniformly drawn sample per step, `epochs` x p steps.
SvmFit fit_linear_svm(std::span<const LabeledSample> data, const SvmHyper& hyper);

/// lambda/2 |w|^2 + mean hinge loss.
double svm_objective(std::span<const LabeledSample> data, std::span<const double> weights,
                     double lambda, bool normalize_inputs = false);

/// Few-example event vector: the learned primal weights. Throws
/// DegenerateData without both labels, DimensionMismatch on ragged input.
EventModel train_few_example(std::string event_id, std::span<const LabeledSample> data,
                             const SvmHyper& hyper = {});

/// Cosine between the video's and the event's tag vectors.
double score(std::span<const double> video_vector, const EventModel& model);

RankedList rank_videos(std::span<const std::pair<VideoId, TagVector>> test,
                       const EventModel& model);

} // namespace tagbook
