#include "tagbook/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace tagbook {

double average_precision(const RankedList& ranked, const GroundTruth& truth,
                         UnjudgedPolicy policy) {
  if (truth.positives.empty())
    throw NoPositives("event '" + truth.event_id + "' has no positive videos");
  const bool filter = policy == UnjudgedPolicy::skip && !truth.judged.empty();
  std::size_t rank = 0;
  std::size_t hits = 0;
  double sum = 0.0;
  for (const auto& e : ranked.entries) {
    if (filter && !truth.judged.contains(e.video))
      continue;
    ++rank;
    if (truth.positives.contains(e.video)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(truth.positives.size());
}

double mean_average_precision(std::span<const double> per_event) {
  if (per_event.empty())
    throw EmptyInput("mean_average_precision needs at least one AP value");
  return std::accumulate(per_event.begin(), per_event.end(), 0.0) /
         static_cast<double>(per_event.size());
}

Description describe_video(std::span<const double> vector, const TagVocabulary& vocabulary,
                           std::size_t kappa, VideoId video) {
  if (vector.size() != vocabulary.size())
    throw DimensionMismatch("tag vector has length " + std::to_string(vector.size()) +
                            ", vocabulary has " + std::to_string(vocabulary.size()));
  if (kappa == 0)
    throw InvalidArgument("kappa must be positive");
  std::vector<std::size_t> order(vector.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t keep = std::min(kappa, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (vector[a] != vector[b])
                        return vector[a] > vector[b];
                      return vocabulary[a] < vocabulary[b];
                    });
  Description d{std::move(video), {}};
  d.tags.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i)
    d.tags.push_back(vocabulary[order[i]]);
  return d;
}

double rouge1_recall(const Description& generated, std::string_view reference_text,
                     const Stoplist& stoplist) {
  const auto reference = tokenize_caption(reference_text, stoplist);
  if (reference.empty())
    throw EmptyReference("reference description has no tokens");
  const std::unordered_set<std::string_view> produced(generated.tags.begin(),
                                                      generated.tags.end());
  const auto found = std::count_if(reference.begin(), reference.end(),
                                   [&](const std::string& t) { return produced.contains(t); });
  return static_cast<double>(found) / static_cast<double>(reference.size());
}

std::vector<double> rouge_curve(std::span<const std::pair<TagVector, std::string>> videos,
                                const TagVocabulary& vocabulary, std::size_t max_kappa,
                                const Stoplist& stoplist) {
  if (videos.empty())
    throw EmptyInput("rouge_curve needs at least one video");
  std::vector<double> curve(max_kappa, 0.0);
  for (const auto& [vector, reference] : videos) {
    const auto full = describe_video(vector, vocabulary, max_kappa);
    Description prefix;
    for (std::size_t kappa = 1; kappa <= max_kappa; ++kappa) {
      if (kappa <= full.tags.size())
        prefix.tags.push_back(full.tags[kappa - 1]);
      curve[kappa - 1] += rouge1_recall(prefix, reference, stoplist);
    }
  }
  for (double& v : curve)
    v /= static_cast<double>(videos.size());
  return curve;
}

// ---------------------------------------------------------------------------
// Synthetic benchmark

namespace {

std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

class Planter {
public:
  Planter(const SynthSpec& spec) : spec_(spec), rng_(spec.seed) {}

  FeatureVector center() {
    FeatureVector c(spec_.d);
    double norm = 0.0;
    do {
      for (double& x : c)
        x = normal_(rng_);
      norm = std::sqrt(std::inner_product(c.begin(), c.end(), c.begin(), 0.0));
    } while (norm == 0.0);
    for (double& x : c)
      x *= spec_.center_norm / norm;
    return c;
  }

  // Center plus isotropic Gaussian noise with expected squared norm feature_noise^2.
  FeatureVector sample_feature(const FeatureVector& center) {
    FeatureVector f = center;
    if (spec_.feature_noise > 0.0) {
      const double scale = spec_.feature_noise / std::sqrt(static_cast<double>(spec_.d));
      for (double& x : f)
        x += scale * normal_(rng_);
    }
    return f;
  }

  std::vector<std::string> sample_tags(const std::vector<std::size_t>& signature,
                                       const std::vector<std::string>& pool) {
    std::vector<std::string> tags;
    for (auto t : signature) {
      if (uniform_(rng_) < spec_.tag_noise)
        tags.push_back(pool[pick(pool.size())]);
      else
        tags.push_back(pool[t]);
    }
    for (std::size_t i = 0; i < spec_.distractors; ++i)
      tags.push_back(pool[pick(pool.size())]);
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    return tags;
  }

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[pick(i)]);
  }

private:
  const SynthSpec& spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct Cluster {
  FeatureVector center;
  std::vector<std::size_t> signature;
};

} // namespace

SynthDataset synth_corpus(const SynthSpec& spec) {
  if (spec.n_events == 0 || spec.videos_per_event == 0 || spec.d == 0 || spec.m == 0 ||
      spec.signature_size == 0 || spec.test_per_event == 0)
    throw InvalidArgument("synthetic dataset counts must be positive");
  if (spec.tag_noise < 0.0 || spec.tag_noise > 1.0 || spec.feature_noise < 0.0)
    throw InvalidArgument("tag_noise must lie in [0,1] and feature_noise be non-negative");
  if (!(spec.center_norm > 0.0))
    throw InvalidArgument("center_norm must be positive");
  const std::size_t event_tags = spec.n_events * spec.signature_size;
  if (spec.m < event_tags + spec.signature_size)
    throw InvalidArgument("tag pool too small for the event signatures");

  Planter planter(spec);
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < spec.m; ++i)
    pool.push_back(numbered("tag", i, 4));

  // Events own disjoint signatures at the front of the pool; background
  // topics draw theirs from the rest.
  std::vector<Cluster> events(spec.n_events);
  for (std::size_t e = 0; e < spec.n_events; ++e) {
    events[e].center = planter.center();
    for (std::size_t s = 0; s < spec.signature_size; ++s)
      events[e].signature.push_back(e * spec.signature_size + s);
  }
  const std::size_t n_topics =
      std::max<std::size_t>(1, (spec.n_background + spec.videos_per_event - 1) /
                                   spec.videos_per_event);
  std::vector<Cluster> topics(n_topics);
  for (auto& topic : topics) {
    topic.center = planter.center();
    for (std::size_t s = 0; s < spec.signature_size; ++s)
      topic.signature.push_back(event_tags + planter.pick(spec.m - event_tags));
  }

  SynthDataset out;
  struct Pending {
    FeatureVector feature;
    std::vector<std::string> tags;
    int event = -1; // -1 for background
  };

  std::vector<Pending> source;
  for (std::size_t e = 0; e < spec.n_events; ++e)
    for (std::size_t i = 0; i < spec.videos_per_event; ++i)
      source.push_back({planter.sample_feature(events[e].center),
                        planter.sample_tags(events[e].signature, pool), static_cast<int>(e)});
  for (std::size_t i = 0; i < spec.n_background; ++i) {
    const auto& topic = topics[i % n_topics];
    source.push_back({planter.sample_feature(topic.center),
                      planter.sample_tags(topic.signature, pool), -1});
  }
  planter.shuffle(source);
  for (std::size_t i = 0; i < source.size(); ++i)
    out.source.push_back({numbered("src", i, 6), source[i].feature, source[i].tags});

  auto sample_videos = [&](std::size_t per_event, std::size_t background) {
    std::vector<Pending> videos;
    for (std::size_t e = 0; e < spec.n_events; ++e)
      for (std::size_t i = 0; i < per_event; ++i)
        videos.push_back({planter.sample_feature(events[e].center), {}, static_cast<int>(e)});
    for (std::size_t i = 0; i < background; ++i)
      videos.push_back({planter.sample_feature(topics[planter.pick(n_topics)].center), {}, -1});
    planter.shuffle(videos);
    return videos;
  };

  for (std::size_t e = 0; e < spec.n_events; ++e) {
    SynthEvent ev;
    ev.event_id = numbered("E", e + 1, 3);
    ev.name = "synthetic event " + std::to_string(e + 1);
    for (auto t : events[e].signature)
      ev.description += (ev.description.empty() ? "" : " ") + pool[t];
    out.events.push_back(std::move(ev));
    out.truths.push_back({out.events.back().event_id, {}, {}});
  }

  const auto test = sample_videos(spec.test_per_event, spec.test_background);
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto id = numbered("test", i, 5);
    if (test[i].event >= 0)
      out.truths[static_cast<std::size_t>(test[i].event)].positives.insert(id);
    out.test.emplace_back(std::move(id), test[i].feature);
  }

  const auto train = sample_videos(spec.train_per_event, spec.train_background);
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto id = numbered("train", i, 5);
    if (train[i].event >= 0) {
      out.train_labels.push_back({out.events[static_cast<std::size_t>(train[i].event)].event_id,
                                  id, 1});
    } else {
      for (const auto& ev : out.events)
        out.train_labels.push_back({ev.event_id, id, -1});
    }
    out.train.emplace_back(std::move(id), train[i].feature);
  }
  std::stable_sort(out.train_labels.begin(), out.train_labels.end(),
                   [](const SynthLabel& a, const SynthLabel& b) { return a.event_id < b.event_id; });

  std::vector<Annotation> annotations;
  for (const auto& v : out.source)
    annotations.push_back({v.id, v.tags});
  out.corpus = SourceCorpus::create(out.source, build_vocabulary(annotations, 1));
  return out;
}

LabeledSet labeled_set_for(std::string_view event_id, std::span<const SynthLabel> labels,
                           std::span<const std::pair<VideoId, TagVector>> tagbooks) {
  std::unordered_map<std::string_view, const TagVector*> by_id;
  for (const auto& [id, vector] : tagbooks)
    by_id.emplace(id, &vector);
  LabeledSet out;
  for (const auto& l : labels) {
    if (l.event_id != event_id || l.label == 0)
      continue;
    auto it = by_id.find(l.video);
    if (it == by_id.end())
      throw UnknownVideo("no tag vector for labeled video '" + l.video + "'");
    out.push_back({l.video, *it->second, l.label});
  }
  return out;
}

} // namespace tagbook
