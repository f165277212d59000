#include "tagbook/events.hpp"

#include "tagbook/simsearch.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace tagbook {

std::string_view to_string(EventMode mode) { return mode == EventMode::zero ? "zero" : "few"; }

EventMode parse_event_mode(std::string_view name) {
  if (name == "zero")
    return EventMode::zero;
  if (name == "few")
    return EventMode::few;
  throw InvalidArgument("unknown event mode '" + std::string(name) + "' (zero|few)");
}

EventModel zero_example_model(std::string event_id, std::string_view description,
                              const TagVocabulary& vocabulary, const Stoplist& stoplist) {
  EventModel model;
  model.event_id = std::move(event_id);
  model.mode = EventMode::zero;
  model.vocab_hash = vocabulary.hash();
  model.vector.assign(vocabulary.size(), 0.0);
  bool any = false;
  for (const auto& token : tokenize_caption(description, stoplist)) {
    if (auto i = vocabulary.find(token)) {
      model.vector[*i] = 1.0;
      any = true;
    }
  }
  if (!any)
    throw EmptyModel("event '" + model.event_id + "': no description word is in the vocabulary");
  return model;
}

namespace {

std::size_t validate(std::span<const LabeledSample> data) {
  if (data.empty())
    throw DegenerateData("training set is empty");
  const std::size_t m = data.front().vector.size();
  bool pos = false, neg = false;
  for (const auto& s : data) {
    if (s.vector.size() != m)
      throw DimensionMismatch("sample '" + s.video + "' has length " +
                              std::to_string(s.vector.size()) + ", expected " +
                              std::to_string(m));
    if (s.label == 1)
      pos = true;
    else if (s.label == -1)
      neg = true;
    else
      throw InvalidArgument("sample '" + s.video + "' has label " + std::to_string(s.label) +
                            "; labels must be +1 or -1");
  }
  if (!pos || !neg)
    throw DegenerateData("training set needs both positive and negative samples");
  return m;
}

std::vector<std::vector<double>> training_inputs(std::span<const LabeledSample> data,
                                                 bool normalize) {
  std::vector<std::vector<double>> xs;
  xs.reserve(data.size());
  for (const auto& s : data) {
    xs.push_back(s.vector);
    if (normalize) {
      const double n = l2_norm(xs.back());
      if (n > 0.0)
        for (double& x : xs.back())
          x /= n;
    }
  }
  return xs;
}

double objective(const std::vector<std::vector<double>>& xs, std::span<const LabeledSample> data,
                 std::span<const double> w, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    hinge += std::max(0.0, 1.0 - data[i].label * dot(w, xs[i]));
  const double norm = l2_norm(w);
  return 0.5 * lambda * norm * norm + hinge / static_cast<double>(xs.size());
}

SvmFit pegasos(std::span<const LabeledSample> data, const SvmHyper& hyper, bool trace) {
  const std::size_t m = validate(data);
  if (!(hyper.lambda > 0.0))
    throw InvalidArgument("SVM regularization must be positive");
  if (hyper.epochs == 0)
    throw InvalidArgument("SVM epochs must be positive");
  const auto xs = training_inputs(data, hyper.normalize_inputs);
  const std::size_t p = xs.size();
  const double radius = 1.0 / std::sqrt(hyper.lambda);

  SvmFit fit;
  fit.weights.assign(m, 0.0);
  auto& w = fit.weights;
  std::mt19937_64 rng(hyper.seed);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    double objective_sum = 0.0;
    for (std::size_t step = 0; step < p; ++step) {
      ++t;
      const std::size_t i = static_cast<std::size_t>(rng() % p);
      const double eta = 1.0 / (hyper.lambda * static_cast<double>(t));
      const double y = data[i].label;
      const bool violated = y * dot(w, xs[i]) < 1.0;
      const double shrink = 1.0 - eta * hyper.lambda;
      for (double& x : w)
        x *= shrink;
      if (violated)
        for (std::size_t c = 0; c < m; ++c)
          w[c] += eta * y * xs[i][c];
      const double norm = l2_norm(w);
      if (norm > radius)
        for (double& x : w)
          x *= radius / norm;
      if (trace)
        objective_sum += objective(xs, data, w, hyper.lambda);
    }
    if (trace)
      fit.epoch_mean_objective.push_back(objective_sum / static_cast<double>(p));
  }
  return fit;
}

} // namespace

SvmFit fit_linear_svm(std::span<const LabeledSample> data, const SvmHyper& hyper) {
  return pegasos(data, hyper, true);
}

double svm_objective(std::span<const LabeledSample> data, std::span<const double> weights,
                     double lambda, bool normalize_inputs) {
  const auto xs = training_inputs(data, normalize_inputs);
  return objective(xs, data, weights, lambda);
}

EventModel train_few_example(std::string event_id, std::span<const LabeledSample> data,
                             const SvmHyper& hyper) {
  EventModel model;
  model.event_id = std::move(event_id);
  model.mode = EventMode::few;
  model.vector = pegasos(data, hyper, false).weights;
  model.training_meta = hyper;
  return model;
}

double score(std::span<const double> video_vector, const EventModel& model) {
  if (video_vector.size() != model.vector.size())
    throw DimensionMismatch("tag vector has length " + std::to_string(video_vector.size()) +
                            ", event '" + model.event_id + "' has " +
                            std::to_string(model.vector.size()));
  return cosine_similarity(video_vector, model.vector);
}

RankedList rank_videos(std::span<const std::pair<VideoId, TagVector>> test,
                       const EventModel& model) {
  RankedList out;
  out.entries.reserve(test.size());
  std::unordered_set<std::string_view> seen;
  for (const auto& [id, vector] : test) {
    if (!seen.insert(id).second)
      throw DuplicateId("video '" + id + "' appears twice in the test set");
    out.entries.push_back({id, score(vector, model)});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score)
      return a.score > b.score;
    return a.video < b.video;
  });
  return out;
}

} // namespace tagbook
