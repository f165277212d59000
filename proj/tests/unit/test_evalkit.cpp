#include <doctest.h>

#include "oracles.hpp"

#include "tagbook/evalkit.hpp"
#include "tagbook/events.hpp"
#include "tagbook/tagprop.hpp"

#include <algorithm>
#include <random>

using namespace tagbook;

namespace {

RankedList ranked(std::initializer_list<const char*> ids) {
  RankedList r;
  double s = 1.0;
  for (const char* id : ids)
    r.entries.push_back({id, s -= 0.01});
  return r;
}

} // namespace

TEST_CASE("average_precision") {
  CHECK(average_precision(ranked({"p1", "p2", "n"}), {"e", {"p1", "p2"}, {}}) == 1.0);
  CHECK(average_precision(ranked({"n", "p"}), {"e", {"p"}, {}}) == 0.5);
  CHECK(average_precision(ranked({"n1", "p1", "n2", "p2"}), {"e", {"p1", "p2"}, {}}) ==
        doctest::Approx((0.5 + 0.5) / 2));
  CHECK_THROWS_AS(average_precision(ranked({"a"}), {"e", {}, {}}), NoPositives);
  // a positive that never appears contributes nothing
  CHECK(average_precision(ranked({"p1", "n"}), {"e", {"p1", "p2"}, {}}) == 0.5);
}

TEST_CASE("unjudged videos") {
  const GroundTruth truth{"e", {"p"}, {"p", "n"}};
  const auto list = ranked({"u", "p", "n"});
  CHECK(average_precision(list, truth, UnjudgedPolicy::negative) == 0.5);
  CHECK(average_precision(list, truth, UnjudgedPolicy::skip) == 1.0);
}

TEST_CASE("AP matches the precision-recall oracle and ignores the tail") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<bool> rel(n);
    for (std::size_t i = 0; i < n; ++i)
      rel[i] = rng() % 3 == 0;
    rel[rng() % n] = true;
    RankedList list;
    GroundTruth truth{"e", {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = oracle::name("v", i);
      list.entries.push_back({id, 0.0});
      if (rel[i])
        truth.positives.insert(id);
    }
    const double ap = average_precision(list, truth);
    CHECK(ap == doctest::Approx(oracle::average_precision(rel, truth.positives.size())).epsilon(1e-12));
    const auto last = n - 1 - static_cast<std::size_t>(std::find(rel.rbegin(), rel.rend(), true) - rel.rbegin());
    std::shuffle(list.entries.begin() + static_cast<std::ptrdiff_t>(last) + 1, list.entries.end(), rng);
    CHECK(average_precision(list, truth) == ap);
  }
}

TEST_CASE("mean_average_precision") {
  CHECK(mean_average_precision(std::vector<double>{0.5}) == 0.5);
  CHECK(mean_average_precision(std::vector<double>{1.0, 0.0}) == 0.5);
  CHECK_THROWS_AS(mean_average_precision(std::vector<double>{}), EmptyInput);
}

TEST_CASE("describe_video") {
  const TagVocabulary vocab({"cat", "dog", "park", "show"});
  CHECK(describe_video(TagVector{0.1, 0.9, 0.2, 0.0}, vocab, 1).tags == std::vector<std::string>{"dog"});
  CHECK(describe_video(TagVector{0.1, 0.9, 0.2, 0.0}, vocab, 10).tags ==
        std::vector<std::string>{"dog", "park", "cat", "show"});
  CHECK(describe_video(TagVector{0.5, 0.1, 0.5, 0.0}, vocab, 1).tags == std::vector<std::string>{"cat"});
  CHECK_THROWS_AS(describe_video(TagVector{1}, vocab, 1), DimensionMismatch);

  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> level(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    TagVector v(vocab.size());
    for (double& x : v)
      x = level(rng);
    for (std::size_t k = 1; k < 5; ++k) {
      const auto a = describe_video(v, vocab, k).tags;
      const auto b = describe_video(v, vocab, k + 1).tags;
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
  }
}

TEST_CASE("rouge1_recall") {
  const Description both{"v", {"dog", "show"}};
  CHECK(rouge1_recall(both, "dog, park and leash", {"and"}) == doctest::Approx(1.0 / 3));
  CHECK(rouge1_recall(both, "Dog show dog", {}) == 1.0);
  CHECK(rouge1_recall(both, "cat", {}) == 0.0);
  CHECK_THROWS_AS(rouge1_recall(both, "a !", {}), EmptyReference);
}

TEST_CASE("rouge is non-decreasing in kappa") {
  std::mt19937_64 rng(5);
  const TagVocabulary vocab({"aa", "bb", "cc", "dd", "ee", "ff"});
  std::vector<std::pair<TagVector, std::string>> videos;
  for (int i = 0; i < 20; ++i)
    videos.emplace_back(oracle::random_vector(rng, vocab.size()), i % 2 ? "aa cc ff" : "bb dd");
  const auto curve = rouge_curve(videos, vocab, 8, {});
  REQUIRE(curve.size() == 8);
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i] >= curve[i - 1]);
  CHECK(curve.back() == 1.0);
}

TEST_CASE("synth_corpus is deterministic") {
  SynthSpec spec;
  spec.n_events = 3;
  spec.n_background = 60;
  spec.test_background = 20;
  spec.train_background = 10;
  spec.distractors = 5;
  spec.m = 80;
  spec.seed = 4;
  const auto a = synth_corpus(spec);
  const auto b = synth_corpus(spec);
  CHECK(a.corpus == b.corpus);
  CHECK(a.test == b.test);
  CHECK(a.corpus.size() == 3 * spec.videos_per_event + 60);
  CHECK(a.test.size() == 3 * spec.test_per_event + 20);
  CHECK(a.events.size() == 3);
  for (const auto& t : a.truths)
    CHECK(t.positives.size() == spec.test_per_event);
  spec.seed = 5;
  CHECK_FALSE(synth_corpus(spec).corpus == a.corpus);
  spec.m = 5;
  CHECK_THROWS_AS(synth_corpus(spec), InvalidArgument);
}

namespace {

double zero_example_map(const SynthDataset& data, Variant variant) {
  PropagationConfig cfg;
  cfg.k = 30; // videos per planted event
  cfg.k_r = 25;
  cfg.variant = variant;
  const auto corpus = data.corpus.with_refined(refine_source(data.corpus, cfg));
  const auto books = propagate_batch(corpus, data.test, cfg);
  std::vector<double> aps;
  for (std::size_t e = 0; e < data.events.size(); ++e) {
    const auto model = zero_example_model(data.events[e].event_id, data.events[e].description,
                                          corpus.vocabulary(), {});
    aps.push_back(average_precision(rank_videos(books, model), data.truths[e]));
  }
  return mean_average_precision(aps);
}

} // namespace

TEST_CASE("synthetic pipeline beats random ranking and is perfect without noise") {
  SynthSpec spec;
  spec.n_events = 4;
  spec.n_background = 300;
  spec.test_background = 60;
  const auto noisy = synth_corpus(spec);
  // expected AP of a random ranking is about R/n
  const double random_ap = static_cast<double>(spec.test_per_event) / noisy.test.size();
  CHECK(zero_example_map(noisy, Variant::refine) > random_ap);

  spec.tag_noise = 0;
  spec.feature_noise = 0;
  const auto clean = synth_corpus(spec);
  for (auto v : {Variant::hard, Variant::soft, Variant::refine})
    CHECK(zero_example_map(clean, v) == 1.0);
}
