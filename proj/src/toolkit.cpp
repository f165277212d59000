#include "tagbook/toolkit.hpp"

#include "tagbook/log.hpp"
#include "tagbook/persist.hpp"
#include "tagbook/reduce.hpp"

#include <json.hpp>

#include <charconv>
#include <map>
#include <unordered_map>

namespace tagbook::toolkit {

using json = nlohmann::json;

namespace {

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string safe_filename(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

json parse_line(const fs::path& path, std::size_t line, const std::string& text) {
  try {
    json j = json::parse(text);
    if (!j.is_object())
      throw FormatError(path.string() + ":" + std::to_string(line) + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ":" + std::to_string(line) + ": malformed JSON (" +
                      e.what() + ")");
  }
}

template <typename T>
T field(const json& j, const char* name, const fs::path& path, std::size_t line) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw FormatError(path.string() + ":" + std::to_string(line) + ": missing or invalid field '" +
                      name + "'");
  }
}

std::string jsonl(const std::vector<json>& lines) {
  std::string out;
  for (const auto& j : lines)
    out += j.dump() + "\n";
  return out;
}

std::vector<std::pair<VideoId, TagVector>>
as_pairs(std::vector<TagBookEntry> entries) {
  return {std::make_move_iterator(entries.begin()), std::make_move_iterator(entries.end())};
}

void write_features(const fs::path& path, std::size_t dim,
                    const std::vector<std::pair<VideoId, FeatureVector>>& videos) {
  std::vector<json> lines{json{{"dim", dim}}};
  for (const auto& [id, f] : videos)
    lines.push_back({{"id", id}, {"feature", f}});
  write_file_atomic(path, jsonl(lines));
}

} // namespace

ReductionMethod parse_reduction(std::string_view name) {
  if (name == "none")
    return ReductionMethod::none;
  if (name == "frequent")
    return ReductionMethod::frequent;
  if (name == "pca")
    return ReductionMethod::pca;
  throw InvalidArgument("unknown reduction '" + std::string(name) + "' (none|frequent|pca)");
}

std::string_view to_string(ReductionMethod method) {
  switch (method) {
  case ReductionMethod::none:
    return "none";
  case ReductionMethod::frequent:
    return "frequent";
  case ReductionMethod::pca:
    return "pca";
  }
  return "?";
}

std::vector<EventDefinition> read_events(const fs::path& path) {
  std::vector<EventDefinition> out;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    const json j = parse_line(path, line, text);
    EventDefinition e;
    e.event_id = field<std::string>(j, "event_id", path, line);
    e.name = j.value("name", std::string{});
    e.description = field<std::string>(j, "description", path, line);
    out.push_back(std::move(e));
  });
  return out;
}

std::vector<Judgment> read_judgments(const fs::path& path) {
  std::vector<Judgment> out;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    const json j = parse_line(path, line, text);
    Judgment g{field<std::string>(j, "event_id", path, line),
               field<std::string>(j, "video_id", path, line), field<int>(j, "label", path, line)};
    if (g.label != 1 && g.label != -1 && g.label != 0)
      throw FormatError(path.string() + ":" + std::to_string(line) +
                        ": label must be 1, -1 or 0");
    out.push_back(std::move(g));
  });
  return out;
}

std::vector<RankingLine> read_rankings(const fs::path& path) {
  std::vector<RankingLine> out;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    const json j = parse_line(path, line, text);
    out.push_back({field<std::string>(j, "event_id", path, line),
                   field<std::string>(j, "video_id", path, line),
                   field<double>(j, "score", path, line)});
  });
  return out;
}

// ---------------------------------------------------------------------------

void cmd_build(const BuildOptions& options) {
  const SourceCorpus corpus =
      load_corpus(options.features, options.annotations, options.stoplist, options.min_df);
  save_corpus(corpus, options.out_dir);
}

void cmd_refine(const RefineOptions& options) {
  const SourceCorpus corpus = load_corpus_dir(options.corpus_dir);
  PropagationConfig config;
  config.k_r = options.k_r;
  const RelevanceMatrix refined = refine_source(corpus, config, options.threads);
  save_relevance(refined, corpus, options.corpus_dir);
}

void cmd_tagbook(const TagBookOptions& options) {
  const SourceCorpus corpus = load_corpus_dir(options.corpus_dir);
  auto rows = read_feature_file(options.features);
  std::vector<Query> queries;
  queries.reserve(rows.size());
  for (auto& r : rows)
    queries.emplace_back(std::move(r.id), std::move(r.feature));
  TagBookFile file;
  file.header = {corpus.vocabulary().hash(), corpus.vocabulary().size(),
                 std::string(to_string(options.propagation.variant)),
                 std::min(options.propagation.k, corpus.size())};
  file.entries = propagate_batch(corpus, queries, options.propagation, options.threads);
  write_file_atomic(options.out, encode_tagbooks(file));
}

void cmd_detect(const DetectOptions& options) {
  const SourceCorpus corpus = load_corpus_dir(options.corpus_dir);
  const TagVocabulary& vocabulary = corpus.vocabulary();
  const Stoplist stoplist = options.stoplist ? load_stoplist(*options.stoplist) : Stoplist{};

  auto load_books = [&](const fs::path& path) {
    TagBookFile file = read_tagbooks(path);
    if (file.header.vocab_hash != vocabulary.hash())
      throw FormatError(path.string() + ": TagBooks were built against a different vocabulary");
    return as_pairs(std::move(file.entries));
  };

  auto test = load_books(options.tagbooks);
  const auto events = read_events(options.events);

  std::vector<std::pair<VideoId, TagVector>> train;
  std::vector<Judgment> judgments;
  if (options.mode == EventMode::few) {
    if (!options.judgments)
      throw InvalidArgument("few-example detection needs a judgments file");
    judgments = read_judgments(*options.judgments);
    train = options.train_tagbooks ? load_books(*options.train_tagbooks) : test;
  }
  if (options.reduction == ReductionMethod::pca && options.mode == EventMode::zero)
    throw InvalidArgument("PCA reduction needs training examples; use few-example mode");

  TagVocabulary model_vocabulary = vocabulary;
  if (options.reduction == ReductionMethod::frequent) {
    const auto reduced = select_frequent(corpus, options.reduced_size);
    model_vocabulary = reduced_tags(vocabulary, reduced);
    for (auto* set : {&test, &train})
      for (auto& [id, v] : *set)
        v = project_vocabulary(v, reduced);
    write_file_atomic(options.out_dir / "reduced_vocabulary.json",
                      encode_reduced(reduced, vocabulary));
  }

  std::unordered_map<std::string_view, const TagVector*> train_by_id;
  for (const auto& [id, v] : train)
    train_by_id.emplace(id, &v);

  std::vector<json> ranking_lines;
  json report_events = json::object();
  for (const auto& event : events) {
    EventModel model;
    auto event_test = test;
    json info;
    if (options.mode == EventMode::zero) {
      model = zero_example_model(event.event_id, event.description, model_vocabulary, stoplist);
    } else {
      LabeledSet data;
      for (const auto& g : judgments) {
        if (g.event_id != event.event_id || g.label == 0)
          continue;
        auto it = train_by_id.find(g.video);
        if (it == train_by_id.end())
          throw UnknownVideo("event '" + event.event_id + "': no TagBook for training video '" +
                             g.video + "'");
        data.push_back({g.video, *it->second, g.label});
      }
      if (options.reduction == ReductionMethod::pca) {
        std::vector<TagVector> inputs;
        for (const auto& s : data)
          inputs.push_back(s.vector);
        const PcaModel pca = pca_fit(inputs, options.reduced_size);
        for (auto& s : data)
          s.vector = pca_project(s.vector, pca);
        for (auto& [id, v] : event_test)
          v = pca_project(v, pca);
        write_file_atomic(options.out_dir / "pca" / (safe_filename(event.event_id) + ".tbpc"),
                          encode_pca(pca));
      }
      model = train_few_example(event.event_id, data, options.svm);
      if (options.reduction != ReductionMethod::pca)
        model.vocab_hash = model_vocabulary.hash();
      std::size_t positives = 0;
      for (const auto& s : data)
        positives += s.label == 1;
      info["train_positives"] = positives;
      info["train_negatives"] = data.size() - positives;
    }
    const RankedList ranked = rank_videos(event_test, model);
    std::size_t rank = 0;
    for (const auto& e : ranked.entries)
      ranking_lines.push_back(
          {{"event_id", event.event_id}, {"rank", ++rank}, {"video_id", e.video}, {"score", e.score}});
    const auto model_file = fs::path("models") / (safe_filename(event.event_id) + ".json");
    write_file_atomic(options.out_dir / model_file, encode_model(model));
    info["ranked"] = ranked.entries.size();
    info["model"] = model_file.generic_string();
    report_events[event.event_id] = info;
  }
  write_file_atomic(options.out_dir / "rankings.jsonl", jsonl(ranking_lines));
  const json report{{"mode", std::string(to_string(options.mode))},
                    {"reduction", std::string(to_string(options.reduction))},
                    {"events", report_events}};
  write_file_atomic(options.out_dir / "report.json", report.dump(2) + "\n");
}

void cmd_eval(const EvalOptions& options) {
  const auto lines = read_rankings(options.rankings);
  const auto judgments = read_judgments(options.judgments);

  std::vector<std::string> order;
  std::map<std::string, RankedList> ranked;
  for (const auto& l : lines) {
    auto [it, inserted] = ranked.try_emplace(l.event_id);
    if (inserted)
      order.push_back(l.event_id);
    it->second.entries.push_back({l.video, l.score});
  }
  std::map<std::string, GroundTruth> truths;
  for (const auto& g : judgments) {
    auto& t = truths[g.event_id];
    t.event_id = g.event_id;
    if (g.label != 0)
      t.judged.insert(g.video);
    if (g.label == 1)
      t.positives.insert(g.video);
  }

  json report = json::object();
  std::vector<double> aps;
  std::string tsv = "event_id\tap\n";
  for (const auto& event : order) {
    GroundTruth truth = truths.count(event) ? truths[event] : GroundTruth{event, {}, {}};
    const double ap = average_precision(ranked[event], truth, options.unjudged);
    aps.push_back(ap);
    report[event] = {{"ap", ap}};
    tsv += event + "\t" + number(ap) + "\n";
  }
  const double map = mean_average_precision(aps);
  report["map"] = map;
  tsv += "MAP\t" + number(map) + "\n";
  write_file_atomic(options.out, report.dump(2) + "\n");
  if (options.tsv)
    write_file_atomic(*options.tsv, tsv);
}

void cmd_describe(const DescribeOptions& options) {
  const SourceCorpus corpus = load_corpus_dir(options.corpus_dir);
  const auto& vocabulary = corpus.vocabulary();
  TagBookFile books = read_tagbooks(options.tagbooks);
  if (books.header.vocab_hash != vocabulary.hash())
    throw FormatError(options.tagbooks.string() +
                      ": TagBooks were built against a different vocabulary");
  if (options.kappa == 0)
    throw InvalidArgument("kappa must be positive");

  std::vector<json> lines;
  for (const auto& [id, v] : books.entries) {
    const auto d = describe_video(v, vocabulary, options.kappa, id);
    lines.push_back({{"id", d.video}, {"tags", d.tags}});
  }
  write_file_atomic(options.out_dir / "descriptions.jsonl", jsonl(lines));

  if (!options.references)
    return;
  const Stoplist stoplist = options.stoplist ? load_stoplist(*options.stoplist) : Stoplist{};
  std::unordered_map<std::string, std::string> reference_of;
  for_each_line(*options.references, [&](std::size_t line, const std::string& text) {
    const json j = parse_line(*options.references, line, text);
    reference_of[field<std::string>(j, "id", *options.references, line)] =
        field<std::string>(j, "caption", *options.references, line);
  });
  std::vector<std::pair<TagVector, std::string>> scored;
  for (const auto& [id, v] : books.entries)
    if (auto it = reference_of.find(id); it != reference_of.end())
      scored.emplace_back(v, it->second);
  if (scored.empty())
    throw EmptyInput("no TagBook has a reference description");
  const auto curve = rouge_curve(scored, vocabulary, options.kappa, stoplist);
  std::string tsv = "kappa\tmean_recall\n";
  for (std::size_t k = 0; k < curve.size(); ++k)
    tsv += std::to_string(k + 1) + "\t" + number(curve[k]) + "\n";
  write_file_atomic(options.out_dir / "rouge.tsv", tsv);
}

void cmd_synth(const SynthOptions& options) {
  const SynthDataset data = synth_corpus(options.spec);
  const auto& dir = options.out_dir;
  const std::size_t d = options.spec.d;

  std::vector<std::pair<VideoId, FeatureVector>> source;
  std::vector<json> annotations;
  for (const auto& v : data.source) {
    source.emplace_back(v.id, v.feature);
    annotations.push_back({{"id", v.id}, {"tags", v.tags}});
  }
  write_features(dir / "source_features.jsonl", d, source);
  write_file_atomic(dir / "source_annotations.jsonl", jsonl(annotations));
  write_features(dir / "test_features.jsonl", d, data.test);
  write_features(dir / "train_features.jsonl", d, data.train);

  std::vector<json> events, train_judgments, test_judgments, references;
  std::map<std::string, std::string> description_of;
  for (const auto& e : data.events) {
    events.push_back({{"event_id", e.event_id}, {"name", e.name}, {"description", e.description}});
    description_of[e.event_id] = e.description;
  }
  for (const auto& l : data.train_labels)
    train_judgments.push_back({{"event_id", l.event_id}, {"video_id", l.video}, {"label", l.label}});
  for (const auto& truth : data.truths)
    for (const auto& [id, feature] : data.test) {
      const bool positive = truth.positives.contains(id);
      test_judgments.push_back(
          {{"event_id", truth.event_id}, {"video_id", id}, {"label", positive ? 1 : -1}});
      if (positive)
        references.push_back({{"id", id}, {"caption", description_of[truth.event_id]}});
    }
  write_file_atomic(dir / "events.jsonl", jsonl(events));
  write_file_atomic(dir / "train_judgments.jsonl", jsonl(train_judgments));
  write_file_atomic(dir / "test_judgments.jsonl", jsonl(test_judgments));
  write_file_atomic(dir / "test_references.jsonl", jsonl(references));

  const auto& s = options.spec;
  const json spec{{"n_events", s.n_events},       {"videos_per_event", s.videos_per_event},
                  {"n_background", s.n_background}, {"d", s.d},
                  {"m", s.m},                     {"tag_noise", s.tag_noise},
                  {"feature_noise", s.feature_noise}, {"seed", s.seed},
                  {"center_norm", s.center_norm}, {"signature_size", s.signature_size},
                  {"distractors", s.distractors},
                  {"test_per_event", s.test_per_event}, {"test_background", s.test_background},
                  {"train_per_event", s.train_per_event},
                  {"train_background", s.train_background}};
  write_file_atomic(dir / "spec.json", spec.dump(2) + "\n");
}

} // namespace tagbook::toolkit
