#include "tagbook/evalkit.hpp"
#include "tagbook/events.hpp"
#include "tagbook/log.hpp"
#include "tagbook/persist.hpp"
#include "tagbook/reduce.hpp"
#include "tagbook/tagprop.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;
using namespace tagbook;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PropagationConfig make_config(const std::string& variant, std::size_t k, std::size_t k_r,
                              const std::string& hard_prior) {
  PropagationConfig cfg;
  cfg.variant = parse_variant(variant);
  cfg.hard_prior_mode = parse_hard_prior_mode(hard_prior);
  cfg.k = k;
  cfg.k_r = k_r;
  return cfg;
}

SvmHyper make_hyper(double lambda, std::size_t epochs, std::uint64_t seed, bool normalize) {
  SvmHyper h;
  h.lambda = lambda;
  h.epochs = epochs;
  h.seed = seed;
  h.normalize_inputs = normalize;
  return h;
}

using Sample = std::tuple<std::string, std::vector<double>, int>;

LabeledSet to_labeled(const std::vector<Sample>& samples) {
  LabeledSet out;
  out.reserve(samples.size());
  for (const auto& [id, vec, label] : samples)
    out.push_back({id, vec, label});
  return out;
}

RankedList to_ranked(const std::vector<std::pair<std::string, double>>& ranked) {
  RankedList out;
  for (const auto& [id, s] : ranked)
    out.entries.push_back({id, s});
  return out;
}

py::dict synth_dict(const SynthDataset& d) {
  py::dict out;
  out["corpus"] = d.corpus;
  out["test"] = d.test;
  out["train"] = d.train;
  py::list events, truths, labels;
  for (const auto& e : d.events)
    events.append(py::dict(py::arg("event_id") = e.event_id, py::arg("name") = e.name,
                           py::arg("description") = e.description));
  for (const auto& t : d.truths)
    truths.append(py::make_tuple(t.event_id, t.positives));
  for (const auto& l : d.train_labels)
    labels.append(py::make_tuple(l.event_id, l.video, l.label));
  out["events"] = events;
  out["truths"] = truths;
  out["train_labels"] = labels;
  return out;
}

} // namespace

PYBIND11_MODULE(_tagbook, m) {
  m.doc() = "Tag-propagated video representations for event detection";
  log::set_quiet(true);

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
#define TAGBOOK_PY_ERROR(Name) py::register_exception<Name>(m, #Name, base.ptr())
  TAGBOOK_PY_ERROR(FormatError);
  TAGBOOK_PY_ERROR(DimensionMismatch);
  TAGBOOK_PY_ERROR(DuplicateId);
  TAGBOOK_PY_ERROR(MissingFeature);
  TAGBOOK_PY_ERROR(UnknownVideo);
  TAGBOOK_PY_ERROR(UnknownTag);
  TAGBOOK_PY_ERROR(EmptyVocabulary);
  TAGBOOK_PY_ERROR(EmptyInput);
  TAGBOOK_PY_ERROR(MissingRefinement);
  TAGBOOK_PY_ERROR(EmptyModel);
  TAGBOOK_PY_ERROR(DegenerateData);
  TAGBOOK_PY_ERROR(SizeTooLarge);
  TAGBOOK_PY_ERROR(InsufficientData);
  TAGBOOK_PY_ERROR(NoPositives);
  TAGBOOK_PY_ERROR(EmptyReference);
  TAGBOOK_PY_ERROR(InvalidArgument);
  TAGBOOK_PY_ERROR(IoError);
#undef TAGBOOK_PY_ERROR

  m.def("set_quiet", &log::set_quiet, py::arg("quiet"));

  py::class_<SourceCorpus>(m, "Corpus")
      .def(py::init([](const std::vector<std::tuple<std::string, std::vector<double>,
                                                    std::vector<std::string>>>& videos,
                       std::vector<std::string> vocabulary) {
             std::vector<VideoRecord> records;
             for (const auto& [id, feature, tags] : videos)
               records.push_back({id, feature, tags});
             return SourceCorpus::create(std::move(records), TagVocabulary(std::move(vocabulary)));
           }),
           py::arg("videos"), py::arg("vocabulary"),
           "videos: (id, feature, tags) triples; tags outside the vocabulary are dropped")
      .def_static(
          "load",
          [](const std::filesystem::path& features, const std::filesystem::path& annotations,
             std::optional<std::filesystem::path> stoplist, std::size_t min_df) {
            return load_corpus(features, annotations, stoplist, min_df);
          },
          py::arg("features"), py::arg("annotations"), py::arg("stoplist") = py::none(),
          py::arg("min_df") = 1)
      .def_static("load_dir", &load_corpus_dir, py::arg("path"))
      .def("save", [](const SourceCorpus& c, const std::filesystem::path& dir) { save_corpus(c, dir); },
           py::arg("path"))
      .def("__len__", &SourceCorpus::size)
      .def_property_readonly("dim", &SourceCorpus::dim)
      .def_property_readonly("ids", &SourceCorpus::ids)
      .def_property_readonly("vocabulary",
                             [](const SourceCorpus& c) { return c.vocabulary().tags(); })
      .def_property_readonly("vocabulary_hash",
                             [](const SourceCorpus& c) { return c.vocabulary().hash(); })
      .def("tags", [](const SourceCorpus& c, std::size_t i) { return c.annotation(i).tags; },
           py::arg("index"))
      .def_property_readonly("has_refined",
                             [](const SourceCorpus& c) { return c.refined().has_value(); })
      .def("refined",
           [](const SourceCorpus& c) {
             if (!c.refined())
               throw MissingRefinement("corpus has no refined relevance");
             const auto& r = *c.refined();
             py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(r.rows()),
                                                      static_cast<py::ssize_t>(r.cols())});
             std::copy(r.values().begin(), r.values().end(), out.mutable_data());
             return out;
           })
      .def(
          "refine",
          [](const SourceCorpus& c, std::size_t k_r, unsigned threads) {
            PropagationConfig cfg;
            cfg.k_r = k_r;
            py::gil_scoped_release release;
            return c.with_refined(refine_source(c, cfg, threads));
          },
          py::arg("k_r") = 500, py::arg("threads") = 1,
          "Copy of the corpus carrying refined tag relevance");

  m.def("tokenize_caption",
        [](std::string_view text, const Stoplist& stoplist) { return tokenize_caption(text, stoplist); },
        py::arg("text"), py::arg("stoplist") = Stoplist{});

  m.def(
      "propagate",
      [](const SourceCorpus& c, const std::vector<double>& query, const std::string& variant,
         std::size_t k, const std::string& hard_prior) {
        return to_array(propagate(c, query, make_config(variant, k, 500, hard_prior)));
      },
      py::arg("corpus"), py::arg("query"), py::arg("variant") = "refine", py::arg("k") = 500,
      py::arg("hard_prior") = "literal");

  m.def(
      "propagate_batch",
      [](const SourceCorpus& c, const std::vector<Query>& queries, const std::string& variant,
         std::size_t k, const std::string& hard_prior, unsigned threads) {
        const auto cfg = make_config(variant, k, 500, hard_prior);
        std::vector<TagBookEntry> books;
        {
          py::gil_scoped_release release;
          books = propagate_batch(c, queries, cfg, threads);
        }
        py::list out;
        for (const auto& [id, v] : books)
          out.append(py::make_tuple(id, to_array(v)));
        return out;
      },
      py::arg("corpus"), py::arg("queries"), py::arg("variant") = "refine", py::arg("k") = 500,
      py::arg("hard_prior") = "literal", py::arg("threads") = 1,
      "queries: (id, feature) pairs; returns (id, TagBook) pairs in input order");

  py::class_<EventModel>(m, "EventModel")
      .def_readonly("event_id", &EventModel::event_id)
      .def_property_readonly("vector", [](const EventModel& e) { return to_array(e.vector); })
      .def_property_readonly("mode", [](const EventModel& e) { return std::string(to_string(e.mode)); })
      .def_readonly("vocab_hash", &EventModel::vocab_hash)
      .def("to_json", &encode_model)
      .def_static("from_json", &decode_model, py::arg("text"))
      .def("score", [](const EventModel& e, const std::vector<double>& v) { return score(v, e); },
           py::arg("vector"));

  m.def(
      "zero_example_model",
      [](std::string event_id, std::string_view description, const SourceCorpus& c,
         const Stoplist& stoplist) {
        return zero_example_model(std::move(event_id), description, c.vocabulary(), stoplist);
      },
      py::arg("event_id"), py::arg("description"), py::arg("corpus"),
      py::arg("stoplist") = Stoplist{});

  m.def(
      "train_few_example",
      [](std::string event_id, const std::vector<Sample>& samples, double lambda,
         std::size_t epochs, std::uint64_t seed, bool normalize_inputs) {
        return train_few_example(std::move(event_id), to_labeled(samples),
                                 make_hyper(lambda, epochs, seed, normalize_inputs));
      },
      py::arg("event_id"), py::arg("samples"), py::arg("lam") = 1e-4, py::arg("epochs") = 100,
      py::arg("seed") = 0, py::arg("normalize_inputs") = false,
      "samples: (id, vector, label) with label +1 or -1");

  m.def(
      "fit_linear_svm",
      [](const std::vector<Sample>& samples, double lambda, std::size_t epochs,
         std::uint64_t seed, bool normalize_inputs) {
        const auto fit =
            fit_linear_svm(to_labeled(samples), make_hyper(lambda, epochs, seed, normalize_inputs));
        return py::make_tuple(to_array(fit.weights), fit.epoch_mean_objective);
      },
      py::arg("samples"), py::arg("lam") = 1e-4, py::arg("epochs") = 100, py::arg("seed") = 0,
      py::arg("normalize_inputs") = false, "Returns (weights, per-epoch mean objective)");

  m.def(
      "rank_videos",
      [](const std::vector<TagBookEntry>& videos, const EventModel& model) {
        std::vector<std::pair<std::string, double>> out;
        for (auto& e : rank_videos(videos, model).entries)
          out.emplace_back(std::move(e.video), e.score);
        return out;
      },
      py::arg("videos"), py::arg("model"), "Returns (id, score) pairs, best first");

  m.def(
      "average_precision",
      [](const std::vector<std::pair<std::string, double>>& ranked,
         const std::set<std::string>& positives, const std::set<std::string>& judged,
         const std::string& unjudged) {
        if (unjudged != "negative" && unjudged != "skip")
          throw InvalidArgument("unjudged must be 'negative' or 'skip'");
        GroundTruth truth{"", positives, judged};
        return average_precision(to_ranked(ranked), truth,
                                 unjudged == "skip" ? UnjudgedPolicy::skip
                                                    : UnjudgedPolicy::negative);
      },
      py::arg("ranked"), py::arg("positives"), py::arg("judged") = std::set<std::string>{},
      py::arg("unjudged") = "negative");

  m.def("mean_average_precision",
        [](const std::vector<double>& aps) { return mean_average_precision(aps); },
        py::arg("per_event"));

  m.def(
      "describe_video",
      [](const std::vector<double>& vector, const SourceCorpus& c, std::size_t kappa) {
        return describe_video(vector, c.vocabulary(), kappa).tags;
      },
      py::arg("vector"), py::arg("corpus"), py::arg("kappa") = 10);

  m.def(
      "rouge1_recall",
      [](std::vector<std::string> tags, std::string_view reference, const Stoplist& stoplist) {
        return rouge1_recall(Description{{}, std::move(tags)}, reference, stoplist);
      },
      py::arg("tags"), py::arg("reference"), py::arg("stoplist") = Stoplist{});

  m.def(
      "select_frequent",
      [](const SourceCorpus& c, std::size_t target) { return select_frequent(c, target).selected; },
      py::arg("corpus"), py::arg("target"), "Indices of the kept tags, in vocabulary order");

  py::class_<PcaModel>(m, "PcaModel")
      .def_property_readonly("mean", [](const PcaModel& p) { return to_array(p.mean); })
      .def_property_readonly("components",
                             [](const PcaModel& p) {
                               py::array_t<double> out(std::vector<py::ssize_t>{
                                   static_cast<py::ssize_t>(p.output_dim()),
                                   static_cast<py::ssize_t>(p.input_dim())});
                               std::copy(p.components.begin(), p.components.end(),
                                         out.mutable_data());
                               return out;
                             })
      .def_property_readonly("explained_variance",
                             [](const PcaModel& p) { return to_array(p.explained_variance); })
      .def("project",
           [](const PcaModel& p, const std::vector<double>& v) { return to_array(pca_project(v, p)); },
           py::arg("vector"))
      .def("reconstruct",
           [](const PcaModel& p, const std::vector<double>& c) {
             return to_array(pca_reconstruct(c, p));
           },
           py::arg("coords"));

  m.def(
      "pca_fit",
      [](const std::vector<std::vector<double>>& vectors, std::size_t target) {
        return pca_fit(vectors, target);
      },
      py::arg("vectors"), py::arg("target"));

  m.def(
      "synth",
      [](std::uint64_t seed, const py::kwargs& overrides) {
        SynthSpec s;
        s.seed = seed;
        for (const auto& [key, value] : overrides) {
          const auto name = key.cast<std::string>();
          if (name == "n_events") s.n_events = value.cast<std::size_t>();
          else if (name == "videos_per_event") s.videos_per_event = value.cast<std::size_t>();
          else if (name == "n_background") s.n_background = value.cast<std::size_t>();
          else if (name == "d") s.d = value.cast<std::size_t>();
          else if (name == "m") s.m = value.cast<std::size_t>();
          else if (name == "tag_noise") s.tag_noise = value.cast<double>();
          else if (name == "feature_noise") s.feature_noise = value.cast<double>();
          else if (name == "center_norm") s.center_norm = value.cast<double>();
          else if (name == "signature_size") s.signature_size = value.cast<std::size_t>();
          else if (name == "distractors") s.distractors = value.cast<std::size_t>();
          else if (name == "test_per_event") s.test_per_event = value.cast<std::size_t>();
          else if (name == "test_background") s.test_background = value.cast<std::size_t>();
          else if (name == "train_per_event") s.train_per_event = value.cast<std::size_t>();
          else if (name == "train_background") s.train_background = value.cast<std::size_t>();
          else throw InvalidArgument("unknown synthetic parameter '" + name + "'");
        }
        return synth_dict(synth_corpus(s));
      },
      py::arg("seed") = 0,
      "Planted-event dataset as a dict: corpus, test, train, events, truths, train_labels");
}
