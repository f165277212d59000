#pragma once

// End-to-end commands behind the `tagbook` CLI. Each takes a plain options
// struct so the same code path can be driven in-process by tests.

#include "tagbook/evalkit.hpp"
#include "tagbook/events.hpp"
#include "tagbook/tagprop.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace tagbook::toolkit {

namespace fs = std::filesystem;

enum class ReductionMethod { none, frequent, pca };
ReductionMethod parse_reduction(std::string_view name);
std::string_view to_string(ReductionMethod method);

struct BuildOptions {
  fs::path features;
  fs::path annotations;
  std::optional<fs::path> stoplist;
  std::size_t min_df = 1;
  fs::path out_dir;
};

struct RefineOptions {
  fs::path corpus_dir;
  std::size_t k_r = 500;
  unsigned threads = 1;
};

struct TagBookOptions {
  fs::path corpus_dir;
  fs::path features;
  PropagationConfig propagation;
  fs::path out;
  unsigned threads = 1;
};

struct DetectOptions {
  fs::path corpus_dir;
  fs::path tagbooks;
  fs::path events;
  EventMode mode = EventMode::zero;
  std::optional<fs::path> judgments;
  std::optional<fs::path> train_tagbooks;
  std::optional<fs::path> stoplist;
  ReductionMethod reduction = ReductionMethod::none;
  std::size_t reduced_size = 2000;
  SvmHyper svm;
  fs::path out_dir;
};

struct EvalOptions {
  fs::path rankings;
  fs::path judgments;
  UnjudgedPolicy unjudged = UnjudgedPolicy::negative;
  fs::path out;
  std::optional<fs::path> tsv;
};

struct DescribeOptions {
  fs::path corpus_dir;
  fs::path tagbooks;
  std::size_t kappa = 10;
  std::optional<fs::path> references;
  std::optional<fs::path> stoplist;
  fs::path out_dir;
};

struct SynthOptions {
  SynthSpec spec;
  fs::path out_dir;
};

void cmd_build(const BuildOptions& options);
void cmd_refine(const RefineOptions& options);
void cmd_tagbook(const TagBookOptions& options);
void cmd_detect(const DetectOptions& options);
void cmd_eval(const EvalOptions& options);
void cmd_describe(const DescribeOptions& options);
void cmd_synth(const SynthOptions& options);

// File readers shared by the commands.
struct EventDefinition {
  std::string event_id;
  std::string name;
  std::string description;
};
std::vector<EventDefinition> read_events(const fs::path& path);

struct Judgment {
  std::string event_id;
  VideoId video;
  int label = 0;
};
std::vector<Judgment> read_judgments(const fs::path& path);

struct RankingLine {
  std::string event_id;
  VideoId video;
  double score = 0.0;
};
std::vector<RankingLine> read_rankings(const fs::path& path);

} // namespace tagbook::toolkit
