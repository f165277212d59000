// tagbook: build source corpora, propagate TagBooks, detect and evaluate events.

#include "tagbook/log.hpp"
#include "tagbook/toolkit.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace tb = tagbook;
namespace tk = tagbook::toolkit;

namespace {

std::string single_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r')
      c = ' ';
  return s;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"TagBook: tag-propagated video representations for event detection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key/value config file; command-line flags take precedence");

  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--seed", seed, "Seed for SVM training and synthetic data")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress warnings");

  // build
  tk::BuildOptions build;
  std::string build_stoplist;
  auto* build_cmd = app.add_subcommand("build", "Ingest features and annotations into a corpus directory");
  build_cmd->add_option("--features", build.features, "Feature JSON Lines file")->required();
  build_cmd->add_option("--annotations", build.annotations, "Annotation JSON Lines file")->required();
  build_cmd->add_option("--stoplist", build_stoplist, "Stopword file, one token per line");
  build_cmd->add_option("--min-df", build.min_df, "Minimum tag document frequency")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--out", build.out_dir, "Output corpus directory")->required();

  // refine
  tk::RefineOptions refine;
  auto* refine_cmd = app.add_subcommand("refine", "Precompute refined source tag relevance");
  refine_cmd->add_option("--corpus", refine.corpus_dir, "Corpus directory")->required();
  refine_cmd->add_option("--k-r", refine.k_r, "Refinement neighbors")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // tagbook
  tk::TagBookOptions tagbook;
  std::string variant = "refine", hard_prior = "literal";
  auto* tagbook_cmd = app.add_subcommand("tagbook", "Propagate TagBooks for a set of videos");
  tagbook_cmd->add_option("--corpus", tagbook.corpus_dir, "Corpus directory")->required();
  tagbook_cmd->add_option("--features", tagbook.features, "Feature JSON Lines file of the videos")->required();
  tagbook_cmd->add_option("--variant", variant, "hard | soft | refine")
      ->capture_default_str()
      ->check(CLI::IsMember({"hard", "soft", "refine"}));
  tagbook_cmd->add_option("--k", tagbook.propagation.k, "Propagation neighbors")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  tagbook_cmd->add_option("--hard-prior", hard_prior, "literal | full_set")
      ->capture_default_str()
      ->check(CLI::IsMember({"literal", "full_set"}));
  tagbook_cmd->add_option("--out", tagbook.out, "Output TagBook file")->required();

  // detect
  tk::DetectOptions detect;
  std::string mode = "zero", reduction = "none", detect_judgments, train_tagbooks, detect_stoplist;
  auto* detect_cmd = app.add_subcommand("detect", "Rank videos for each event");
  detect_cmd->add_option("--corpus", detect.corpus_dir, "Corpus directory")->required();
  detect_cmd->add_option("--tagbooks", detect.tagbooks, "TagBooks of the videos to rank")->required();
  detect_cmd->add_option("--events", detect.events, "Event definition JSON Lines file")->required();
  detect_cmd->add_option("--mode", mode, "zero | few")
      ->capture_default_str()
      ->check(CLI::IsMember({"zero", "few"}));
  detect_cmd->add_option("--judgments", detect_judgments, "Training judgments (few mode)");
  detect_cmd->add_option("--train-tagbooks", train_tagbooks,
                         "TagBooks of the training videos (few mode; defaults to --tagbooks)");
  detect_cmd->add_option("--stoplist", detect_stoplist, "Stopword file for event descriptions");
  detect_cmd->add_option("--reduce", reduction, "none | frequent | pca")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "frequent", "pca"}));
  detect_cmd->add_option("--reduce-size", detect.reduced_size, "Reduced TagBook size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  detect_cmd->add_option("--lambda", detect.svm.lambda, "SVM regularization")->capture_default_str();
  detect_cmd->add_option("--epochs", detect.svm.epochs, "SVM epochs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  detect_cmd->add_flag("--normalize-inputs", detect.svm.normalize_inputs,
                       "Length-normalize training TagBooks before SVM training");
  detect_cmd->add_option("--out", detect.out_dir, "Output directory")->required();

  // eval
  tk::EvalOptions eval;
  std::string unjudged = "negative", eval_tsv;
  auto* eval_cmd = app.add_subcommand("eval", "Average precision of rankings against judgments");
  eval_cmd->add_option("--rankings", eval.rankings, "rankings.jsonl from detect")->required();
  eval_cmd->add_option("--judgments", eval.judgments, "Judgment JSON Lines file")->required();
  eval_cmd->add_option("--unjudged", unjudged, "negative | skip")
      ->capture_default_str()
      ->check(CLI::IsMember({"negative", "skip"}));
  eval_cmd->add_option("--out", eval.out, "Report JSON")->required();
  eval_cmd->add_option("--tsv", eval_tsv, "Optional per-event TSV table");

  // describe
  tk::DescribeOptions describe;
  std::string references, describe_stoplist;
  auto* describe_cmd = app.add_subcommand("describe", "Top-kappa tag descriptions and ROUGE-1 curve");
  describe_cmd->add_option("--corpus", describe.corpus_dir, "Corpus directory")->required();
  describe_cmd->add_option("--tagbooks", describe.tagbooks, "TagBook file")->required();
  describe_cmd->add_option("--kappa", describe.kappa, "Tags per description")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  describe_cmd->add_option("--references", references, "Reference captions {id, caption}");
  describe_cmd->add_option("--stoplist", describe_stoplist, "Stopword file for references");
  describe_cmd->add_option("--out", describe.out_dir, "Output directory")->required();

  // synth
  tk::SynthOptions synth;
  auto& spec = synth.spec;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic planted-event dataset");
  synth_cmd->add_option("--n-events", spec.n_events)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--videos-per-event", spec.videos_per_event)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--n-background", spec.n_background)->capture_default_str();
  synth_cmd->add_option("--d", spec.d, "Feature dimension")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--m", spec.m, "Tag pool size")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--tag-noise", spec.tag_noise)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--feature-noise", spec.feature_noise)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--center-norm", spec.center_norm, "Norm of the planted cluster centers")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--signature-size", spec.signature_size)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--distractors", spec.distractors)->capture_default_str();
  synth_cmd->add_option("--test-per-event", spec.test_per_event)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--test-background", spec.test_background)->capture_default_str();
  synth_cmd->add_option("--train-per-event", spec.train_per_event)->capture_default_str();
  synth_cmd->add_option("--train-background", spec.train_background)->capture_default_str();
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  tb::log::set_quiet(quiet);

  try {
    if (*build_cmd) {
      if (!build_stoplist.empty())
        build.stoplist = build_stoplist;
      tk::cmd_build(build);
    } else if (*refine_cmd) {
      refine.threads = threads;
      tk::cmd_refine(refine);
    } else if (*tagbook_cmd) {
      tagbook.propagation.variant = tb::parse_variant(variant);
      tagbook.propagation.hard_prior_mode = tb::parse_hard_prior_mode(hard_prior);
      tagbook.threads = threads;
      tk::cmd_tagbook(tagbook);
    } else if (*detect_cmd) {
      detect.mode = tb::parse_event_mode(mode);
      detect.reduction = tk::parse_reduction(reduction);
      detect.svm.seed = seed;
      if (!detect_judgments.empty())
        detect.judgments = detect_judgments;
      if (!train_tagbooks.empty())
        detect.train_tagbooks = train_tagbooks;
      if (!detect_stoplist.empty())
        detect.stoplist = detect_stoplist;
      tk::cmd_detect(detect);
    } else if (*eval_cmd) {
      eval.unjudged = unjudged == "skip" ? tb::UnjudgedPolicy::skip : tb::UnjudgedPolicy::negative;
      if (!eval_tsv.empty())
        eval.tsv = eval_tsv;
      tk::cmd_eval(eval);
    } else if (*describe_cmd) {
      if (!references.empty())
        describe.references = references;
      if (!describe_stoplist.empty())
        describe.stoplist = describe_stoplist;
      tk::cmd_describe(describe);
    } else if (*synth_cmd) {
      spec.seed = seed;
      tk::cmd_synth(synth);
    }
  } catch (const std::exception& e) {
    std::cerr << "tagbook: error: " << single_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
