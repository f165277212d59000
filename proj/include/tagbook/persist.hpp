#pragma once

#include "tagbook/corpus.hpp"
#include "tagbook/events.hpp"
#include "tagbook/reduce.hpp"
#include "tagbook/tagprop.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tagbook {

namespace fs = std::filesystem;

/// Writes `contents` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const fs::path& path, std::string_view contents);
std::string read_file(const fs::path& path);

// Corpus directory layout:
//   manifest.json      {"format", "n", "dim", "m", "vocab_hash"}
//   vocabulary.txt     one tag per line, vocabulary order
//   features.jsonl     {"dim": d} header, then {"id", "feature"}
//   annotations.jsonl  {"id", "tags"}
//   relevance.tbrm     optional refined matrix (+ relevance.json sidecar)
inline constexpr std::string_view kRelevanceFile = "relevance.tbrm";
inline constexpr std::string_view kRelevanceSidecar = "relevance.json";

void save_corpus(const SourceCorpus& corpus, const fs::path& dir);
/// Loads a directory written by save_corpus, attaching relevance.tbrm when
/// present (checked against the sidecar's ids and vocabulary hash).
SourceCorpus load_corpus_dir(const fs::path& dir);

// Relevance matrix: "TBRM", u32 version, u64 N, u64 m, N*m f32, all
// little-endian, row-major.
inline constexpr std::uint32_t kRelevanceFormatVersion = 1;
std::string encode_relevance(const RelevanceMatrix& matrix);
RelevanceMatrix decode_relevance(std::string_view bytes);
void save_relevance(const RelevanceMatrix& matrix, const SourceCorpus& corpus,
                    const fs::path& dir);
RelevanceMatrix load_relevance(const fs::path& dir, const SourceCorpus& corpus);

// PCA model: "TBPC", u32 version, u64 m, u64 m', then mean (m),
// explained variance (m'), components (m' x m), all f64 little-endian.
inline constexpr std::uint32_t kPcaFormatVersion = 1;
std::string encode_pca(const PcaModel& model);
PcaModel decode_pca(std::string_view bytes);

std::string encode_model(const EventModel& model);
EventModel decode_model(std::string_view json_text);

std::string encode_reduced(const ReducedVocabulary& reduced, const TagVocabulary& parent);
ReducedVocabulary decode_reduced(std::string_view json_text, const TagVocabulary& parent);

// TagBook files: header {"vocab_hash", "m", "variant", "k"}, then one
// {"id", "tagbook"} per line.
struct TagBookHeader {
  std::string vocab_hash;
  std::size_t m = 0;
  std::string variant;
  std::size_t k = 0;
};
struct TagBookFile {
  TagBookHeader header;
  std::vector<TagBookEntry> entries;
};
std::string encode_tagbooks(const TagBookFile& file);
TagBookFile read_tagbooks(const fs::path& path);

/// Calls fn(line_number, json_text) for every non-blank line.
template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn);

} // namespace tagbook

#include <fstream>

namespace tagbook {

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    fn(number, line);
  }
}

} // namespace tagbook
