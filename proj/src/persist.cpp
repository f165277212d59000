#include "tagbook/persist.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

namespace tagbook {

using json = nlohmann::json;

namespace {

constexpr std::string_view kRelevanceMagic = "TBRM";
constexpr std::string_view kPcaMagic = "TBPC";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
  Reader(std::string_view bytes, std::string_view what) : bytes_(bytes), what_(what) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  double f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(uint(4))); }
  double f64() { return std::bit_cast<double>(uint(8)); }

  void magic(std::string_view expected) {
    need(expected.size());
    if (bytes_.substr(pos_, expected.size()) != expected)
      throw FormatError(std::string(what_) + ": bad magic, expected " + std::string(expected));
    pos_ += expected.size();
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw FormatError(std::string(what_) + ": truncated file");
  }
  void finish() const {
    if (pos_ != bytes_.size())
      throw FormatError(std::string(what_) + ": trailing bytes");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  std::string_view bytes_;
  std::string_view what_;
  std::size_t pos_ = 0;
};

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(what + ": malformed JSON (" + e.what() + ")");
  }
}

std::string lines_to_text(const std::vector<json>& lines) {
  std::string out;
  for (const auto& j : lines) {
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

} // namespace

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
      throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Corpus directory

void save_corpus(const SourceCorpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& vocab = corpus.vocabulary();

  std::string vocab_text;
  for (const auto& t : vocab.tags())
    vocab_text += t + "\n";

  std::vector<json> features{json{{"dim", corpus.dim()}}};
  std::vector<json> annotations;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto f = corpus.feature(i);
    features.push_back({{"id", corpus.id(i)}, {"feature", std::vector<double>(f.begin(), f.end())}});
    annotations.push_back({{"id", corpus.id(i)}, {"tags", corpus.annotation(i).tags}});
  }
  const json manifest{{"format", "tagbook-corpus"},
                      {"version", 1},
                      {"n", corpus.size()},
                      {"dim", corpus.dim()},
                      {"m", vocab.size()},
                      {"vocab_hash", vocab.hash()}};

  write_file_atomic(dir / "vocabulary.txt", vocab_text);
  write_file_atomic(dir / "features.jsonl", lines_to_text(features));
  write_file_atomic(dir / "annotations.jsonl", lines_to_text(annotations));
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  if (corpus.refined())
    save_relevance(*corpus.refined(), corpus, dir);
}

SourceCorpus load_corpus_dir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw IoError("corpus directory " + dir.string() + " does not exist");
  const json manifest = parse_json(read_file(dir / "manifest.json"), (dir / "manifest.json").string());

  std::vector<std::string> tags;
  {
    std::istringstream in(read_file(dir / "vocabulary.txt"));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty())
        tags.push_back(line);
  }
  TagVocabulary vocabulary(std::move(tags));
  if (manifest.value("vocab_hash", std::string{}) != vocabulary.hash())
    throw FormatError(dir.string() + ": vocabulary does not match manifest hash");

  auto rows = read_feature_file(dir / "features.jsonl");
  auto annotations = read_annotation_file(dir / "annotations.jsonl", {});
  if (annotations.size() != rows.size())
    throw FormatError(dir.string() + ": features and annotations disagree on video count");
  std::vector<VideoRecord> videos;
  videos.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (annotations[i].video != rows[i].id)
      throw FormatError(dir.string() + ": annotation order differs from features at '" +
                        rows[i].id + "'");
    videos.push_back({std::move(rows[i].id), std::move(rows[i].feature),
                      std::move(annotations[i].tags)});
  }
  SourceCorpus corpus = SourceCorpus::create(std::move(videos), std::move(vocabulary));
  if (fs::exists(dir / kRelevanceFile))
    corpus = std::move(corpus).with_refined(load_relevance(dir, corpus));
  return corpus;
}

// ---------------------------------------------------------------------------
// Relevance matrix

std::string encode_relevance(const RelevanceMatrix& matrix) {
  std::string out;
  out.reserve(24 + matrix.values().size() * 4);
  out += kRelevanceMagic;
  put_u32(out, kRelevanceFormatVersion);
  put_u64(out, matrix.rows());
  put_u64(out, matrix.cols());
  for (double v : matrix.values())
    put_f32(out, v);
  return out;
}

RelevanceMatrix decode_relevance(std::string_view bytes) {
  Reader r(bytes, "relevance matrix");
  r.magic(kRelevanceMagic);
  const auto version = r.uint(4);
  if (version != kRelevanceFormatVersion)
    throw FormatError("relevance matrix: unsupported version " + std::to_string(version));
  const auto rows = r.uint(8);
  const auto cols = r.uint(8);
  if (cols != 0 && rows > r.remaining() / 4 / cols)
    throw FormatError("relevance matrix: truncated file");
  std::vector<double> values(rows * cols);
  for (auto& v : values)
    v = r.f32();
  r.finish();
  return RelevanceMatrix(rows, cols, std::move(values));
}

void save_relevance(const RelevanceMatrix& matrix, const SourceCorpus& corpus,
                    const fs::path& dir) {
  if (matrix.rows() != corpus.size() || matrix.cols() != corpus.vocabulary().size())
    throw DimensionMismatch("relevance matrix shape does not match the corpus");
  const json sidecar{{"format", "TBRM"},
                     {"version", kRelevanceFormatVersion},
                     {"n", matrix.rows()},
                     {"m", matrix.cols()},
                     {"ids", corpus.ids()},
                     {"vocab_hash", corpus.vocabulary().hash()}};
  write_file_atomic(dir / kRelevanceFile, encode_relevance(matrix));
  write_file_atomic(dir / kRelevanceSidecar, sidecar.dump(2) + "\n");
}

RelevanceMatrix load_relevance(const fs::path& dir, const SourceCorpus& corpus) {
  const auto sidecar_path = dir / kRelevanceSidecar;
  const json sidecar = parse_json(read_file(sidecar_path), sidecar_path.string());
  if (sidecar.value("vocab_hash", std::string{}) != corpus.vocabulary().hash())
    throw FormatError(sidecar_path.string() + ": vocabulary hash does not match the corpus");
  if (!sidecar.contains("ids") || sidecar["ids"].get<std::vector<std::string>>() != corpus.ids())
    throw FormatError(sidecar_path.string() + ": video ids do not match the corpus");
  RelevanceMatrix matrix = decode_relevance(read_file(dir / kRelevanceFile));
  if (matrix.rows() != corpus.size() || matrix.cols() != corpus.vocabulary().size())
    throw DimensionMismatch("relevance matrix shape does not match the corpus");
  return matrix;
}

// ---------------------------------------------------------------------------
// PCA model

std::string encode_pca(const PcaModel& model) {
  std::string out;
  out += kPcaMagic;
  put_u32(out, kPcaFormatVersion);
  put_u64(out, model.input_dim());
  put_u64(out, model.output_dim());
  for (double v : model.mean)
    put_f64(out, v);
  for (double v : model.explained_variance)
    put_f64(out, v);
  for (double v : model.components)
    put_f64(out, v);
  return out;
}

PcaModel decode_pca(std::string_view bytes) {
  Reader r(bytes, "PCA model");
  r.magic(kPcaMagic);
  const auto version = r.uint(4);
  if (version != kPcaFormatVersion)
    throw FormatError("PCA model: unsupported version " + std::to_string(version));
  const auto m = r.uint(8);
  const auto target = r.uint(8);
  if (m == 0 || target > m || m > r.remaining() / 8 / (target + 1))
    throw FormatError("PCA model: invalid shape or truncated file");
  r.need(8 * (m + target + target * m));
  PcaModel model;
  model.mean.resize(m);
  model.explained_variance.resize(target);
  model.components.resize(target * m);
  for (auto& v : model.mean)
    v = r.f64();
  for (auto& v : model.explained_variance)
    v = r.f64();
  for (auto& v : model.components)
    v = r.f64();
  r.finish();
  return model;
}

// ---------------------------------------------------------------------------
// Event models

std::string encode_model(const EventModel& model) {
  json meta = nullptr;
  if (model.training_meta)
    meta = json{{"lambda", model.training_meta->lambda},
                {"epochs", model.training_meta->epochs},
                {"seed", model.training_meta->seed},
                {"normalize_inputs", model.training_meta->normalize_inputs}};
  const json j{{"event_id", model.event_id},
               {"mode", std::string(to_string(model.mode))},
               {"vector", model.vector},
               {"training_meta", meta},
               {"vocab_hash", model.vocab_hash}};
  return j.dump() + "\n";
}

EventModel decode_model(std::string_view json_text) {
  const json j = parse_json(json_text, "event model");
  try {
    EventModel model;
    model.event_id = j.at("event_id").get<std::string>();
    model.mode = parse_event_mode(j.at("mode").get<std::string>());
    model.vector = j.at("vector").get<std::vector<double>>();
    model.vocab_hash = j.value("vocab_hash", std::string{});
    if (j.contains("training_meta") && !j["training_meta"].is_null()) {
      const auto& m = j["training_meta"];
      SvmHyper h;
      h.lambda = m.at("lambda").get<double>();
      h.epochs = m.at("epochs").get<std::size_t>();
      h.seed = m.at("seed").get<std::uint64_t>();
      h.normalize_inputs = m.value("normalize_inputs", false);
      model.training_meta = h;
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("event model: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reduced vocabulary

std::string encode_reduced(const ReducedVocabulary& reduced, const TagVocabulary& parent) {
  const auto tags = reduced_tags(parent, reduced);
  const json j{{"parent_vocab_hash", reduced.parent_hash},
               {"parent_size", reduced.parent_size},
               {"selected", tags.tags()}};
  return j.dump() + "\n";
}

ReducedVocabulary decode_reduced(std::string_view json_text, const TagVocabulary& parent) {
  const json j = parse_json(json_text, "reduced vocabulary");
  ReducedVocabulary out;
  try {
    out.parent_hash = j.at("parent_vocab_hash").get<std::string>();
    out.parent_size = j.at("parent_size").get<std::size_t>();
    if (out.parent_hash != parent.hash() || out.parent_size != parent.size())
      throw FormatError("reduced vocabulary was built for a different parent vocabulary");
    for (const auto& t : j.at("selected"))
      out.selected.push_back(parent.index_of(t.get<std::string>()));
  } catch (const json::exception& e) {
    throw FormatError(std::string("reduced vocabulary: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// TagBook files

std::string encode_tagbooks(const TagBookFile& file) {
  std::vector<json> lines;
  lines.push_back({{"vocab_hash", file.header.vocab_hash},
                   {"m", file.header.m},
                   {"variant", file.header.variant},
                   {"k", file.header.k}});
  for (const auto& [id, vector] : file.entries)
    lines.push_back({{"id", id}, {"tagbook", vector}});
  return lines_to_text(lines);
}

TagBookFile read_tagbooks(const fs::path& path) {
  TagBookFile file;
  bool header_seen = false;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    const std::string where = path.string() + ":" + std::to_string(line);
    const json j = parse_json(text, where);
    try {
      if (!header_seen) {
        if (j.contains("id"))
          throw FormatError(where + ": missing TagBook header line");
        file.header.vocab_hash = j.at("vocab_hash").get<std::string>();
        file.header.m = j.at("m").get<std::size_t>();
        file.header.variant = j.value("variant", std::string{});
        file.header.k = j.value("k", std::size_t{0});
        header_seen = true;
        return;
      }
      TagBookEntry entry{j.at("id").get<std::string>(), j.at("tagbook").get<std::vector<double>>()};
      if (entry.second.size() != file.header.m)
        throw DimensionMismatch(where + ": TagBook of '" + entry.first + "' has length " +
                                std::to_string(entry.second.size()) + ", header says " +
                                std::to_string(file.header.m));
      file.entries.push_back(std::move(entry));
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  });
  if (!header_seen)
    throw FormatError(path.string() + ": empty TagBook file");
  return file;
}

} // namespace tagbook
