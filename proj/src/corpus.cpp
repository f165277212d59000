#include "tagbook/corpus.hpp"

#include "tagbook/persist.hpp"
#include "tagbook/simsearch.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

namespace tagbook {

using json = nlohmann::json;

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool has_space_or_upper(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
           (c >= 'A' && c <= 'Z');
  });
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

FeatureVector parse_vector(const json& j, const std::filesystem::path& path, std::size_t line) {
  if (!j.is_array())
    throw FormatError(where(path, line) + "feature must be an array of numbers");
  FeatureVector v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number())
      throw FormatError(where(path, line) + "feature must be an array of numbers");
    const double value = x.get<double>();
    if (!std::isfinite(value))
      throw FormatError(where(path, line) + "non-finite feature value");
    v.push_back(value);
  }
  return v;
}

} // namespace

// ---------------------------------------------------------------------------
// TagVocabulary

TagVocabulary::TagVocabulary(std::vector<std::string> tags) : tags_(std::move(tags)) {
  index_.reserve(tags_.size());
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    const auto& t = tags_[i];
    if (t.empty() || has_space_or_upper(t))
      throw InvalidArgument("invalid vocabulary tag '" + t + "'");
    if (!index_.emplace(t, i).second)
      throw InvalidArgument("duplicate vocabulary tag '" + t + "'");
  }
}

std::optional<std::size_t> TagVocabulary::find(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

std::size_t TagVocabulary::index_of(std::string_view tag) const {
  if (auto i = find(tag))
    return *i;
  throw UnknownTag("unknown tag '" + std::string(tag) + "'");
}

std::string TagVocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (i > 0)
      mix('\n');
    for (char c : tags_[i])
      mix(static_cast<unsigned char>(c));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// RelevanceMatrix

RelevanceMatrix::RelevanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_)
    throw DimensionMismatch("relevance matrix payload does not match its shape");
  for (double v : values_)
    if (!std::isfinite(v))
      throw InvalidArgument("relevance matrix entries must be finite");
}

RelevanceMatrix RelevanceMatrix::quantized() const {
  RelevanceMatrix out = *this;
  for (double& v : out.values_)
    v = static_cast<double>(static_cast<float>(v));
  return out;
}

// ---------------------------------------------------------------------------
// SourceCorpus

SourceCorpus SourceCorpus::create(std::vector<VideoRecord> videos, TagVocabulary vocabulary) {
  if (videos.empty())
    throw EmptyInput("source corpus needs at least one video");
  SourceCorpus c;
  c.dim_ = videos.front().feature.size();
  if (c.dim_ == 0)
    throw DimensionMismatch("feature dimension must be positive");
  const std::size_t n = videos.size();
  c.ids_.reserve(n);
  c.index_.reserve(n);
  c.features_.reserve(n * c.dim_);
  c.norms_.reserve(n);
  c.tags_.resize(n);
  c.df_.assign(vocabulary.size(), 0);

  for (std::size_t i = 0; i < n; ++i) {
    auto& v = videos[i];
    if (v.id.empty())
      throw InvalidArgument("video ids must be non-empty");
    if (!c.index_.emplace(v.id, i).second)
      throw DuplicateId("duplicate video id '" + v.id + "'");
    if (v.feature.size() != c.dim_)
      throw DimensionMismatch("video '" + v.id + "' has dimension " +
                              std::to_string(v.feature.size()) + ", expected " +
                              std::to_string(c.dim_));
    for (double x : v.feature)
      if (!std::isfinite(x))
        throw InvalidArgument("video '" + v.id + "' has a non-finite feature value");
    c.features_.insert(c.features_.end(), v.feature.begin(), v.feature.end());
    c.norms_.push_back(l2_norm(v.feature));

    auto& tags = c.tags_[i];
    for (const auto& t : v.tags)
      if (auto idx = vocabulary.find(t))
        tags.push_back(static_cast<std::uint32_t>(*idx));
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    for (auto t : tags)
      ++c.df_[t];
    c.ids_.push_back(std::move(v.id));
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return c.ids_[a] < c.ids_[b]; });
  c.id_rank_.resize(n);
  for (std::uint32_t r = 0; r < n; ++r)
    c.id_rank_[order[r]] = r;

  c.vocabulary_ = std::move(vocabulary);
  return c;
}

SourceCorpus SourceCorpus::with_refined(RelevanceMatrix refined) const& {
  SourceCorpus copy = *this;
  return std::move(copy).with_refined(std::move(refined));
}

SourceCorpus SourceCorpus::with_refined(RelevanceMatrix refined) && {
  if (refined.rows() != size() || refined.cols() != vocabulary_.size())
    throw DimensionMismatch("relevance matrix is " + std::to_string(refined.rows()) + "x" +
                            std::to_string(refined.cols()) + ", corpus is " +
                            std::to_string(size()) + "x" + std::to_string(vocabulary_.size()));
  refined_ = std::move(refined);
  return std::move(*this);
}

std::optional<std::size_t> SourceCorpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

std::size_t SourceCorpus::index_of(std::string_view id) const {
  if (auto i = find(id))
    return *i;
  throw UnknownVideo("unknown video '" + std::string(id) + "'");
}

Annotation SourceCorpus::annotation(std::size_t i) const {
  Annotation a{ids_[i], {}};
  for (auto t : tags_[i])
    a.tags.push_back(vocabulary_[t]);
  return a;
}

bool operator==(const SourceCorpus& a, const SourceCorpus& b) {
  return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.features_ == b.features_ &&
         a.tags_ == b.tags_ && a.vocabulary_ == b.vocabulary_ && a.refined_ == b.refined_;
}

// ---------------------------------------------------------------------------
// Operations

std::vector<std::string> tokenize_caption(std::string_view text, const Stoplist& stoplist) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && code_points(token) >= 2 && !stoplist.contains(token) &&
        seen.insert(token).second)
      out.push_back(token);
    token.clear();
  };
  for (char c : text) {
    if (is_word_byte(static_cast<unsigned char>(c)))
      token.push_back(ascii_lower(c));
    else
      flush();
  }
  flush();
  return out;
}

TagVocabulary build_vocabulary(std::span<const Annotation> annotations, std::size_t min_df) {
  if (annotations.empty())
    throw EmptyInput("build_vocabulary needs at least one annotation");
  if (min_df == 0)
    throw InvalidArgument("min_df must be positive");
  std::map<std::string, std::size_t> df;
  for (const auto& a : annotations) {
    std::unordered_set<std::string_view> distinct(a.tags.begin(), a.tags.end());
    for (auto t : distinct)
      ++df[std::string(t)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tag, count] : df)
    if (count >= min_df)
      kept.emplace_back(tag, count);
  if (kept.empty())
    throw EmptyVocabulary("no tag reaches min_df = " + std::to_string(min_df));
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tags;
  tags.reserve(kept.size());
  for (auto& [tag, count] : kept)
    tags.push_back(std::move(tag));
  return TagVocabulary(std::move(tags));
}

int binary_label(const SourceCorpus& corpus, std::string_view video, std::string_view tag) {
  const std::size_t v = corpus.index_of(video);
  const auto t = static_cast<std::uint32_t>(corpus.vocabulary().index_of(tag));
  const auto tags = corpus.tag_indices(v);
  return std::binary_search(tags.begin(), tags.end(), t) ? 1 : 0;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open stoplist " + path.string());
  Stoplist out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::string word = line.substr(b, e - b + 1);
    std::transform(word.begin(), word.end(), word.begin(), ascii_lower);
    out.insert(std::move(word));
  }
  return out;
}

std::vector<FeatureRow> read_feature_file(const std::filesystem::path& path) {
  std::vector<FeatureRow> rows;
  std::optional<std::size_t> dim;
  bool first = true;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(where(path, line) + "malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object())
      throw FormatError(where(path, line) + "expected a JSON object");
    const bool is_first = first;
    first = false;
    if (is_first && j.contains("dim") && !j.contains("id")) {
      if (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0)
        throw FormatError(where(path, line) + "header dim must be a positive integer");
      dim = j["dim"].get<std::size_t>();
      return;
    }
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
      throw FormatError(where(path, line) + "missing string field 'id'");
    FeatureRow row{j["id"].get<std::string>(), {}};
    if (j.contains("feature")) {
      row.feature = parse_vector(j["feature"], path, line);
    } else if (j.contains("frames")) {
      const auto& frames_json = j["frames"];
      if (!frames_json.is_array())
        throw FormatError(where(path, line) + "'frames' must be an array of arrays");
      std::vector<FeatureVector> frames;
      for (const auto& f : frames_json)
        frames.push_back(parse_vector(f, path, line));
      try {
        row.feature = average_pool_frames(frames);
      } catch (const DimensionMismatch&) {
        throw DimensionMismatch(where(path, line) + "frames of '" + row.id +
                                "' have differing dimensions");
      } catch (const EmptyInput&) {
        throw FormatError(where(path, line) + "'frames' of '" + row.id + "' is empty");
      }
    } else {
      throw FormatError(where(path, line) + "record needs 'feature' or 'frames'");
    }
    if (!dim)
      dim = row.feature.size();
    if (row.feature.size() != *dim)
      throw DimensionMismatch(where(path, line) + "video '" + row.id + "' has dimension " +
                              std::to_string(row.feature.size()) + ", expected " +
                              std::to_string(*dim));
    rows.push_back(std::move(row));
  });
  return rows;
}

std::vector<Annotation> read_annotation_file(const std::filesystem::path& path,
                                             const Stoplist& stoplist) {
  std::vector<Annotation> out;
  for_each_line(path, [&](std::size_t line, const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(where(path, line) + "malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
      throw FormatError(where(path, line) + "missing string field 'id'");
    Annotation a{j["id"].get<std::string>(), {}};
    if (j.contains("tags")) {
      if (!j["tags"].is_array())
        throw FormatError(where(path, line) + "'tags' must be an array of strings");
      std::unordered_set<std::string> seen;
      for (const auto& t : j["tags"]) {
        if (!t.is_string())
          throw FormatError(where(path, line) + "'tags' must be an array of strings");
        std::string tag = t.get<std::string>();
        std::transform(tag.begin(), tag.end(), tag.begin(), ascii_lower);
        if (tag.empty() || stoplist.contains(tag))
          continue;
        if (has_space_or_upper(tag))
          throw FormatError(where(path, line) + "tag '" + tag + "' contains whitespace");
        if (seen.insert(tag).second)
          a.tags.push_back(std::move(tag));
      }
    } else if (j.contains("caption")) {
      if (!j["caption"].is_string())
        throw FormatError(where(path, line) + "'caption' must be a string");
      a.tags = tokenize_caption(j["caption"].get<std::string>(), stoplist);
    } else {
      throw FormatError(where(path, line) + "record needs 'caption' or 'tags'");
    }
    out.push_back(std::move(a));
  });
  return out;
}

SourceCorpus load_corpus(const std::filesystem::path& feature_file,
                         const std::filesystem::path& annotation_file,
                         const std::optional<std::filesystem::path>& stoplist_file,
                         std::size_t min_df) {
  const Stoplist stoplist = stoplist_file ? load_stoplist(*stoplist_file) : Stoplist{};
  auto rows = read_feature_file(feature_file);
  auto annotations = read_annotation_file(annotation_file, stoplist);

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!row_of.emplace(rows[i].id, i).second)
      throw DuplicateId(feature_file.string() + ": duplicate video id '" + rows[i].id + "'");

  std::vector<std::vector<std::string>> tags(rows.size());
  std::vector<bool> annotated(rows.size(), false);
  for (auto& a : annotations) {
    auto it = row_of.find(a.video);
    if (it == row_of.end())
      throw MissingFeature("annotation for '" + a.video + "' has no feature vector");
    if (annotated[it->second])
      throw DuplicateId(annotation_file.string() + ": duplicate annotation for '" + a.video +
                        "'");
    annotated[it->second] = true;
    tags[it->second] = a.tags;
  }

  TagVocabulary vocabulary = build_vocabulary(annotations, min_df);
  std::vector<VideoRecord> videos;
  videos.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    videos.push_back({std::move(rows[i].id), std::move(rows[i].feature), std::move(tags[i])});
  return SourceCorpus::create(std::move(videos), std::move(vocabulary));
}

} // namespace tagbook
