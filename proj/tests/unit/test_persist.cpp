#include <doctest.h>

#include "oracles.hpp"
#include "tempdir.hpp"

#include "tagbook/persist.hpp"
#include "tagbook/reduce.hpp"

#include <random>

using namespace tagbook;
using testing_support::TempDir;

TEST_CASE("relevance matrix binary layout") {
  RelevanceMatrix r(2, 3, {1, -2, 0.5, 0, 3, -0.25});
  const auto bytes = encode_relevance(r);
  CHECK(bytes.size() == 4 + 4 + 8 + 8 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "TBRM");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);
  CHECK(static_cast<unsigned char>(bytes[16]) == 3);
  // 1.0f little-endian
  CHECK(static_cast<unsigned char>(bytes[24 + 3]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[24 + 2]) == 0x80);
  CHECK(decode_relevance(bytes) == r);

  CHECK_THROWS_AS(decode_relevance("XXXX"), FormatError);
  CHECK_THROWS_AS(decode_relevance(bytes.substr(0, bytes.size() - 1)), FormatError);
  auto wrong_version = bytes;
  wrong_version[4] = 9;
  CHECK_THROWS_AS(decode_relevance(wrong_version), FormatError);
}

TEST_CASE("relevance round-trips to the float-quantized matrix") {
  std::mt19937_64 rng(2);
  TempDir dir;
  const auto corpus = oracle::random_corpus(rng, 15, 6, 3);
  const auto r = oracle::random_relevance(rng, 15, 6);
  save_relevance(r, corpus, dir.path());
  const auto back = load_relevance(dir.path(), corpus);
  CHECK(back == r.quantized());
  CHECK(back.quantized() == back);

  save_corpus(corpus, dir / "c");
  save_relevance(r, corpus, dir / "c");
  const auto loaded = load_corpus_dir(dir / "c");
  REQUIRE(loaded.refined());
  CHECK(*loaded.refined() == r.quantized());

  const auto other = oracle::random_corpus(rng, 15, 6, 3);
  CHECK_THROWS(load_relevance(dir.path(), other));
}

TEST_CASE("pca model round-trip") {
  std::mt19937_64 rng(3);
  std::vector<TagVector> data;
  for (int i = 0; i < 10; ++i)
    data.push_back(oracle::random_vector(rng, 6));
  const auto model = pca_fit(data, 4);
  const auto bytes = encode_pca(model);
  CHECK(bytes.substr(0, 4) == "TBPC");
  CHECK(decode_pca(bytes) == model);
  CHECK_THROWS_AS(decode_pca(bytes.substr(0, 20)), FormatError);
}

TEST_CASE("event model round-trip") {
  EventModel zero{"E1", {0, 1, 0.25}, EventMode::zero, std::nullopt, "abc"};
  CHECK(decode_model(encode_model(zero)) == zero);
  EventModel few{"E2", {-1e-300, 3.5, 1.0 / 3}, EventMode::few, SvmHyper{0.01, 7, 99, true}, "def"};
  CHECK(decode_model(encode_model(few)) == few);
  CHECK_THROWS_AS(decode_model("{\"event_id\": 1}"), FormatError);
}

TEST_CASE("reduced vocabulary round-trip") {
  const TagVocabulary parent({"aa", "bb", "cc"});
  ReducedVocabulary r{{0, 2}, 3, parent.hash()};
  CHECK(decode_reduced(encode_reduced(r, parent), parent) == r);
  CHECK_THROWS(decode_reduced(encode_reduced(r, parent), TagVocabulary({"aa", "bb", "zz"})));
}

TEST_CASE("tagbook file round-trip") {
  TempDir dir;
  TagBookFile file{{"hash", 2, "soft", 10}, {{"v1", {0.1, -0.2}}, {"v2", {1.0 / 3, 0}}}};
  const auto path = dir.write("books.jsonl", encode_tagbooks(file));
  const auto back = read_tagbooks(path);
  CHECK(back.header.vocab_hash == "hash");
  CHECK(back.header.m == 2);
  CHECK(back.header.variant == "soft");
  CHECK(back.header.k == 10);
  CHECK(back.entries == file.entries);
  dir.write("bad.jsonl", encode_tagbooks(file) + "{\"id\":\"v3\",\"tagbook\":[1]}\n");
  CHECK_THROWS(read_tagbooks(dir / "bad.jsonl"));
}

TEST_CASE("atomic writes leave no temporary files") {
  TempDir dir;
  write_file_atomic(dir / "x.txt", "hello");
  write_file_atomic(dir / "x.txt", "again");
  CHECK(read_file(dir / "x.txt") == "again");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path()))
    ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(read_file(dir / "missing"), IoError);
}
