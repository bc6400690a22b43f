#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "support.hpp"
#include "tailsearch/errors.hpp"
#include "tailsearch/retrieval.hpp"

using namespace tailsearch;

namespace {

// Scores every document directly from its sparse vector.
std::vector<ScoredResult> brute_force(std::span<const WeightedDocument> docs,
                                      const QueryVector& q) {
  std::map<Term, double> qw;
  for (const auto& tw : q.weights) qw[tw.term] = tw.weight;
  std::vector<ScoredResult> out;
  for (const auto& d : docs) {
    double dot = 0.0;
    bool hit = false;
    for (const auto& [term, w] : qw) {
      for (const auto& tw : d.weights) {
        if (tw.term == term) {
          dot += w * tw.weight;
          hit = true;
        }
      }
    }
    if (hit) out.push_back({d.id, dot / d.norm});
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

}  // namespace

TEST_CASE("empty index returns nothing") {
  InvertedIndex idx;
  CHECK(idx.empty());
  CHECK(idx.search({"q", {{"a", 1.0}}}, 10).empty());
}

TEST_CASE("hand-evaluated score") {
  // doc {a: tf 2, b: tf 1}; N_d = 4, df(a) = 1, df(b) = 2
  std::vector<RawDocument> raw = {{"d", "a a b"}, {"e", "b"}, {"f", "c"}, {"g", "c"}};
  auto stats = build_corpus_stats(raw);
  auto docs = weight_corpus(raw, stats);
  auto idx = build_index(docs);
  auto q = weight_query({"q", "a b"}, stats);
  auto res = search(idx, q, 10);
  REQUIRE(res.size() == 2);
  CHECK(res[0].doc_id == "d");
  CHECK(res[0].score == doctest::Approx(2.1010799313496427).epsilon(1e-13));
  CHECK(res[1].doc_id == "e");

  CHECK(search(idx, weight_query({"q", "zzz"}, stats), 10).empty());
}

TEST_CASE("duplicate ids are rejected by the index") {
  std::vector<WeightedDocument> docs = {{"x", {{"a", 1.0}}, 1.0}, {"x", {{"b", 1.0}}, 1.0}};
  CHECK_THROWS_AS(build_index(docs), DuplicateIdError);
}

TEST_CASE("single document is the only hit") {
  std::vector<WeightedDocument> docs = {{"only", {{"a", 1.0}, {"b", 2.0}}, std::sqrt(5.0)}};
  auto idx = build_index(docs);
  auto res = idx.search({"q", {{"b", 1.0}, {"z", 3.0}}}, 5);
  REQUIRE(res.size() == 1);
  CHECK(res[0].doc_id == "only");
}

TEST_CASE("search agrees with brute-force scoring") {
  auto w = testutil::make_world(400, 11);
  auto idx = build_index(*w.docs);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto& src = w.raw[std::uniform_int_distribution<std::size_t>(0, w.raw.size() - 1)(rng)];
    auto q = weight_query({"q" + std::to_string(i), src.text.substr(0, 40)}, w.stats);
    auto expected = brute_force(*w.docs, q);
    auto got = idx.search(q, kAllResults);
    REQUIRE(got.size() == expected.size());
    for (std::size_t j = 0; j < got.size(); ++j) {
      CHECK(got[j].doc_id == expected[j].doc_id);
      CHECK(got[j].score == doctest::Approx(expected[j].score).epsilon(1e-12));
    }
    auto top = idx.search(q, 10);
    CHECK(std::equal(top.begin(), top.end(), got.begin()));
  }
}

TEST_CASE("ties break by doc id and results are prefixes") {
  std::vector<WeightedDocument> docs;
  for (std::string id : {"c", "a", "b"}) docs.push_back({id, {{"t", 1.0}}, 1.0});
  auto idx = build_index(docs);
  auto res = idx.search({"q", {{"t", 1.0}}}, kAllResults);
  REQUIRE(res.size() == 3);
  CHECK(res[0].doc_id == "a");
  CHECK(res[1].doc_id == "b");
  CHECK(res[2].doc_id == "c");
  auto two = idx.search({"q", {{"t", 1.0}}}, 2);
  CHECK(two == std::vector<ScoredResult>(res.begin(), res.begin() + 2));
}

TEST_CASE("a document scores identically in any index containing it") {
  auto w = testutil::make_world(200, 4);
  auto full = build_index(*w.docs);
  std::vector<WeightedDocument> half(w.docs->begin(), w.docs->begin() + 77);
  auto part = build_index(half);
  auto q = weight_query({"q", w.raw[3].text}, w.stats);
  std::map<std::string, double> full_scores;
  for (const auto& r : full.search(q, kAllResults)) full_scores[r.doc_id] = r.score;
  for (const auto& r : part.search(q, kAllResults)) CHECK(full_scores.at(r.doc_id) == r.score);
}

TEST_CASE("centralized top-m") {
  auto w = testutil::make_world(150, 8);
  auto idx = build_index(*w.docs);
  auto q = weight_query({"q", w.raw[0].text}, w.stats);
  auto a = centralized_topm(idx, q, 20);
  CHECK(a == centralized_topm(idx, q, 20));
  CHECK(a.size() == 20);
  auto all = centralized_topm(idx, q, 100000);
  CHECK(all.size() == idx.search(q, kAllResults).size());
}
