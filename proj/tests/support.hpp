#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tailsearch/corpus.hpp"
#include "tailsearch/partition.hpp"
#include "tailsearch/selection.hpp"
#include "tailsearch/shard_index.hpp"

namespace testutil {

using namespace tailsearch;

struct SmallWorld {
  std::vector<RawDocument> raw;
  CorpusStats stats;
  SharedDocuments docs;
};

inline SmallWorld make_world(std::size_t n_docs, std::uint64_t seed, std::size_t clusters = 4) {
  SyntheticCorpusParams params;
  params.n_docs = n_docs;
  params.vocab_size = 400;
  params.n_clusters = clusters;
  params.doc_len_mean = 20;
  params.seed = seed;
  SmallWorld w;
  w.raw = generate_synthetic_corpus(params);
  w.stats = build_corpus_stats(w.raw);
  w.docs = std::make_shared<const std::vector<WeightedDocument>>(weight_corpus(w.raw, w.stats));
  return w;
}

// Random distribution over n shards; some entries may be exactly zero.
inline SuccessDistribution random_distribution(std::size_t n, std::mt19937_64& rng,
                                               bool allow_zero = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& x : p) {
    x = u(rng);
    x = x * x * x;  // skew
    if (allow_zero && u(rng) < 0.15) x = 0.0;
    sum += x;
  }
  if (sum == 0.0) {
    p[0] = 1.0;
    sum = 1.0;
  }
  for (auto& x : p) x /= sum;
  return {p};
}

inline RawDocument query(const std::string& id, const std::string& text) { return {id, text}; }

}  // namespace testutil
