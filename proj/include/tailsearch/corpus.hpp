#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tailsearch {

using Term = std::string;
using StopwordSet = std::unordered_set<std::string>;

struct RawDocument {
  std::string id;
  std::string text;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  std::unordered_map<Term, std::size_t> doc_freq;

  // Number of documents containing `term`; 0 for unseen terms.
  std::size_t df(const Term& term) const;
  double idf(const Term& term) const;
};

struct TermWeight {
  Term term;
  double weight = 0.0;

  friend bool operator==(const TermWeight&, const TermWeight&) = default;
};

// Sparse TF-IDF vector. `weights` is sorted by term and has no duplicates.
struct WeightedDocument {
  std::string id;
  std::vector<TermWeight> weights;
  double norm = 0.0;

  friend bool operator==(const WeightedDocument&, const WeightedDocument&) = default;
};

// Queries carry the same weighting as documents so shard scores are
// comparable at the broker. Weights are sorted by term.
struct QueryVector {
  std::string id;
  std::vector<TermWeight> weights;
};

/// Lowercases ASCII letters and splits on every byte that is not an ASCII
/// letter or digit. Bytes >= 0x80 are kept inside tokens so UTF-8 words
/// survive intact.
std::vector<Term> tokenize(std::string_view text, const StopwordSet& stopwords = {});

/// Throws DuplicateIdError if two documents share an id, and Error on an
/// empty corpus.
CorpusStats build_corpus_stats(std::span<const RawDocument> docs,
                               const StopwordSet& stopwords = {});

/// sqrt(tf) * (ln(n_docs / (doc_freq + 1)) + 1)
double tf_idf(std::size_t tf, std::size_t n_docs, std::size_t doc_freq);

/// Throws UnindexableDocumentError when no terms remain after stopwording.
WeightedDocument weight_document(const RawDocument& doc, const CorpusStats& stats,
                                 const StopwordSet& stopwords = {});

/// Same weighting as weight_document; an empty query yields an empty vector
/// rather than an error.
QueryVector weight_query(const RawDocument& query, const CorpusStats& stats,
                         const StopwordSet& stopwords = {});

std::vector<WeightedDocument> weight_corpus(std::span<const RawDocument> docs,
                                            const CorpusStats& stats,
                                            const StopwordSet& stopwords = {});

// Line-delimited JSON: one {"id": ..., "text": ...} object per line. Blank
// lines are skipped. Malformed records raise ParseError with a 1-based line.
std::vector<RawDocument> parse_corpus(std::istream& in);
std::vector<RawDocument> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const RawDocument> docs);

struct SyntheticCorpusParams {
  std::size_t n_docs = 10000;
  std::size_t vocab_size = 5000;
  std::size_t n_clusters = 8;
  double doc_len_mean = 40.0;
  std::uint64_t seed = 1;
  // Number of terms in each cluster's topical core.
  std::size_t core_size = 20;
  // Probability that a token is drawn from the document's cluster core
  // rather than the corpus-wide background.
  double core_share = 0.85;
};

/// Topic-clustered documents. Each cluster owns a Zipf-weighted core of
/// terms; every token comes from the document's core with probability
/// `core_share`, otherwise from a Zipf background over the whole vocabulary.
std::vector<RawDocument> generate_synthetic_corpus(const SyntheticCorpusParams& params);

}  // namespace tailsearch
