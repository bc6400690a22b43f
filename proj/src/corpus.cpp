#include "tailsearch/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "tailsearch/errors.hpp"

namespace tailsearch {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

// Term frequencies of one text, ordered by term.
std::map<Term, std::size_t> term_counts(std::string_view text, const StopwordSet& stopwords) {
  std::map<Term, std::size_t> counts;
  for (auto& term : tokenize(text, stopwords)) ++counts[std::move(term)];
  return counts;
}

std::vector<TermWeight> weigh(const std::map<Term, std::size_t>& counts,
                              const CorpusStats& stats) {
  std::vector<TermWeight> weights;
  weights.reserve(counts.size());
  for (const auto& [term, tf] : counts) {
    weights.push_back({term, tf_idf(tf, stats.n_docs, stats.df(term))});
  }
  return weights;
}

}  // namespace

std::size_t CorpusStats::df(const Term& term) const {
  auto it = doc_freq.find(term);
  return it == doc_freq.end() ? 0 : it->second;
}

double CorpusStats::idf(const Term& term) const {
  return std::log(static_cast<double>(n_docs) / static_cast<double>(df(term) + 1)) + 1.0;
}

std::vector<Term> tokenize(std::string_view text, const StopwordSet& stopwords) {
  std::vector<Term> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!stopwords.contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

CorpusStats build_corpus_stats(std::span<const RawDocument> docs, const StopwordSet& stopwords) {
  if (docs.empty()) throw Error("corpus is empty");
  CorpusStats stats;
  stats.n_docs = docs.size();
  std::unordered_set<std::string> ids;
  ids.reserve(docs.size());
  for (const auto& doc : docs) {
    if (!ids.insert(doc.id).second) throw DuplicateIdError(doc.id);
    for (const auto& [term, tf] : term_counts(doc.text, stopwords)) ++stats.doc_freq[term];
  }
  return stats;
}

double tf_idf(std::size_t tf, std::size_t n_docs, std::size_t doc_freq) {
  const double idf =
      std::log(static_cast<double>(n_docs) / static_cast<double>(doc_freq + 1)) + 1.0;
  return std::sqrt(static_cast<double>(tf)) * idf;
}

WeightedDocument weight_document(const RawDocument& doc, const CorpusStats& stats,
                                 const StopwordSet& stopwords) {
  auto counts = term_counts(doc.text, stopwords);
  if (counts.empty()) throw UnindexableDocumentError(doc.id);
  WeightedDocument out{doc.id, weigh(counts, stats), 0.0};
  double sq = 0.0;
  for (const auto& tw : out.weights) sq += tw.weight * tw.weight;
  out.norm = std::sqrt(sq);
  return out;
}

QueryVector weight_query(const RawDocument& query, const CorpusStats& stats,
                         const StopwordSet& stopwords) {
  return {query.id, weigh(term_counts(query.text, stopwords), stats)};
}

std::vector<WeightedDocument> weight_corpus(std::span<const RawDocument> docs,
                                            const CorpusStats& stats,
                                            const StopwordSet& stopwords) {
  std::vector<WeightedDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(weight_document(doc, stats, stopwords));
  return out;
}

std::vector<RawDocument> parse_corpus(std::istream& in) {
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(line_no, "record is not an object");
    auto id = record.find("id");
    auto text = record.find("text");
    if (id == record.end() || !id->is_string())
      throw ParseError(line_no, "missing string field 'id'");
    if (text == record.end() || !text->is_string())
      throw ParseError(line_no, "missing string field 'text'");
    if (id->get_ref<const std::string&>().empty()) throw ParseError(line_no, "empty 'id'");
    docs.push_back({id->get<std::string>(), text->get<std::string>()});
  }
  return docs;
}

std::vector<RawDocument> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const RawDocument> docs) {
  for (const auto& doc : docs) {
    out << nlohmann::json{{"id", doc.id}, {"text", doc.text}}.dump() << '\n';
  }
}

std::vector<RawDocument> generate_synthetic_corpus(const SyntheticCorpusParams& params) {
  if (params.n_docs < 1) throw Error("synthetic corpus: n_docs must be >= 1");
  if (params.vocab_size < 1) throw Error("synthetic corpus: vocab_size must be >= 1");
  if (params.n_clusters < 1) throw Error("synthetic corpus: n_clusters must be >= 1");
  if (!(params.doc_len_mean > 0.0)) throw Error("synthetic corpus: doc_len_mean must be > 0");
  if (params.core_share < 0.0 || params.core_share > 1.0)
    throw Error("synthetic corpus: core_share must be in [0, 1]");

  std::mt19937_64 rng(params.seed);
  const std::size_t core_size = std::clamp<std::size_t>(params.core_size, 1, params.vocab_size);

  auto zipf_weights = [](std::size_t count) {
    std::vector<double> w(count);
    for (std::size_t i = 0; i < count; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
    return w;
  };

  // Background rank order is a random permutation so that cluster cores and
  // globally frequent terms are not systematically aligned.
  std::vector<std::size_t> background_order(params.vocab_size);
  std::iota(background_order.begin(), background_order.end(), 0);
  std::shuffle(background_order.begin(), background_order.end(), rng);
  auto background_weights = zipf_weights(params.vocab_size);
  std::discrete_distribution<std::size_t> background(background_weights.begin(),
                                                     background_weights.end());

  std::vector<std::vector<std::size_t>> cores(params.n_clusters);
  for (auto& core : cores) {
    std::vector<std::size_t> all(params.vocab_size);
    std::iota(all.begin(), all.end(), 0);
    std::sample(all.begin(), all.end(), std::back_inserter(core), core_size, rng);
    std::shuffle(core.begin(), core.end(), rng);
  }
  auto core_weights = zipf_weights(core_size);
  std::discrete_distribution<std::size_t> core_pick(core_weights.begin(), core_weights.end());

  std::uniform_int_distribution<std::size_t> cluster_pick(0, params.n_clusters - 1);
  std::poisson_distribution<std::size_t> length_pick(params.doc_len_mean);
  std::bernoulli_distribution from_core(params.core_share);

  const std::size_t width = std::to_string(params.n_docs - 1).size();
  std::vector<RawDocument> docs;
  docs.reserve(params.n_docs);
  for (std::size_t d = 0; d < params.n_docs; ++d) {
    const auto& core = cores[cluster_pick(rng)];
    const std::size_t len = std::max<std::size_t>(1, length_pick(rng));
    std::string text;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t term =
          from_core(rng) ? core[core_pick(rng)] : background_order[background(rng)];
      if (!text.empty()) text.push_back(' ');
      text += 'w';
      text += std::to_string(term);
    }
    std::string id = std::to_string(d);
    id.insert(0, width - id.size(), '0');
    docs.push_back({"d" + id, std::move(text)});
  }
  return docs;
}

}  // namespace tailsearch
