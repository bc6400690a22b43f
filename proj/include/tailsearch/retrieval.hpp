#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tailsearch/corpus.hpp"

namespace tailsearch {

inline constexpr std::size_t kAllResults = std::numeric_limits<std::size_t>::max();

struct ScoredResult {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredResult&, const ScoredResult&) = default;
};

// Canonical result order: score descending, then doc id ascending.
inline bool ranks_before(const ScoredResult& a, const ScoredResult& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

// In-memory inverted index scored by dot(query, doc) / |doc|.
//
// The per-document accumulation visits query terms in the query's (sorted)
// order, so a document receives bit-identical scores from every index that
// contains it. Broker-side merging relies on this.
class InvertedIndex {
 public:
  struct Posting {
    std::uint32_t slot;
    double weight;
  };

  InvertedIndex() = default;
  // Throws DuplicateIdError.
  explicit InvertedIndex(std::span<const WeightedDocument> docs);

  /// Top-k documents, at most k; pass kAllResults for a full ranking.
  std::vector<ScoredResult> search(const QueryVector& query, std::size_t k) const;

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  bool contains(const std::string& doc_id) const { return slot_of_.contains(doc_id); }
  double norm(const std::string& doc_id) const;
  // Doc ids in slot order, which is ascending id order.
  const std::vector<std::string>& doc_ids() const noexcept { return ids_; }
  const std::vector<Posting>* postings(const Term& term) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::uint32_t> slot_of_;
  std::unordered_map<Term, std::vector<Posting>> postings_;
};

InvertedIndex build_index(std::span<const WeightedDocument> docs);

std::vector<ScoredResult> search(const InvertedIndex& index, const QueryVector& query,
                                 std::size_t k);

// The centralized top-m doc ids, in rank order.
std::vector<std::string> centralized_topm(const InvertedIndex& full_index,
                                          const QueryVector& query, std::size_t m);

}  // namespace tailsearch
