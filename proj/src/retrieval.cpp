#include "tailsearch/retrieval.hpp"

#include <algorithm>
#include <numeric>

#include "tailsearch/errors.hpp"

namespace tailsearch {

InvertedIndex::InvertedIndex(std::span<const WeightedDocument> docs) {
  std::vector<const WeightedDocument*> order;
  order.reserve(docs.size());
  for (const auto& d : docs) order.push_back(&d);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });

  ids_.reserve(order.size());
  norms_.reserve(order.size());
  slot_of_.reserve(order.size());
  for (const auto* doc : order) {
    const auto slot = static_cast<std::uint32_t>(ids_.size());
    if (!slot_of_.emplace(doc->id, slot).second) throw DuplicateIdError(doc->id);
    ids_.push_back(doc->id);
    norms_.push_back(doc->norm);
    // Slots increase monotonically, so every postings list stays sorted.
    for (const auto& tw : doc->weights) postings_[tw.term].push_back({slot, tw.weight});
  }
}

double InvertedIndex::norm(const std::string& doc_id) const {
  auto it = slot_of_.find(doc_id);
  if (it == slot_of_.end()) throw Error("document '" + doc_id + "' not in index");
  return norms_[it->second];
}

const std::vector<InvertedIndex::Posting>* InvertedIndex::postings(const Term& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

std::vector<ScoredResult> InvertedIndex::search(const QueryVector& query,
                                                std::size_t k) const {
  if (k == 0 || ids_.empty()) return {};

  std::vector<double> acc(ids_.size(), 0.0);
  std::vector<char> seen(ids_.size(), 0);
  std::vector<std::uint32_t> hits;
  for (const auto& tw : query.weights) {
    const auto* list = postings(tw.term);
    if (list == nullptr) continue;
    for (const auto& p : *list) {
      if (!seen[p.slot]) {
        seen[p.slot] = 1;
        hits.push_back(p.slot);
      }
      acc[p.slot] += tw.weight * p.weight;
    }
  }

  std::vector<double> score(ids_.size(), 0.0);
  for (auto slot : hits) score[slot] = acc[slot] / norms_[slot];
  // Slot order equals doc id order, so ties can be broken on slots.
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  };
  const std::size_t take = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take),
                    hits.end(), better);

  std::vector<ScoredResult> results;
  results.reserve(take);
  for (std::size_t i = 0; i < take; ++i) results.push_back({ids_[hits[i]], score[hits[i]]});
  return results;
}

InvertedIndex build_index(std::span<const WeightedDocument> docs) { return InvertedIndex(docs); }

std::vector<ScoredResult> search(const InvertedIndex& index, const QueryVector& query,
                                 std::size_t k) {
  return index.search(query, k);
}

std::vector<std::string> centralized_topm(const InvertedIndex& full_index,
                                          const QueryVector& query, std::size_t m) {
  std::vector<std::string> ids;
  for (auto& r : full_index.search(query, m)) ids.push_back(std::move(r.doc_id));
  return ids;
}

}  // namespace tailsearch
