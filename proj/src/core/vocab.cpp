#include "vocab.hpp"

#include <algorithm>
#include <map>

#include "util.hpp"

namespace aetas::emb {

std::uint64_t Vocabulary::retained_tokens() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

Vocabulary build_vocab(const std::vector<corpus::TokenizedDoc>& docs,
                       std::uint32_t min_count) {
  if (docs.empty()) throw DataError("build_vocab: no documents");
  std::unordered_map<std::string, std::uint64_t> raw;
  std::uint64_t total = 0;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) {
      ++raw[t];
      ++total;
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> retained;
  for (auto& [w, c] : raw)
    if (c >= min_count) retained.emplace_back(w, c);
  if (retained.empty()) throw DataError("build_vocab: empty vocabulary after min_count filter");
  std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.total_tokens = total;
  v.words.reserve(retained.size());
  v.counts.reserve(retained.size());
  for (std::uint32_t i = 0; i < retained.size(); ++i) {
    v.index.emplace(retained[i].first, i);
    v.words.push_back(std::move(retained[i].first));
    v.counts.push_back(retained[i].second);
  }
  return v;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw DataError("alias table: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DataError("alias table: negative weight");
    sum += w;
  }
  if (sum <= 0.0) throw DataError("alias table: all weights zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    scaled[i] = weights[i] * static_cast<double>(n) / sum;

  std::vector<std::uint32_t> small, large;
  for (std::uint32_t i = 0; i < n; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(i);

  while (!small.empty() && !large.empty()) {
    std::uint32_t s = small.back();
    small.pop_back();
    std::uint32_t l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::uint32_t i : large) prob_[i] = 1.0;
  for (std::uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

std::uint32_t AliasTable::draw(rng::Rng& r) const {
  std::uint32_t slot = static_cast<std::uint32_t>(r.below(prob_.size()));
  return (r.next_double() < prob_[slot]) ? slot : alias_[slot];
}

}  // namespace aetas::emb
