#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "rng.hpp"

namespace aetas::emb {

// Frequency-filtered vocabulary. Words are ordered by descending count,
// ties lexicographic, so indices are stable across runs.
struct Vocabulary {
  std::vector<std::string> words;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::uint64_t> counts;   // raw counts, aligned with words
  std::uint64_t total_tokens = 0;      // raw corpus tokens, before filtering

  std::size_t size() const { return words.size(); }
  std::optional<std::uint32_t> find(std::string_view w) const {
    auto it = index.find(std::string(w));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  std::uint64_t retained_tokens() const;
};

Vocabulary build_vocab(const std::vector<corpus::TokenizedDoc>& docs,
                       std::uint32_t min_count);

// Walker's alias method over non-negative weights; O(1) draws and exact
// probabilities, so the sampled distribution matches the weights up to RNG
// noise alone.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  std::uint32_t draw(rng::Rng& r) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace aetas::emb
