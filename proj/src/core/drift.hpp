#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "sgns.hpp"

namespace aetas::drift {

struct Neighbor {
  std::string word;
  double score = 0.0;  // cosine to the query word
};

struct DriftRecord {
  std::string word;
  std::string domain;
  std::string start_label;
  std::string end_label;
  int k = 0;
  double drift = 0.0;    // 1 - cos, in [0, 2]
  double overlap = 0.0;  // top-k neighbor Jaccard, in [0, 1]
  std::vector<Neighbor> neighbors_start;
  std::vector<Neighbor> neighbors_end;
};

struct SkippedTarget {
  std::string word;
  std::string start_label;
  std::string end_label;
  std::string reason;
};

struct DriftTable {
  std::vector<DriftRecord> records;  // sorted by (word, start, end, k)
  std::vector<SkippedTarget> skipped;
};

struct PivotBaselineRecord {
  std::string word;
  std::string start_label;
  std::string end_label;
  std::size_t n_pivots = 0;
  double jaccard_top_m = 0.0;
  double spearman = 0.0;
};

struct TemporalNormRecord {
  std::string word;
  std::string bin_label;
  std::string anchor_label;
  double norm = 0.0;
};

// 1 - cos between the word's vectors; callers pass anchor-aligned spaces.
double cosine_drift(const emb::EmbeddingSpace& a, const emb::EmbeddingSpace& b,
                    std::string_view word);

// Exhaustive search, query excluded, descending cosine with lexicographic
// tie-break. Requires k < |V|.
std::vector<Neighbor> top_k_neighbors(const emb::EmbeddingSpace& space,
                                      std::string_view word, std::size_t k);

double neighbor_jaccard(const emb::EmbeddingSpace& a, const emb::EmbeddingSpace& b,
                        std::string_view word, std::size_t k);

// One record per (target, span, k); targets missing from either endpoint
// space land in the skipped list instead of aborting the table.
DriftTable drift_table(const std::vector<emb::EmbeddingSpace>& aligned_spaces,
                       const std::vector<corpus::Target>& targets,
                       const std::vector<std::pair<std::string, std::string>>& spans,
                       const std::vector<int>& k_list);

// Rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Alignment-free second-order comparison: similarity profiles against the
// top-n_pivots shared words by summed relative frequency (target excluded).
PivotBaselineRecord pivot_baseline(const emb::EmbeddingSpace& a,
                                   const emb::EmbeddingSpace& b, std::string_view word,
                                   std::size_t n_pivots = 500, std::size_t top_m = 50);

// Euclidean distance between a word's aligned vector and its anchor vector.
double temporal_norm(const emb::EmbeddingSpace& aligned,
                     const emb::EmbeddingSpace& anchor, std::string_view word);

std::string drift_csv(const DriftTable& table);
std::string skipped_csv(const DriftTable& table);
std::string neighbors_json(const DriftTable& table);
std::string pivot_csv(const std::vector<PivotBaselineRecord>& records);
std::string norms_csv(const std::vector<TemporalNormRecord>& records);

}  // namespace aetas::drift
