#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "drift.hpp"
#include "linalg.hpp"
#include "sgns.hpp"

namespace aetas::stats {

struct FrequencyRecord {
  std::string word;
  std::string bin_label;
  std::uint64_t count = 0;
  double per_million = 0.0;
};

std::vector<FrequencyRecord> freq_per_million(
    const std::vector<corpus::TimeBin>& bins,
    const std::unordered_map<std::string, const corpus::TokenizedDoc*>& docs_by_id,
    const std::vector<corpus::Target>& targets);

struct FreqRegression {
  linalg::RegressionResult fit;  // [intercept, mean_freq, delta_freq]
  bool log_transform = true;
  std::size_t n_obs = 0;
  std::size_t skipped_zero_freq = 0;  // only with log transform
};

// Drift regressed on mean and delta (log10) per-million frequency across
// each record's span endpoints. Duplicate (word, span) rows from multiple k
// values collapse to one observation.
FreqRegression frequency_regression(const std::vector<drift::DriftRecord>& drift_records,
                                    const std::vector<FrequencyRecord>& freq_records,
                                    bool log_transform = true);

struct TrajectoryPoint {
  std::string word;
  std::string bin_label;
  double x = 0.0;
  double y = 0.0;
};

struct TrajectoryResult {
  std::vector<TrajectoryPoint> points;  // word-major, bins in input order
  std::vector<std::string> skipped;     // focal words present in < 2 bins
};

// Gathers each focal word's aligned vector per bin (plus optional top-n
// neighbor vectors as context rows), then projects everything onto the top
// two principal directions of the collected matrix.
TrajectoryResult trajectory_coordinates(
    const std::vector<emb::EmbeddingSpace>& aligned_spaces,
    const std::vector<std::string>& focal_words, int neighbor_context = 0);

std::string frequency_csv(const std::vector<FrequencyRecord>& rows);
std::string freq_regression_json(const FreqRegression& reg);
std::string trajectories_csv(const TrajectoryResult& result);

}  // namespace aetas::stats
