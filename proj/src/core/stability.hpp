#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "sgns.hpp"

namespace aetas::stability {

struct SplitHalfConfig {
  int n_repeats = 20;
  std::uint64_t rng_seed = 42;
  // Control knobs for the identical-data experiment: a deterministic
  // alternating split sends sorted docs 0,2,4,... to one half and 1,3,5,...
  // to the other (so a corpus holding every doc twice yields two identical
  // halves), and identical_half_seeds trains both halves from the same seed.
  bool alternate_split = false;
  bool identical_half_seeds = false;
};

struct SplitHalfStat {
  std::string bin_label;
  std::string word;
  int n_effective = 0;  // repeats where the word survived min_count in both halves
  double mean = 0.0;    // NaN when n_effective == 0
  double std = 0.0;     // sample std; NaN when n_effective < 2
};

enum class BaselineRule { kAverage, kStartOnly, kEndOnly };

struct NetDriftRecord {
  std::string word;
  std::string start_label;
  std::string end_label;
  double observed = 0.0;
  double baseline_mean = 0.0;
  double net = 0.0;
  double pooled_std = 0.0;
  double z = 0.0;  // NaN when pooled_std is 0
  bool z_defined = false;
};

struct SeedVariance {
  std::string word;
  std::string span;
  double mean = 0.0;
  double std = 0.0;  // NaN for a single seed
  int n_seeds = 0;
};

// Per repeat: partition docs into halves, train SGNS on each with derived
// seeds, Procrustes-align the halves, and record per-target drift. Stats are
// over the repeats where the target survived in both halves.
std::vector<SplitHalfStat> split_half_drift(
    const std::vector<corpus::TokenizedDoc>& bin_docs, const std::string& bin_label,
    const std::vector<corpus::Target>& targets, const emb::TrainConfig& config,
    const SplitHalfConfig& split_config);

// Subtract the split-half noise floor: baseline and pooled std combine the
// two endpoint bins according to rule (average by default).
NetDriftRecord net_drift(const std::string& word, double observed,
                         const SplitHalfStat& stat_start, const SplitHalfStat& stat_end,
                         BaselineRule rule = BaselineRule::kAverage);

SeedVariance seed_variance(const std::vector<double>& drifts, const std::string& word,
                           const std::string& span);

std::string splithalf_csv(const std::vector<SplitHalfStat>& rows);
std::string netdrift_csv(const std::vector<NetDriftRecord>& rows);
std::string seed_variance_csv(const std::vector<SeedVariance>& rows);

}  // namespace aetas::stability
