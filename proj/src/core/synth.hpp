#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace aetas::synth {

struct DriftWordSpec {
  std::string word;
  std::string source_topic;
  std::string target_topic;
  std::string schedule;  // "linear" | "step"
};

struct ControlWordSpec {
  std::string word;
  std::string topic;
};

struct SynthSpec {
  int n_bins = 3;
  int docs_per_bin = 2000;
  int tokens_per_doc = 200;
  int window = 5;  // tokens per generated co-occurrence block
  int start_year = 1700;
  std::map<std::string, std::vector<std::string>> topics;
  std::vector<DriftWordSpec> drift_words;
  std::vector<ControlWordSpec> control_words;
  std::uint64_t rng_seed = 42;

  // Reports every violation at once, not just the first.
  void validate() const;

  static SynthSpec desk_default();
};

// Source-topic share of a drift word's windows in the given bin. Linear
// walks 1 -> 0 in equal steps; step flips to 0 at the halfway bin.
double schedule_p(const std::string& schedule, int bin_index, int n_bins);

struct SynthResult {
  std::vector<corpus::Document> documents;  // (year, id) order
  std::string ground_truth_json;
};

// Bag-of-windows corpus: each document is a run of fixed-size blocks whose
// words come from a single topic, so co-occurrence structure is exactly the
// scheduled mixture. Byte-identical output for equal specs.
SynthResult generate(const SynthSpec& spec);

SynthSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace aetas::synth
