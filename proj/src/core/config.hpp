#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "align.hpp"
#include "sgns.hpp"

namespace aetas::config {

struct CorpusSettings {
  std::vector<std::filesystem::path> inputs;
  std::string format = "jsonl";  // jsonl | tei
  std::string tei_container = "div";
  std::string tei_date_attr = "@date";
  int year_min = 1600;
  int year_max = 2100;
};

struct DriftSettings {
  std::filesystem::path targets_file;
  std::vector<std::pair<std::string, std::string>> spans;  // "start:end" entries
  std::vector<int> k_list{5, 20};
  int pivot_n = 500;
  int pivot_top_m = 50;
};

struct StabilitySettings {
  std::vector<std::string> bins;  // empty: every span endpoint
  int repeats = 20;
  std::uint64_t rng_seed = 42;
  std::string baseline = "average";  // average | start-only | end-only
};

struct IncrementalSettings {
  std::vector<std::uint64_t> seeds;  // empty disables the incremental chain
  std::vector<std::string> bins;     // chain restricted to these labels; empty: all
};

struct StatsSettings {
  bool log_frequency = true;
  int trajectory_context = 0;
};

struct ReportSettings {
  bool timestamp = true;
};

// Everything a full run needs, resolved from one INI-style file. Relative
// paths are taken against the config file's directory.
struct PipelineConfig {
  CorpusSettings corpus;
  std::uint64_t bin_min_tokens = 5'000'000;
  emb::TrainConfig train;
  std::string anchor = "1900s";
  align::AlignOptions align_options;
  DriftSettings drift;
  std::vector<std::filesystem::path> axis_specs;
  StabilitySettings stability;
  IncrementalSettings incremental;
  StatsSettings stats;
  ReportSettings report;
  std::filesystem::path output_dir = "out";

  // Referenced input files must exist; enum-ish strings must be recognized.
  void validate() const;

  std::string resolved_json() const;
  // The slice of the config a stage depends on, used for invalidation.
  std::string stage_subset_json(const std::string& stage) const;
};

struct Overrides {
  std::optional<std::filesystem::path> output_dir;  // env var wins over file
  std::optional<std::uint64_t> seed;                // --seed global override
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    const Overrides& overrides = {});

}  // namespace aetas::config
