#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "synth.hpp"

namespace aetas::pipeline {

// Stage names in execution order: ingest, bin, train, align, drift, axes,
// stability, stats, report.
const std::vector<std::string>& stage_names();

// Content-hash staged runner. Every stage records its config slice, input
// hashes, and output hashes in manifest.json; a stage whose record still
// matches the world is never re-executed.
class Pipeline {
 public:
  explicit Pipeline(config::PipelineConfig cfg);

  // Brings one stage up to date: no-op when fresh, executes when stale.
  // Throws DataError when an upstream stage is stale (run it first).
  // Returns true when the stage actually executed.
  bool run_stage(const std::string& name);

  // Runs every stale stage in order; returns the names that executed.
  std::vector<std::string> run_all();

  bool stage_fresh(const std::string& name) const;
  const std::filesystem::path& output_dir() const { return out_; }

 private:
  struct StageResult {
    std::vector<std::filesystem::path> inputs;  // absolute, or relative to out_
    std::vector<std::string> outputs;           // relative to out_
  };

  StageResult run_ingest();
  StageResult run_bin();
  StageResult run_train();
  StageResult run_align();
  StageResult run_drift();
  StageResult run_axes();
  StageResult run_stability();
  StageResult run_stats();
  StageResult run_report();

  StageResult execute(const std::string& name);
  void record(const std::string& name, const StageResult& result);
  void save_manifest() const;
  std::filesystem::path resolve_input(const std::string& key) const;

  config::PipelineConfig cfg_;
  std::filesystem::path out_;
  nlohmann::json manifest_;
};

// Writes corpus.jsonl and ground_truth.json for a synthetic spec.
void generate_synth(const synth::SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace aetas::pipeline
