#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <aetas/aetas.h>

namespace {

int report_failure(aetas_status st) {
  std::fprintf(stderr, "error: %s\n", aetas_last_error());
  return static_cast<int>(st);
}

int run_pipeline(const std::string& command, const std::string& config_path,
                 const std::uint64_t* seed) {
  const char* out_override = std::getenv("AETAS_OUTPUT_DIR");
  aetas_pipeline* pipeline = nullptr;
  aetas_status st =
      aetas_pipeline_open(config_path.c_str(), out_override, seed, &pipeline);
  if (st != AETAS_OK) return report_failure(st);

  if (command == "run-all") {
    int n = 0;
    st = aetas_pipeline_run_all(pipeline, &n);
    if (st == AETAS_OK) std::printf("%d stage(s) executed\n", n);
  } else {
    int ran = 0;
    st = aetas_pipeline_run_stage(pipeline, command.c_str(), &ran);
    if (st == AETAS_OK)
      std::printf("stage %s: %s\n", command.c_str(), ran ? "done" : "up to date");
  }
  aetas_pipeline_close(pipeline);
  return st == AETAS_OK ? 0 : report_failure(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aetas: semantic drift across time-binned corpora"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", aetas_version());

  std::uint64_t seed = 0;
  auto* seed_opt =
      app.add_option("--seed", seed, "Override the configured training seed");

  std::string config_path;
  struct StageCommand {
    const char* name;
    const char* help;
  };
  const std::vector<StageCommand> stages = {
      {"ingest", "Load, normalize, and tokenize the corpus"},
      {"bin", "Assign documents to decade bins with forward merging"},
      {"train", "Train per-bin embedding spaces"},
      {"align", "Rotate every space into the anchor's coordinates"},
      {"drift", "Score drift, neighbor overlap, and baselines for all targets"},
      {"axes", "Project targets onto seed-word axes"},
      {"stability", "Split-half baselines, net drift, and seed variance"},
      {"stats", "Frequencies, drift-frequency regression, and trajectories"},
      {"report", "Render the SVG chart set from the emitted tables"},
      {"run-all", "Bring every stage up to date in order"},
  };
  for (const auto& s : stages)
    app.add_subcommand(s.name, s.help)
        ->add_option("--config", config_path, "Pipeline config file (INI)")
        ->required();

  std::string spec_path, synth_out = "synth";
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic drift corpus with known ground truth");
  synth->add_option("--spec", spec_path,
                    "Synth spec (JSON); omit for the built-in default");
  synth->add_option("--out", synth_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config errors
  }

  if (synth->parsed()) {
    aetas_status st = aetas_synth_generate(
        spec_path.empty() ? nullptr : spec_path.c_str(), synth_out.c_str());
    if (st != AETAS_OK) return report_failure(st);
    std::printf("synthetic corpus written to %s\n", synth_out.c_str());
    return 0;
  }

  const std::uint64_t* seed_ptr = seed_opt->count() ? &seed : nullptr;
  return run_pipeline(app.get_subcommands().at(0)->get_name(), config_path,
                      seed_ptr);
}
