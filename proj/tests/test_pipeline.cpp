#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "core/config.hpp"
#include "core/csv.hpp"
#include "core/hash.hpp"
#include "core/inifile.hpp"
#include "core/pipeline.hpp"
#include "core/synth.hpp"
#include "core/util.hpp"
#include "core/xml.hpp"

using namespace aetas;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

synth::SynthSpec tiny_synth() {
  synth::SynthSpec s;
  s.n_bins = 3;
  s.docs_per_bin = 60;
  s.tokens_per_doc = 30;
  s.window = 3;
  s.start_year = 1700;
  s.rng_seed = 11;
  s.topics = {{"law", {"court", "judge", "verdict", "plea"}},
              {"sea", {"ship", "sail", "mast", "tide"}}};
  s.drift_words = {{"probe", "law", "sea", "linear"}};
  s.control_words = {{"fixed", "law"}};
  return s;
}

std::string config_text(const std::string& k_list) {
  return "[corpus]\n"
         "inputs = corpus.jsonl\n"
         "format = jsonl\n"
         "\n"
         "[bin]\n"
         "min_tokens = 500\n"
         "\n"
         "[train]\n"
         "dim = 8\n"
         "window = 3\n"
         "min_count = 1\n"
         "negative = 2\n"
         "epochs = 2\n"
         "seed = 5\n"
         "\n"
         "[align]\n"
         "anchor = 1700s\n"
         "\n"
         "[drift]\n"
         "targets = targets.csv\n"
         "spans = 1700s:1720s\n"
         "k_list = " + k_list + "\n"
         "pivot_n = 10\n"
         "pivot_top_m = 4\n"
         "\n"
         "[axes]\n"
         "specs = axis.json\n"
         "\n"
         "[stability]\n"
         "repeats = 2\n"
         "rng_seed = 9\n"
         "\n"
         "[incremental]\n"
         "seeds = 3,4\n"
         "\n"
         "[report]\n"
         "timestamp = false\n"
         "\n"
         "[output]\n"
         "dir = out\n";
}

// A self-contained working directory: synthetic corpus, targets, one axis
// spec, and a pipeline config whose paths are all relative to the directory.
fs::path make_workspace(const std::string& name) {
  auto root = fresh_dir(name);
  pipeline::generate_synth(tiny_synth(), root);
  write_file_atomic(root / "targets.csv",
                    "word,domain\n"
                    "probe,shift\n"
                    "fixed,control\n"
                    "court,law\n"
                    "ship,sea\n");
  write_file_atomic(root / "axis.json",
                    "{\"name\": \"law_vs_sea\","
                    " \"positive\": [\"court\", \"judge\"],"
                    " \"negative\": [\"ship\", \"sail\"]}\n");
  write_file_atomic(root / "pipeline.ini", config_text("2,4"));
  return root;
}

struct FirstRun {
  fs::path root;
  std::vector<std::string> executed;
};

// Built once; later cases reuse the populated output directory.
const FirstRun& first_run() {
  static const FirstRun r = [] {
    FirstRun fr;
    fr.root = make_workspace("aetas_pipeline_fixture");
    auto cfg = config::load_pipeline_config(fr.root / "pipeline.ini", {});
    pipeline::Pipeline p(cfg);
    fr.executed = p.run_all();
    return fr;
  }();
  return r;
}

const std::vector<std::string> kTables = {
    "tokens.jsonl",        "bins.json",          "diagnostics.csv",
    "drift.csv",           "observed_drift.csv", "drift_skipped.csv",
    "neighbors.json",      "pivot_baseline.csv", "temporal_norms.csv",
    "axis_scores.csv",     "axis_sensitivity.csv", "splithalf.csv",
    "netdrift.csv",        "seed_variance.csv",  "frequency.csv",
    "freq_regression.json", "trajectories.csv"};

const std::vector<std::string> kFigures = {
    "fig_drift_lollipop.svg", "fig_overlap.svg",   "fig_trajectories.svg",
    "fig_axis_scores.svg",    "fig_splithalf.svg", "fig_netdrift.svg"};

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("run-all executes every stage in order and writes all artifacts") {
  const auto& fr = first_run();
  CHECK(fr.executed == pipeline::stage_names());

  auto out = fr.root / "out";
  for (const auto& f : kTables) CHECK(fs::exists(out / f));
  for (const auto& f : kFigures) CHECK(fs::exists(out / f));

  auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
  REQUIRE(manifest.contains("stages"));
  CHECK(manifest["stages"].size() == 9);
  for (const auto& name : pipeline::stage_names()) {
    REQUIRE(manifest["stages"].contains(name));
    const auto& entry = manifest["stages"][name];
    CHECK(entry.contains("config"));
    CHECK(entry.contains("inputs"));
    CHECK(!entry["outputs"].empty());
    CHECK(entry["tool_version"] == kVersion);
  }

  auto resolved = nlohmann::json::parse(read_file(out / "config.resolved.json"));
  CHECK(resolved["drift"]["k_list"] == nlohmann::json::array({2, 4}));
  CHECK(resolved["train"]["dim"] == 8);
  CHECK(resolved["report"]["timestamp"] == false);
}

TEST_CASE("an immediate rerun is a complete no-op") {
  const auto& fr = first_run();
  auto cfg = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  pipeline::Pipeline p(cfg);
  for (const auto& name : pipeline::stage_names()) CHECK(p.stage_fresh(name));
  CHECK(p.run_all().empty());
  CHECK_FALSE(p.run_stage("drift"));
}

TEST_CASE("the drift table drives the expected report row counts") {
  const auto& fr = first_run();
  auto out = fr.root / "out";

  auto drift_rows = csv::parse(read_file(out / "drift.csv"));
  // 4 targets x 1 span x 2 k values, plus the header.
  CHECK(drift_rows.size() == 9);

  auto observed = csv::parse(read_file(out / "observed_drift.csv"));
  CHECK(observed.size() == 5);  // k collapsed away
  CHECK(observed[0] == std::vector<std::string>{"word", "domain", "start", "end",
                                                "drift"});

  auto scores = csv::parse(read_file(out / "axis_scores.csv"));
  CHECK(scores.size() == 13);  // 4 targets x 3 bins + header

  auto net = csv::parse(read_file(out / "netdrift.csv"));
  CHECK(net.size() == 5);  // every target survived both endpoint bins

  auto seeds = csv::parse(read_file(out / "seed_variance.csv"));
  REQUIRE(seeds.size() == 5);
  for (std::size_t i = 1; i < seeds.size(); ++i) {
    CHECK(seeds[i][1] == "1700s->1720s");
    CHECK(seeds[i][2] == "2");
  }
}

TEST_CASE("every figure is well-formed XML with no timestamp when disabled") {
  const auto& fr = first_run();
  auto out = fr.root / "out";
  for (const auto& name : kFigures) {
    auto text = read_file(out / name);
    CHECK(text.find("<!-- generated") == std::string::npos);
    xml::Callbacks cb;  // structure only
    CHECK_NOTHROW(xml::parse(text, cb));
  }
}

TEST_CASE("lollipop stems match the drift table row for row") {
  const auto& fr = first_run();
  auto out = fr.root / "out";
  auto rows = csv::parse(read_file(out / "drift.csv")).size() - 1;
  auto svg_text = read_file(out / "fig_drift_lollipop.svg");
  CHECK(count_occurrences(svg_text, "class=\"stem\"") == rows);
}

TEST_CASE("heatmap red minus blue rises with z") {
  const auto& fr = first_run();
  auto text = read_file(fr.root / "out" / "fig_netdrift.svg");

  struct Cell {
    double z;
    int r, b;
  };
  std::vector<Cell> cells;
  xml::Callbacks cb;
  cb.start_element = [&](std::string_view name,
                         const std::vector<xml::Attribute>& attrs) {
    if (name != "rect") return;
    Cell c{};
    bool has_z = false, has_fill = false;
    for (const auto& a : attrs) {
      if (a.name == "data-z") {
        c.z = std::strtod(a.value.c_str(), nullptr);
        has_z = true;
      } else if (a.name == "fill" && starts_with(a.value, "rgb(")) {
        int g;
        REQUIRE(std::sscanf(a.value.c_str(), "rgb(%d,%d,%d)", &c.r, &g, &c.b) == 3);
        has_fill = true;
      }
    }
    if (has_z && has_fill) cells.push_back(c);
  };
  xml::parse(text, cb);

  REQUIRE(cells.size() >= 2);
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.z < b.z; });
  for (std::size_t i = 1; i < cells.size(); ++i)
    CHECK(cells[i].r - cells[i].b >= cells[i - 1].r - cells[i - 1].b);
}

TEST_CASE("a second workspace with the same seeds reproduces every byte") {
  const auto& fr = first_run();
  auto twin = make_workspace("aetas_pipeline_twin");
  auto cfg = config::load_pipeline_config(twin / "pipeline.ini", {});
  pipeline::Pipeline p(cfg);
  p.run_all();

  for (const auto& name : kTables)
    CHECK_MESSAGE(read_file(fr.root / "out" / name) == read_file(twin / "out" / name),
                  name);
  for (const auto& name : kFigures)
    CHECK_MESSAGE(read_file(fr.root / "out" / name) == read_file(twin / "out" / name),
                  name);
  fs::remove_all(twin);
}

TEST_CASE("changing only k_list reruns exactly drift and report") {
  const auto& fr = first_run();
  auto out = fr.root / "out";
  auto observed_before = hash::sha256_file(out / "observed_drift.csv");
  auto spaces_before = hash::sha256_file(out / "spaces/1700s.vec");

  write_file_atomic(fr.root / "pipeline_k.ini", config_text("2,6"));
  auto cfg = config::load_pipeline_config(fr.root / "pipeline_k.ini", {});
  pipeline::Pipeline p(cfg);
  CHECK(p.run_all() == std::vector<std::string>{"drift", "report"});

  CHECK(hash::sha256_file(out / "observed_drift.csv") == observed_before);
  CHECK(hash::sha256_file(out / "spaces/1700s.vec") == spaces_before);
  auto drift_csv = read_file(out / "drift.csv");
  CHECK(drift_csv.find(",6,") != std::string::npos);
  CHECK(drift_csv.find(",4,") == std::string::npos);

  // Switching back restores the original table and again touches only the
  // two k-sensitive stages.
  auto orig = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  pipeline::Pipeline back(orig);
  CHECK(back.run_all() == std::vector<std::string>{"drift", "report"});
}

TEST_CASE("a corrupted intermediate makes downstream stages refuse to run") {
  const auto& fr = first_run();
  auto out = fr.root / "out";
  auto tokens = read_file(out / "tokens.jsonl");
  write_file_atomic(out / "tokens.jsonl", tokens + "garbage\n");

  auto cfg = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  pipeline::Pipeline p(cfg);
  CHECK_FALSE(p.stage_fresh("ingest"));
  CHECK_THROWS_WITH_AS(p.run_stage("drift"),
                       doctest::Contains("stale"), DataError);

  // Rerunning ingest rewrites the identical bytes, so everything downstream
  // is immediately fresh again: content hashes, not timestamps.
  CHECK(p.run_stage("ingest"));
  CHECK(read_file(out / "tokens.jsonl") == tokens);
  CHECK(p.run_all().empty());
}

TEST_CASE("unknown stage names are rejected") {
  const auto& fr = first_run();
  auto cfg = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  pipeline::Pipeline p(cfg);
  CHECK_THROWS_AS(p.run_stage("polish"), ConfigError);
}

TEST_CASE("ini parser handles sections, comments, quotes, and typed reads") {
  auto f = ini::parse(
      "# top comment\n"
      "[alpha]\n"
      "name = \"hello ; world\"  # trailing\n"
      "count = 42\n"
      "ratio = 0.5\n"
      "flag = true\n"
      "items = a, b , c\n"
      "\n"
      "[empty]\n");
  CHECK(f.get("alpha", "name", "") == "hello ; world");
  CHECK(f.get_int("alpha", "count", 0) == 42);
  CHECK(f.get_double("alpha", "ratio", 0.0) == 0.5);
  CHECK(f.get_bool("alpha", "flag", false));
  CHECK(f.get_list("alpha", "items") == std::vector<std::string>{"a", "b", "c"});
  CHECK(f.sections.count("empty") == 1);
  CHECK(f.get("alpha", "missing", "dflt") == "dflt");

  CHECK_THROWS_AS(ini::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(ini::parse("[a\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(ini::parse("[a]\njust a line\n"), ConfigError);
  CHECK_THROWS_AS(ini::parse("[a]\n= 1\n"), ConfigError);
  CHECK_THROWS_AS(ini::parse("[a]\nx = \"unclosed\n"), ConfigError);

  auto g = ini::parse("[a]\nx = notanum\ny = -3\n");
  CHECK_THROWS_AS(g.get_int("a", "x", 0), ConfigError);
  CHECK_THROWS_AS(g.get_uint("a", "y", 0), ConfigError);
  CHECK_THROWS_AS(g.get_bool("a", "x", false), ConfigError);
}

TEST_CASE("config loading rejects unknown keys and malformed values") {
  const auto& fr = first_run();

  auto try_config = [&](const std::string& text) {
    auto path = fr.root / "broken.ini";
    write_file_atomic(path, text);
    return config::load_pipeline_config(path, {});
  };

  CHECK_THROWS_WITH_AS(try_config(config_text("2,4") + "\n[nonsense]\nx = 1\n"),
                       doctest::Contains("[nonsense]"), ConfigError);

  auto with_dims = config_text("2,4");
  with_dims.replace(with_dims.find("dim = 8"), 7, "dims = 8");
  CHECK_THROWS_WITH_AS(try_config(with_dims), doctest::Contains("dims"), ConfigError);

  auto bad_span = config_text("2,4");
  bad_span.replace(bad_span.find("spans = 1700s:1720s"), 19, "spans = 1700s-1720s");
  CHECK_THROWS_WITH_AS(try_config(bad_span), doctest::Contains("start:end"),
                       ConfigError);

  CHECK_THROWS_WITH_AS(try_config(config_text("2,four")),
                       doctest::Contains("four"), ConfigError);

  auto bad_baseline = config_text("2,4");
  bad_baseline.replace(bad_baseline.find("rng_seed = 9"), 12,
                       "rng_seed = 9\nbaseline = median");
  CHECK_THROWS_AS(try_config(bad_baseline), ConfigError);

  auto missing_targets = config_text("2,4");
  missing_targets.replace(missing_targets.find("targets = targets.csv"), 21,
                          "targets = nowhere.csv");
  CHECK_THROWS_WITH_AS(try_config(missing_targets),
                       doctest::Contains("nowhere.csv"), ConfigError);
}

TEST_CASE("overrides replace the configured seed and output directory") {
  const auto& fr = first_run();
  config::Overrides ov;
  ov.seed = 99;
  ov.output_dir = fr.root / "elsewhere";
  auto cfg = config::load_pipeline_config(fr.root / "pipeline.ini", ov);
  CHECK(cfg.train.seed == 99);
  CHECK(cfg.output_dir == fr.root / "elsewhere");

  auto plain = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  CHECK(plain.train.seed == 5);
  CHECK(plain.output_dir == fr.root / "out");
}

TEST_CASE("incremental chain can be restricted to listed bins") {
  auto root = make_workspace("aetas_pipeline_incbins");
  auto text = config_text("2,4");
  text.replace(text.find("seeds = 3,4"), 11, "seeds = 3\nbins = 1700s, 1720s");
  write_file_atomic(root / "pipeline.ini", text);
  auto cfg = config::load_pipeline_config(root / "pipeline.ini", {});
  CHECK(cfg.incremental.bins == std::vector<std::string>{"1700s", "1720s"});

  pipeline::Pipeline p(cfg);
  for (const char* stage : {"ingest", "bin", "train"}) p.run_stage(stage);
  CHECK(fs::exists(root / "out/spaces_inc/seed3/1700s.vec"));
  CHECK(fs::exists(root / "out/spaces_inc/seed3/1720s.vec"));
  CHECK_FALSE(fs::exists(root / "out/spaces_inc/seed3/1710s.vec"));
  // The second chain link starts from 1700s, not from the skipped bin.
  CHECK(read_file(root / "out/spaces_inc/seed3/1720s.meta.json")
            .find("incremental-from:1700s") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("align estimation options parse and default to off") {
  const auto& fr = first_run();

  auto plain = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  CHECK(plain.align_options.top_n == 0);
  CHECK_FALSE(plain.align_options.normalize);
  CHECK_FALSE(plain.align_options.center);
  CHECK(plain.align_options.tag().empty());

  auto text = config_text("2,4");
  text.replace(text.find("anchor = 1700s"), 14,
               "anchor = 1700s\ntop_n = 12\nnormalize = true\ncenter = true");
  auto path = fr.root / "ablation.ini";
  write_file_atomic(path, text);
  auto cfg = config::load_pipeline_config(path, {});
  CHECK(cfg.align_options.top_n == 12);
  CHECK(cfg.align_options.normalize);
  CHECK(cfg.align_options.center);
  CHECK(cfg.align_options.tag() == "top_n=12,normalize,center");
}

TEST_CASE("relative config paths resolve against the config file directory") {
  const auto& fr = first_run();
  auto cfg = config::load_pipeline_config(fr.root / "pipeline.ini", {});
  CHECK(cfg.corpus.inputs.at(0) == fr.root / "corpus.jsonl");
  CHECK(cfg.drift.targets_file == fr.root / "targets.csv");
  CHECK(cfg.axis_specs.at(0) == fr.root / "axis.json");
}
