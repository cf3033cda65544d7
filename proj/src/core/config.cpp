#include "config.hpp"

#include <set>

#include <json.hpp>

#include "inifile.hpp"
#include "util.hpp"

namespace aetas::config {

using nlohmann::json;

namespace {

// Section -> allowed keys; anything else in the file is a typo we refuse.
const std::map<std::string, std::set<std::string>> kSchema = {
    {"corpus", {"inputs", "format", "tei_container", "tei_date_attr", "year_min",
                "year_max"}},
    {"bin", {"min_tokens"}},
    {"train", {"dim", "window", "min_count", "negative", "epochs", "seed",
               "initial_lr", "min_lr", "subsample_threshold", "unigram_power",
               "dynamic_window"}},
    {"align", {"anchor", "top_n", "normalize", "center"}},
    {"drift", {"targets", "spans", "k_list", "pivot_n", "pivot_top_m"}},
    {"axes", {"specs"}},
    {"stability", {"bins", "repeats", "rng_seed", "baseline"}},
    {"incremental", {"seeds", "bins"}},
    {"stats", {"log_frequency", "trajectory_context"}},
    {"report", {"timestamp"}},
    {"output", {"dir"}},
};

void check_schema(const ini::File& f) {
  for (const auto& [section, keys] : f.sections) {
    auto s = kSchema.find(section);
    if (s == kSchema.end())
      throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!s->second.count(key))
        throw ConfigError("config: unknown key \"" + key + "\" in [" + section + "]");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

json train_json(const emb::TrainConfig& t) {
  return json{{"dim", t.dim},
              {"window", t.window},
              {"min_count", t.min_count},
              {"negative", t.negative},
              {"epochs", t.epochs},
              {"seed", t.seed},
              {"initial_lr", t.initial_lr},
              {"min_lr", t.min_lr},
              {"subsample_threshold", t.subsample_threshold},
              {"unigram_power", t.unigram_power},
              {"dynamic_window", t.dynamic_window}};
}

json section_json(const PipelineConfig& c, const std::string& name) {
  if (name == "corpus") {
    json inputs = json::array();
    for (const auto& p : c.corpus.inputs) inputs.push_back(p.string());
    return json{{"inputs", inputs},
                {"format", c.corpus.format},
                {"tei_container", c.corpus.tei_container},
                {"tei_date_attr", c.corpus.tei_date_attr},
                {"year_min", c.corpus.year_min},
                {"year_max", c.corpus.year_max}};
  }
  if (name == "bin") return json{{"min_tokens", c.bin_min_tokens}};
  if (name == "train") return train_json(c.train);
  if (name == "align")
    return json{{"anchor", c.anchor},
                {"top_n", c.align_options.top_n},
                {"normalize", c.align_options.normalize},
                {"center", c.align_options.center}};
  if (name == "drift") {
    json spans = json::array();
    for (const auto& [s, e] : c.drift.spans) spans.push_back(s + ":" + e);
    return json{{"targets", c.drift.targets_file.string()},
                {"spans", spans},
                {"k_list", c.drift.k_list},
                {"pivot_n", c.drift.pivot_n},
                {"pivot_top_m", c.drift.pivot_top_m}};
  }
  if (name == "axes") {
    json specs = json::array();
    for (const auto& p : c.axis_specs) specs.push_back(p.string());
    return json{{"specs", specs}};
  }
  if (name == "stability")
    return json{{"bins", c.stability.bins},
                {"repeats", c.stability.repeats},
                {"rng_seed", c.stability.rng_seed},
                {"baseline", c.stability.baseline}};
  if (name == "incremental")
    return json{{"seeds", c.incremental.seeds}, {"bins", c.incremental.bins}};
  if (name == "stats")
    return json{{"log_frequency", c.stats.log_frequency},
                {"trajectory_context", c.stats.trajectory_context}};
  if (name == "report") return json{{"timestamp", c.report.timestamp}};
  if (name == "output") return json{{"dir", c.output_dir.string()}};
  throw ConfigError("unknown config section \"" + name + "\"");
}

}  // namespace

void PipelineConfig::validate() const {
  if (corpus.inputs.empty()) throw ConfigError("config: [corpus] inputs is required");
  if (corpus.format != "jsonl" && corpus.format != "tei")
    throw ConfigError("config: [corpus] format must be jsonl or tei");
  for (const auto& p : corpus.inputs)
    if (!std::filesystem::exists(p))
      throw ConfigError("config: corpus input not found: " + p.string());
  if (corpus.year_min > corpus.year_max)
    throw ConfigError("config: year_min exceeds year_max");
  if (bin_min_tokens < 1) throw ConfigError("config: [bin] min_tokens must be >= 1");
  train.validate();
  if (drift.targets_file.empty())
    throw ConfigError("config: [drift] targets is required");
  if (!std::filesystem::exists(drift.targets_file))
    throw ConfigError("config: targets file not found: " +
                      drift.targets_file.string());
  if (drift.spans.empty()) throw ConfigError("config: [drift] spans is required");
  if (drift.k_list.empty()) throw ConfigError("config: [drift] k_list is required");
  for (int k : drift.k_list)
    if (k < 1) throw ConfigError("config: k_list entries must be >= 1");
  if (drift.pivot_n < 1 || drift.pivot_top_m < 1)
    throw ConfigError("config: pivot settings must be >= 1");
  for (const auto& p : axis_specs)
    if (!std::filesystem::exists(p))
      throw ConfigError("config: axis spec not found: " + p.string());
  if (stability.repeats < 1)
    throw ConfigError("config: [stability] repeats must be >= 1");
  if (stability.baseline != "average" && stability.baseline != "start-only" &&
      stability.baseline != "end-only")
    throw ConfigError("config: [stability] baseline must be average|start-only|end-only");
  if (stats.trajectory_context < 0)
    throw ConfigError("config: [stats] trajectory_context must be >= 0");
  if (output_dir.empty()) throw ConfigError("config: [output] dir must not be empty");
}

std::string PipelineConfig::resolved_json() const {
  json j;
  for (const auto& [name, keys] : kSchema) j[name] = section_json(*this, name);
  return j.dump(2) + "\n";
}

std::string PipelineConfig::stage_subset_json(const std::string& stage) const {
  // Only the settings a stage actually reads; everything else reaches it as
  // hashed input files, so e.g. a k_list change never touches axes or train.
  json j;
  if (stage == "ingest") {
    j["corpus"] = section_json(*this, "corpus");
  } else if (stage == "bin") {
    j["bin"] = section_json(*this, "bin");
  } else if (stage == "train") {
    j["train"] = section_json(*this, "train");
    j["incremental"] = section_json(*this, "incremental");
  } else if (stage == "align") {
    j["align"] = section_json(*this, "align");
  } else if (stage == "drift") {
    j["drift"] = section_json(*this, "drift");
    j["anchor"] = anchor;  // names the reference space for temporal norms
  } else if (stage == "axes") {
    j["axes"] = section_json(*this, "axes");
    j["targets"] = drift.targets_file.string();  // decides which words get scored
  } else if (stage == "stability") {
    j["stability"] = section_json(*this, "stability");
    j["train"] = section_json(*this, "train");
    j["incremental"] = section_json(*this, "incremental");
    j["targets"] = drift.targets_file.string();
  } else if (stage == "stats") {
    j["stats"] = section_json(*this, "stats");
    j["targets"] = drift.targets_file.string();
  } else if (stage == "report") {
    j["report"] = section_json(*this, "report");
  } else {
    throw ConfigError("unknown stage \"" + stage + "\"");
  }
  return j.dump();
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    const Overrides& overrides) {
  auto f = ini::parse_file(path);
  check_schema(f);
  auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  PipelineConfig c;
  for (const auto& in : f.get_list("corpus", "inputs"))
    c.corpus.inputs.push_back(resolve(base, in));
  c.corpus.format = f.get("corpus", "format", c.corpus.format);
  c.corpus.tei_container = f.get("corpus", "tei_container", c.corpus.tei_container);
  c.corpus.tei_date_attr = f.get("corpus", "tei_date_attr", c.corpus.tei_date_attr);
  c.corpus.year_min = static_cast<int>(f.get_int("corpus", "year_min", c.corpus.year_min));
  c.corpus.year_max = static_cast<int>(f.get_int("corpus", "year_max", c.corpus.year_max));

  c.bin_min_tokens = f.get_uint("bin", "min_tokens", c.bin_min_tokens);

  c.train.dim = static_cast<int>(f.get_int("train", "dim", c.train.dim));
  c.train.window = static_cast<int>(f.get_int("train", "window", c.train.window));
  c.train.min_count = static_cast<int>(f.get_int("train", "min_count", c.train.min_count));
  c.train.negative = static_cast<int>(f.get_int("train", "negative", c.train.negative));
  c.train.epochs = static_cast<int>(f.get_int("train", "epochs", c.train.epochs));
  c.train.seed = f.get_uint("train", "seed", c.train.seed);
  c.train.initial_lr = f.get_double("train", "initial_lr", c.train.initial_lr);
  c.train.min_lr = f.get_double("train", "min_lr", c.train.min_lr);
  c.train.subsample_threshold =
      f.get_double("train", "subsample_threshold", c.train.subsample_threshold);
  c.train.unigram_power = f.get_double("train", "unigram_power", c.train.unigram_power);
  c.train.dynamic_window = f.get_bool("train", "dynamic_window", c.train.dynamic_window);

  c.anchor = f.get("align", "anchor", c.anchor);
  c.align_options.top_n =
      static_cast<std::size_t>(f.get_uint("align", "top_n", c.align_options.top_n));
  c.align_options.normalize = f.get_bool("align", "normalize", c.align_options.normalize);
  c.align_options.center = f.get_bool("align", "center", c.align_options.center);

  if (f.has("drift", "targets"))
    c.drift.targets_file = resolve(base, f.get("drift", "targets", ""));
  for (const auto& span : f.get_list("drift", "spans")) {
    auto colon = span.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == span.size())
      throw ConfigError("config: span \"" + span + "\" must be start:end");
    c.drift.spans.emplace_back(std::string(trim(span.substr(0, colon))),
                               std::string(trim(span.substr(colon + 1))));
  }
  if (f.has("drift", "k_list")) {
    c.drift.k_list.clear();
    for (const auto& k : f.get_list("drift", "k_list")) {
      try {
        c.drift.k_list.push_back(std::stoi(k));
      } catch (const std::exception&) {
        throw ConfigError("config: k_list entry \"" + k + "\" is not an integer");
      }
    }
  }
  c.drift.pivot_n = static_cast<int>(f.get_int("drift", "pivot_n", c.drift.pivot_n));
  c.drift.pivot_top_m =
      static_cast<int>(f.get_int("drift", "pivot_top_m", c.drift.pivot_top_m));

  for (const auto& spec : f.get_list("axes", "specs"))
    c.axis_specs.push_back(resolve(base, spec));

  c.stability.bins = f.get_list("stability", "bins");
  c.stability.repeats =
      static_cast<int>(f.get_int("stability", "repeats", c.stability.repeats));
  c.stability.rng_seed = f.get_uint("stability", "rng_seed", c.stability.rng_seed);
  c.stability.baseline = f.get("stability", "baseline", c.stability.baseline);

  for (const auto& s : f.get_list("incremental", "seeds")) {
    try {
      c.incremental.seeds.push_back(std::stoull(s));
    } catch (const std::exception&) {
      throw ConfigError("config: incremental seed \"" + s + "\" is not an integer");
    }
  }
  c.incremental.bins = f.get_list("incremental", "bins");

  c.stats.log_frequency = f.get_bool("stats", "log_frequency", c.stats.log_frequency);
  c.stats.trajectory_context = static_cast<int>(
      f.get_int("stats", "trajectory_context", c.stats.trajectory_context));

  c.report.timestamp = f.get_bool("report", "timestamp", c.report.timestamp);

  c.output_dir = resolve(base, f.get("output", "dir", c.output_dir.string()));

  if (overrides.output_dir) c.output_dir = *overrides.output_dir;
  if (overrides.seed) c.train.seed = *overrides.seed;

  c.validate();
  return c;
}

}  // namespace aetas::config
