#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>

#include "axes.hpp"
#include "align.hpp"
#include "corpus.hpp"
#include "csv.hpp"
#include "drift.hpp"
#include "hash.hpp"
#include "sgns.hpp"
#include "stability.hpp"
#include "stats.hpp"
#include "svg.hpp"
#include "util.hpp"
#include "vocab.hpp"

namespace aetas::pipeline {

using nlohmann::json;

namespace {

struct StageDef {
  const char* name;
  std::vector<const char*> deps;
};

const std::vector<StageDef>& stage_defs() {
  static const std::vector<StageDef> defs = {
      {"ingest", {}},
      {"bin", {"ingest"}},
      {"train", {"bin"}},
      {"align", {"train"}},
      {"drift", {"align"}},
      {"axes", {"align"}},
      {"stability", {"drift"}},
      {"stats", {"drift"}},
      {"report", {"drift", "axes", "stability", "stats"}},
  };
  return defs;
}

const StageDef& stage_def(const std::string& name) {
  for (const auto& d : stage_defs())
    if (name == d.name) return d;
  throw ConfigError("unknown stage \"" + name + "\"");
}

json bins_to_json(const std::vector<corpus::TimeBin>& bins) {
  json arr = json::array();
  for (const auto& b : bins)
    arr.push_back({{"label", b.spec.label},
                   {"start_year", b.spec.start_year},
                   {"end_year", b.spec.end_year},
                   {"doc_ids", b.doc_ids},
                   {"token_count", b.token_count},
                   {"vocab_size", b.vocab_size}});
  return json{{"bins", arr}};
}

std::vector<corpus::TimeBin> bins_from_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
    std::vector<corpus::TimeBin> bins;
    for (const auto& e : j.at("bins")) {
      corpus::TimeBin b;
      b.spec.label = e.at("label").get<std::string>();
      b.spec.start_year = e.at("start_year").get<int>();
      b.spec.end_year = e.at("end_year").get<int>();
      b.doc_ids = e.at("doc_ids").get<std::vector<std::string>>();
      b.token_count = e.at("token_count").get<std::uint64_t>();
      b.vocab_size = e.at("vocab_size").get<std::uint64_t>();
      bins.push_back(std::move(b));
    }
    return bins;
  } catch (const json::exception& ex) {
    throw DataError("bad bins file " + path.string() + ": " + ex.what());
  }
}

std::unordered_map<std::string, const corpus::TokenizedDoc*> index_docs(
    const std::vector<corpus::TokenizedDoc>& docs) {
  std::unordered_map<std::string, const corpus::TokenizedDoc*> m;
  for (const auto& d : docs) m[d.id] = &d;
  return m;
}

std::vector<corpus::TokenizedDoc> docs_of_bin(
    const corpus::TimeBin& bin,
    const std::unordered_map<std::string, const corpus::TokenizedDoc*>& by_id) {
  std::vector<corpus::TokenizedDoc> out;
  for (const auto& id : bin.doc_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw DataError("bins reference unknown document id \"" + id + "\"");
    out.push_back(*it->second);
  }
  return out;
}

double parse_cell_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw DataError("not a number in CSV: \"" + s + "\"");
  return v;
}

// Rows of a headered CSV as string vectors, header verified.
std::vector<std::vector<std::string>> load_csv(const std::filesystem::path& path,
                                               const std::string& expect_header) {
  auto rows = csv::parse(read_file(path));
  if (rows.empty()) throw DataError(path.filename().string() + ": empty file");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    if (i) header += ",";
    header += rows[0][i];
  }
  if (header != expect_header)
    throw DataError(path.filename().string() + ": unexpected header \"" + header +
                    "\"");
  rows.erase(rows.begin());
  return rows;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ObservedDrift {
  std::string word, domain, start, end;
  double drift = 0.0;
};

std::vector<ObservedDrift> load_observed(const std::filesystem::path& path) {
  std::vector<ObservedDrift> out;
  for (const auto& r : load_csv(path, "word,domain,start,end,drift")) {
    if (r.size() != 5) throw DataError("observed_drift.csv: short row");
    out.push_back({r[0], r[1], r[2], r[3], parse_cell_double(r[4])});
  }
  return out;
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& d : stage_defs()) v.emplace_back(d.name);
    return v;
  }();
  return names;
}

Pipeline::Pipeline(config::PipelineConfig cfg) : cfg_(std::move(cfg)) {
  out_ = cfg_.output_dir;
  std::filesystem::create_directories(out_);
  write_file_atomic(out_ / "config.resolved.json", cfg_.resolved_json());

  auto mpath = out_ / "manifest.json";
  if (std::filesystem::exists(mpath)) {
    try {
      manifest_ = json::parse(read_file(mpath));
    } catch (const json::exception& e) {
      throw DataError("corrupt manifest.json: " + std::string(e.what()));
    }
  }
  if (!manifest_.contains("stages")) manifest_["stages"] = json::object();
  manifest_["tool_version"] = kVersion;
  manifest_["extra"] = {
      {"config.resolved.json", hash::sha256_file(out_ / "config.resolved.json")}};
}

std::filesystem::path Pipeline::resolve_input(const std::string& key) const {
  std::filesystem::path p(key);
  return p.is_absolute() ? p : out_ / p;
}

bool Pipeline::stage_fresh(const std::string& name) const {
  const auto& stages = manifest_.at("stages");
  if (!stages.contains(name)) return false;
  const auto& entry = stages.at(name);
  if (entry.value("tool_version", "") != kVersion) return false;
  if (entry.value("config", "") != cfg_.stage_subset_json(name)) return false;
  for (const auto& member : {"inputs", "outputs"}) {
    if (!entry.contains(member)) return false;
    for (const auto& [key, digest] : entry.at(member).items()) {
      auto path = resolve_input(key);
      if (!std::filesystem::exists(path)) return false;
      if (hash::sha256_file(path) != digest.get<std::string>()) return false;
    }
  }
  return true;
}

Pipeline::StageResult Pipeline::execute(const std::string& name) {
  if (name == "ingest") return run_ingest();
  if (name == "bin") return run_bin();
  if (name == "train") return run_train();
  if (name == "align") return run_align();
  if (name == "drift") return run_drift();
  if (name == "axes") return run_axes();
  if (name == "stability") return run_stability();
  if (name == "stats") return run_stats();
  if (name == "report") return run_report();
  throw ConfigError("unknown stage \"" + name + "\"");
}

void Pipeline::record(const std::string& name, const StageResult& result) {
  json inputs = json::object();
  for (const auto& p : result.inputs) {
    std::string key =
        p.is_absolute() ? p.string() : p.generic_string();
    inputs[key] = hash::sha256_file(resolve_input(key));
  }
  json outputs = json::object();
  for (const auto& rel : result.outputs)
    outputs[rel] = hash::sha256_file(out_ / rel);
  manifest_["stages"][name] = {{"config", cfg_.stage_subset_json(name)},
                               {"inputs", std::move(inputs)},
                               {"outputs", std::move(outputs)},
                               {"tool_version", kVersion}};
  save_manifest();
}

void Pipeline::save_manifest() const {
  write_file_atomic(out_ / "manifest.json", manifest_.dump(2) + "\n");
}

bool Pipeline::run_stage(const std::string& name) {
  // Transitive upstream stages must all be fresh before this one may run.
  std::vector<std::string> pending(stage_def(name).deps.begin(),
                                   stage_def(name).deps.end());
  std::set<std::string> seen(pending.begin(), pending.end());
  while (!pending.empty()) {
    std::string dep = pending.back();
    pending.pop_back();
    if (!stage_fresh(dep))
      throw DataError("stage \"" + dep + "\" is stale; rerun required before \"" +
                      name + "\" (run-all brings every stage up to date)");
    for (const char* d : stage_def(dep).deps)
      if (seen.insert(d).second) pending.emplace_back(d);
  }
  if (stage_fresh(name)) return false;
  record(name, execute(name));
  return true;
}

std::vector<std::string> Pipeline::run_all() {
  std::vector<std::string> executed;
  for (const auto& name : stage_names())
    if (run_stage(name)) executed.push_back(name);
  return executed;
}

Pipeline::StageResult Pipeline::run_ingest() {
  StageResult r;
  std::vector<corpus::Document> docs;
  json files = json::array();
  int skipped_total = 0;
  for (const auto& input : cfg_.corpus.inputs) {
    auto abs = std::filesystem::absolute(input);
    r.inputs.push_back(abs);
    std::size_t before = docs.size();
    int skipped = 0;
    if (cfg_.corpus.format == "jsonl") {
      auto part = corpus::load_jsonl(abs, cfg_.corpus.year_min, cfg_.corpus.year_max);
      docs.insert(docs.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
    } else {
      auto tei = corpus::extract_tei_text(
          read_file(abs), {cfg_.corpus.tei_container}, cfg_.corpus.tei_date_attr,
          abs.stem().string(), cfg_.corpus.year_min, cfg_.corpus.year_max);
      skipped = tei.skipped;
      docs.insert(docs.end(), std::make_move_iterator(tei.documents.begin()),
                  std::make_move_iterator(tei.documents.end()));
    }
    skipped_total += skipped;
    files.push_back({{"path", abs.string()},
                     {"documents", docs.size() - before},
                     {"skipped", skipped}});
  }

  std::set<std::string> ids;
  for (const auto& d : docs)
    if (!ids.insert(d.id).second)
      throw DataError("duplicate document id across inputs: \"" + d.id + "\"");

  std::vector<corpus::TokenizedDoc> tokenized;
  tokenized.reserve(docs.size());
  for (const auto& d : docs) tokenized.push_back(corpus::tokenize(d));
  corpus::sort_docs(tokenized);

  write_file_atomic(out_ / "tokens.jsonl", corpus::tokens_to_jsonl(tokenized));
  json report{{"documents", tokenized.size()},
              {"skipped", skipped_total},
              {"files", std::move(files)}};
  write_file_atomic(out_ / "ingest_report.json", report.dump(2) + "\n");
  r.outputs = {"tokens.jsonl", "ingest_report.json"};
  return r;
}

Pipeline::StageResult Pipeline::run_bin() {
  StageResult r;
  r.inputs = {"tokens.jsonl"};
  auto docs = corpus::tokens_from_jsonl(out_ / "tokens.jsonl");
  auto bins = corpus::bin_by_decade(docs, cfg_.bin_min_tokens);
  write_file_atomic(out_ / "bins.json", bins_to_json(bins).dump(2) + "\n");
  auto by_id = index_docs(docs);
  write_file_atomic(out_ / "diagnostics.csv",
                    corpus::diagnostics_csv(corpus::diagnostics(bins, by_id)));
  r.outputs = {"bins.json", "diagnostics.csv"};
  return r;
}

Pipeline::StageResult Pipeline::run_train() {
  StageResult r;
  r.inputs = {"tokens.jsonl", "bins.json"};
  auto docs = corpus::tokens_from_jsonl(out_ / "tokens.jsonl");
  auto bins = bins_from_json(out_ / "bins.json");
  auto by_id = index_docs(docs);

  std::filesystem::create_directories(out_ / "spaces");
  std::vector<std::pair<std::string, std::vector<corpus::TokenizedDoc>>> chain;
  for (const auto& bin : bins) {
    auto bin_docs = docs_of_bin(bin, by_id);
    auto vocab = emb::build_vocab(bin_docs,
                                  static_cast<std::uint32_t>(cfg_.train.min_count));
    auto space = emb::train_sgns(bin_docs, vocab, cfg_.train, bin.spec.label);
    emb::save_space(space, out_ / "spaces");
    r.outputs.push_back("spaces/" + bin.spec.label + ".vec");
    r.outputs.push_back("spaces/" + bin.spec.label + ".meta.json");
    const auto& keep = cfg_.incremental.bins;
    if (!cfg_.incremental.seeds.empty() &&
        (keep.empty() ||
         std::find(keep.begin(), keep.end(), bin.spec.label) != keep.end()))
      chain.emplace_back(bin.spec.label, std::move(bin_docs));
  }

  for (std::uint64_t seed : cfg_.incremental.seeds) {
    emb::TrainConfig inc = cfg_.train;
    inc.seed = seed;
    auto dir = out_ / "spaces_inc" / ("seed" + std::to_string(seed));
    std::filesystem::create_directories(dir);
    for (const auto& space : emb::train_incremental(chain, inc)) {
      emb::save_space(space, dir);
      std::string rel = "spaces_inc/seed" + std::to_string(seed) + "/" + space.label;
      r.outputs.push_back(rel + ".vec");
      r.outputs.push_back(rel + ".meta.json");
    }
  }
  return r;
}

Pipeline::StageResult Pipeline::run_align() {
  StageResult r;
  r.inputs = {"bins.json"};
  auto bins = bins_from_json(out_ / "bins.json");
  std::vector<emb::EmbeddingSpace> spaces;
  for (const auto& bin : bins) {
    std::string rel = "spaces/" + bin.spec.label + ".vec";
    r.inputs.emplace_back(rel);
    r.inputs.emplace_back("spaces/" + bin.spec.label + ".meta.json");
    spaces.push_back(emb::load_space(out_ / rel));
  }
  std::filesystem::create_directories(out_ / "aligned");
  for (const auto& aligned :
       align::align_all_to_anchor(spaces, cfg_.anchor, cfg_.align_options)) {
    emb::save_space(aligned, out_ / "aligned");
    r.outputs.push_back("aligned/" + aligned.label + ".vec");
    r.outputs.push_back("aligned/" + aligned.label + ".meta.json");
  }
  return r;
}

Pipeline::StageResult Pipeline::run_drift() {
  StageResult r;
  r.inputs = {"bins.json", std::filesystem::absolute(cfg_.drift.targets_file)};
  auto bins = bins_from_json(out_ / "bins.json");
  auto targets = corpus::load_targets(cfg_.drift.targets_file);

  std::vector<emb::EmbeddingSpace> aligned, unaligned;
  for (const auto& bin : bins) {
    for (const char* dir : {"aligned/", "spaces/"}) {
      r.inputs.emplace_back(dir + bin.spec.label + ".vec");
      r.inputs.emplace_back(dir + bin.spec.label + ".meta.json");
    }
    aligned.push_back(emb::load_space(out_ / ("aligned/" + bin.spec.label + ".vec")));
    unaligned.push_back(emb::load_space(out_ / ("spaces/" + bin.spec.label + ".vec")));
  }

  auto table = drift::drift_table(aligned, targets, cfg_.drift.spans, cfg_.drift.k_list);
  write_file_atomic(out_ / "drift.csv", drift::drift_csv(table));
  write_file_atomic(out_ / "drift_skipped.csv", drift::skipped_csv(table));
  write_file_atomic(out_ / "neighbors.json", drift::neighbors_json(table));

  // k-independent view: one row per (word, span). Downstream statistics
  // consume this file, so a k_list change leaves them untouched.
  std::string observed = "word,domain,start,end,drift\n";
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& rec : table.records) {
    if (!seen.insert({rec.word, rec.start_label, rec.end_label}).second) continue;
    observed += csv::join_row({rec.word, rec.domain, rec.start_label, rec.end_label,
                               format_csv_double(rec.drift)});
  }
  write_file_atomic(out_ / "observed_drift.csv", observed);

  auto space_by_label = [&](const std::vector<emb::EmbeddingSpace>& spaces,
                            const std::string& label) -> const emb::EmbeddingSpace* {
    for (const auto& s : spaces)
      if (s.label == label) return &s;
    return nullptr;
  };

  std::vector<drift::PivotBaselineRecord> pivots;
  for (const auto& [start, end] : cfg_.drift.spans) {
    const auto* a = space_by_label(unaligned, start);
    const auto* b = space_by_label(unaligned, end);
    if (!a || !b)
      throw ConfigError("span references unknown bin label \"" +
                        (a ? end : start) + "\"");
    for (const auto& t : targets) {
      if (!a->vocab.find(t.word) || !b->vocab.find(t.word)) continue;  // in skip report
      pivots.push_back(drift::pivot_baseline(
          *a, *b, t.word, static_cast<std::size_t>(cfg_.drift.pivot_n),
          static_cast<std::size_t>(cfg_.drift.pivot_top_m)));
    }
  }
  write_file_atomic(out_ / "pivot_baseline.csv", drift::pivot_csv(pivots));

  const auto* anchor = space_by_label(aligned, cfg_.anchor);
  if (!anchor) throw DataError("anchor space \"" + cfg_.anchor + "\" missing");
  std::vector<drift::TemporalNormRecord> norms;
  for (const auto& t : targets) {
    if (!anchor->vocab.find(t.word)) continue;
    for (const auto& s : aligned) {
      if (!s.vocab.find(t.word)) continue;
      norms.push_back({t.word, s.label, cfg_.anchor,
                       drift::temporal_norm(s, *anchor, t.word)});
    }
  }
  write_file_atomic(out_ / "temporal_norms.csv", drift::norms_csv(norms));

  r.outputs = {"drift.csv",          "drift_skipped.csv", "neighbors.json",
               "observed_drift.csv", "pivot_baseline.csv", "temporal_norms.csv"};
  return r;
}

Pipeline::StageResult Pipeline::run_axes() {
  StageResult r;
  r.inputs = {"bins.json", std::filesystem::absolute(cfg_.drift.targets_file)};
  auto bins = bins_from_json(out_ / "bins.json");
  auto targets = corpus::load_targets(cfg_.drift.targets_file);

  std::vector<emb::EmbeddingSpace> aligned;
  for (const auto& bin : bins) {
    r.inputs.emplace_back("aligned/" + bin.spec.label + ".vec");
    r.inputs.emplace_back("aligned/" + bin.spec.label + ".meta.json");
    aligned.push_back(emb::load_space(out_ / ("aligned/" + bin.spec.label + ".vec")));
  }

  std::vector<axes::AxisProjection> scores;
  std::vector<axes::SensitivityBand> bands;
  for (const auto& spec_path : cfg_.axis_specs) {
    r.inputs.push_back(std::filesystem::absolute(spec_path));
    auto spec = axes::load_axis_spec(spec_path);
    for (const auto& space : aligned) {
      // A bin can legitimately miss a whole seed side; score what we can.
      try {
        axes::build_axis(space, spec);
      } catch (const std::exception& e) {
        std::cerr << "axes: skipping bin " << space.label << " for axis \""
                  << spec.name << "\": " << e.what() << "\n";
        continue;
      }
      for (const auto& t : targets) {
        if (!space.vocab.find(t.word)) continue;
        scores.push_back(axes::project(space, spec, t.word));
        bands.push_back(axes::loo_sensitivity(space, spec, t.word));
      }
    }
  }
  write_file_atomic(out_ / "axis_scores.csv", axes::scores_csv(scores));
  write_file_atomic(out_ / "axis_sensitivity.csv", axes::sensitivity_csv(bands));
  r.outputs = {"axis_scores.csv", "axis_sensitivity.csv"};
  return r;
}

Pipeline::StageResult Pipeline::run_stability() {
  StageResult r;
  r.inputs = {"tokens.jsonl", "bins.json", "observed_drift.csv",
              std::filesystem::absolute(cfg_.drift.targets_file)};
  auto docs = corpus::tokens_from_jsonl(out_ / "tokens.jsonl");
  auto bins = bins_from_json(out_ / "bins.json");
  auto targets = corpus::load_targets(cfg_.drift.targets_file);
  auto observed = load_observed(out_ / "observed_drift.csv");
  auto by_id = index_docs(docs);

  // Which bins get the split-half treatment: configured list, else every
  // span endpoint that appears in the drift table.
  std::vector<std::string> split_bins = cfg_.stability.bins;
  if (split_bins.empty()) {
    std::set<std::string> seen;
    for (const auto& [start, end] : cfg_.drift.spans)
      for (const auto& label : {start, end})
        if (seen.insert(label).second) split_bins.push_back(label);
  }

  stability::SplitHalfConfig sc;
  sc.n_repeats = cfg_.stability.repeats;
  sc.rng_seed = cfg_.stability.rng_seed;

  std::map<std::pair<std::string, std::string>, stability::SplitHalfStat> stat_index;
  std::vector<stability::SplitHalfStat> split_rows;
  for (const auto& label : split_bins) {
    auto bin = std::find_if(bins.begin(), bins.end(), [&](const corpus::TimeBin& b) {
      return b.spec.label == label;
    });
    if (bin == bins.end())
      throw ConfigError("stability bin \"" + label + "\" is not a defined bin");
    auto rows = stability::split_half_drift(docs_of_bin(*bin, by_id), label, targets,
                                            cfg_.train, sc);
    for (auto& row : rows) {
      stat_index[{row.bin_label, row.word}] = row;
      split_rows.push_back(std::move(row));
    }
  }
  write_file_atomic(out_ / "splithalf.csv", stability::splithalf_csv(split_rows));

  stability::BaselineRule rule = stability::BaselineRule::kAverage;
  if (cfg_.stability.baseline == "start-only")
    rule = stability::BaselineRule::kStartOnly;
  else if (cfg_.stability.baseline == "end-only")
    rule = stability::BaselineRule::kEndOnly;

  std::vector<stability::NetDriftRecord> net_rows;
  for (const auto& o : observed) {
    auto s = stat_index.find({o.start, o.word});
    auto e = stat_index.find({o.end, o.word});
    if (s == stat_index.end() || e == stat_index.end()) continue;
    if (s->second.n_effective < 2 || e->second.n_effective < 2) {
      std::cerr << "stability: skipping net drift for \"" << o.word << "\" " << o.start
                << "-" << o.end << " (too few surviving repeats)\n";
      continue;
    }
    auto rec = stability::net_drift(o.word, o.drift, s->second, e->second, rule);
    rec.start_label = o.start;
    rec.end_label = o.end;
    net_rows.push_back(std::move(rec));
  }
  write_file_atomic(out_ / "netdrift.csv", stability::netdrift_csv(net_rows));

  std::vector<stability::SeedVariance> seed_rows;
  if (!cfg_.incremental.seeds.empty()) {
    std::map<std::uint64_t, std::map<std::string, emb::EmbeddingSpace>> chains;
    for (std::uint64_t seed : cfg_.incremental.seeds) {
      for (const auto& bin : bins) {
        std::string rel = "spaces_inc/seed" + std::to_string(seed) + "/" +
                          bin.spec.label + ".vec";
        r.inputs.emplace_back(rel);
        chains[seed].emplace(bin.spec.label, emb::load_space(out_ / rel));
      }
    }
    std::set<std::pair<std::string, std::string>> done;
    for (const auto& o : observed) {
      if (!done.insert({o.word, o.start + "->" + o.end}).second) continue;
      std::vector<double> drifts;
      for (std::uint64_t seed : cfg_.incremental.seeds) {
        const auto& chain = chains.at(seed);
        auto a = chain.find(o.start);
        auto b = chain.find(o.end);
        if (a == chain.end() || b == chain.end()) continue;
        if (!a->second.vocab.find(o.word) || !b->second.vocab.find(o.word)) continue;
        drifts.push_back(drift::cosine_drift(a->second, b->second, o.word));
      }
      if (!drifts.empty())
        seed_rows.push_back(
            stability::seed_variance(drifts, o.word, o.start + "->" + o.end));
    }
  }
  write_file_atomic(out_ / "seed_variance.csv",
                    stability::seed_variance_csv(seed_rows));

  r.outputs = {"splithalf.csv", "netdrift.csv", "seed_variance.csv"};
  return r;
}

Pipeline::StageResult Pipeline::run_stats() {
  StageResult r;
  r.inputs = {"tokens.jsonl", "bins.json", "observed_drift.csv",
              std::filesystem::absolute(cfg_.drift.targets_file)};
  auto docs = corpus::tokens_from_jsonl(out_ / "tokens.jsonl");
  auto bins = bins_from_json(out_ / "bins.json");
  auto targets = corpus::load_targets(cfg_.drift.targets_file);
  auto by_id = index_docs(docs);

  auto freq = stats::freq_per_million(bins, by_id, targets);
  write_file_atomic(out_ / "frequency.csv", stats::frequency_csv(freq));

  std::vector<drift::DriftRecord> observed_records;
  for (const auto& o : load_observed(out_ / "observed_drift.csv")) {
    drift::DriftRecord rec;
    rec.word = o.word;
    rec.domain = o.domain;
    rec.start_label = o.start;
    rec.end_label = o.end;
    rec.drift = o.drift;
    observed_records.push_back(std::move(rec));
  }
  auto reg = stats::frequency_regression(observed_records, freq,
                                         cfg_.stats.log_frequency);
  write_file_atomic(out_ / "freq_regression.json", stats::freq_regression_json(reg));

  std::vector<emb::EmbeddingSpace> aligned;
  for (const auto& bin : bins) {
    r.inputs.emplace_back("aligned/" + bin.spec.label + ".vec");
    r.inputs.emplace_back("aligned/" + bin.spec.label + ".meta.json");
    aligned.push_back(emb::load_space(out_ / ("aligned/" + bin.spec.label + ".vec")));
  }
  std::vector<std::string> focal;
  for (const auto& t : targets) focal.push_back(t.word);
  auto traj = stats::trajectory_coordinates(aligned, focal,
                                            cfg_.stats.trajectory_context);
  for (const auto& w : traj.skipped)
    std::cerr << "stats: \"" << w << "\" present in fewer than two bins, "
              << "no trajectory\n";
  write_file_atomic(out_ / "trajectories.csv", stats::trajectories_csv(traj));

  r.outputs = {"frequency.csv", "freq_regression.json", "trajectories.csv"};
  return r;
}

Pipeline::StageResult Pipeline::run_report() {
  StageResult r;
  std::string stamp = cfg_.report.timestamp ? utc_timestamp() : "";

  auto have = [&](const char* name) {
    if (std::filesystem::exists(out_ / name)) {
      r.inputs.emplace_back(name);
      return true;
    }
    std::cerr << "report: " << name << " missing, skipping its chart\n";
    return false;
  };

  if (have("drift.csv")) {
    std::vector<svg::Stem> stems;
    std::vector<svg::BarGroup> overlap_groups;
    std::map<std::string, std::size_t> group_index;
    for (const auto& row : load_csv(out_ / "drift.csv",
                                    "word,domain,start,end,k,drift,overlap")) {
      stems.push_back({row[0] + " " + row[2] + "-" + row[3] + " k=" + row[4], row[1],
                       parse_cell_double(row[5])});
      std::string label = row[0] + " " + row[2] + "-" + row[3];
      auto [it, inserted] = group_index.emplace(label, overlap_groups.size());
      if (inserted) overlap_groups.push_back({label, {}});
      overlap_groups[it->second].bars.emplace_back("k=" + row[4],
                                                   parse_cell_double(row[6]));
    }
    write_file_atomic(out_ / "fig_drift_lollipop.svg",
                      svg::lollipop_chart("Semantic drift by word and span", stems,
                                          "drift (1 - cos)", stamp));
    r.outputs.push_back("fig_drift_lollipop.svg");
    write_file_atomic(out_ / "fig_overlap.svg",
                      svg::grouped_bar_chart("Neighbor overlap by neighborhood size",
                                             overlap_groups, "Jaccard overlap", stamp));
    r.outputs.push_back("fig_overlap.svg");
  }

  if (have("trajectories.csv")) {
    std::vector<svg::TrajectorySeries> series;
    std::map<std::string, std::size_t> index;
    for (const auto& row : load_csv(out_ / "trajectories.csv", "word,bin,x,y")) {
      auto [it, inserted] = index.emplace(row[0], series.size());
      if (inserted) series.push_back({row[0], {}});
      series[it->second].points.push_back(
          {row[1], parse_cell_double(row[2]), parse_cell_double(row[3])});
    }
    write_file_atomic(out_ / "fig_trajectories.svg",
                      svg::trajectory_chart("Aligned trajectories (PCA plane)",
                                            series, stamp));
    r.outputs.push_back("fig_trajectories.svg");
  }

  if (have("axis_scores.csv")) {
    std::map<std::tuple<std::string, std::string, std::string>,
             std::pair<double, double>> band_of;
    bool has_bands = false;
    if (have("axis_sensitivity.csv")) {
      for (const auto& row :
           load_csv(out_ / "axis_sensitivity.csv",
                    "axis,word,bin,full_score,mean,min,max,n_variants")) {
        if (std::stoi(row[7]) < 1) continue;
        band_of[{row[0], row[1], row[2]}] = {parse_cell_double(row[5]),
                                             parse_cell_double(row[6])};
        has_bands = true;
      }
    }
    std::vector<svg::AxisSeries> series;
    std::map<std::string, std::size_t> index;
    for (const auto& row : load_csv(out_ / "axis_scores.csv",
                                    "axis,word,bin,score,pos_found,neg_found")) {
      std::string label = row[0] + ": " + row[1];
      auto [it, inserted] = index.emplace(label, series.size());
      if (inserted) series.push_back({label, {}});
      svg::AxisPoint p;
      p.bin = row[2];
      p.score = parse_cell_double(row[3]);
      if (has_bands) {
        auto b = band_of.find({row[0], row[1], row[2]});
        if (b != band_of.end()) {
          p.has_band = true;
          p.band_min = b->second.first;
          p.band_max = b->second.second;
        }
      }
      series[it->second].points.push_back(p);
    }
    write_file_atomic(out_ / "fig_axis_scores.svg",
                      svg::axis_chart("Axis projections by bin", series, stamp));
    r.outputs.push_back("fig_axis_scores.svg");
  }

  if (have("splithalf.csv")) {
    std::vector<svg::WhiskerBar> bars;
    for (const auto& row :
         load_csv(out_ / "splithalf.csv", "bin,word,n_effective,mean,std"))
      bars.push_back({row[1] + " @ " + row[0], parse_cell_double(row[3]),
                      parse_cell_double(row[4])});
    write_file_atomic(out_ / "fig_splithalf.svg",
                      svg::whisker_bar_chart("Split-half drift baselines", bars,
                                             "mean drift (std whiskers)", stamp));
    r.outputs.push_back("fig_splithalf.svg");
  }

  if (have("netdrift.csv")) {
    std::vector<svg::HeatCell> cells;
    for (const auto& row :
         load_csv(out_ / "netdrift.csv",
                  "word,start,end,observed,baseline,net,pooled_std,z")) {
      double z = parse_cell_double(row[7]);
      cells.push_back({row[0], row[1] + "-" + row[2], z, !std::isnan(z)});
    }
    write_file_atomic(out_ / "fig_netdrift.svg",
                      svg::z_heatmap("Net drift effect sizes (z)", cells, stamp));
    r.outputs.push_back("fig_netdrift.svg");
  }

  return r;
}

void generate_synth(const synth::SynthSpec& spec,
                    const std::filesystem::path& out_dir) {
  auto result = synth::generate(spec);
  std::filesystem::create_directories(out_dir);
  write_file_atomic(out_dir / "corpus.jsonl", corpus::to_jsonl(result.documents));
  write_file_atomic(out_dir / "ground_truth.json", result.ground_truth_json);
}

}  // namespace aetas::pipeline
