#include "synth.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "rng.hpp"
#include "util.hpp"

namespace aetas::synth {

using nlohmann::json;

void SynthSpec::validate() const {
  std::vector<std::string> problems;
  if (n_bins < 1) problems.push_back("n_bins must be >= 1");
  if (docs_per_bin < 1) problems.push_back("docs_per_bin must be >= 1");
  if (tokens_per_doc < 1) problems.push_back("tokens_per_doc must be >= 1");
  if (window < 2) problems.push_back("window must be >= 2 (a block needs context)");
  if (topics.empty()) problems.push_back("at least one topic required");

  std::set<std::string> topic_members;
  for (const auto& [name, words] : topics) {
    if (name.empty()) problems.push_back("topic with empty name");
    if (words.empty()) problems.push_back("topic \"" + name + "\" has no words");
    for (const auto& w : words) {
      if (!topic_members.insert(w).second)
        problems.push_back("word \"" + w + "\" appears in more than one topic");
    }
  }

  std::set<std::string> specials;
  auto check_special = [&](const std::string& w) {
    if (topic_members.count(w))
      problems.push_back("special word \"" + w + "\" is also a topic member");
    if (!specials.insert(w).second)
      problems.push_back("special word \"" + w + "\" listed twice");
  };
  for (const auto& d : drift_words) {
    check_special(d.word);
    if (!topics.count(d.source_topic))
      problems.push_back("drift word \"" + d.word + "\": unknown source topic \"" +
                         d.source_topic + "\"");
    if (!topics.count(d.target_topic))
      problems.push_back("drift word \"" + d.word + "\": unknown target topic \"" +
                         d.target_topic + "\"");
    if (d.source_topic == d.target_topic)
      problems.push_back("drift word \"" + d.word + "\": source and target coincide");
    if (d.schedule != "linear" && d.schedule != "step")
      problems.push_back("drift word \"" + d.word + "\": schedule must be linear|step");
  }
  for (const auto& c : control_words) {
    check_special(c.word);
    if (!topics.count(c.topic))
      problems.push_back("control word \"" + c.word + "\": unknown topic \"" + c.topic +
                         "\"");
  }

  if (!problems.empty()) {
    std::string msg = "invalid synth spec: ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) msg += "; ";
      msg += problems[i];
    }
    throw ConfigError(msg);
  }
}

SynthSpec SynthSpec::desk_default() {
  SynthSpec s;
  // Blocks several times wider than the training window, so co-occurrence
  // stays mostly within a block, and enough topic words that the vocabulary
  // exceeds a dim-50 embedding.
  s.window = 16;
  s.topics = {
      {"law", {"court", "judge", "verdict", "statute", "warrant", "plea", "counsel",
               "clerk", "jury", "witness", "oath", "felony", "indictment", "bailiff",
               "gaol", "assizes", "magistrate", "barrister", "petition", "tribunal"}},
      {"trade", {"market", "cargo", "merchant", "ledger", "wharf", "customs", "goods",
                 "freight", "invoice", "barter", "guild", "shilling", "auction",
                 "warehouse", "vessel", "export", "import", "broker", "tariff",
                 "bounty"}},
      {"faith", {"chapel", "sermon", "parish", "psalm", "vicar", "pulpit", "prayer",
                 "vestry", "hymn", "deacon", "curate", "blessing", "scripture",
                 "chorister", "almsgiving", "parsonage", "communion", "steeple",
                 "diocese", "congregation"}},
  };
  s.drift_words = {{"sentence", "law", "trade", "linear"},
                   {"passage", "faith", "trade", "step"}};
  s.control_words = {{"gavel", "law"}, {"anthem", "faith"}};
  return s;
}

double schedule_p(const std::string& schedule, int bin_index, int n_bins) {
  if (n_bins <= 1) return 1.0;
  if (schedule == "linear")
    return 1.0 - static_cast<double>(bin_index) / static_cast<double>(n_bins - 1);
  if (schedule == "step") return bin_index * 2 < n_bins ? 1.0 : 0.0;
  throw ConfigError("unknown schedule \"" + schedule + "\"");
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();

  std::vector<std::string> topic_names;
  for (const auto& [name, words] : spec.topics) topic_names.push_back(name);

  // Special blocks cycle through drift then control words; every remaining
  // block is a plain topic block.
  struct Special {
    const std::string* word;
    const std::string* source;  // drift only
    const std::string* target;  // drift only
    const std::string* schedule;
    const std::string* fixed_topic;  // control only
  };
  std::vector<Special> specials;
  for (const auto& d : spec.drift_words)
    specials.push_back({&d.word, &d.source_topic, &d.target_topic, &d.schedule, nullptr});
  for (const auto& c : spec.control_words)
    specials.push_back({&c.word, nullptr, nullptr, nullptr, &c.topic});

  const int blocks_per_doc = std::max(1, spec.tokens_per_doc / spec.window);
  const std::size_t cycle = specials.size() + 1;

  SynthResult result;
  std::uint64_t doc_counter = 0;
  for (int bin = 0; bin < spec.n_bins; ++bin) {
    for (int di = 0; di < spec.docs_per_bin; ++di, ++doc_counter) {
      rng::Rng g(rng::mix({spec.rng_seed, rng::kTagSynthDoc, doc_counter}));
      std::string text;
      text.reserve(static_cast<std::size_t>(spec.tokens_per_doc) * 8);

      auto sample_from = [&](const std::vector<std::string>& pool) -> const std::string& {
        return pool[static_cast<std::size_t>(g.below(pool.size()))];
      };
      auto append = [&](const std::string& w) {
        if (!text.empty()) text.push_back(' ');
        text += w;
      };

      for (int b = 0; b < blocks_per_doc; ++b) {
        std::size_t slot = static_cast<std::size_t>(b) % cycle;
        if (slot < specials.size()) {
          const auto& sp = specials[slot];
          const std::vector<std::string>* pool;
          if (sp.fixed_topic) {
            pool = &spec.topics.at(*sp.fixed_topic);
          } else {
            double p = schedule_p(*sp.schedule, bin, spec.n_bins);
            bool from_source = g.next_double() < p;
            pool = &spec.topics.at(from_source ? *sp.source : *sp.target);
          }
          // Special word lands mid-block so it always has context both sides.
          std::size_t pos = static_cast<std::size_t>(spec.window) / 2;
          for (int t = 0; t < spec.window; ++t)
            append(static_cast<std::size_t>(t) == pos ? *sp.word : sample_from(*pool));
        } else {
          const auto& topic = spec.topics.at(
              topic_names[static_cast<std::size_t>(g.below(topic_names.size()))]);
          for (int t = 0; t < spec.window; ++t) append(sample_from(topic));
        }
      }

      corpus::Document doc;
      char idbuf[32];
      std::snprintf(idbuf, sizeof idbuf, "synth-%d-%06d", bin, di);
      doc.id = idbuf;
      doc.year = spec.start_year + 10 * bin + di % 10;
      doc.text = std::move(text);
      result.documents.push_back(std::move(doc));
    }
  }
  std::sort(result.documents.begin(), result.documents.end(),
            [](const corpus::Document& a, const corpus::Document& b) {
              if (a.year != b.year) return a.year < b.year;
              return a.id < b.id;
            });

  json truth;
  truth["n_bins"] = spec.n_bins;
  truth["docs_per_bin"] = spec.docs_per_bin;
  truth["tokens_per_doc"] = spec.tokens_per_doc;
  truth["window"] = spec.window;
  truth["rng_seed"] = spec.rng_seed;
  json bins = json::array();
  for (int b = 0; b < spec.n_bins; ++b)
    bins.push_back(std::to_string(spec.start_year + 10 * b) + "s");
  truth["bins"] = std::move(bins);
  json dw = json::array();
  for (const auto& d : spec.drift_words)
    dw.push_back({{"word", d.word},
                  {"source_topic", d.source_topic},
                  {"target_topic", d.target_topic},
                  {"schedule", d.schedule}});
  truth["drift_words"] = std::move(dw);
  json cw = json::array();
  for (const auto& c : spec.control_words)
    cw.push_back({{"word", c.word}, {"topic", c.topic}});
  truth["control_words"] = std::move(cw);
  result.ground_truth_json = truth.dump(2) + "\n";
  return result;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("invalid synth spec " + path.string() + ": " + e.what());
  }
  SynthSpec spec;
  try {
    if (j.contains("n_bins")) spec.n_bins = j.at("n_bins").get<int>();
    if (j.contains("docs_per_bin")) spec.docs_per_bin = j.at("docs_per_bin").get<int>();
    if (j.contains("tokens_per_doc"))
      spec.tokens_per_doc = j.at("tokens_per_doc").get<int>();
    if (j.contains("window")) spec.window = j.at("window").get<int>();
    if (j.contains("start_year")) spec.start_year = j.at("start_year").get<int>();
    if (j.contains("rng_seed")) spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("topics"))
      spec.topics =
          j.at("topics").get<std::map<std::string, std::vector<std::string>>>();
    else
      spec.topics = SynthSpec::desk_default().topics;
    if (j.contains("drift_words")) {
      spec.drift_words.clear();
      for (const auto& d : j.at("drift_words"))
        spec.drift_words.push_back({d.at("word").get<std::string>(),
                                    d.at("source_topic").get<std::string>(),
                                    d.at("target_topic").get<std::string>(),
                                    d.at("schedule").get<std::string>()});
    } else {
      spec.drift_words = SynthSpec::desk_default().drift_words;
    }
    if (j.contains("control_words")) {
      spec.control_words.clear();
      for (const auto& c : j.at("control_words"))
        spec.control_words.push_back(
            {c.at("word").get<std::string>(), c.at("topic").get<std::string>()});
    } else {
      spec.control_words = SynthSpec::desk_default().control_words;
    }
  } catch (const json::exception& e) {
    throw ConfigError("synth spec " + path.string() + ": " + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace aetas::synth
