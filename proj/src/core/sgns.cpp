#include "sgns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rng.hpp"
#include "util.hpp"

namespace aetas::emb {

using nlohmann::json;

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("train: dim must be >= 1");
  if (window < 1) throw ConfigError("train: window must be >= 1");
  if (negative < 1) throw ConfigError("train: negative must be >= 1");
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (min_count < 1) throw ConfigError("train: min_count must be >= 1");
  if (!(min_lr > 0.0) || !(min_lr <= initial_lr))
    throw ConfigError("train: need 0 < min_lr <= initial_lr");
  if (subsample_threshold < 0.0) throw ConfigError("train: subsample_threshold must be >= 0");
  if (unigram_power < 0.0) throw ConfigError("train: unigram_power must be >= 0");
}

TrainConfig TrainConfig::desk_scale() {
  TrainConfig c;
  c.dim = 50;
  c.min_count = 5;
  c.negative = 5;
  c.epochs = 3;
  return c;
}

std::span<const double> EmbeddingSpace::vector_of(std::string_view word) const {
  auto idx = vocab.find(word);
  if (!idx)
    throw DataError("word \"" + std::string(word) + "\" not in vocabulary of space \"" +
                    label + "\"");
  return vectors.row(*idx);
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

bool sgns_step(std::span<double> center, std::span<double> positive,
               const std::vector<std::span<double>>& negatives, double lr) {
  const std::size_t d = center.size();
  std::vector<double> acc(d, 0.0);
  bool ok = true;

  double a = linalg::dot(center, positive);
  if (!std::isfinite(a)) ok = false;
  double g = (1.0 - sigmoid(a)) * lr;
  for (std::size_t i = 0; i < d; ++i) {
    acc[i] += g * positive[i];
    positive[i] += g * center[i];
  }
  for (const auto& neg : negatives) {
    double an = linalg::dot(center, {neg.data(), d});
    if (!std::isfinite(an)) ok = false;
    double gn = -sigmoid(an) * lr;
    for (std::size_t i = 0; i < d; ++i) {
      acc[i] += gn * neg[i];
      neg[i] += gn * center[i];
    }
  }
  for (std::size_t i = 0; i < d; ++i) center[i] += acc[i];
  return ok;
}

double sgns_loss(std::span<const double> center, std::span<const double> positive,
                 const std::vector<std::span<const double>>& negatives) {
  auto log_sigmoid = [](double x) {
    // log(sigmoid(x)) computed stably for both signs.
    return (x >= 0.0) ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
  };
  double loss = -log_sigmoid(linalg::dot(center, positive));
  for (const auto& neg : negatives) loss -= log_sigmoid(-linalg::dot(center, neg));
  return loss;
}

std::vector<double> sgns_center_gradient(
    std::span<const double> center, std::span<const double> positive,
    const std::vector<std::span<const double>>& negatives) {
  const std::size_t d = center.size();
  std::vector<double> grad(d, 0.0);
  double f = sigmoid(linalg::dot(center, positive));
  for (std::size_t i = 0; i < d; ++i) grad[i] += (f - 1.0) * positive[i];
  for (const auto& neg : negatives) {
    double fn = sigmoid(linalg::dot(center, neg));
    for (std::size_t i = 0; i < d; ++i) grad[i] += fn * neg[i];
  }
  return grad;
}

namespace {

struct EncodedCorpus {
  std::vector<std::vector<std::uint32_t>> docs;  // in-vocab indices, (year, id) order
};

EncodedCorpus encode_corpus(const std::vector<corpus::TokenizedDoc>& docs,
                            const Vocabulary& vocab) {
  std::vector<const corpus::TokenizedDoc*> sorted;
  sorted.reserve(docs.size());
  for (const auto& d : docs) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(),
            [](const corpus::TokenizedDoc* a, const corpus::TokenizedDoc* b) {
              if (a->year != b->year) return a->year < b->year;
              return a->id < b->id;
            });
  EncodedCorpus enc;
  enc.docs.reserve(sorted.size());
  for (const auto* d : sorted) {
    std::vector<std::uint32_t> ids;
    ids.reserve(d->tokens.size());
    for (const auto& t : d->tokens) {
      if (auto idx = vocab.find(t)) ids.push_back(*idx);
    }
    enc.docs.push_back(std::move(ids));
  }
  return enc;
}

// Walks the (epoch, doc) pair stream, consuming RNG draws in a fixed order
// so a counting pass and the training pass see identical streams. fn is
// called once per (center, context) pair together with the per-doc negative
// RNG.
template <typename PairFn>
void walk_pairs(const EncodedCorpus& enc, const Vocabulary& vocab,
                const TrainConfig& cfg, PairFn&& fn) {
  const double subsample = cfg.subsample_threshold;
  const double retained = static_cast<double>(vocab.retained_tokens());
  std::vector<std::uint32_t> kept;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t di = 0; di < enc.docs.size(); ++di) {
      rng::Rng stream(rng::mix({cfg.seed, rng::kTagPairStream,
                                static_cast<std::uint64_t>(epoch), di}));
      rng::Rng negs(rng::mix({cfg.seed, rng::kTagNegatives,
                              static_cast<std::uint64_t>(epoch), di}));
      kept.clear();
      for (std::uint32_t idx : enc.docs[di]) {
        if (subsample > 0.0) {
          double freq = static_cast<double>(vocab.counts[idx]) / retained;
          double keep = (std::sqrt(freq / subsample) + 1.0) * (subsample / freq);
          if (stream.next_double() > keep) continue;
        }
        kept.push_back(idx);
      }
      const std::size_t n = kept.size();
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t span = cfg.dynamic_window
                               ? 1 + static_cast<std::size_t>(stream.below(
                                         static_cast<std::uint64_t>(cfg.window)))
                               : static_cast<std::size_t>(cfg.window);
        std::size_t lo = (i >= span) ? i - span : 0;
        std::size_t hi = std::min(n - 1, i + span);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          fn(kept[i], kept[j], negs);
        }
      }
    }
  }
}

void seeded_init_row(std::span<double> row, std::uint64_t seed,
                     const std::string& word) {
  rng::Rng r(rng::mix({seed, rng::kTagVectorInit, rng::fnv1a(word)}));
  const double scale = 1.0 / static_cast<double>(row.size());
  for (auto& v : row) v = (r.next_double() - 0.5) * scale;
}

// InitFn(word, row) fills the starting vector for one word.
template <typename InitFn>
EmbeddingSpace train_impl(const std::vector<corpus::TokenizedDoc>& docs,
                          const Vocabulary& vocab, const TrainConfig& cfg,
                          const std::string& label, const std::string& provenance,
                          InitFn&& init) {
  cfg.validate();
  if (vocab.size() == 0) throw DataError("train: empty vocabulary");

  EncodedCorpus enc = encode_corpus(docs, vocab);

  EmbeddingSpace space;
  space.label = label;
  space.vocab = vocab;
  space.config = cfg;
  space.provenance = provenance;
  space.vectors = linalg::Matrix(vocab.size(), static_cast<std::size_t>(cfg.dim));
  for (std::size_t w = 0; w < vocab.size(); ++w)
    init(vocab.words[w], space.vectors.row(w));

  linalg::Matrix context(vocab.size(), static_cast<std::size_t>(cfg.dim), 0.0);

  std::vector<double> weights(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    weights[i] = std::pow(static_cast<double>(vocab.counts[i]), cfg.unigram_power);
  AliasTable alias(weights);

  std::uint64_t total_pairs = 0;
  walk_pairs(enc, vocab, cfg, [&](std::uint32_t, std::uint32_t, rng::Rng&) {
    ++total_pairs;
  });
  if (total_pairs == 0) return space;  // no co-occurrence, nothing to learn

  const std::size_t d = static_cast<std::size_t>(cfg.dim);
  std::vector<double> acc(d);
  std::uint64_t pair_idx = 0;
  walk_pairs(enc, vocab, cfg, [&](std::uint32_t center, std::uint32_t ctx_word,
                                  rng::Rng& negrng) {
    double frac = static_cast<double>(pair_idx) / static_cast<double>(total_pairs);
    double lr = cfg.initial_lr + (cfg.min_lr - cfg.initial_lr) * frac;

    double* w = &space.vectors.data()[center * d];
    double* cpos = &context.data()[ctx_word * d];
    std::fill(acc.begin(), acc.end(), 0.0);

    double a = linalg::dot({w, d}, {cpos, d});
    if (!std::isfinite(a))
      throw NumericError("train: non-finite activation at pair " +
                         std::to_string(pair_idx) + ", lr=" + format_double(lr));
    double g = (1.0 - sigmoid(a)) * lr;
    for (std::size_t k = 0; k < d; ++k) {
      acc[k] += g * cpos[k];
      cpos[k] += g * w[k];
    }
    for (int s = 0; s < cfg.negative; ++s) {
      std::uint32_t t = alias.draw(negrng);
      if (t == ctx_word) continue;
      double* cneg = &context.data()[t * d];
      double an = linalg::dot({w, d}, {cneg, d});
      if (!std::isfinite(an))
        throw NumericError("train: non-finite activation at pair " +
                           std::to_string(pair_idx) + ", lr=" + format_double(lr));
      double gn = -sigmoid(an) * lr;
      for (std::size_t k = 0; k < d; ++k) {
        acc[k] += gn * cneg[k];
        cneg[k] += gn * w[k];
      }
    }
    for (std::size_t k = 0; k < d; ++k) w[k] += acc[k];
    ++pair_idx;
  });

  if (!space.vectors.all_finite())
    throw NumericError("train: non-finite vectors after training");
  return space;
}

}  // namespace

EmbeddingSpace train_sgns(const std::vector<corpus::TokenizedDoc>& docs,
                          const Vocabulary& vocab, const TrainConfig& config,
                          const std::string& label) {
  return train_impl(docs, vocab, config, label, "independent",
                    [&](const std::string& word, std::span<double> row) {
                      seeded_init_row(row, config.seed, word);
                    });
}

std::vector<EmbeddingSpace> train_incremental(
    const std::vector<std::pair<std::string, std::vector<corpus::TokenizedDoc>>>& bins,
    const TrainConfig& config) {
  if (bins.empty()) throw DataError("train_incremental: no bins");
  std::vector<EmbeddingSpace> out;
  out.reserve(bins.size());
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const auto& [label, docs] = bins[b];
    std::unordered_map<std::string, std::uint64_t> raw;
    std::uint64_t total = 0;
    for (const auto& d : docs)
      for (const auto& t : d.tokens) {
        ++raw[t];
        ++total;
      }

    std::vector<std::pair<std::string, std::uint64_t>> entries;
    for (const auto& [w, c] : raw)
      if (c >= static_cast<std::uint64_t>(config.min_count)) entries.emplace_back(w, c);
    if (b > 0) {
      // Inherit every previous word, even below this bin's min_count; their
      // vectors would otherwise be orphaned mid-chain.
      std::unordered_set<std::string> have;
      for (const auto& [w, c] : entries) have.insert(w);
      for (const auto& w : out[b - 1].vocab.words) {
        if (have.count(w)) continue;
        auto it = raw.find(w);
        entries.emplace_back(w, it == raw.end() ? 0 : it->second);
      }
    }
    if (entries.empty())
      throw DataError("train_incremental: empty vocabulary in bin \"" + label + "\"");
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first < y.first;
    });
    Vocabulary vocab;
    vocab.total_tokens = total;
    for (std::uint32_t i = 0; i < entries.size(); ++i) {
      vocab.index.emplace(entries[i].first, i);
      vocab.words.push_back(entries[i].first);
      vocab.counts.push_back(entries[i].second);
    }

    const EmbeddingSpace* prev = b > 0 ? &out[b - 1] : nullptr;
    std::string provenance =
        prev ? "incremental-from:" + prev->label : std::string("independent");
    EmbeddingSpace space = train_impl(
        docs, vocab, config, label, provenance,
        [&](const std::string& word, std::span<double> row) {
          if (prev) {
            if (auto idx = prev->vocab.find(word)) {
              auto src = prev->vectors.row(*idx);
              std::copy(src.begin(), src.end(), row.begin());
              return;
            }
          }
          seeded_init_row(row, config.seed, word);
        });
    out.push_back(std::move(space));
  }
  return out;
}

namespace {

json config_to_json(const TrainConfig& c) {
  return json{{"dim", c.dim},
              {"window", c.window},
              {"min_count", c.min_count},
              {"negative", c.negative},
              {"epochs", c.epochs},
              {"seed", c.seed},
              {"initial_lr", c.initial_lr},
              {"min_lr", c.min_lr},
              {"subsample_threshold", c.subsample_threshold},
              {"unigram_power", c.unigram_power},
              {"dynamic_window", c.dynamic_window}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.dim = j.at("dim").get<int>();
  c.window = j.at("window").get<int>();
  c.min_count = j.at("min_count").get<int>();
  c.negative = j.at("negative").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.initial_lr = j.at("initial_lr").get<double>();
  c.min_lr = j.at("min_lr").get<double>();
  c.subsample_threshold = j.at("subsample_threshold").get<double>();
  c.unigram_power = j.at("unigram_power").get<double>();
  c.dynamic_window = j.at("dynamic_window").get<bool>();
  return c;
}

}  // namespace

void save_space(const EmbeddingSpace& space, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string vec;
  vec += std::to_string(space.vocab.size());
  vec.push_back(' ');
  vec += std::to_string(space.dim());
  vec.push_back('\n');
  for (std::size_t i = 0; i < space.vocab.size(); ++i) {
    vec += space.vocab.words[i];
    auto row = space.vectors.row(i);
    for (double v : row) {
      vec.push_back(' ');
      vec += format_double(v);
    }
    vec.push_back('\n');
  }
  write_file_atomic(dir / (space.label + ".vec"), vec);

  json meta{{"label", space.label},
            {"provenance", space.provenance},
            {"dim", space.dim()},
            {"vocab_size", space.vocab.size()},
            {"total_tokens", space.vocab.total_tokens},
            {"counts", space.vocab.counts},
            {"config", config_to_json(space.config)}};
  write_file_atomic(dir / (space.label + ".meta.json"), meta.dump(2) + "\n");
}

EmbeddingSpace load_space(const std::filesystem::path& vec_path) {
  std::ifstream in(vec_path);
  if (!in) throw DataError("cannot open vector file: " + vec_path.string());

  std::filesystem::path meta_path = vec_path;
  meta_path.replace_extension(".meta.json");
  json meta;
  try {
    meta = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw DataError("invalid sidecar " + meta_path.string() + ": " + e.what());
  }

  EmbeddingSpace space;
  space.label = meta.at("label").get<std::string>();
  space.provenance = meta.at("provenance").get<std::string>();
  space.config = config_from_json(meta.at("config"));
  space.vocab.total_tokens = meta.at("total_tokens").get<std::uint64_t>();
  auto counts = meta.at("counts").get<std::vector<std::uint64_t>>();

  std::string line;
  if (!std::getline(in, line))
    throw DataError(vec_path.string() + ":1: missing header line");
  std::size_t vocab_size = 0, dim = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> vocab_size >> dim) || vocab_size == 0 || dim == 0)
      throw DataError(vec_path.string() + ":1: bad header \"" + line + "\"");
  }
  if (counts.size() != vocab_size)
    throw DataError(meta_path.string() + ": counts length " +
                    std::to_string(counts.size()) + " != vocab size " +
                    std::to_string(vocab_size));

  space.vocab.counts = std::move(counts);
  space.vectors = linalg::Matrix(vocab_size, dim);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    if (!std::getline(in, line))
      throw DataError(vec_path.string() + ":" + std::to_string(i + 2) +
                      ": truncated file, expected " + std::to_string(vocab_size) +
                      " rows");
    const char* p = line.c_str();
    const char* end = p + line.size();
    const char* sp = p;
    while (sp < end && *sp != ' ') ++sp;
    if (sp == p)
      throw DataError(vec_path.string() + ":" + std::to_string(i + 2) + ": empty word");
    std::string word(p, sp);
    auto row = space.vectors.row(i);
    char* next = nullptr;
    const char* cur = sp;
    for (std::size_t k = 0; k < dim; ++k) {
      double v = std::strtod(cur, &next);
      if (next == cur)
        throw DataError(vec_path.string() + ":" + std::to_string(i + 2) +
                        ": expected " + std::to_string(dim) + " values for \"" + word +
                        "\", found " + std::to_string(k));
      row[k] = v;
      cur = next;
    }
    while (cur < end && *cur == ' ') ++cur;
    if (cur != end)
      throw DataError(vec_path.string() + ":" + std::to_string(i + 2) +
                      ": trailing data after " + std::to_string(dim) + " values");
    space.vocab.index.emplace(word, static_cast<std::uint32_t>(i));
    space.vocab.words.push_back(std::move(word));
  }
  if (std::getline(in, line) && !trim(line).empty())
    throw DataError(vec_path.string() + ": more rows than header declares");
  return space;
}

}  // namespace aetas::emb
