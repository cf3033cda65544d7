#include "stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "align.hpp"
#include "csv.hpp"
#include "drift.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace aetas::stability {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<SplitHalfStat> split_half_drift(
    const std::vector<corpus::TokenizedDoc>& bin_docs, const std::string& bin_label,
    const std::vector<corpus::Target>& targets, const emb::TrainConfig& config,
    const SplitHalfConfig& split_config) {
  if (bin_docs.size() < 2)
    throw DataError("split-half needs at least 2 documents in bin \"" + bin_label +
                    "\"");
  if (targets.empty()) throw DataError("split-half needs a non-empty target list");
  if (split_config.n_repeats < 1)
    throw ConfigError("split-half n_repeats must be >= 1");

  std::vector<const corpus::TokenizedDoc*> sorted;
  for (const auto& d : bin_docs) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    if (a->year != b->year) return a->year < b->year;
    return a->id < b->id;
  });
  const std::size_t n = sorted.size();

  std::vector<std::vector<double>> drifts(targets.size());
  for (int rep = 0; rep < split_config.n_repeats; ++rep) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<corpus::TokenizedDoc> half_a, half_b;
    if (split_config.alternate_split) {
      for (std::size_t i = 0; i < n; ++i)
        (i % 2 == 0 ? half_a : half_b).push_back(*sorted[i]);
    } else {
      rng::Rng part(rng::mix({split_config.rng_seed, rng::kTagSplitPartition,
                              static_cast<std::uint64_t>(rep)}));
      for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[part.below(i + 1)]);
      // The odd doc out goes to alternating halves across repeats.
      std::size_t a_size = n / 2 + ((n % 2 == 1 && rep % 2 == 0) ? 1 : 0);
      for (std::size_t i = 0; i < n; ++i)
        (i < a_size ? half_a : half_b).push_back(*sorted[order[i]]);
    }

    emb::TrainConfig cfg_a = config;
    emb::TrainConfig cfg_b = config;
    cfg_a.seed = rng::mix({split_config.rng_seed, rng::kTagSplitTrain,
                           static_cast<std::uint64_t>(rep), 0});
    cfg_b.seed = split_config.identical_half_seeds
                     ? cfg_a.seed
                     : rng::mix({split_config.rng_seed, rng::kTagSplitTrain,
                                 static_cast<std::uint64_t>(rep), 1});

    auto vocab_a = emb::build_vocab(half_a, static_cast<std::uint32_t>(config.min_count));
    auto vocab_b = emb::build_vocab(half_b, static_cast<std::uint32_t>(config.min_count));
    auto space_a = emb::train_sgns(half_a, vocab_a, cfg_a, bin_label + "-half0");
    auto space_b = emb::train_sgns(half_b, vocab_b, cfg_b, bin_label + "-half1");
    auto aligned_b =
        align::apply_alignment(align::procrustes_align(space_a, space_b), space_b);

    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto& w = targets[t].word;
      if (!space_a.vocab.find(w) || !aligned_b.vocab.find(w)) continue;
      drifts[t].push_back(drift::cosine_drift(space_a, aligned_b, w));
    }
  }

  std::vector<SplitHalfStat> stats;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    SplitHalfStat s;
    s.bin_label = bin_label;
    s.word = targets[t].word;
    s.n_effective = static_cast<int>(drifts[t].size());
    if (s.n_effective == 0) {
      s.mean = kNan;
      s.std = kNan;
    } else {
      double sum = 0;
      for (double d : drifts[t]) sum += d;
      s.mean = sum / static_cast<double>(s.n_effective);
      if (s.n_effective < 2) {
        s.std = kNan;
      } else {
        double ss = 0;
        for (double d : drifts[t]) ss += (d - s.mean) * (d - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(s.n_effective - 1));
      }
    }
    stats.push_back(std::move(s));
  }
  return stats;
}

NetDriftRecord net_drift(const std::string& word, double observed,
                         const SplitHalfStat& stat_start, const SplitHalfStat& stat_end,
                         BaselineRule rule) {
  if (stat_start.n_effective < 2 || stat_end.n_effective < 2)
    throw DataError("net drift for \"" + word +
                    "\" needs n_effective >= 2 in both endpoint bins (got " +
                    std::to_string(stat_start.n_effective) + " and " +
                    std::to_string(stat_end.n_effective) + ")");
  NetDriftRecord rec;
  rec.word = word;
  rec.start_label = stat_start.bin_label;
  rec.end_label = stat_end.bin_label;
  rec.observed = observed;
  switch (rule) {
    case BaselineRule::kAverage:
      rec.baseline_mean = (stat_start.mean + stat_end.mean) / 2.0;
      rec.pooled_std = std::sqrt(
          (stat_start.std * stat_start.std + stat_end.std * stat_end.std) / 2.0);
      break;
    case BaselineRule::kStartOnly:
      rec.baseline_mean = stat_start.mean;
      rec.pooled_std = stat_start.std;
      break;
    case BaselineRule::kEndOnly:
      rec.baseline_mean = stat_end.mean;
      rec.pooled_std = stat_end.std;
      break;
  }
  rec.net = observed - rec.baseline_mean;
  if (rec.pooled_std > 0.0) {
    rec.z = rec.net / rec.pooled_std;
    rec.z_defined = true;
  } else {
    rec.z = kNan;
    rec.z_defined = false;
  }
  return rec;
}

SeedVariance seed_variance(const std::vector<double>& drifts, const std::string& word,
                           const std::string& span) {
  if (drifts.empty())
    throw DataError("seed variance for \"" + word + "\" needs at least one value");
  SeedVariance sv;
  sv.word = word;
  sv.span = span;
  sv.n_seeds = static_cast<int>(drifts.size());
  double sum = 0;
  for (double d : drifts) sum += d;
  sv.mean = sum / static_cast<double>(drifts.size());
  if (drifts.size() < 2) {
    sv.std = kNan;
  } else {
    double ss = 0;
    for (double d : drifts) ss += (d - sv.mean) * (d - sv.mean);
    sv.std = std::sqrt(ss / static_cast<double>(drifts.size() - 1));
  }
  return sv;
}

std::string splithalf_csv(const std::vector<SplitHalfStat>& rows) {
  std::string out = "bin,word,n_effective,mean,std\n";
  for (const auto& r : rows)
    out += csv::join_row({r.bin_label, r.word, std::to_string(r.n_effective),
                          format_csv_double(r.mean), format_csv_double(r.std)});
  return out;
}

std::string netdrift_csv(const std::vector<NetDriftRecord>& rows) {
  std::string out = "word,start,end,observed,baseline,net,pooled_std,z\n";
  for (const auto& r : rows)
    out += csv::join_row({r.word, r.start_label, r.end_label,
                          format_csv_double(r.observed),
                          format_csv_double(r.baseline_mean), format_csv_double(r.net),
                          format_csv_double(r.pooled_std), format_csv_double(r.z)});
  return out;
}

std::string seed_variance_csv(const std::vector<SeedVariance>& rows) {
  std::string out = "word,span,n_seeds,mean,std\n";
  for (const auto& r : rows)
    out += csv::join_row({r.word, r.span, std::to_string(r.n_seeds),
                          format_csv_double(r.mean), format_csv_double(r.std)});
  return out;
}

}  // namespace aetas::stability
