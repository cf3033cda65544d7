#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "csv.hpp"
#include "drift.hpp"
#include "util.hpp"

namespace aetas::stats {

using nlohmann::json;

std::vector<FrequencyRecord> freq_per_million(
    const std::vector<corpus::TimeBin>& bins,
    const std::unordered_map<std::string, const corpus::TokenizedDoc*>& docs_by_id,
    const std::vector<corpus::Target>& targets) {
  std::vector<FrequencyRecord> out;
  for (const auto& bin : bins) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& t : targets) counts.emplace(t.word, 0);
    for (const auto& id : bin.doc_ids) {
      auto it = docs_by_id.find(id);
      if (it == docs_by_id.end())
        throw DataError("frequency: unknown document id \"" + id + "\"");
      for (const auto& tok : it->second->tokens) {
        auto c = counts.find(tok);
        if (c != counts.end()) ++c->second;
      }
    }
    for (const auto& t : targets) {
      FrequencyRecord rec;
      rec.word = t.word;
      rec.bin_label = bin.spec.label;
      rec.count = counts[t.word];
      rec.per_million = bin.token_count == 0
                            ? 0.0
                            : static_cast<double>(rec.count) * 1e6 /
                                  static_cast<double>(bin.token_count);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

FreqRegression frequency_regression(
    const std::vector<drift::DriftRecord>& drift_records,
    const std::vector<FrequencyRecord>& freq_records, bool log_transform) {
  std::map<std::pair<std::string, std::string>, double> freq;
  for (const auto& f : freq_records) freq[{f.word, f.bin_label}] = f.per_million;
  auto lookup = [&](const std::string& word, const std::string& bin) {
    auto it = freq.find({word, bin});
    if (it == freq.end())
      throw DataError("no frequency record for \"" + word + "\" in bin \"" + bin +
                      "\"");
    return it->second;
  };

  FreqRegression reg;
  reg.log_transform = log_transform;

  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::vector<double> response, mean_f, delta_f;
  for (const auto& r : drift_records) {
    if (!seen.insert({r.word, r.start_label, r.end_label}).second) continue;
    double fs = lookup(r.word, r.start_label);
    double fe = lookup(r.word, r.end_label);
    if (log_transform) {
      if (fs <= 0.0 || fe <= 0.0) {
        ++reg.skipped_zero_freq;
        continue;
      }
      fs = std::log10(fs);
      fe = std::log10(fe);
    }
    response.push_back(r.drift);
    mean_f.push_back((fs + fe) / 2.0);
    delta_f.push_back(fe - fs);
  }
  reg.n_obs = response.size();
  if (reg.n_obs < 4)
    throw DataError("frequency regression needs >= 4 observations, got " +
                    std::to_string(reg.n_obs));

  linalg::Matrix design(reg.n_obs, 3);
  for (std::size_t i = 0; i < reg.n_obs; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = mean_f[i];
    design(i, 2) = delta_f[i];
  }
  reg.fit = linalg::ols(response, design);
  return reg;
}

TrajectoryResult trajectory_coordinates(
    const std::vector<emb::EmbeddingSpace>& aligned_spaces,
    const std::vector<std::string>& focal_words, int neighbor_context) {
  if (aligned_spaces.empty()) throw DataError("trajectories need at least one space");
  TrajectoryResult result;

  struct RowRef {
    std::size_t focal_index;  // index into emitted points, or npos for context
    std::string word, bin;
  };
  constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<std::vector<double>> rows;
  std::vector<RowRef> refs;
  for (const auto& word : focal_words) {
    std::vector<std::pair<const emb::EmbeddingSpace*, std::size_t>> hits;
    for (const auto& s : aligned_spaces) {
      if (auto idx = s.vocab.find(word)) hits.emplace_back(&s, *idx);
    }
    if (hits.size() < 2) {
      result.skipped.push_back(word);
      continue;
    }
    for (const auto& [space, idx] : hits) {
      auto v = space->vectors.row(idx);
      refs.push_back({result.points.size(), word, space->label});
      result.points.push_back({word, space->label, 0.0, 0.0});
      rows.emplace_back(v.begin(), v.end());
      if (neighbor_context > 0) {
        for (const auto& nb : drift::top_k_neighbors(
                 *space, word, static_cast<std::size_t>(neighbor_context))) {
          auto nv = space->vector_of(nb.word);
          refs.push_back({npos, nb.word, space->label});
          rows.emplace_back(nv.begin(), nv.end());
        }
      }
    }
  }
  if (result.points.empty()) return result;

  linalg::Matrix collected(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), collected.row(i).begin());
  auto projected = linalg::pca_project(collected, 2);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].focal_index == npos) continue;
    result.points[refs[i].focal_index].x = projected(i, 0);
    result.points[refs[i].focal_index].y = projected(i, 1);
  }
  return result;
}

std::string frequency_csv(const std::vector<FrequencyRecord>& rows) {
  std::string out = "word,bin,count,per_million\n";
  for (const auto& r : rows)
    out += csv::join_row({r.word, r.bin_label, std::to_string(r.count),
                          format_csv_double(r.per_million)});
  return out;
}

std::string freq_regression_json(const FreqRegression& reg) {
  json j{{"terms", {"intercept", "mean_log10_per_million", "delta_log10_per_million"}},
         {"coefficients", reg.fit.coefficients},
         {"std_errors", reg.fit.std_errors},
         {"t_stats", reg.fit.t_stats},
         {"p_values", reg.fit.p_values},
         {"r_squared", reg.fit.r_squared},
         {"dof", reg.fit.dof},
         {"n_obs", reg.n_obs},
         {"transform", reg.log_transform ? "log10" : "raw"},
         {"skipped_zero_freq", reg.skipped_zero_freq}};
  if (!reg.log_transform)
    j["terms"] = {"intercept", "mean_per_million", "delta_per_million"};
  return j.dump(2) + "\n";
}

std::string trajectories_csv(const TrajectoryResult& result) {
  std::string out = "word,bin,x,y\n";
  for (const auto& p : result.points)
    out += csv::join_row({p.word, p.bin_label, format_csv_double(p.x),
                          format_csv_double(p.y)});
  return out;
}

}  // namespace aetas::stats
