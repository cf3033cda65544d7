#include "axes.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "csv.hpp"
#include "linalg.hpp"
#include "util.hpp"

namespace aetas::axes {

using nlohmann::json;

void AxisSpec::validate() const {
  if (name.empty()) throw ConfigError("axis spec: name must not be empty");
  if (positive.empty() || negative.empty())
    throw ConfigError("axis \"" + name + "\": both seed sides must be non-empty");
  std::set<std::string> pos(positive.begin(), positive.end());
  for (const auto& w : negative)
    if (pos.count(w))
      throw ConfigError("axis \"" + name + "\": seed \"" + w +
                        "\" appears on both sides");
}

namespace {

// Mean over the seeds present in the space; found reports coverage.
std::vector<double> side_mean(const emb::EmbeddingSpace& space,
                              const std::vector<std::string>& seeds, int& found) {
  std::vector<double> mean(static_cast<std::size_t>(space.dim()), 0.0);
  found = 0;
  for (const auto& s : seeds) {
    auto idx = space.vocab.find(s);
    if (!idx) continue;
    auto row = space.vectors.row(*idx);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    ++found;
  }
  if (found > 0)
    for (auto& v : mean) v /= static_cast<double>(found);
  return mean;
}

AxisVector build_axis_from(const emb::EmbeddingSpace& space, const std::string& name,
                           const std::vector<std::string>& positive,
                           const std::vector<std::string>& negative) {
  AxisVector axis;
  auto pos = side_mean(space, positive, axis.pos_found);
  auto neg = side_mean(space, negative, axis.neg_found);
  if (axis.pos_found == 0)
    throw DataError("axis \"" + name + "\": no positive seed found in space \"" +
                    space.label + "\"");
  if (axis.neg_found == 0)
    throw DataError("axis \"" + name + "\": no negative seed found in space \"" +
                    space.label + "\"");
  axis.direction.resize(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) axis.direction[i] = pos[i] - neg[i];
  if (linalg::norm(axis.direction) == 0.0)
    throw NumericError("axis \"" + name + "\" collapses to the zero vector in space \"" +
                       space.label + "\"");
  return axis;
}

}  // namespace

AxisVector build_axis(const emb::EmbeddingSpace& space, const AxisSpec& spec) {
  spec.validate();
  return build_axis_from(space, spec.name, spec.positive, spec.negative);
}

AxisProjection project(const emb::EmbeddingSpace& space, const AxisSpec& spec,
                       std::string_view word) {
  auto axis = build_axis(space, spec);
  AxisProjection p;
  p.axis = spec.name;
  p.word = std::string(word);
  p.bin_label = space.label;
  p.score = linalg::cosine(space.vector_of(word), axis.direction);
  p.pos_found = axis.pos_found;
  p.neg_found = axis.neg_found;
  return p;
}

SensitivityBand loo_sensitivity(const emb::EmbeddingSpace& space, const AxisSpec& spec,
                                std::string_view word) {
  spec.validate();
  auto word_vec = space.vector_of(word);

  SensitivityBand band;
  band.axis = spec.name;
  band.word = std::string(word);
  band.bin_label = space.label;
  auto full_axis = build_axis(space, spec);
  band.full_score = linalg::cosine(word_vec, full_axis.direction);

  auto present = [&](const std::vector<std::string>& seeds) {
    std::vector<std::string> out;
    for (const auto& s : seeds)
      if (space.vocab.find(s)) out.push_back(s);
    return out;
  };
  auto pos_present = present(spec.positive);
  auto neg_present = present(spec.negative);

  std::vector<double> scores;
  auto drop_each = [&](const std::vector<std::string>& side, bool is_positive) {
    if (side.size() < 2) return;  // side held fixed, nothing to vary
    for (std::size_t drop = 0; drop < side.size(); ++drop) {
      std::vector<std::string> variant;
      for (std::size_t i = 0; i < side.size(); ++i)
        if (i != drop) variant.push_back(side[i]);
      auto axis = is_positive
                      ? build_axis_from(space, spec.name, variant, neg_present)
                      : build_axis_from(space, spec.name, pos_present, variant);
      scores.push_back(linalg::cosine(word_vec, axis.direction));
    }
  };
  drop_each(pos_present, true);
  drop_each(neg_present, false);

  band.n_variants = static_cast<int>(scores.size());
  if (scores.empty()) {
    band.mean = band.min = band.max = band.full_score;
    return band;
  }
  band.min = *std::min_element(scores.begin(), scores.end());
  band.max = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += s;
  band.mean = sum / static_cast<double>(scores.size());
  return band;
}

AxisSpec load_axis_spec(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("invalid axis spec " + path.string() + ": " + e.what());
  }
  AxisSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    spec.positive = j.at("positive").get<std::vector<std::string>>();
    spec.negative = j.at("negative").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError("axis spec " + path.string() +
                      " needs name/positive/negative: " + e.what());
  }
  spec.validate();
  return spec;
}

std::string scores_csv(const std::vector<AxisProjection>& rows) {
  std::string out = "axis,word,bin,score,pos_found,neg_found\n";
  for (const auto& r : rows)
    out += csv::join_row({r.axis, r.word, r.bin_label, format_csv_double(r.score),
                          std::to_string(r.pos_found), std::to_string(r.neg_found)});
  return out;
}

std::string sensitivity_csv(const std::vector<SensitivityBand>& rows) {
  std::string out = "axis,word,bin,full_score,mean,min,max,n_variants\n";
  for (const auto& r : rows)
    out += csv::join_row({r.axis, r.word, r.bin_label, format_csv_double(r.full_score),
                          format_csv_double(r.mean), format_csv_double(r.min),
                          format_csv_double(r.max), std::to_string(r.n_variants)});
  return out;
}

}  // namespace aetas::axes
