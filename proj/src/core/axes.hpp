#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgns.hpp"

namespace aetas::axes {

struct AxisSpec {
  std::string name;
  std::vector<std::string> positive;
  std::vector<std::string> negative;

  void validate() const;  // non-empty sides, no word on both
};

struct AxisVector {
  std::vector<double> direction;  // mean(positive) - mean(negative)
  int pos_found = 0;
  int neg_found = 0;
};

struct AxisProjection {
  std::string axis;
  std::string word;
  std::string bin_label;
  double score = 0.0;  // cosine with the axis, in [-1, 1]
  int pos_found = 0;
  int neg_found = 0;
};

struct SensitivityBand {
  std::string axis;
  std::string word;
  std::string bin_label;
  double full_score = 0.0;  // all seeds present
  double mean = 0.0;        // over leave-one-out variants
  double min = 0.0;
  double max = 0.0;
  int n_variants = 0;  // 0 when neither side could be varied
};

// Axis built from whichever seeds the space knows; missing seeds are counted,
// never substituted. Throws when a whole side is absent or the difference
// vector is zero.
AxisVector build_axis(const emb::EmbeddingSpace& space, const AxisSpec& spec);

AxisProjection project(const emb::EmbeddingSpace& space, const AxisSpec& spec,
                       std::string_view word);

// One variant per dropped seed, drawn only from sides with at least two
// present seeds; a side with fewer is held fixed.
SensitivityBand loo_sensitivity(const emb::EmbeddingSpace& space, const AxisSpec& spec,
                                std::string_view word);

// JSON file {"name": ..., "positive": [...], "negative": [...]}.
AxisSpec load_axis_spec(const std::filesystem::path& path);

std::string scores_csv(const std::vector<AxisProjection>& rows);
std::string sensitivity_csv(const std::vector<SensitivityBand>& rows);

}  // namespace aetas::axes
