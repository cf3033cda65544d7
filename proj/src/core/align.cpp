#include "align.hpp"

#include <algorithm>
#include <iostream>

#include "util.hpp"

namespace aetas::align {

std::vector<std::string> shared_vocabulary(const emb::EmbeddingSpace& base,
                                           const emb::EmbeddingSpace& target) {
  if (base.dim() != target.dim())
    throw DataError("cannot combine spaces \"" + base.label + "\" (dim " +
                    std::to_string(base.dim()) + ") and \"" + target.label +
                    "\" (dim " + std::to_string(target.dim()) + ")");
  std::vector<std::string> shared;
  for (const auto& w : base.vocab.words)
    if (target.vocab.find(w)) shared.push_back(w);
  if (shared.empty())
    throw DataError("no shared vocabulary between \"" + base.label + "\" and \"" +
                    target.label + "\"");
  std::sort(shared.begin(), shared.end());
  return shared;
}

std::string AlignOptions::tag() const {
  std::string t;
  auto add = [&t](const std::string& part) {
    t += t.empty() ? part : "," + part;
  };
  if (top_n > 0) add("top_n=" + std::to_string(top_n));
  if (normalize) add("normalize");
  if (center) add("center");
  return t;
}

namespace {

// Keep the top_n shared words by summed relative frequency, ties
// lexicographic; result re-sorted so row order stays deterministic.
std::vector<std::string> restrict_by_frequency(std::vector<std::string> shared,
                                               const emb::EmbeddingSpace& base,
                                               const emb::EmbeddingSpace& target,
                                               std::size_t top_n) {
  if (top_n == 0 || top_n >= shared.size()) return shared;
  auto rel = [](const emb::EmbeddingSpace& s, const std::string& w) {
    auto idx = s.vocab.find(w);
    return static_cast<double>(s.vocab.counts[*idx]) /
           static_cast<double>(s.vocab.total_tokens);
  };
  std::stable_sort(shared.begin(), shared.end(),
                   [&](const std::string& a, const std::string& b) {
                     double fa = rel(base, a) + rel(target, a);
                     double fb = rel(base, b) + rel(target, b);
                     if (fa != fb) return fa > fb;
                     return a < b;
                   });
  shared.resize(top_n);
  std::sort(shared.begin(), shared.end());
  return shared;
}

void preprocess_rows(linalg::Matrix& m, const AlignOptions& options) {
  if (options.normalize) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double n = linalg::norm(m.row(i));
      if (n > 0.0)
        for (double& v : m.row(i)) v /= n;
    }
  }
  if (options.center) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, j);
      mean /= static_cast<double>(m.rows());
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) -= mean;
    }
  }
}

}  // namespace

AlignmentMap procrustes_align(const emb::EmbeddingSpace& base,
                              const emb::EmbeddingSpace& target,
                              const AlignOptions& options) {
  AlignmentMap map;
  map.base_label = base.label;
  map.target_label = target.label;
  map.shared_vocab = restrict_by_frequency(shared_vocabulary(base, target), base,
                                           target, options.top_n);
  map.shared_count = map.shared_vocab.size();
  map.options_tag = options.tag();

  const std::size_t d = static_cast<std::size_t>(base.dim());
  if (map.shared_count < d)
    std::cerr << "warning: aligning \"" << target.label << "\" to \"" << base.label
              << "\": shared vocabulary " << map.shared_count
              << " is below dimension " << d << "; rotation underdetermined\n";

  linalg::Matrix x(map.shared_count, d), y(map.shared_count, d);
  for (std::size_t i = 0; i < map.shared_count; ++i) {
    auto xr = base.vector_of(map.shared_vocab[i]);
    auto yr = target.vector_of(map.shared_vocab[i]);
    std::copy(xr.begin(), xr.end(), x.row(i).begin());
    std::copy(yr.begin(), yr.end(), y.row(i).begin());
  }
  preprocess_rows(x, options);
  preprocess_rows(y, options);

  auto s = linalg::svd(linalg::multiply(linalg::transpose(y), x));
  map.rotation = linalg::multiply(s.u, linalg::transpose(s.v));
  return map;
}

emb::EmbeddingSpace apply_alignment(const AlignmentMap& map,
                                    const emb::EmbeddingSpace& space) {
  if (static_cast<std::size_t>(space.dim()) != map.rotation.rows())
    throw DataError("alignment map dimension " + std::to_string(map.rotation.rows()) +
                    " does not fit space \"" + space.label + "\" (dim " +
                    std::to_string(space.dim()) + ")");
  if (!map.target_label.empty() && map.target_label != space.label)
    throw DataError("alignment map was built for \"" + map.target_label +
                    "\", not \"" + space.label + "\"");
  emb::EmbeddingSpace out = space;
  out.vectors = linalg::multiply(space.vectors, map.rotation);
  out.provenance += ";aligned-to:" + map.base_label;
  if (!map.options_tag.empty()) out.provenance += ";procrustes:" + map.options_tag;
  return out;
}

std::vector<emb::EmbeddingSpace> align_all_to_anchor(
    const std::vector<emb::EmbeddingSpace>& spaces, const std::string& anchor_label,
    const AlignOptions& options) {
  const emb::EmbeddingSpace* anchor = nullptr;
  for (const auto& s : spaces)
    if (s.label == anchor_label) anchor = &s;
  if (!anchor)
    throw DataError("anchor bin \"" + anchor_label + "\" not among the trained spaces");

  std::vector<emb::EmbeddingSpace> out;
  out.reserve(spaces.size());
  for (const auto& s : spaces) {
    if (s.label == anchor_label) {
      out.push_back(s);
      continue;
    }
    out.push_back(apply_alignment(procrustes_align(*anchor, s, options), s));
  }
  return out;
}

}  // namespace aetas::align
