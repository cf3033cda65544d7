#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"
#include "sgns.hpp"

namespace aetas::align {

// Ablation knobs for the rotation estimate. top_n keeps only the top-N
// shared words by summed relative frequency; normalize and center reshape
// X and Y (rows to unit length, then column means to zero) before the SVD.
// None of them touch the vectors the rotation is finally applied to.
struct AlignOptions {
  std::size_t top_n = 0;  // 0 keeps the whole shared vocabulary
  bool normalize = false;
  bool center = false;

  // "top_n=500,normalize,center" style summary; empty at defaults.
  std::string tag() const;
};

struct AlignmentMap {
  std::string base_label;
  std::string target_label;
  linalg::Matrix rotation;  // dim x dim, orthogonal
  std::vector<std::string> shared_vocab;
  std::size_t shared_count = 0;
  std::string options_tag;  // non-default AlignOptions, recorded in provenance
};

// Intersection of the two vocabularies, lexicographic order. Spaces must
// share the embedding dimension.
std::vector<std::string> shared_vocabulary(const emb::EmbeddingSpace& base,
                                           const emb::EmbeddingSpace& target);

// R = U V^T from SVD(Y^T X), X = base rows and Y = target rows over the
// shared vocabulary in identical order; R minimizes ||YR - X||_F over
// orthogonal matrices. A shared vocabulary smaller than the dimension is
// allowed but warned about (rotation underdetermined).
AlignmentMap procrustes_align(const emb::EmbeddingSpace& base,
                              const emb::EmbeddingSpace& target,
                              const AlignOptions& options = {});

// Rotates every row v to vR. Vocabulary untouched; provenance gains
// ";aligned-to:<base_label>" plus ";procrustes:<tag>" for non-default options.
emb::EmbeddingSpace apply_alignment(const AlignmentMap& map,
                                    const emb::EmbeddingSpace& space);

// Anchor passes through unrotated; every other space is aligned straight to
// the anchor, never chained.
std::vector<emb::EmbeddingSpace> align_all_to_anchor(
    const std::vector<emb::EmbeddingSpace>& spaces, const std::string& anchor_label,
    const AlignOptions& options = {});

}  // namespace aetas::align
