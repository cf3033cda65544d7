#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "linalg.hpp"
#include "vocab.hpp"

namespace aetas::emb {

struct TrainConfig {
  int dim = 300;
  int window = 5;
  int min_count = 10;
  int negative = 10;
  int epochs = 5;
  std::uint64_t seed = 42;
  double initial_lr = 0.025;
  double min_lr = 0.0001;
  double subsample_threshold = 0.0;  // 0 disables subsampling
  double unigram_power = 0.75;
  bool dynamic_window = true;  // sample effective window uniformly in [1, window]

  void validate() const;

  // Reduced settings sized so synthetic end-to-end runs finish in minutes.
  static TrainConfig desk_scale();
};

struct EmbeddingSpace {
  std::string label;
  Vocabulary vocab;
  linalg::Matrix vectors;  // |V| x dim input vectors
  TrainConfig config;
  std::string provenance;  // "independent" | "incremental-from:<label>" [+ ";aligned-to:<base>..."]

  int dim() const { return static_cast<int>(vectors.cols()); }
  std::span<const double> vector_of(std::string_view word) const;
};

// Loss and update for one (center, positive, negatives) sample:
//   L = -log sigmoid(w.c+) - sum_neg log sigmoid(-w.c-)
// sgns_step applies one SGD step, modifying center and context vectors in
// place (the center gradient is accumulated over all samples before being
// applied, as in the reference algorithm). Returns false if a non-finite
// activation shows up.
bool sgns_step(std::span<double> center, std::span<double> positive,
               const std::vector<std::span<double>>& negatives, double lr);
double sgns_loss(std::span<const double> center, std::span<const double> positive,
                 const std::vector<std::span<const double>>& negatives);
// Analytic d(loss)/d(center); for the finite-difference check.
std::vector<double> sgns_center_gradient(
    std::span<const double> center, std::span<const double> positive,
    const std::vector<std::span<const double>>& negatives);

// Deterministic SGNS training: equal (docs, vocab, config, label-independent)
// inputs give bit-identical matrices. Documents are processed in (year, id)
// order; each document is one sentence stream and windows never cross
// document boundaries. Learning rate decays linearly from initial_lr to
// min_lr over the exact total number of training pairs (counted by a dry
// replay of the window/subsample RNG stream).
EmbeddingSpace train_sgns(const std::vector<corpus::TokenizedDoc>& docs,
                          const Vocabulary& vocab, const TrainConfig& config,
                          const std::string& label = "");

// Time-forward chain: the first bin trains from scratch; later bins start
// from the previous snapshot, keeping vectors of shared words and giving new
// words their usual seeded init. Context vectors are training-internal and
// restart per bin, as does the learning-rate schedule.
std::vector<EmbeddingSpace> train_incremental(
    const std::vector<std::pair<std::string, std::vector<corpus::TokenizedDoc>>>& bins,
    const TrainConfig& config);

// Text vector format: header "<vocab_size> <dim>", one "word v1 ... vdim"
// line per word at full double precision, plus a JSON sidecar
// <label>.meta.json carrying config, counts, and provenance.
void save_space(const EmbeddingSpace& space, const std::filesystem::path& dir);
EmbeddingSpace load_space(const std::filesystem::path& vec_path);

}  // namespace aetas::emb
