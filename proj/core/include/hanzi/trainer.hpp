#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "hanzi/corpus.hpp"
#include "hanzi/embeddings.hpp"
#include "hanzi/lexicon.hpp"
#include "hanzi/models.hpp"

namespace hanzi {

struct TrainConfig {
  ModelConfig model;
  std::size_t epochs = 5;
  double lr_start = 0.05;
  double lr_min = 0.05 * 1e-4;
  std::uint64_t min_count = 10;
  double ns_power = 0.75;
  /// Frequent-token subsampling threshold; 0 disables it.
  double subsample_t = 0.0;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  /// When non-empty, embeddings are written here after every epoch.
  std::filesystem::path checkpoint_dir;

  /// Window 2, 5 negatives, dimension 50, min count 10, 2 components, and
  /// a variant-dependent starting learning rate.
  static TrainConfig defaults(ModelVariant variant = ModelVariant::charcbow,
                              Gram gram = Gram::uni);
  /// 0.05 for the CBOW variants, 0.025 for the SkipGram variants.
  static double default_lr_start(ModelVariant variant);

  void validate() const;
};

/// Linear decay from lr_start at position 0 to lr_min at `total_positions`,
/// clamped at lr_min.
double learning_rate(const TrainConfig& config, std::uint64_t position,
                     std::uint64_t total_positions);

struct TrainedEmbeddings {
  EmbeddingSet tokens;
  /// Component vectors: comp_in for charCBOW, comp_out for charSkipGram.
  std::optional<EmbeddingSet> components;
  TrainConfig config;
  /// Mean loss per trained example, one entry per epoch.
  std::vector<double> epoch_losses;
};

struct EpochProgress {
  std::size_t epoch;      ///< 1-based
  double mean_loss;
  double learning_rate;   ///< rate at the end of the epoch
};
using ProgressCallback = std::function<void(const EpochProgress&)>;

/// Trains `cfg.model.variant` over `stream`. With one worker the result is a
/// deterministic function of the arguments. With several workers, sentences
/// are sharded round-robin and workers update the shared tables without
/// locking (lost updates are tolerated).
///
/// Throws Error for an empty stream, a component model without a lexicon, or
/// a non-finite parameter.
TrainedEmbeddings train(const TokenStream& stream, const Vocabulary& vocab,
                        const ComponentLexicon* lexicon, const TrainConfig& cfg,
                        const ProgressCallback& progress = {});

/// Writes token vectors to `path` and component vectors, when present, to
/// component_file_for(path).
void save_embeddings(const TrainedEmbeddings& emb, const std::filesystem::path& path);
TrainedEmbeddings load_embeddings(const std::filesystem::path& path);

}  // namespace hanzi
