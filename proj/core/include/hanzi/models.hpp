#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hanzi/corpus.hpp"
#include "hanzi/lexicon.hpp"
#include "hanzi/matrix.hpp"
#include "hanzi/rng.hpp"

namespace hanzi {

enum class ModelVariant { cbow, skipgram, charcbow, charskipgram };

/// How CBOW folds its context vectors into one input vector.
enum class ContextCombine { average, sum };

std::string_view to_string(ModelVariant variant);
std::string_view to_string(Gram gram);
std::string_view to_string(ContextCombine combine);
std::optional<ModelVariant> parse_model_variant(std::string_view name);
std::optional<Gram> parse_gram(std::string_view name);
std::optional<ContextCombine> parse_context_combine(std::string_view name);

constexpr bool uses_components(ModelVariant v) noexcept {
  return v == ModelVariant::charcbow || v == ModelVariant::charskipgram;
}

struct ModelConfig {
  ModelVariant variant = ModelVariant::charcbow;
  Gram gram = Gram::uni;
  std::size_t dim = 50;         ///< embedding dimension
  std::size_t window = 2;       ///< context radius on each side
  std::size_t components = 2;   ///< components kept per character
  std::size_t negatives = 5;    ///< negative samples per positive prediction
  ContextCombine cbow_combine = ContextCombine::average;

  /// Components attached to one token: `components` for single characters,
  /// twice that for bigrams.
  std::size_t components_per_token() const noexcept {
    return gram == Gram::uni ? components : 2 * components;
  }
  std::size_t context_slots() const noexcept { return 2 * window; }
  /// One context slot of the charCBOW input: token vector then its components.
  std::size_t slot_width() const noexcept {
    return (1 + components_per_token()) * dim;
  }
  /// 2T(1+L_c)K.
  std::size_t charcbow_row_width() const noexcept {
    return context_slots() * slot_width();
  }
  std::size_t output_row_width() const noexcept {
    return variant == ModelVariant::charcbow ? charcbow_row_width() : dim;
  }

  /// Throws Error when a size is zero.
  void validate() const;
};

using ComponentId = std::uint32_t;
inline constexpr ComponentId kPadComponentId = 0;
inline constexpr ComponentId kUnkComponentId = 1;

/// Component strings for one token: a single character's components, or the
/// two halves of a bigram concatenated (each half radical first).
ComponentList token_components(std::string_view token, Gram gram,
                               const ComponentLexicon& lexicon, std::size_t m);

/// Dense ids for the components reachable from a vocabulary, with a
/// precomputed id list per token and an occurrence-weighted distribution for
/// drawing component negatives. PAD and UNK always hold ids 0 and 1.
class ComponentIndex {
 public:
  ComponentIndex() = default;

  static ComponentIndex build(const Vocabulary& vocab, Gram gram,
                              const ComponentLexicon& lexicon, std::size_t m,
                              double ns_power);

  /// Direct construction: `names` must start with PAD and UNK; `per_token`
  /// is the flattened token -> component id table; `counts` feeds sampling.
  ComponentIndex(std::vector<Component> names, std::size_t per_token,
                 std::vector<ComponentId> token_table,
                 std::vector<std::uint64_t> counts, double ns_power);

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t per_token() const noexcept { return per_token_; }
  const Component& name(ComponentId id) const { return names_.at(id); }
  const std::vector<Component>& names() const noexcept { return names_; }
  std::optional<ComponentId> find(std::string_view name) const;

  std::span<const ComponentId> token_components(TokenId token) const {
    return {token_table_.data() + token * per_token_, per_token_};
  }
  const DiscreteSampler& negative_distribution() const noexcept { return sampler_; }

 private:
  std::vector<Component> names_;
  std::size_t per_token_ = 0;
  std::vector<ComponentId> token_table_;
  DiscreteSampler sampler_;
};

struct ContextSlot {
  TokenId token = 0;
  /// Length L_c; empty for the plain CBOW/SkipGram variants.
  std::span<const ComponentId> components;
};

/// One center position. `context` has 2T entries ordered by offset
/// -T..-1, +1..+T; an empty optional marks a slot beyond the sentence edge.
struct TrainingExample {
  TokenId center = 0;
  std::vector<std::optional<ContextSlot>> context;

  std::size_t present_slots() const;
};

/// Offset of context slot `slot` relative to the center (never 0).
constexpr std::ptrdiff_t slot_offset(std::size_t slot, std::size_t window) noexcept {
  const auto s = static_cast<std::ptrdiff_t>(slot);
  const auto t = static_cast<std::ptrdiff_t>(window);
  return s < t ? s - t : s - t + 1;
}

/// Fills `example` for `sentence[position]` with the full +-T window clipped
/// at the sentence edges. `components` may be null for non-component models.
void build_example(std::span<const TokenId> sentence, std::size_t position,
                   const ModelConfig& config, const ComponentIndex* components,
                   TrainingExample& example);

enum class TableId : std::uint8_t { char_in, comp_in, char_out, comp_out };

/// Input and output parameter tables. Tables a variant does not use are
/// left empty (zero rows).
struct EmbeddingTables {
  Matrix char_in;   ///< |V| x K: center and context token vectors
  Matrix comp_in;   ///< |C| x K: component input vectors (charCBOW)
  Matrix char_out;  ///< |V| x output_row_width()
  Matrix comp_out;  ///< |C| x K: component output vectors (charSkipGram)

  /// Input tables uniform in [-0.5/K, 0.5/K], output tables zero.
  static EmbeddingTables create(const ModelConfig& config, std::size_t vocab_size,
                                std::size_t component_count, Rng& rng);

  Matrix& table(TableId id);
  const Matrix& table(TableId id) const;
  bool all_finite() const;
};

struct RowGradient {
  TableId table;
  std::size_t row;
  std::vector<double> values;
};

/// Gradient restricted to the rows an example touches. Repeated rows (e.g. a
/// component shared by two context slots) accumulate into one entry.
class SparseGradient {
 public:
  void add(TableId table, std::size_t row, std::span<const double> values,
           double scale = 1.0);
  const RowGradient* find(TableId table, std::size_t row) const;
  const std::vector<RowGradient>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }

  /// param -= lr * grad for every stored row.
  void apply(EmbeddingTables& tables, double lr) const;

 private:
  std::vector<RowGradient> rows_;
};

struct NsLoss {
  double loss = 0.0;
  std::vector<double> input_grad;
};

/// Negative-sampling logistic loss of scoring `input` against output row
/// `target` and the rows in `negatives`:
///   -log sigma(input . o_target) - sum_n log sigma(-input . o_n)
/// Output-row gradients are added to `grads` under `out_table`; the gradient
/// with respect to `input` is returned.
NsLoss ns_loss_and_grads(std::span<const double> input, std::uint32_t target,
                         std::span<const std::uint32_t> negatives, const Matrix& out,
                         TableId out_table, SparseGradient& grads);

/// Negatives for one example. `tokens` holds one list per token prediction
/// (one for the CBOW variants, one per context slot for the SkipGram
/// variants); `components` holds one list per component prediction of
/// charSkipGram, indexed slot * L_c + j.
struct NegativeDraw {
  std::vector<std::vector<TokenId>> tokens;
  std::vector<std::vector<ComponentId>> components;
};

struct NegativeSamplers {
  const DiscreteSampler* tokens = nullptr;
  const DiscreteSampler* components = nullptr;
};

/// Up to 8 redraws per collision with `target`; a negative that still
/// collides is dropped.
std::vector<std::uint32_t> draw_excluding(const DiscreteSampler& sampler,
                                          std::uint32_t target, std::size_t count,
                                          Rng& rng);

NegativeDraw draw_negatives(const TrainingExample& example, const ModelConfig& config,
                            const NegativeSamplers& samplers, Rng& rng);

struct ExampleGradient {
  double loss = 0.0;
  SparseGradient gradient;
  bool skipped = false;  ///< no context slot present; nothing to learn
};

/// Loss and exact gradient of one example for fixed negatives. Pure: reads
/// `tables` only.
ExampleGradient loss_and_gradient(const TrainingExample& example,
                                  const EmbeddingTables& tables,
                                  const ModelConfig& config, const NegativeDraw& negatives);

/// h = cat(c_{-T}, e_{-T}, ..., c_{+T}, e_{+T}); absent slots are zero blocks.
std::vector<double> charcbow_context_vector(const TrainingExample& example,
                                            const EmbeddingTables& tables,
                                            const ModelConfig& config);

/// Draws negatives, computes the gradient at the current parameters, applies
/// one SGD update at rate `lr`, and returns the pre-update loss.
double train_step(const TrainingExample& example, EmbeddingTables& tables,
                  const ModelConfig& config, double lr,
                  const NegativeSamplers& samplers, Rng& rng);

double cbow_step(const TrainingExample& example, EmbeddingTables& tables,
                 const ModelConfig& config, double lr,
                 const NegativeSamplers& samplers, Rng& rng);
double skipgram_step(const TrainingExample& example, EmbeddingTables& tables,
                     const ModelConfig& config, double lr,
                     const NegativeSamplers& samplers, Rng& rng);
double charcbow_step(const TrainingExample& example, EmbeddingTables& tables,
                     const ModelConfig& config, double lr,
                     const NegativeSamplers& samplers, Rng& rng);
double charskipgram_step(const TrainingExample& example, EmbeddingTables& tables,
                         const ModelConfig& config, double lr,
                         const NegativeSamplers& samplers, Rng& rng);

}  // namespace hanzi
