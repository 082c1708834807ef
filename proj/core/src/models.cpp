#include "hanzi/models.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

#include "hanzi/error.hpp"
#include "hanzi/utf8.hpp"

namespace hanzi {
namespace {

constexpr int kMaxResample = 8;

// log(sigma(x)) without overflow for large |x|.
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_variant(const ModelConfig& config, ModelVariant expected) {
  if (config.variant != expected) {
    throw Error("model config is " + std::string(to_string(config.variant)) +
                ", expected " + std::string(to_string(expected)));
  }
}

}  // namespace

std::string_view to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::cbow: return "cbow";
    case ModelVariant::skipgram: return "skipgram";
    case ModelVariant::charcbow: return "charcbow";
    case ModelVariant::charskipgram: return "charskipgram";
  }
  return "?";
}

std::string_view to_string(Gram gram) { return gram == Gram::uni ? "uni" : "bi"; }

std::string_view to_string(ContextCombine combine) {
  return combine == ContextCombine::average ? "average" : "sum";
}

std::optional<ModelVariant> parse_model_variant(std::string_view name) {
  for (auto v : {ModelVariant::cbow, ModelVariant::skipgram, ModelVariant::charcbow,
                 ModelVariant::charskipgram}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::optional<Gram> parse_gram(std::string_view name) {
  if (name == "uni") return Gram::uni;
  if (name == "bi") return Gram::bi;
  return std::nullopt;
}

std::optional<ContextCombine> parse_context_combine(std::string_view name) {
  if (name == "average") return ContextCombine::average;
  if (name == "sum") return ContextCombine::sum;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (dim < 1) throw Error("embedding dimension must be at least 1");
  if (window < 1) throw Error("window must be at least 1");
  if (components < 1) throw Error("components per character must be at least 1");
  if (negatives < 1) throw Error("negatives must be at least 1");
}

ComponentList token_components(std::string_view token, Gram gram,
                               const ComponentLexicon& lexicon, std::size_t m) {
  const auto chars = utf8::decode(token);
  const std::size_t expected = gram == Gram::uni ? 1 : 2;
  ComponentList out;
  out.reserve(expected * m);
  for (std::size_t i = 0; i < expected; ++i) {
    // Malformed tokens fall back to the unknown-character components.
    const char32_t ch = chars.size() == expected ? chars[i] : U'\0';
    auto half = lexicon.components_of(ch, m);
    out.insert(out.end(), std::make_move_iterator(half.begin()),
               std::make_move_iterator(half.end()));
  }
  return out;
}

ComponentIndex ComponentIndex::build(const Vocabulary& vocab, Gram gram,
                                     const ComponentLexicon& lexicon, std::size_t m,
                                     double ns_power) {
  const std::size_t per_token = gram == Gram::uni ? m : 2 * m;
  std::vector<Component> names{Component(kPadComponent), Component(kUnkComponent)};
  std::unordered_map<Component, ComponentId> ids{{names[0], kPadComponentId},
                                                 {names[1], kUnkComponentId}};
  std::vector<std::uint64_t> counts(2, 0);
  std::vector<ComponentId> table;
  table.reserve(vocab.size() * per_token);
  for (TokenId t = 0; t < vocab.size(); ++t) {
    for (auto& c : hanzi::token_components(vocab.token(t), gram, lexicon, m)) {
      auto [it, inserted] = ids.try_emplace(c, static_cast<ComponentId>(names.size()));
      if (inserted) {
        names.push_back(std::move(c));
        counts.push_back(0);
      }
      counts[it->second] += vocab.count(t);
      table.push_back(it->second);
    }
  }
  return ComponentIndex(std::move(names), per_token, std::move(table), std::move(counts),
                        ns_power);
}

ComponentIndex::ComponentIndex(std::vector<Component> names, std::size_t per_token,
                               std::vector<ComponentId> token_table,
                               std::vector<std::uint64_t> counts, double ns_power)
    : names_(std::move(names)), per_token_(per_token), token_table_(std::move(token_table)) {
  if (names_.size() < 2 || names_[kPadComponentId] != kPadComponent ||
      names_[kUnkComponentId] != kUnkComponent) {
    throw Error("component index must start with PAD and UNK");
  }
  if (per_token_ == 0 || token_table_.size() % per_token_ != 0) {
    throw Error("component table size is not a multiple of components per token");
  }
  if (counts.size() != names_.size()) throw Error("component counts size mismatch");
  for (auto id : token_table_) {
    if (id >= names_.size()) throw Error("component id out of range");
  }
  sampler_ = DiscreteSampler::from_counts(counts, ns_power);
}

std::optional<ComponentId> ComponentIndex::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ComponentId>(it - names_.begin());
}

std::size_t TrainingExample::present_slots() const {
  return static_cast<std::size_t>(
      std::count_if(context.begin(), context.end(), [](const auto& s) { return s.has_value(); }));
}

void build_example(std::span<const TokenId> sentence, std::size_t position,
                   const ModelConfig& config, const ComponentIndex* components,
                   TrainingExample& example) {
  example.center = sentence[position];
  example.context.assign(config.context_slots(), std::nullopt);
  const auto n = static_cast<std::ptrdiff_t>(sentence.size());
  for (std::size_t s = 0; s < config.context_slots(); ++s) {
    const auto p = static_cast<std::ptrdiff_t>(position) + slot_offset(s, config.window);
    if (p < 0 || p >= n) continue;
    ContextSlot slot{.token = sentence[static_cast<std::size_t>(p)], .components = {}};
    if (components != nullptr) slot.components = components->token_components(slot.token);
    example.context[s] = slot;
  }
}

EmbeddingTables EmbeddingTables::create(const ModelConfig& config, std::size_t vocab_size,
                                        std::size_t component_count, Rng& rng) {
  config.validate();
  const std::size_t k = config.dim;
  const double half = 0.5 / static_cast<double>(k);
  auto uniform_init = [&](Matrix& m) {
    for (auto& v : m.values()) v = rng.uniform(-half, half);
  };
  EmbeddingTables t;
  t.char_in = Matrix(vocab_size, k);
  uniform_init(t.char_in);
  t.char_out = Matrix(vocab_size, config.output_row_width());
  if (config.variant == ModelVariant::charcbow) {
    t.comp_in = Matrix(component_count, k);
    uniform_init(t.comp_in);
  } else if (config.variant == ModelVariant::charskipgram) {
    t.comp_out = Matrix(component_count, k);
  }
  return t;
}

Matrix& EmbeddingTables::table(TableId id) {
  switch (id) {
    case TableId::char_in: return char_in;
    case TableId::comp_in: return comp_in;
    case TableId::char_out: return char_out;
    case TableId::comp_out: return comp_out;
  }
  return char_in;
}

const Matrix& EmbeddingTables::table(TableId id) const {
  return const_cast<EmbeddingTables&>(*this).table(id);
}

bool EmbeddingTables::all_finite() const {
  return char_in.all_finite() && comp_in.all_finite() && char_out.all_finite() &&
         comp_out.all_finite();
}

void SparseGradient::add(TableId table, std::size_t row, std::span<const double> values,
                         double scale) {
  auto it = std::find_if(rows_.begin(), rows_.end(), [&](const RowGradient& g) {
    return g.table == table && g.row == row;
  });
  if (it == rows_.end()) {
    rows_.push_back({table, row, std::vector<double>(values.size(), 0.0)});
    it = std::prev(rows_.end());
  }
  assert(it->values.size() == values.size());
  axpy(scale, values, it->values);
}

const RowGradient* SparseGradient::find(TableId table, std::size_t row) const {
  const auto it = std::find_if(rows_.begin(), rows_.end(), [&](const RowGradient& g) {
    return g.table == table && g.row == row;
  });
  return it == rows_.end() ? nullptr : &*it;
}

void SparseGradient::apply(EmbeddingTables& tables, double lr) const {
  for (const auto& g : rows_) axpy(-lr, g.values, tables.table(g.table).row(g.row));
}

NsLoss ns_loss_and_grads(std::span<const double> input, std::uint32_t target,
                         std::span<const std::uint32_t> negatives, const Matrix& out,
                         TableId out_table, SparseGradient& grads) {
  if (input.size() != out.cols()) {
    throw std::logic_error("input width does not match output table width");
  }
  NsLoss result;
  result.input_grad.assign(input.size(), 0.0);

  auto score = [&](std::uint32_t row, bool positive) {
    const auto o = out.row(row);
    const double s = dot(input, o);
    // d/ds of -log sigma(s) is sigma(s) - 1; of -log sigma(-s) is sigma(s).
    const double g = positive ? sigmoid(s) - 1.0 : sigmoid(s);
    result.loss -= positive ? log_sigmoid(s) : log_sigmoid(-s);
    axpy(g, o, result.input_grad);
    grads.add(out_table, row, input, g);
  };

  score(target, true);
  for (auto n : negatives) score(n, false);
  return result;
}

std::vector<std::uint32_t> draw_excluding(const DiscreteSampler& sampler,
                                          std::uint32_t target, std::size_t count,
                                          Rng& rng) {
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto draw = static_cast<std::uint32_t>(sampler.sample(rng));
    for (int retry = 0; draw == target && retry < kMaxResample; ++retry) {
      draw = static_cast<std::uint32_t>(sampler.sample(rng));
    }
    if (draw != target) out.push_back(draw);
  }
  return out;
}

NegativeDraw draw_negatives(const TrainingExample& example, const ModelConfig& config,
                            const NegativeSamplers& samplers, Rng& rng) {
  NegativeDraw draw;
  if (samplers.tokens == nullptr ||
      (config.variant == ModelVariant::charskipgram && samplers.components == nullptr)) {
    throw std::logic_error("missing negative sampler");
  }
  const auto& tokens = *samplers.tokens;
  switch (config.variant) {
    case ModelVariant::cbow:
    case ModelVariant::charcbow:
      draw.tokens.push_back(draw_excluding(tokens, example.center, config.negatives, rng));
      break;
    case ModelVariant::skipgram:
    case ModelVariant::charskipgram: {
      const bool with_components = config.variant == ModelVariant::charskipgram;
      const std::size_t lc = config.components_per_token();
      draw.tokens.resize(example.context.size());
      if (with_components) draw.components.resize(example.context.size() * lc);
      for (std::size_t s = 0; s < example.context.size(); ++s) {
        const auto& slot = example.context[s];
        if (!slot) continue;
        draw.tokens[s] = draw_excluding(tokens, slot->token, config.negatives, rng);
        if (!with_components) continue;
        for (std::size_t j = 0; j < lc; ++j) {
          draw.components[s * lc + j] =
              draw_excluding(*samplers.components, slot->components[j], config.negatives, rng);
        }
      }
      break;
    }
  }
  return draw;
}

std::vector<double> charcbow_context_vector(const TrainingExample& example,
                                            const EmbeddingTables& tables,
                                            const ModelConfig& config) {
  const std::size_t k = config.dim;
  const std::size_t lc = config.components_per_token();
  if (example.context.size() != config.context_slots()) {
    throw std::logic_error("context slot count does not match 2T");
  }
  std::vector<double> h(config.charcbow_row_width(), 0.0);
  for (std::size_t s = 0; s < example.context.size(); ++s) {
    const auto& slot = example.context[s];
    if (!slot) continue;
    if (slot->components.size() != lc) {
      throw std::logic_error("context slot has wrong component count");
    }
    auto block = std::span(h).subspan(s * config.slot_width(), config.slot_width());
    std::ranges::copy(tables.char_in.row(slot->token), block.begin());
    for (std::size_t j = 0; j < lc; ++j) {
      std::ranges::copy(tables.comp_in.row(slot->components[j]),
                        block.begin() + static_cast<std::ptrdiff_t>((1 + j) * k));
    }
  }
  return h;
}

ExampleGradient loss_and_gradient(const TrainingExample& example,
                                  const EmbeddingTables& tables, const ModelConfig& config,
                                  const NegativeDraw& negatives) {
  ExampleGradient result;
  const std::size_t present = example.present_slots();
  if (present == 0) {
    result.skipped = true;
    return result;
  }
  const std::size_t k = config.dim;
  auto& grads = result.gradient;

  switch (config.variant) {
    case ModelVariant::cbow: {
      std::vector<double> v(k, 0.0);
      for (const auto& slot : example.context) {
        if (slot) axpy(1.0, tables.char_in.row(slot->token), v);
      }
      const double scale = config.cbow_combine == ContextCombine::average
                               ? 1.0 / static_cast<double>(present)
                               : 1.0;
      for (auto& x : v) x *= scale;
      const auto ns = ns_loss_and_grads(v, example.center, negatives.tokens.at(0),
                                        tables.char_out, TableId::char_out, grads);
      result.loss = ns.loss;
      for (const auto& slot : example.context) {
        if (slot) grads.add(TableId::char_in, slot->token, ns.input_grad, scale);
      }
      break;
    }
    case ModelVariant::charcbow: {
      const auto h = charcbow_context_vector(example, tables, config);
      const auto ns = ns_loss_and_grads(h, example.center, negatives.tokens.at(0),
                                        tables.char_out, TableId::char_out, grads);
      result.loss = ns.loss;
      const std::span<const double> dh(ns.input_grad);
      for (std::size_t s = 0; s < example.context.size(); ++s) {
        const auto& slot = example.context[s];
        if (!slot) continue;
        const auto block = dh.subspan(s * config.slot_width(), config.slot_width());
        grads.add(TableId::char_in, slot->token, block.first(k));
        for (std::size_t j = 0; j < slot->components.size(); ++j) {
          grads.add(TableId::comp_in, slot->components[j], block.subspan((1 + j) * k, k));
        }
      }
      break;
    }
    case ModelVariant::skipgram:
    case ModelVariant::charskipgram: {
      const bool with_components = config.variant == ModelVariant::charskipgram;
      const std::size_t lc = config.components_per_token();
      const auto center = tables.char_in.row(example.center);
      std::vector<double> center_grad(k, 0.0);
      for (std::size_t s = 0; s < example.context.size(); ++s) {
        const auto& slot = example.context[s];
        if (!slot) continue;
        auto ns = ns_loss_and_grads(center, slot->token, negatives.tokens.at(s),
                                    tables.char_out, TableId::char_out, grads);
        result.loss += ns.loss;
        axpy(1.0, ns.input_grad, center_grad);
        if (!with_components) continue;
        for (std::size_t j = 0; j < lc; ++j) {
          ns = ns_loss_and_grads(center, slot->components[j],
                                 negatives.components.at(s * lc + j), tables.comp_out,
                                 TableId::comp_out, grads);
          result.loss += ns.loss;
          axpy(1.0, ns.input_grad, center_grad);
        }
      }
      grads.add(TableId::char_in, example.center, center_grad);
      break;
    }
  }
  return result;
}

double train_step(const TrainingExample& example, EmbeddingTables& tables,
                  const ModelConfig& config, double lr, const NegativeSamplers& samplers,
                  Rng& rng) {
  if (example.present_slots() == 0) return 0.0;
  const auto negatives = draw_negatives(example, config, samplers, rng);
  const auto result = loss_and_gradient(example, tables, config, negatives);
  if (lr != 0.0) result.gradient.apply(tables, lr);
  return result.loss;
}

double cbow_step(const TrainingExample& example, EmbeddingTables& tables,
                 const ModelConfig& config, double lr, const NegativeSamplers& samplers,
                 Rng& rng) {
  require_variant(config, ModelVariant::cbow);
  return train_step(example, tables, config, lr, samplers, rng);
}

double skipgram_step(const TrainingExample& example, EmbeddingTables& tables,
                     const ModelConfig& config, double lr, const NegativeSamplers& samplers,
                     Rng& rng) {
  require_variant(config, ModelVariant::skipgram);
  return train_step(example, tables, config, lr, samplers, rng);
}

double charcbow_step(const TrainingExample& example, EmbeddingTables& tables,
                     const ModelConfig& config, double lr, const NegativeSamplers& samplers,
                     Rng& rng) {
  require_variant(config, ModelVariant::charcbow);
  return train_step(example, tables, config, lr, samplers, rng);
}

double charskipgram_step(const TrainingExample& example, EmbeddingTables& tables,
                         const ModelConfig& config, double lr,
                         const NegativeSamplers& samplers, Rng& rng) {
  require_variant(config, ModelVariant::charskipgram);
  return train_step(example, tables, config, lr, samplers, rng);
}

}  // namespace hanzi
