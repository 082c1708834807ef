#pragma once

// Generators for test data: random gradient-check instances, a corpus with
// planted component families, and Markov text resembling a seed sample.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hanzi/corpus.hpp"
#include "hanzi/lexicon.hpp"
#include "hanzi/models.hpp"
#include "hanzi/rng.hpp"
#include "hanzi/utf8.hpp"

#ifndef HANZI_DATA_DIR
#define HANZI_DATA_DIR "data"
#endif

namespace hanzi::testing {

inline std::string data_path(const std::string& name) {
  return std::string(HANZI_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// A single example with random tables, ready for gradient checks.
struct RandomInstance {
  ModelConfig config;
  EmbeddingTables tables;
  std::vector<ComponentId> component_storage;  ///< backs the slot spans
  TrainingExample example;
  NegativeDraw negatives;
};

inline RandomInstance make_random_instance(ModelVariant variant, Gram gram, std::size_t dim,
                                           std::size_t window, std::size_t components,
                                           Rng& rng, std::size_t vocab_size = 20,
                                           std::size_t component_count = 12,
                                           double scale = 0.3) {
  RandomInstance inst;
  auto& cfg = inst.config;
  cfg.variant = variant;
  cfg.gram = gram;
  cfg.dim = dim;
  cfg.window = window;
  cfg.components = components;
  cfg.negatives = 3;

  auto fill = [&](Matrix& m, std::size_t rows, std::size_t cols) {
    m = Matrix(rows, cols);
    for (auto& v : m.values()) v = rng.uniform(-scale, scale);
  };
  fill(inst.tables.char_in, vocab_size, dim);
  fill(inst.tables.char_out, vocab_size, cfg.output_row_width());
  if (variant == ModelVariant::charcbow) fill(inst.tables.comp_in, component_count, dim);
  if (variant == ModelVariant::charskipgram) fill(inst.tables.comp_out, component_count, dim);

  const std::size_t slots = cfg.context_slots();
  const std::size_t lc = cfg.components_per_token();
  inst.component_storage.resize(slots * lc);
  for (auto& c : inst.component_storage) {
    c = static_cast<ComponentId>(rng.below(component_count));
  }
  inst.example.center = static_cast<TokenId>(rng.below(vocab_size));
  inst.example.context.assign(slots, std::nullopt);
  const std::size_t forced = rng.below(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    if (s != forced && rng.uniform() < 0.25) continue;
    ContextSlot slot;
    slot.token = static_cast<TokenId>(rng.below(vocab_size));
    if (uses_components(variant)) {
      slot.components = std::span<const ComponentId>(inst.component_storage).subspan(s * lc, lc);
    }
    inst.example.context[s] = slot;
  }

  auto draw_avoiding = [&](std::uint32_t target, std::size_t n) {
    std::vector<std::uint32_t> out;
    while (out.size() < cfg.negatives) {
      const auto d = static_cast<std::uint32_t>(rng.below(n));
      if (d != target) out.push_back(d);
    }
    return out;
  };
  if (variant == ModelVariant::cbow || variant == ModelVariant::charcbow) {
    inst.negatives.tokens.push_back(draw_avoiding(inst.example.center, vocab_size));
  } else {
    inst.negatives.tokens.resize(slots);
    if (variant == ModelVariant::charskipgram) inst.negatives.components.resize(slots * lc);
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& slot = inst.example.context[s];
      if (!slot) continue;
      inst.negatives.tokens[s] = draw_avoiding(slot->token, vocab_size);
      if (variant != ModelVariant::charskipgram) continue;
      for (std::size_t j = 0; j < lc; ++j) {
        inst.negatives.components[s * lc + j] = draw_avoiding(slot->components[j], component_count);
      }
    }
  }
  return inst;
}

/// `families` groups of `members` characters. Character (f, k) has
/// components [R<f>, P<f>_<k>]: a family-wide radical and a private second
/// component. Each sentence uses a single member index k and at most one
/// character per family, so characters of one family never co-occur, while
/// their contexts are drawn from the same family mix.
struct PlantedCorpus {
  CharSentences sentences;
  std::vector<std::vector<char32_t>> families;
  ComponentLexicon lexicon;
};

inline PlantedCorpus make_planted_corpus(std::uint64_t seed, std::size_t families = 6,
                                         std::size_t members = 10,
                                         std::size_t sentence_count = 2000) {
  std::map<char32_t, ComponentList> entries;
  std::vector<std::vector<char32_t>> fam(families);
  for (std::size_t f = 0; f < families; ++f) {
    for (std::size_t k = 0; k < members; ++k) {
      const char32_t ch = U'一' + static_cast<char32_t>(f * members + k);
      fam[f].push_back(ch);
      entries[ch] = {"R" + std::to_string(f), "P" + std::to_string(f) + "_" + std::to_string(k)};
    }
  }
  Rng rng(seed);
  CharSentences sentences;
  sentences.reserve(sentence_count);
  std::vector<std::size_t> order(families);
  for (std::size_t i = 0; i < sentence_count; ++i) {
    const std::size_t k = rng.below(members);
    for (std::size_t f = 0; f < families; ++f) order[f] = f;
    for (std::size_t j = families; j > 1; --j) std::swap(order[j - 1], order[rng.below(j)]);
    const std::size_t length = 4 + rng.below(families - 3);
    CharSentence s;
    for (std::size_t j = 0; j < length; ++j) s.push_back(fam[order[j]][k]);
    sentences.push_back(std::move(s));
  }
  return {std::move(sentences), std::move(fam),
          ComponentLexicon(std::move(entries), VariantTable::builtin())};
}

/// Text sampled from a character bigram chain fitted to `seed_text`; one
/// sentence per line, at least `min_chars` characters in total.
inline std::string markov_text(const std::string& seed_text, std::size_t min_chars,
                               std::uint64_t seed) {
  const auto sentences = preprocess(seed_text);
  constexpr char32_t kBoundary = 0;
  std::map<char32_t, std::vector<char32_t>> next;
  for (const auto& s : sentences) {
    char32_t prev = kBoundary;
    for (char32_t c : s) {
      next[prev].push_back(c);
      prev = c;
    }
    next[prev].push_back(kBoundary);
  }
  Rng rng(seed);
  std::string out;
  std::size_t produced = 0;
  while (produced < min_chars) {
    char32_t cur = kBoundary;
    std::size_t length = 0;
    while (true) {
      const auto& options = next[cur];
      const char32_t c = options[rng.below(options.size())];
      if (c == kBoundary || length >= 60) break;
      utf8::append(out, c);
      cur = c;
      ++length;
    }
    produced += length;
    out += '\n';
  }
  return out;
}

}  // namespace hanzi::testing
