#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hanzi/rng.hpp"

namespace hanzi {

enum class Gram { uni, bi };

using CharSentence = std::u32string;
using CharSentences = std::vector<CharSentence>;
/// Sentences of UTF-8 tokens (single characters or overlapping bigrams).
using TokenSentences = std::vector<std::vector<std::string>>;
using TokenId = std::uint32_t;

/// Keeps Chinese characters only. Sentences end at newlines and at 。！？
/// (full-width forms and their ASCII-less counterparts), and empty ones are
/// dropped. Throws Utf8Error on malformed input.
CharSentences preprocess(std::string_view raw_text);

TokenSentences to_unigrams(const CharSentences& sentences);

/// [a,b,c] -> [ab,bc]. Sentences shorter than two characters are dropped.
TokenSentences to_bigrams(const CharSentences& sentences);

TokenSentences tokenize(const CharSentences& sentences, Gram gram);

/// Categorical distribution proportional to count^power, sampled by binary
/// search over the cumulative table.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;

  static DiscreteSampler from_counts(std::span<const std::uint64_t> counts,
                                     double power);
  static DiscreteSampler from_weights(std::span<const double> weights);

  std::size_t size() const noexcept { return cumulative_.size(); }
  double probability(std::size_t i) const;
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
};

struct VocabOptions {
  std::uint64_t min_count = 10;
  /// Exponent applied to counts for the negative-sampling distribution.
  double ns_power = 0.75;
};

/// Token <-> id with counts. Ids are assigned by descending count, ties broken
/// by code point order.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Throws Error when no token reaches `min_count`.
  static Vocabulary build(const TokenSentences& sentences, const VocabOptions& options);
  static Vocabulary from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts,
                                const VocabOptions& options);

  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::uint64_t count(TokenId id) const { return counts_.at(id); }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  std::uint64_t total_count() const noexcept { return total_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  const DiscreteSampler& negative_distribution() const noexcept { return sampler_; }

  /// `<token> <count>` per line, in id order.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path, const VocabOptions& options);

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
  std::uint64_t total_ = 0;
  DiscreteSampler sampler_;
};

TokenId sample_negative(const Vocabulary& vocab, Rng& rng);

struct TokenStream {
  std::vector<std::vector<TokenId>> sentences;
  Gram gram = Gram::uni;

  std::size_t token_count() const;
};

/// Maps tokens to ids. Tokens missing from `vocab` are deleted in place (the
/// context window then spans the gap); sentences left empty are dropped.
TokenStream encode(const TokenSentences& sentences, const Vocabulary& vocab, Gram gram);

}  // namespace hanzi
