#include "hanzi/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hanzi/error.hpp"
#include "hanzi/utf8.hpp"

namespace hanzi {
namespace {

constexpr bool is_sentence_end(char32_t c) {
  return c == U'\n' || c == U'。' || c == U'！' || c == U'？';
}

}  // namespace

CharSentences preprocess(std::string_view raw_text) {
  const auto decoded = utf8::decode(raw_text);
  CharSentences out;
  CharSentence current;
  for (char32_t c : decoded) {
    if (is_sentence_end(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else if (utf8::is_chinese_character(c)) {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

TokenSentences to_unigrams(const CharSentences& sentences) {
  TokenSentences out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<std::string> tokens;
    tokens.reserve(s.size());
    for (char32_t c : s) tokens.push_back(utf8::encode(c));
    out.push_back(std::move(tokens));
  }
  return out;
}

TokenSentences to_bigrams(const CharSentences& sentences) {
  TokenSentences out;
  for (const auto& s : sentences) {
    if (s.size() < 2) continue;
    std::vector<std::string> tokens;
    tokens.reserve(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      tokens.push_back(utf8::encode(std::u32string_view(s).substr(i, 2)));
    }
    out.push_back(std::move(tokens));
  }
  return out;
}

TokenSentences tokenize(const CharSentences& sentences, Gram gram) {
  return gram == Gram::uni ? to_unigrams(sentences) : to_bigrams(sentences);
}

DiscreteSampler DiscreteSampler::from_counts(std::span<const std::uint64_t> counts,
                                             double power) {
  std::vector<double> weights(counts.size());
  std::transform(counts.begin(), counts.end(), weights.begin(), [power](auto c) {
    return c == 0 ? 0.0 : std::pow(static_cast<double>(c), power);
  });
  return from_weights(weights);
}

DiscreteSampler DiscreteSampler::from_weights(std::span<const double> weights) {
  DiscreteSampler sampler;
  if (weights.empty()) return sampler;
  sampler.cumulative_.resize(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error("sampling weights must be finite and non-negative");
    }
    running += weights[i];
    sampler.cumulative_[i] = running;
  }
  if (running <= 0.0) throw Error("sampling weights sum to zero");
  for (auto& c : sampler.cumulative_) c /= running;
  // Pin from the last positive weight onward so that a draw in [0, 1) never
  // lands on a zero-probability tail entry through rounding.
  std::size_t last = weights.size() - 1;
  while (weights[last] == 0.0) --last;
  std::fill(sampler.cumulative_.begin() + static_cast<std::ptrdiff_t>(last),
            sampler.cumulative_.end(), 1.0);
  return sampler;
}

double DiscreteSampler::probability(std::size_t i) const {
  const double hi = cumulative_.at(i);
  return i == 0 ? hi : hi - cumulative_[i - 1];
}

std::size_t DiscreteSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<std::size_t>(it - cumulative_.begin());
}

Vocabulary Vocabulary::build(const TokenSentences& sentences, const VocabOptions& options) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : s) ++counts[t];
  }
  return from_counts({counts.begin(), counts.end()}, options);
}

Vocabulary Vocabulary::from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts,
                                   const VocabOptions& options) {
  if (options.min_count < 1) throw Error("min_count must be at least 1");
  std::erase_if(counts, [&](const auto& kv) { return kv.second < options.min_count; });
  if (counts.empty()) {
    throw Error("vocabulary is empty (no token occurs at least " +
                std::to_string(options.min_count) + " times)");
  }
  // Byte order of UTF-8 strings equals code point order.
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  vocab.tokens_.reserve(counts.size());
  vocab.counts_.reserve(counts.size());
  for (auto& [token, count] : counts) {
    const auto id = static_cast<TokenId>(vocab.tokens_.size());
    if (!vocab.index_.emplace(token, id).second) {
      throw Error("duplicate token in counts: " + token);
    }
    vocab.tokens_.push_back(std::move(token));
    vocab.counts_.push_back(count);
    vocab.total_ += count;
  }
  vocab.sampler_ = DiscreteSampler::from_counts(vocab.counts_, options.ns_power);
  return vocab;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << ' ' << counts_[i] << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, const VocabOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string token;
    std::uint64_t count = 0;
    std::string extra;
    if (!(is >> token >> count) || (is >> extra)) {
      throw ParseError(path.string(), line_no, "expected '<token> <count>'");
    }
    counts.emplace_back(std::move(token), count);
  }
  return from_counts(std::move(counts), options);
}

TokenId sample_negative(const Vocabulary& vocab, Rng& rng) {
  return static_cast<TokenId>(vocab.negative_distribution().sample(rng));
}

std::size_t TokenStream::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

TokenStream encode(const TokenSentences& sentences, const Vocabulary& vocab, Gram gram) {
  TokenStream stream;
  stream.gram = gram;
  for (const auto& s : sentences) {
    std::vector<TokenId> ids;
    ids.reserve(s.size());
    for (const auto& t : s) {
      if (const auto id = vocab.find(t)) ids.push_back(*id);
    }
    if (!ids.empty()) stream.sentences.push_back(std::move(ids));
  }
  return stream;
}

}  // namespace hanzi
