#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hanzi/embeddings.hpp"

namespace hanzi {

/// How a two-character word is looked up.
enum class WordMode {
  uni,  ///< concatenation of the two characters' vectors (length 2K)
  bi,   ///< the bigram token's own vector (length K)
};

std::optional<WordMode> parse_word_mode(std::string_view name);

/// Vector for `word`, or nullopt when the word is not two characters long or
/// any unit it needs is out of vocabulary.
std::optional<std::vector<double>> word_vector(std::string_view word,
                                               const EmbeddingSet& embeddings,
                                               WordMode mode);

/// nullopt when either vector has zero norm.
std::optional<double> cosine(std::span<const double> a, std::span<const double> b);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman's rho as the Pearson correlation of average ranks. Throws
/// std::invalid_argument for mismatched lengths or fewer than two values;
/// nullopt when either side has zero rank variance.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

struct SimilarityRecord {
  std::string word_a;
  std::string word_b;
  double gold = 0.0;
  std::string category;
};

/// `word_a<TAB>word_b<TAB>gold_score<TAB>category` lines; `#` comments.
std::vector<SimilarityRecord> parse_similarity_dataset(std::istream& in,
                                                       const std::string& source);
std::vector<SimilarityRecord> load_similarity_dataset(const std::filesystem::path& path);

struct CategoryCorrelation {
  std::string category;
  std::size_t total = 0;  ///< pairs in the dataset
  std::size_t used = 0;   ///< pairs with both vectors available
  std::optional<double> rho;  ///< undefined below two pairs or with constant scores
};

struct SimilarityReport {
  std::vector<CategoryCorrelation> categories;  ///< sorted by category name
  CategoryCorrelation overall;

  bool has_coverage() const noexcept { return overall.used > 0; }
  std::size_t dropped() const noexcept { return overall.total - overall.used; }
};

/// Scores each pair by cosine similarity and correlates with the gold scores
/// per category and overall. Throws std::invalid_argument on an empty dataset.
SimilarityReport eval_similarity(const EmbeddingSet& embeddings,
                                 std::span<const SimilarityRecord> dataset, WordMode mode);

}  // namespace hanzi
