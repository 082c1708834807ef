#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hanzi/embeddings.hpp"
#include "hanzi/logreg.hpp"
#include "hanzi/rng.hpp"

namespace hanzi {

enum class TitleMode {
  uni,      ///< average of character vectors
  bi,       ///< average of overlapping bigram vectors
  combine,  ///< [uni average ; bi average]
};

/// Where a bigram's vector comes from in bi and combine modes.
enum class BigramSource {
  token,         ///< the bigram token's own vector
  char_average,  ///< mean of its two characters' vectors, falling back to the token
};

std::optional<TitleMode> parse_title_mode(std::string_view name);
std::optional<BigramSource> parse_bigram_source(std::string_view name);

struct TitleEmbeddings {
  const EmbeddingSet* uni = nullptr;  ///< per-character vectors
  const EmbeddingSet* bi = nullptr;   ///< bigram token vectors
  BigramSource bigram_source = BigramSource::token;
};

/// Feature length produced by title_vector for `mode`. Throws Error when a
/// required table is missing or dimensions disagree.
std::size_t title_dim(const TitleEmbeddings& emb, TitleMode mode);

/// Averages gram vectors over the Chinese characters of `title`, skipping
/// out-of-vocabulary grams. In combine mode each half is zero when it has no
/// grams. nullopt when nothing at all is in vocabulary.
std::optional<std::vector<double>> title_vector(std::string_view title,
                                                const TitleEmbeddings& emb, TitleMode mode);

struct ClassificationRecord {
  std::string label;
  std::string title;
};

/// `label<TAB>title` lines; `#` comments.
std::vector<ClassificationRecord> parse_classification_dataset(std::istream& in,
                                                               const std::string& source);
std::vector<ClassificationRecord> load_classification_dataset(
    const std::filesystem::path& path);

struct StratifiedSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per class, round(test_fraction * class size) shuffled members go to test.
StratifiedSplit stratified_split(std::span<const std::size_t> labels,
                                 std::size_t num_classes, double test_fraction, Rng& rng);

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes)
      : classes_(classes), counts_(classes * classes, 0) {}

  void add(std::size_t actual, std::size_t predicted) {
    ++counts_.at(actual * classes_ + predicted);
  }
  std::size_t at(std::size_t actual, std::size_t predicted) const {
    return counts_.at(actual * classes_ + predicted);
  }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t total() const;
  std::size_t correct() const;

 private:
  std::size_t classes_;
  std::vector<std::size_t> counts_;
};

struct ClassMetrics {
  std::string label;
  std::size_t support = 0;  ///< test items of this class
  /// All three are empty when the class has no test items. Precision is 0
  /// when the class is never predicted; F1 is 0 when P + R = 0.
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

std::vector<ClassMetrics> metrics_from_confusion(const ConfusionMatrix& confusion,
                                                 std::span<const std::string> labels);

struct ClassifyOptions {
  TitleMode mode = TitleMode::bi;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  LogRegOptions logreg;
};

struct ClassificationReport {
  std::vector<std::string> classes;  ///< sorted label names
  ConfusionMatrix confusion{0};
  std::vector<ClassMetrics> metrics;
  double accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t titles_without_vectors = 0;  ///< mapped to the zero vector
};

/// Splits, trains one-vs-rest logistic regression on title vectors and
/// scores the held-out part. Throws Error when fewer than two classes occur.
ClassificationReport eval_classify(const TitleEmbeddings& emb,
                                   std::span<const ClassificationRecord> dataset,
                                   const ClassifyOptions& options);

}  // namespace hanzi
