#include "hanzi/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hanzi/error.hpp"
#include "hanzi/utf8.hpp"

namespace hanzi {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

CategoryCorrelation correlate(std::string category, std::size_t total,
                              const std::vector<double>& model,
                              const std::vector<double>& gold) {
  CategoryCorrelation c{std::move(category), total, model.size(), std::nullopt};
  if (model.size() >= 2) c.rho = spearman(model, gold);
  return c;
}

}  // namespace

std::optional<WordMode> parse_word_mode(std::string_view name) {
  if (name == "uni") return WordMode::uni;
  if (name == "bi") return WordMode::bi;
  return std::nullopt;
}

std::optional<std::vector<double>> word_vector(std::string_view word,
                                               const EmbeddingSet& embeddings,
                                               WordMode mode) {
  std::u32string chars;
  try {
    chars = utf8::decode(word);
  } catch (const Utf8Error&) {
    return std::nullopt;
  }
  if (chars.size() != 2) return std::nullopt;
  if (mode == WordMode::bi) {
    const auto v = embeddings.find(word);
    if (v.empty()) return std::nullopt;
    return std::vector<double>(v.begin(), v.end());
  }
  const auto first = embeddings.find(utf8::encode(chars[0]));
  const auto second = embeddings.find(utf8::encode(chars[1]));
  if (first.empty() || second.empty()) return std::nullopt;
  std::vector<double> out(first.begin(), first.end());
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

std::optional<double> cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: length mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return dot(a, b) / (na * nb);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share 1-based ranks i+1..j.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("spearman: need at least two values");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  // Both rank vectors have mean (n + 1) / 2.
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<SimilarityRecord> parse_similarity_dataset(std::istream& in,
                                                       const std::string& source) {
  std::vector<SimilarityRecord> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError(source, line_no, "expected word_a<TAB>word_b<TAB>score<TAB>category");
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(source, line_no, "empty word");
    double gold = 0.0;
    const auto& f = fields[2];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), gold);
    if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(gold)) {
      throw ParseError(source, line_no, "gold score is not a finite number: '" + f + "'");
    }
    out.push_back({std::move(fields[0]), std::move(fields[1]), gold, std::move(fields[3])});
  }
  return out;
}

std::vector<SimilarityRecord> load_similarity_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_similarity_dataset(in, path.string());
}

SimilarityReport eval_similarity(const EmbeddingSet& embeddings,
                                 std::span<const SimilarityRecord> dataset, WordMode mode) {
  if (dataset.empty()) throw std::invalid_argument("similarity dataset is empty");
  struct Bucket {
    std::size_t total = 0;
    std::vector<double> model, gold;
  };
  std::map<std::string, Bucket> buckets;
  Bucket all;
  for (const auto& r : dataset) {
    auto& b = buckets[r.category];
    ++b.total;
    ++all.total;
    const auto va = word_vector(r.word_a, embeddings, mode);
    const auto vb = word_vector(r.word_b, embeddings, mode);
    if (!va || !vb) continue;
    const auto score = cosine(*va, *vb);
    if (!score) continue;
    b.model.push_back(*score);
    b.gold.push_back(r.gold);
    all.model.push_back(*score);
    all.gold.push_back(r.gold);
  }
  SimilarityReport report;
  for (const auto& [name, b] : buckets) {
    report.categories.push_back(correlate(name, b.total, b.model, b.gold));
  }
  report.overall = correlate("overall", all.total, all.model, all.gold);
  return report;
}

}  // namespace hanzi
