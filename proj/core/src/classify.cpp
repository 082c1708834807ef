#include "hanzi/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "hanzi/corpus.hpp"
#include "hanzi/error.hpp"
#include "hanzi/utf8.hpp"

namespace hanzi {
namespace {

// Running mean of gram vectors.
struct Average {
  std::vector<double> sum;
  std::size_t n = 0;

  explicit Average(std::size_t dim) : sum(dim, 0.0) {}
  void add(std::span<const double> v) {
    axpy(1.0, v, sum);
    ++n;
  }
  void add_mean(std::span<const double> a, std::span<const double> b) {
    axpy(0.5, a, sum);
    axpy(0.5, b, sum);
    ++n;
  }
  std::vector<double> mean() const {
    auto out = sum;
    if (n > 0) {
      for (auto& v : out) v /= static_cast<double>(n);
    }
    return out;
  }
};

Average uni_average(const CharSentences& sentences, const EmbeddingSet& uni) {
  Average avg(uni.dim());
  for (const auto& s : sentences) {
    for (char32_t c : s) {
      const auto v = uni.find(utf8::encode(c));
      if (!v.empty()) avg.add(v);
    }
  }
  return avg;
}

Average bi_average(const CharSentences& sentences, const TitleEmbeddings& emb,
                   std::size_t dim) {
  Average avg(dim);
  for (const auto& bigram_sentence : to_bigrams(sentences)) {
    for (const auto& bigram : bigram_sentence) {
      if (emb.bigram_source == BigramSource::char_average && emb.uni != nullptr) {
        const auto chars = utf8::decode(bigram);
        const auto a = emb.uni->find(utf8::encode(chars[0]));
        const auto b = emb.uni->find(utf8::encode(chars[1]));
        if (!a.empty() && !b.empty()) {
          avg.add_mean(a, b);
          continue;
        }
      }
      if (emb.bi == nullptr) continue;
      const auto v = emb.bi->find(bigram);
      if (!v.empty()) avg.add(v);
    }
  }
  return avg;
}

std::size_t bi_dim(const TitleEmbeddings& emb) {
  if (emb.bi != nullptr) {
    if (emb.bigram_source == BigramSource::char_average && emb.uni != nullptr &&
        emb.uni->dim() != emb.bi->dim()) {
      throw Error("character and bigram embeddings differ in dimension");
    }
    return emb.bi->dim();
  }
  if (emb.bigram_source == BigramSource::char_average && emb.uni != nullptr) {
    return emb.uni->dim();
  }
  throw Error("bigram embeddings are required for this title mode");
}

std::size_t uni_dim(const TitleEmbeddings& emb) {
  if (emb.uni == nullptr) throw Error("character embeddings are required for this title mode");
  return emb.uni->dim();
}

}  // namespace

std::optional<TitleMode> parse_title_mode(std::string_view name) {
  if (name == "uni") return TitleMode::uni;
  if (name == "bi") return TitleMode::bi;
  if (name == "combine") return TitleMode::combine;
  return std::nullopt;
}

std::optional<BigramSource> parse_bigram_source(std::string_view name) {
  if (name == "token") return BigramSource::token;
  if (name == "char-average") return BigramSource::char_average;
  return std::nullopt;
}

std::size_t title_dim(const TitleEmbeddings& emb, TitleMode mode) {
  switch (mode) {
    case TitleMode::uni: return uni_dim(emb);
    case TitleMode::bi: return bi_dim(emb);
    case TitleMode::combine: return uni_dim(emb) + bi_dim(emb);
  }
  return 0;
}

std::optional<std::vector<double>> title_vector(std::string_view title,
                                                const TitleEmbeddings& emb, TitleMode mode) {
  const auto sentences = preprocess(title);
  switch (mode) {
    case TitleMode::uni: {
      const auto avg = uni_average(sentences, *emb.uni);
      if (avg.n == 0) return std::nullopt;
      return avg.mean();
    }
    case TitleMode::bi: {
      const auto avg = bi_average(sentences, emb, bi_dim(emb));
      if (avg.n == 0) return std::nullopt;
      return avg.mean();
    }
    case TitleMode::combine: {
      if (emb.uni == nullptr) throw Error("combine mode needs character embeddings");
      const auto uni = uni_average(sentences, *emb.uni);
      const auto bi = bi_average(sentences, emb, bi_dim(emb));
      if (uni.n == 0 && bi.n == 0) return std::nullopt;
      auto out = uni.mean();
      const auto tail = bi.mean();
      out.insert(out.end(), tail.begin(), tail.end());
      return out;
    }
  }
  return std::nullopt;
}

std::vector<ClassificationRecord> parse_classification_dataset(std::istream& in,
                                                               const std::string& source) {
  std::vector<ClassificationRecord> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source, line_no, "expected label<TAB>title");
    }
    auto title = line.substr(tab + 1);
    try {
      utf8::decode(title);
    } catch (const Utf8Error& e) {
      throw ParseError(source, line_no, e.what());
    }
    out.push_back({line.substr(0, tab), std::move(title)});
  }
  return out;
}

std::vector<ClassificationRecord> load_classification_dataset(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_classification_dataset(in, path.string());
}

StratifiedSplit stratified_split(std::span<const std::size_t> labels, std::size_t num_classes,
                                 double test_fraction, Rng& rng) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw Error("test fraction must lie in [0, 1]");
  }
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) members.at(labels[i]).push_back(i);
  StratifiedSplit split;
  for (auto& m : members) {
    // Fisher-Yates with the portable bounded draw.
    for (std::size_t i = m.size(); i > 1; --i) {
      std::swap(m[i - 1], m[rng.below(i)]);
    }
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(m.size())));
    split.test.insert(split.test.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), m.begin() + static_cast<std::ptrdiff_t>(n_test), m.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < classes_; ++k) n += at(k, k);
  return n;
}

std::vector<ClassMetrics> metrics_from_confusion(const ConfusionMatrix& confusion,
                                                 std::span<const std::string> labels) {
  const std::size_t k = confusion.classes();
  if (labels.size() != k) throw Error("label count does not match confusion matrix");
  std::vector<ClassMetrics> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < k; ++o) {
      predicted += confusion.at(o, c);
      actual += confusion.at(c, o);
    }
    ClassMetrics m;
    m.label = labels[c];
    m.support = actual;
    if (actual > 0) {
      const double tp = static_cast<double>(confusion.at(c, c));
      const double p = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
      const double r = tp / static_cast<double>(actual);
      m.precision = p;
      m.recall = r;
      m.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    out.push_back(std::move(m));
  }
  return out;
}

ClassificationReport eval_classify(const TitleEmbeddings& emb,
                                   std::span<const ClassificationRecord> dataset,
                                   const ClassifyOptions& options) {
  ClassificationReport report;
  std::map<std::string, std::size_t> class_ids;
  for (const auto& r : dataset) class_ids.emplace(r.label, 0);
  if (class_ids.size() < 2) throw Error("classification needs at least two classes");
  for (auto& [label, id] : class_ids) {
    id = report.classes.size();
    report.classes.push_back(label);
  }
  const std::size_t k = report.classes.size();

  const std::size_t dim = title_dim(emb, options.mode);
  Matrix features(dataset.size(), dim);
  std::vector<std::size_t> labels(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    labels[i] = class_ids.at(dataset[i].label);
    if (const auto v = title_vector(dataset[i].title, emb, options.mode)) {
      std::ranges::copy(*v, features.row(i).begin());
    } else {
      ++report.titles_without_vectors;
    }
  }

  auto rng = Rng::stream(options.seed, "split");
  const auto split = stratified_split(labels, k, options.test_fraction, rng);
  auto gather = [&](const std::vector<std::size_t>& idx, Matrix& x, std::vector<std::size_t>& y) {
    x = Matrix(idx.size(), dim);
    y.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::ranges::copy(features.row(idx[i]), x.row(i).begin());
      y[i] = labels[idx[i]];
    }
  };
  Matrix train_x, test_x;
  std::vector<std::size_t> train_y, test_y;
  gather(split.train, train_x, train_y);
  gather(split.test, test_x, test_y);
  report.train_size = train_y.size();
  report.test_size = test_y.size();

  const auto model = train_logreg(train_x, train_y, k, options.logreg);
  report.confusion = ConfusionMatrix(k);
  for (std::size_t i = 0; i < test_y.size(); ++i) {
    report.confusion.add(test_y[i], model.predict(test_x.row(i)));
  }
  report.metrics = metrics_from_confusion(report.confusion, report.classes);
  report.accuracy = report.test_size == 0
                        ? 0.0
                        : static_cast<double>(report.confusion.correct()) /
                              static_cast<double>(report.test_size);
  return report;
}

}  // namespace hanzi
