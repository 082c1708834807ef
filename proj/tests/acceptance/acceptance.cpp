// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hanzi/classify.hpp"
#include "hanzi/lexicon.hpp"
#include "hanzi/logreg.hpp"
#include "hanzi/manifest.hpp"
#include "hanzi/similarity.hpp"
#include "hanzi/trainer.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace hanzi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

constexpr ModelVariant kVariants[] = {ModelVariant::cbow, ModelVariant::skipgram,
                                      ModelVariant::charcbow, ModelVariant::charskipgram};
constexpr Gram kGrams[] = {Gram::uni, Gram::bi};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- 1. gradients -----------------------------------------------------------
constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 30.0;

Outcome gradients() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240601);
  const std::size_t dims[] = {2, 5, 8};
  double worst = 0.0;
  std::size_t instances = 0;
  bool all_nonzero = true;
  for (auto v : kVariants) {
    for (auto g : kGrams) {
      for (int i = 0; i < 24; ++i) {
        const auto inst = testing::make_random_instance(v, g, dims[i % 3], 1 + (i / 3) % 2,
                                                        1 + (i / 6) % 2, rng);
        const auto c = testing::finite_difference_check(inst.example, inst.tables, inst.config,
                                                        inst.negatives, 1e-4);
        worst = std::max(worst, c.max_relative_error);
        all_nonzero = all_nonzero && c.nonzero > 0;
        ++instances;
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst < kGradTolerance && all_nonzero && secs < kGradSeconds,
          std::to_string(instances) + " instances, max rel err " + fmt("%.2e", worst) +
              " (tol 1e-4), " + fmt("%.1f", secs) + " s (limit 30 s)"};
}

// --- 2. output row width ------------------------------------------------------
Outcome row_width() {
  std::size_t configs = 0;
  for (auto g : kGrams) {
    for (std::size_t k : {2, 5, 8}) {
      for (std::size_t t : {1, 2}) {
        for (std::size_t m : {1, 2}) {
          ModelConfig cfg;
          cfg.variant = ModelVariant::charcbow;
          cfg.gram = g;
          cfg.dim = k;
          cfg.window = t;
          cfg.components = m;
          const std::size_t lc = g == Gram::uni ? m : 2 * m;
          Rng rng(1);
          const auto tables = EmbeddingTables::create(cfg, 20, 12, rng);
          if (tables.char_out.cols() != 2 * t * (1 + lc) * k) return {false, "width mismatch"};
          if (g == Gram::uni && tables.char_out.cols() * 20 != 2 * k * t * (m + 1) * 20) {
            return {false, "uni width differs from 2KT(M+1)"};
          }
          if (cfg.charcbow_row_width() != tables.char_out.cols()) return {false, "config width"};
          ++configs;
        }
      }
    }
  }
  return {true, std::to_string(configs) + " configurations"};
}

// --- 3. planted families ------------------------------------------------------
constexpr int kPlantedSeeds = 5;
constexpr int kPlantedRequired = 4;
constexpr double kPlantedSeconds = 120.0;

double intra_family_cosine(const TrainedEmbeddings& emb,
                           const std::vector<std::vector<char32_t>>& families) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (const auto& fam : families) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
      for (std::size_t j = i + 1; j < fam.size(); ++j) {
        const auto a = emb.tokens.find(utf8::encode(fam[i]));
        const auto b = emb.tokens.find(utf8::encode(fam[j]));
        if (a.empty() || b.empty()) continue;
        total += cosine(a, b).value_or(0.0);
        ++pairs;
      }
    }
  }
  return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

Outcome planted() {
  const auto start = std::chrono::steady_clock::now();
  int sg_wins = 0, cbow_wins = 0;
  std::string detail;
  for (int s = 1; s <= kPlantedSeeds; ++s) {
    const auto corpus = testing::make_planted_corpus(static_cast<std::uint64_t>(s));
    const auto tokens = to_unigrams(corpus.sentences);
    VocabOptions opt;
    opt.min_count = 1;
    const auto vocab = Vocabulary::build(tokens, opt);
    const auto stream = encode(tokens, vocab, Gram::uni);
    double score[4];
    for (int v = 0; v < 4; ++v) {
      auto cfg = TrainConfig::defaults(kVariants[v], Gram::uni);
      cfg.model.dim = 20;
      cfg.min_count = 1;
      cfg.epochs = 5;
      cfg.seed = static_cast<std::uint64_t>(s);
      const auto emb = train(stream, vocab, &corpus.lexicon, cfg);
      score[v] = intra_family_cosine(emb, corpus.families);
    }
    sg_wins += score[3] > score[1];
    cbow_wins += score[2] > score[0];
    detail += " s" + std::to_string(s) + ":cbow " + fmt("%.3f", score[0]) + "/char " +
              fmt("%.3f", score[2]) + ",sg " + fmt("%.3f", score[1]) + "/char " +
              fmt("%.3f", score[3]);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {sg_wins >= kPlantedRequired && cbow_wins >= kPlantedRequired && secs < kPlantedSeconds,
          "charSkipGram>SkipGram " + std::to_string(sg_wins) + "/5, charCBOW>CBOW " +
              std::to_string(cbow_wins) + "/5 (need 4), " + fmt("%.1f", secs) +
              " s (limit 120 s);" + detail};
}

// --- 4. convergence on natural-like text --------------------------------------
constexpr std::size_t kNaturalTokens = 50'000;

Outcome convergence() {
  const auto text = testing::markov_text(
      testing::read_file(testing::data_path("sample_corpus.txt")), kNaturalTokens, 4242);
  const auto sentences = preprocess(text);
  const auto lexicon = load_lexicon(testing::data_path("sample_lexicon.txt"));
  std::size_t ok = 0;
  std::string detail;
  for (auto g : kGrams) {
    const auto tokens = tokenize(sentences, g);
    const auto vocab = Vocabulary::build(tokens, VocabOptions{});
    const auto stream = encode(tokens, vocab, g);
    for (auto v : kVariants) {
      const auto cfg = TrainConfig::defaults(v, g);
      const auto emb = train(stream, vocab, &lexicon, cfg);
      const double first = emb.epoch_losses.front();
      const double last = emb.epoch_losses.back();
      ok += last < first;
      detail += " " + std::string(to_string(v)) + "-" + std::string(to_string(g)) + " " +
                fmt("%.3f", first) + "->" + fmt("%.3f", last);
    }
  }
  std::size_t chars = 0;
  for (const auto& s : sentences) chars += s.size();
  return {ok == 8, std::to_string(ok) + "/8 decreasing over " + std::to_string(chars) +
                       " tokens;" + detail};
}

// --- 5. spearman --------------------------------------------------------------
Outcome spearman_oracle() {
  Rng rng(555);
  double worst = 0.0;
  bool defined_match = true;
  for (int i = 0; i < 100; ++i) {
    const auto n = 2 + rng.below(49);
    std::vector<double> xs(n), ys(n);
    const auto lx = 1 + rng.below(n), ly = 1 + rng.below(n);
    for (auto& x : xs) x = static_cast<double>(rng.below(lx));
    for (auto& y : ys) y = static_cast<double>(rng.below(ly)) * 0.25;
    const auto got = spearman(xs, ys);
    const auto want = testing::brute_force_spearman(xs, ys);
    if (got.has_value() != want.has_value()) {
      defined_match = false;
      continue;
    }
    if (got) worst = std::max(worst, std::abs(*got - *want));
  }
  const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
  const auto half = spearman(a, b);
  const bool exact = half && *half == 0.5;
  return {defined_match && worst <= 1e-12 && exact,
          "max |diff| " + fmt("%.1e", worst) + " (tol 1e-12), [1,2,3] vs [1,3,2] = " +
              (half ? fmt("%.17g", *half) : "undefined")};
}

// --- 6. logistic regression -----------------------------------------------------
Outcome logistic() {
  Rng rng(66);
  const std::size_t k = 4, n = 200, d = 6;
  Matrix x(n, d);
  std::vector<std::size_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % k;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = (j == y[i] ? 3.0 : 0.0) + rng.uniform(-1, 1);
  }
  const auto model = train_logreg(x, y, k);
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < n; ++i) cm.add(y[i], model.predict(x.row(i)));
  const double train_acc = static_cast<double>(cm.correct()) / static_cast<double>(n);

  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    ConfusionMatrix m(k);
    for (int i = 0; i < 80; ++i) m.add(rng.below(k), rng.below(k));
    const std::vector<std::string> labels{"a", "b", "c", "d"};
    const auto metrics = metrics_from_confusion(m, labels);
    for (std::size_t c = 0; c < k; ++c) {
      if (!metrics[c].precision) continue;
      const auto o = testing::prf_from_counts(m, c);
      worst = std::max({worst, std::abs(*metrics[c].precision - o.precision),
                        std::abs(*metrics[c].recall - o.recall),
                        std::abs(*metrics[c].f1 - o.f1)});
    }
  }

  double chance_sum = 0.0;
  bool chance_ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng r(seed * 1000);
    Matrix tx(400, 5), ex(400, 5);
    std::vector<std::size_t> ty(400), ey(400);
    for (auto& v : tx.values()) v = r.uniform(-1, 1);
    for (auto& v : ex.values()) v = r.uniform(-1, 1);
    for (auto& l : ty) l = r.below(k);
    for (auto& l : ey) l = r.below(k);
    const auto m = train_logreg(tx, ty, k);
    double hit = 0;
    for (std::size_t i = 0; i < 400; ++i) hit += m.predict(ex.row(i)) == ey[i];
    const double acc = hit / 400.0;
    chance_sum += acc;
    chance_ok = chance_ok && acc >= 0.15 && acc <= 0.35;
  }
  return {train_acc >= 0.99 && worst <= 1e-12 && chance_ok,
          "separable train acc " + fmt("%.3f", train_acc) + " (need 0.99), P/R/F max diff " +
              fmt("%.1e", worst) + ", chance mean acc " + fmt("%.3f", chance_sum / 5) +
              " (each in [0.15, 0.35], 1/k = 0.25)"};
}

// --- 7. radical variant table ---------------------------------------------------
Outcome appendix() {
  static const char* const kRows[24][2] = {
      {"艹", "艸"}, {"扌", "手"}, {"亻", "人"}, {"氵", "水"}, {"刂", "刀"}, {"車", "车"},
      {"犾", "犬"}, {"攴", "支"}, {"灬", "火"}, {"纟", "糸"}, {"钅", "金"}, {"耂", "老"},
      {"麥", "麦"}, {"牛", "牛"}, {"亼", "食"}, {"食", "食"}, {"衤", "示"}, {"忄", "心"},
      {"囧", "网"}, {"王", "玉"}, {"讠", "言"}, {"衤", "衣"}, {"月", "肉"}, {"辵", "走"},
  };
  const auto rows = builtin_variant_mappings();
  if (rows.size() != 24) return {false, "table has " + std::to_string(rows.size()) + " rows"};
  const auto table = VariantTable::builtin();
  std::size_t verbatim = 0, resolved = 0;
  for (std::size_t i = 0; i < 24; ++i) {
    verbatim += rows[i].variant == kRows[i][0] && rows[i].original == kRows[i][1];
    // The first row listing a variant decides its normalization.
    std::size_t first = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (std::string(kRows[j][0]) == kRows[i][0]) {
        first = j;
        break;
      }
    }
    resolved += table.normalize(kRows[i][0]) == kRows[first][1];
  }
  const auto lexicon = load_lexicon(testing::data_path("sample_lexicon.txt"));
  const auto inventory = lexicon.component_inventory();
  std::size_t idempotent = 0;
  for (const auto& c : inventory) {
    const auto once = lexicon.normalize_variant(c);
    idempotent += lexicon.normalize_variant(once) == once;
  }
  return {verbatim == 24 && resolved == 24 && idempotent == inventory.size(),
          std::to_string(verbatim) + "/24 rows verbatim, " + std::to_string(resolved) +
              "/24 resolve (duplicate 衤 row shadowed by the first), idempotent over " +
              std::to_string(idempotent) + "/" + std::to_string(inventory.size()) +
              " components"};
}

// --- 8. reproducibility ---------------------------------------------------------
std::string slurp(const fs::path& p) { return testing::read_file(p.string()); }

Outcome reproducibility() {
  const auto text = testing::markov_text(
      testing::read_file(testing::data_path("sample_corpus.txt")), 8000, 8);
  const auto lexicon = load_lexicon(testing::data_path("sample_lexicon.txt"));
  const auto tokens = to_unigrams(preprocess(text));
  VocabOptions opt;
  opt.min_count = 2;
  const auto vocab = Vocabulary::build(tokens, opt);
  const auto stream = encode(tokens, vocab, Gram::uni);
  const auto dir = fs::temp_directory_path() / "hanzi_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  bool identical = true;
  double worst = 0.0;
  for (auto v : kVariants) {
    auto cfg = TrainConfig::defaults(v, Gram::uni);
    cfg.min_count = 2;
    cfg.epochs = 2;
    const auto a = train(stream, vocab, &lexicon, cfg);
    const auto b = train(stream, vocab, &lexicon, cfg);
    const auto pa = dir / (std::string(to_string(v)) + "-a.vec");
    const auto pb = dir / (std::string(to_string(v)) + "-b.vec");
    save_embeddings(a, pa);
    save_embeddings(b, pb);
    identical = identical && slurp(pa) == slurp(pb);
    if (a.components) {
      identical = identical && slurp(component_file_for(pa)) == slurp(component_file_for(pb));
    }
    const auto back = load_embeddings(pa);
    const auto x = a.tokens.vectors().values();
    const auto y = back.tokens.vectors().values();
    if (x.size() != y.size()) return {false, "round trip changed the table size"};
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  fs::remove_all(dir);
  return {identical && worst <= 1e-6,
          std::string(identical ? "byte-identical" : "DIFFERENT") +
              " outputs for 4 variants, round-trip max |diff| " + fmt("%.1e", worst) +
              " (tol 1e-6)"};
}

// --- 9. defaults ----------------------------------------------------------------
Outcome defaults() {
  const auto m = train_manifest(TrainConfig::defaults());
  const std::pair<const char*, const char*> expected[] = {
      {"train.window", "2"}, {"train.negatives", "5"}, {"train.dim", "50"},
      {"train.min-count", "10"}, {"train.components", "2"}};
  std::string detail;
  bool ok = true;
  for (const auto& [key, value] : expected) {
    const auto got = m.get(key).value_or("<missing>");
    ok = ok && got == value;
    detail += std::string(" ") + key + "=" + got;
  }
  return {ok, "manifest snapshot:" + detail};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"gradient correctness", gradients},
      {"charCBOW output row width", row_width},
      {"planted component families", planted},
      {"convergence on natural-like text", convergence},
      {"spearman oracle", spearman_oracle},
      {"logistic regression", logistic},
      {"radical variant table", appendix},
      {"reproducibility", reproducibility},
      {"default configuration", defaults},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
