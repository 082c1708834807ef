#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hanzi/similarity.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "hanzi_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args, const std::string& env = "") {
  const auto out = work_dir() / "stdout.txt";
  const auto err = work_dir() / "stderr.txt";
  const std::string cmd = env + " \"" HANZI_EMBED_EXE "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1,
          hanzi::testing::read_file(out.string()), hanzi::testing::read_file(err.string())};
}

std::string data(const std::string& name) { return "\"" + hanzi::testing::data_path(name) + "\""; }

std::string tmp(const std::string& name) { return (work_dir() / name).string(); }

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string slurp(const std::string& path) { return hanzi::testing::read_file(path); }

}  // namespace

TEST_CASE("lexicon lookup, normalize and stats") {
  auto r = run("lexicon --lexicon " + data("sample_lexicon.txt") + " lookup 池");
  CHECK(r.code == 0);
  CHECK(r.out == "池: 水 也\n");
  CHECK(r.err.empty());

  r = run("lexicon normalize 亻");
  CHECK(r.code == 0);
  CHECK(r.out == "人\n");

  r = run("lexicon --lexicon " + data("sample_lexicon.txt") + " lookup x");
  CHECK(r.code == 2);
  CHECK(r.err.find('\n') == r.err.size() - 1);

  r = run("lexicon --lexicon " + data("sample_lexicon.txt") + " stats");
  CHECK(r.code == 0);
  CHECK(r.out.find("characters: ") == 0);
  CHECK(r.out.find("1 component: ") != std::string::npos);

  r = run("lexicon --lexicon /nonexistent/lexicon.txt lookup 池");
  CHECK(r.code == 1);
  CHECK(r.err.find("/nonexistent/lexicon.txt") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);
}

TEST_CASE("training is byte-identical across runs and from its manifest") {
  const std::string common = "train --corpus " + data("sample_corpus.txt") + " --lexicon " +
                             data("sample_lexicon.txt") +
                             " --model charcbow --gram uni --dim 8 --epochs 1 --seed 7 "
                             "--min-count 2 --workers 1";
  auto a = run(common + " --output " + tmp("a.vec"));
  REQUIRE(a.code == 0);
  CHECK(a.err.empty());
  auto b = run(common + " --output " + tmp("b.vec"));
  REQUIRE(b.code == 0);
  CHECK(slurp(tmp("a.vec")) == slurp(tmp("b.vec")));
  CHECK(slurp(tmp("a.vec.components")) == slurp(tmp("b.vec.components")));
  CHECK_FALSE(slurp(tmp("a.vec")).empty());

  const auto manifest = slurp(tmp("a.vec.manifest"));
  CHECK(manifest.find("train.seed = 7") != std::string::npos);
  CHECK(manifest.find("digest.corpus = ") != std::string::npos);
  CHECK(manifest.find("tool.version = ") != std::string::npos);

  auto c = run("--config " + tmp("a.vec.manifest") + " train --output " + tmp("c.vec"));
  REQUIRE(c.code == 0);
  CHECK(slurp(tmp("a.vec")) == slurp(tmp("c.vec")));
}

TEST_CASE("default flags are materialized in the manifest") {
  auto r = run("train --corpus " + data("sample_corpus.txt") + " --model cbow --epochs 1 --output " +
               tmp("defaults.vec"));
  REQUIRE(r.code == 0);
  const auto m = slurp(tmp("defaults.vec.manifest"));
  for (const char* line : {"train.window = 2\n", "train.negatives = 5\n", "train.dim = 50\n",
                           "train.min-count = 10\n", "train.components = 2\n"}) {
    CAPTURE(line);
    CHECK(m.find(line) != std::string::npos);
  }
}

TEST_CASE("environment overrides") {
  auto r = run("train --corpus " + data("sample_corpus.txt") +
                   " --model skipgram --epochs 1 --min-count 2 --output " + tmp("env.vec"),
               "HANZI_EMBED_DIM=3");
  REQUIRE(r.code == 0);
  CHECK(slurp(tmp("env.vec")).find(" 3\n") != std::string::npos);
}

TEST_CASE("training errors exit 1 with one line") {
  auto r = run("train --corpus " + data("sample_corpus.txt") + " --model charcbow --output " +
               tmp("x.vec"));
  CHECK(r.code == 1);
  CHECK(r.err.find("--lexicon") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);

  r = run("train --corpus /nonexistent/corpus.txt --model cbow --output " + tmp("x.vec"));
  CHECK(r.code == 1);
  r = run("train --corpus " + data("sample_corpus.txt") + " --model bogus --output " + tmp("x.vec"));
  CHECK(r.code == 1);
  r = run("train --corpus " + data("sample_corpus.txt") + " --dim 0 --model cbow --output " +
          tmp("x.vec"));
  CHECK(r.code == 1);
}

TEST_CASE("eval-sim: gold equal to model ranking gives rho 1 everywhere") {
  write(tmp("sim.vec"),
        "5 2\n甲 1 0\n乙 0.8 0.6\n丙 0 1\n丁 -0.6 0.8\n戊 -1 0.1\n");
  const hanzi::EmbeddingSet set = hanzi::load_embedding_set(tmp("sim.vec"));
  const char* pairs[][3] = {{"甲乙", "甲甲", "A"}, {"甲乙", "丙丁", "A"}, {"甲乙", "戊丙", "A"},
                            {"丙丁", "丙丙", "B"}, {"丙丁", "甲戊", "B"}, {"丙丁", "乙甲", "B"},
                            {"甲己", "甲甲", "B"}, {"己己", "甲甲", "A"}};
  std::string dataset = "# planted\n";
  for (const auto& p : pairs) {
    const auto a = hanzi::word_vector(p[0], set, hanzi::WordMode::uni);
    const auto b = hanzi::word_vector(p[1], set, hanzi::WordMode::uni);
    const double gold = a && b ? *hanzi::cosine(*a, *b) * 10 : 5.0;
    dataset += std::string(p[0]) + "\t" + p[1] + "\t" + std::to_string(gold) + "\t" + p[2] + "\n";
  }
  write(tmp("sim.tsv"), dataset);
  auto r = run("eval-sim --embeddings " + tmp("sim.vec") + " --dataset " + tmp("sim.tsv") +
               " --name m --csv " + tmp("sim.csv"));
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("coverage: 6/8 pairs (75.0%), 2 dropped") != std::string::npos);
  const auto csv = slurp(tmp("sim.csv"));
  CHECK(csv.find("m,A,spearman,1\n") != std::string::npos);
  CHECK(csv.find("m,B,spearman,1\n") != std::string::npos);
  CHECK(csv.find("m,overall,pairs_used,6\n") != std::string::npos);

  write(tmp("bad.tsv"), "甲乙\t丙丁\t1\tA\n甲乙\t丙丁\n");
  r = run("eval-sim --embeddings " + tmp("sim.vec") + " --dataset " + tmp("bad.tsv"));
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.tsv:2:") != std::string::npos);
}

TEST_CASE("eval-classify: label-correlated embeddings give F = 1 per class") {
  const char* labels[] = {"army", "health", "film", "city"};
  const char* chars[] = {"甲乙", "丙丁", "戊己", "庚辛"};
  std::string emb = "8 4\n", titles;
  for (int c = 0; c < 4; ++c) {
    for (int j = 0; j < 2; ++j) {
      emb += std::string(chars[c]).substr(j * 3, 3);
      for (int d = 0; d < 4; ++d) emb += d == c ? " 1" : " 0";
      emb += "\n";
    }
    for (int i = 0; i < 10; ++i) {
      titles += std::string(labels[c]) + "\t" + (i % 2 ? chars[c] : std::string(chars[c]).substr(3)) +
                "，abc\n";
    }
  }
  titles += "army\t壬癸\n";
  write(tmp("cls.vec"), emb);
  write(tmp("cls.tsv"), titles);
  auto r = run("eval-classify --mode uni --embeddings " + tmp("cls.vec") + " --dataset " +
               tmp("cls.tsv") + " --name m --csv " + tmp("cls.csv"));
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("40/41 titles") != std::string::npos);
  const auto csv = slurp(tmp("cls.csv"));
  for (const char* l : labels) {
    CAPTURE(l);
    CHECK(csv.find(std::string("m,") + l + ",f1,1\n") != std::string::npos);
  }
}

TEST_CASE("preprocess writes one tokenized sentence per line") {
  write(tmp("raw.txt"), "摇篮曲。水\n他说3次！");
  auto r = run("preprocess --gram bi --input " + tmp("raw.txt"));
  CHECK(r.code == 0);
  CHECK(r.out == "摇篮 篮曲\n他说 说次\n");
}
