// hanzi-embed: lexicon inspection, preprocessing, training and evaluation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hanzi/classify.hpp"
#include "hanzi/corpus.hpp"
#include "hanzi/error.hpp"
#include "hanzi/lexicon.hpp"
#include "hanzi/manifest.hpp"
#include "hanzi/report.hpp"
#include "hanzi/similarity.hpp"
#include "hanzi/trainer.hpp"
#include "hanzi/utf8.hpp"

namespace fs = std::filesystem;
using namespace hanzi;

namespace {

constexpr int kExitError = 1;
constexpr int kExitLookupMiss = 2;

/// Raised for a lookup miss: reported like an error but with its own exit code.
struct LookupMiss : Error {
  using Error::Error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error("cannot read " + path.string());
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string percent(std::size_t part, std::size_t whole) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", whole == 0 ? 0.0 : 100.0 * part / whole);
  return buf;
}

/// HANZI_EMBED_<FLAG> for every long option of `app`.
void add_env_overrides(CLI::App& app) {
  for (auto* opt : app.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names[0] == "help" || names[0] == "version" || names[0] == "config") {
      continue;
    }
    std::string env = "HANZI_EMBED_";
    for (char c : names[0]) {
      env.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    opt->envname(env);
  }
}

VariantTable variant_table(const std::string& variants_file) {
  auto table = VariantTable::builtin();
  if (!variants_file.empty()) table.override_with(load_variant_mappings(variants_file));
  return table;
}

// ---------------------------------------------------------------------------

struct LexiconArgs {
  std::string lexicon;
  std::string variants;
  std::string character;
  std::string component;
};

void setup_lexicon(CLI::App& app, LexiconArgs& args) {
  auto* cmd = app.add_subcommand("lexicon", "Inspect a component lexicon");
  cmd->add_option("--lexicon", args.lexicon, "Lexicon file (`<char> <radical> [<component> ...]`)");
  cmd->add_option("--variants", args.variants, "Extra radical variant mappings");
  cmd->require_subcommand(1);
  add_env_overrides(*cmd);

  auto need_lexicon = [&args] {
    if (args.lexicon.empty()) throw Error("--lexicon is required");
    return load_lexicon(args.lexicon, variant_table(args.variants));
  };

  auto* lookup = cmd->add_subcommand("lookup", "Print the component list of a character");
  lookup->add_option("char", args.character, "A single character")->required();
  lookup->callback([&args, need_lexicon] {
    const auto lex = need_lexicon();
    const auto cp = utf8::single_code_point(args.character);
    if (!cp) throw LookupMiss("'" + args.character + "' is not a single character");
    const auto* list = lex.find(*cp);
    if (list == nullptr) throw LookupMiss(args.character + " is not in the lexicon");
    std::string line = args.character + ":";
    for (const auto& c : *list) line += " " + c;
    std::cout << line << '\n';
  });

  auto* stats = cmd->add_subcommand("stats", "Component-count histogram");
  stats->callback([need_lexicon] {
    const auto lex = need_lexicon();
    std::cout << "characters: " << lex.size() << '\n';
    std::cout << "distinct components: " << lex.component_inventory().size() << '\n';
    for (const auto& [count, chars] : lex.component_count_histogram()) {
      std::cout << count << (count == 1 ? " component: " : " components: ") << chars << " ("
                << percent(chars, lex.size()) << ")\n";
    }
  });

  auto* normalize = cmd->add_subcommand("normalize", "Map a radical variant to its original form");
  normalize->add_option("component", args.component, "Component to normalize")->required();
  normalize->callback([&args] {
    const auto table = args.lexicon.empty()
                           ? variant_table(args.variants)
                           : load_lexicon(args.lexicon, variant_table(args.variants)).variants();
    std::cout << table.normalize(args.component) << '\n';
  });
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string input;
  std::string gram = "uni";
  std::string output;
};

void setup_preprocess(CLI::App& app, PreprocessArgs& args) {
  auto* cmd = app.add_subcommand("preprocess", "Filter, split and tokenize raw text");
  cmd->add_option("--input", args.input, "Raw UTF-8 text")->required();
  cmd->add_option("--gram", args.gram, "Token unit")
      ->check(CLI::IsMember({"uni", "bi"}))
      ->capture_default_str();
  cmd->add_option("--output", args.output, "Output file (default: standard output)");
  add_env_overrides(*cmd);
  cmd->callback([&args] {
    const auto tokens = tokenize(preprocess(read_text(args.input)), *parse_gram(args.gram));
    std::string out;
    for (const auto& sentence : tokens) {
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (i > 0) out += ' ';
        out += sentence[i];
      }
      out += '\n';
    }
    if (args.output.empty()) {
      std::cout << out;
    } else {
      write_text(args.output, out);
    }
  });
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string model = "charcbow";
  std::string gram = "uni";
  std::string lexicon;
  std::string variants;
  std::string output;
  std::string checkpoint_dir;
  std::string cbow_combine = "average";
  std::size_t dim = 50;
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t components = 2;
  std::uint64_t min_count = 10;
  std::size_t epochs = 5;
  std::optional<double> lr_start;
  std::optional<double> lr_min;
  double ns_power = 0.75;
  double subsample = 0.0;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
};

TrainConfig resolve(const TrainArgs& a) {
  const auto variant = *parse_model_variant(a.model);
  auto cfg = TrainConfig::defaults(variant, *parse_gram(a.gram));
  cfg.model.dim = a.dim;
  cfg.model.window = a.window;
  cfg.model.negatives = a.negatives;
  cfg.model.components = a.components;
  cfg.model.cbow_combine = *parse_context_combine(a.cbow_combine);
  cfg.min_count = a.min_count;
  cfg.epochs = a.epochs;
  if (a.lr_start) cfg.lr_start = *a.lr_start;
  cfg.lr_min = a.lr_min ? *a.lr_min : cfg.lr_start * 1e-4;
  cfg.ns_power = a.ns_power;
  cfg.subsample_t = a.subsample;
  cfg.workers = a.workers;
  cfg.seed = a.seed;
  cfg.checkpoint_dir = a.checkpoint_dir;
  cfg.validate();
  return cfg;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

void run_train(const TrainArgs& a) {
  const auto cfg = resolve(a);
  if (uses_components(cfg.model.variant) && a.lexicon.empty()) {
    throw Error(a.model + " requires --lexicon");
  }
  std::optional<ComponentLexicon> lexicon;
  if (!a.lexicon.empty()) lexicon = load_lexicon(a.lexicon, variant_table(a.variants));

  const auto tokens = tokenize(preprocess(read_text(a.corpus)), cfg.model.gram);
  const auto vocab = Vocabulary::build(tokens, {cfg.min_count, cfg.ns_power});
  const auto stream = encode(tokens, vocab, cfg.model.gram);
  std::cout << "vocabulary: " << vocab.size() << " tokens, stream: " << stream.token_count()
            << " tokens in " << stream.sentences.size() << " sentences\n";

  const auto emb = train(stream, vocab, lexicon ? &*lexicon : nullptr, cfg,
                         [&cfg](const EpochProgress& p) {
                           char buf[128];
                           std::snprintf(buf, sizeof buf, "epoch %zu/%zu  loss %.6f  lr %.6g\n",
                                         p.epoch, cfg.epochs, p.mean_loss, p.learning_rate);
                           std::cout << buf << std::flush;
                         });

  const fs::path out = a.output;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_embeddings(emb, out);

  auto manifest = train_manifest(cfg);
  manifest.set("train.corpus", quoted(a.corpus));
  if (!a.lexicon.empty()) manifest.set("train.lexicon", quoted(a.lexicon));
  if (!a.variants.empty()) manifest.set("train.variants", quoted(a.variants));
  manifest.set("train.output", quoted(a.output));
  manifest.set("digest.corpus", sha256_file(a.corpus));
  if (!a.lexicon.empty()) manifest.set("digest.lexicon", sha256_file(a.lexicon));
  if (!a.variants.empty()) manifest.set("digest.variants", sha256_file(a.variants));
  manifest.set("tool.version", quoted(std::string(kToolVersion)));
  const fs::path manifest_path = out.string() + ".manifest";
  manifest.write(manifest_path);

  std::cout << "wrote " << out.string() << '\n';
  if (emb.components) std::cout << "wrote " << component_file_for(out).string() << '\n';
  std::cout << "wrote " << manifest_path.string() << '\n';
}

void setup_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Train character embeddings");
  cmd->add_option("--corpus", a.corpus, "Raw UTF-8 training text")->required();
  cmd->add_option("--model", a.model, "Model variant")
      ->check(CLI::IsMember({"cbow", "skipgram", "charcbow", "charskipgram"}))
      ->capture_default_str();
  cmd->add_option("--gram", a.gram, "Token unit")
      ->check(CLI::IsMember({"uni", "bi"}))
      ->capture_default_str();
  cmd->add_option("--lexicon", a.lexicon, "Component lexicon (required by char* models)");
  cmd->add_option("--variants", a.variants, "Extra radical variant mappings");
  cmd->add_option("--output", a.output, "Embedding file to write")->required();
  cmd->add_option("--dim", a.dim, "Embedding dimension K")->capture_default_str();
  cmd->add_option("--window", a.window, "Context radius T")->capture_default_str();
  cmd->add_option("--negatives", a.negatives, "Negative samples per prediction")
      ->capture_default_str();
  cmd->add_option("--components", a.components, "Components kept per character M")
      ->capture_default_str();
  cmd->add_option("--min-count", a.min_count, "Minimum token count")->capture_default_str();
  cmd->add_option("--epochs", a.epochs, "Passes over the corpus")->capture_default_str();
  cmd->add_option("--lr-start", a.lr_start,
                  "Initial learning rate (default 0.05 for CBOW variants, 0.025 for SkipGram)");
  cmd->add_option("--lr-min", a.lr_min, "Final learning rate (default lr-start * 1e-4)");
  cmd->add_option("--ns-power", a.ns_power, "Exponent of the negative-sampling distribution")
      ->capture_default_str();
  cmd->add_option("--subsample", a.subsample, "Frequent-token subsampling threshold (0 = off)")
      ->capture_default_str();
  cmd->add_option("--workers", a.workers, "Training threads")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--checkpoint-dir", a.checkpoint_dir, "Write embeddings after every epoch");
  cmd->add_option("--cbow-combine", a.cbow_combine, "CBOW context combination")
      ->check(CLI::IsMember({"average", "sum"}))
      ->capture_default_str();
  add_env_overrides(*cmd);
  cmd->callback([&a] { run_train(a); });
}

// ---------------------------------------------------------------------------

struct EvalSimArgs {
  std::string embeddings;
  std::string dataset;
  std::string mode = "uni";
  std::string name;
  std::string csv;
};

void emit_rows(const std::vector<MetricRow>& rows, const std::string& csv) {
  if (csv.empty()) {
    std::cout << '\n' << format_rows(rows);
  } else {
    write_text(csv, format_rows(rows));
  }
}

void setup_eval_sim(CLI::App& app, EvalSimArgs& a) {
  auto* cmd = app.add_subcommand("eval-sim", "Word similarity: Spearman correlation per category");
  cmd->add_option("--embeddings", a.embeddings, "Embedding file")->required();
  cmd->add_option("--dataset", a.dataset, "word_a<TAB>word_b<TAB>score<TAB>category")->required();
  cmd->add_option("--mode", a.mode, "uni: concatenated characters; bi: bigram tokens")
      ->check(CLI::IsMember({"uni", "bi"}))
      ->capture_default_str();
  cmd->add_option("--name", a.name, "Model name in the report (default: embedding file stem)");
  cmd->add_option("--csv", a.csv, "Write machine-readable rows here instead of standard output");
  add_env_overrides(*cmd);
  cmd->callback([&a] {
    const auto emb = load_embedding_set(a.embeddings);
    const auto data = load_similarity_dataset(a.dataset);
    const auto report = eval_similarity(emb, data, *parse_word_mode(a.mode));
    const auto name = a.name.empty() ? fs::path(a.embeddings).stem().string() : a.name;
    std::cout << format_similarity_table(name, report);
    std::cout << "coverage: " << report.overall.used << "/" << report.overall.total << " pairs ("
              << percent(report.overall.used, report.overall.total) << "), " << report.dropped()
              << " dropped as out of vocabulary\n";
    emit_rows(similarity_rows(name, report), a.csv);
  });
}

// ---------------------------------------------------------------------------

struct EvalClassifyArgs {
  std::string embeddings;
  std::string uni_embeddings;
  std::string dataset;
  std::string mode = "bi";
  std::string bigram_source = "token";
  double l2_c = 1.0;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  std::string name;
  std::string csv;
};

void setup_eval_classify(CLI::App& app, EvalClassifyArgs& a) {
  auto* cmd = app.add_subcommand("eval-classify",
                                 "Title classification with logistic regression");
  cmd->add_option("--embeddings", a.embeddings,
                  "Embedding file: character vectors for uni mode, bigram vectors otherwise")
      ->required();
  cmd->add_option("--uni-embeddings", a.uni_embeddings,
                  "Character vectors for combine mode and char-average bigrams");
  cmd->add_option("--dataset", a.dataset, "label<TAB>title")->required();
  cmd->add_option("--mode", a.mode, "Title representation")
      ->check(CLI::IsMember({"uni", "bi", "combine"}))
      ->capture_default_str();
  cmd->add_option("--bigram-source", a.bigram_source, "Where bigram vectors come from")
      ->check(CLI::IsMember({"token", "char-average"}))
      ->capture_default_str();
  cmd->add_option("--l2-c", a.l2_c, "Inverse regularization strength")->capture_default_str();
  cmd->add_option("--test-fraction", a.test_fraction, "Held-out fraction per class")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Seed for the train/test split")->capture_default_str();
  cmd->add_option("--name", a.name, "Model name in the report (default: embedding file stem)");
  cmd->add_option("--csv", a.csv, "Write machine-readable rows here instead of standard output");
  add_env_overrides(*cmd);
  cmd->callback([&a] {
    const auto mode = *parse_title_mode(a.mode);
    const auto source = *parse_bigram_source(a.bigram_source);
    const auto main_set = load_embedding_set(a.embeddings);
    std::optional<EmbeddingSet> uni_set;
    if (!a.uni_embeddings.empty()) uni_set = load_embedding_set(a.uni_embeddings);
    if (mode == TitleMode::combine && !uni_set) {
      throw Error("combine mode requires --uni-embeddings");
    }
    TitleEmbeddings emb;
    emb.bigram_source = source;
    if (mode == TitleMode::uni) {
      emb.uni = &main_set;
    } else {
      emb.bi = &main_set;
      emb.uni = uni_set ? &*uni_set : nullptr;
    }
    ClassifyOptions opt;
    opt.mode = mode;
    opt.test_fraction = a.test_fraction;
    opt.seed = a.seed;
    opt.logreg.l2_c = a.l2_c;
    const auto data = load_classification_dataset(a.dataset);
    const auto report = eval_classify(emb, data, opt);
    const auto name = a.name.empty() ? fs::path(a.embeddings).stem().string() : a.name;
    std::cout << format_classification_table(name, report);
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.1f", 100.0 * report.accuracy);
    std::cout << "accuracy: " << acc << "% on " << report.test_size << " test titles ("
              << report.train_size << " train)\n";
    const std::size_t total = data.size();
    std::cout << "coverage: " << total - report.titles_without_vectors << "/" << total
              << " titles (" << percent(total - report.titles_without_vectors, total) << "), "
              << report.titles_without_vectors << " without any in-vocabulary gram\n";
    emit_rows(classification_rows(name, report), a.csv);
  });
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

int fail(const std::string& message, int code) {
  std::cout.flush();
  std::cerr << "hanzi-embed: error: " << one_line(message) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Component-enhanced Chinese character embeddings", "hanzi-embed"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "Read option values from a run manifest");
  app.allow_config_extras(true);
  app.require_subcommand(1);

  LexiconArgs lexicon_args;
  PreprocessArgs preprocess_args;
  TrainArgs train_args;
  EvalSimArgs eval_sim_args;
  EvalClassifyArgs eval_classify_args;
  setup_lexicon(app, lexicon_args);
  setup_preprocess(app, preprocess_args);
  setup_train(app, train_args);
  setup_eval_sim(app, eval_sim_args);
  setup_eval_classify(app, eval_classify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(e.what(), kExitError);
  } catch (const LookupMiss& e) {
    return fail(e.what(), kExitLookupMiss);
  } catch (const std::exception& e) {
    return fail(e.what(), kExitError);
  }
  return 0;
}
