// Command line surface for the suffix-trie language model. Every
// subcommand is a thin adapter over the library: tokenize, call one or two
// library entry points, print. The effective configuration is echoed as
// key=value lines before any result so runs are auditable and reruns
// diffable; diagnostics go to stderr, gated by the PSTLM_LOG variable.
//
// Exit codes: 0 success, 1 usage error, 2 data or model error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pstlm/corpus.hpp"
#include "pstlm/evaluation.hpp"
#include "pstlm/generation.hpp"
#include "pstlm/trie.hpp"

namespace {

bool log_enabled() {
  const char* v = std::getenv("PSTLM_LOG");
  if (!v) return false;
  std::string s(v);
  return !(s.empty() || s == "0" || s == "off");
}

void log_line(const std::string& message) {
  if (log_enabled()) std::cerr << "[pstlm] " << message << "\n";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void echo(const std::string& key, const std::string& value) {
  std::cout << key << "=" << value << "\n";
}

void echo(const std::string& key, double value) { echo(key, fmt(value)); }

void echo(const std::string& key, std::uint64_t value) {
  echo(key, std::to_string(value));
}

// Shared flag bundle; each subcommand registers only the flags it uses.
struct Flags {
  std::string input;
  std::string model;
  std::string output;
  std::string candidates;
  std::string train_output;
  std::string test_output;
  std::string lowercase = "on";
  std::uint32_t depth = 5;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t words = 50;
  std::uint64_t prune_interval = 0;
  std::uint64_t prune_threshold = 2;
  double train_fraction = 0.15;
  bool adapt = false;
  bool frozen = false;
};

pstlm::TokenizerRules rules_from(const Flags& f) {
  pstlm::TokenizerRules rules;
  rules.lowercase = f.lowercase == "on";
  return rules;
}

void echo_tokenizer(const Flags& f) { echo("lowercase", f.lowercase); }

pstlm::Model load_model(const std::string& path) {
  Stopwatch watch;
  pstlm::Model model = pstlm::Model::load_file(path);
  log_line("loaded " + path + " (" + std::to_string(model.node_count()) +
           " nodes) in " + fmt(watch.seconds()) + "s");
  return model;
}

void save_model(const pstlm::Model& model, const std::string& path) {
  Stopwatch watch;
  model.save_file(path);
  log_line("saved " + path + " in " + fmt(watch.seconds()) + "s");
}

void print_report(const pstlm::EvalReport& report) {
  echo("tokens", report.token_count);
  echo("log2_prob_total", report.total_log2_prob);
  echo("perplexity", report.perplexity);
  echo("seen_here", report.seen_here);
  echo("seen_elsewhere", report.seen_elsewhere);
  echo("globally_new", report.globally_new);
  double n = static_cast<double>(report.token_count);
  std::printf("\n");
  std::printf("  %-16s %12llu\n", "tokens", (unsigned long long)report.token_count);
  std::printf("  %-16s %12.6f\n", "perplexity", report.perplexity);
  std::printf("  %-16s %12llu  (%5.2f%%)\n", "seen here",
              (unsigned long long)report.seen_here, 100.0 * report.seen_here / n);
  std::printf("  %-16s %12llu  (%5.2f%%)\n", "seen elsewhere",
              (unsigned long long)report.seen_elsewhere,
              100.0 * report.seen_elsewhere / n);
  std::printf("  %-16s %12llu  (%5.2f%%)\n", "globally new",
              (unsigned long long)report.globally_new,
              100.0 * report.globally_new / n);
}

int run_train(const Flags& f) {
  echo("command", std::string("train"));
  echo("input", f.input);
  echo("model", f.model.empty() ? "<none>" : f.model);
  echo("depth", std::uint64_t(f.depth));
  echo("alpha", f.alpha);
  echo("prune_interval", f.prune_interval);
  echo("prune_threshold", f.prune_threshold);
  echo_tokenizer(f);

  pstlm::Model model(pstlm::ModelOptions{.max_depth = f.depth,
                                         .alpha = f.alpha,
                                         .prune_interval = f.prune_interval,
                                         .prune_threshold = f.prune_threshold});
  auto stream = pstlm::stream_from_file(f.input, model.symbols(), rules_from(f));
  Stopwatch watch;
  auto report = pstlm::evaluate(model, stream, /*adapt=*/true);
  log_line("trained " + std::to_string(report.token_count) + " tokens in " +
           fmt(watch.seconds()) + "s");
  echo("vocab", std::uint64_t(model.symbols().size()));
  echo("nodes", model.node_count());
  print_report(report);
  if (!f.model.empty()) save_model(model, f.model);
  return 0;
}

int run_eval(const Flags& f) {
  if (f.adapt == f.frozen) {
    throw Usage("eval needs exactly one of --adapt or --frozen");
  }
  if (f.frozen && f.model.empty()) {
    throw Usage("eval --frozen needs --model (a fresh model has no counts)");
  }
  echo("command", std::string("eval"));
  echo("input", f.input);
  echo("model", f.model.empty() ? "<none>" : f.model);
  echo("mode", std::string(f.adapt ? "adapt" : "frozen"));
  echo_tokenizer(f);

  std::optional<pstlm::Model> model;
  if (f.model.empty()) {
    // Fresh adaptive pass: identical engine and numbers as `train`.
    echo("depth", std::uint64_t(f.depth));
    echo("alpha", f.alpha);
    model.emplace(pstlm::ModelOptions{.max_depth = f.depth, .alpha = f.alpha});
  } else {
    model.emplace(load_model(f.model));
    echo("depth", std::uint64_t(model->max_depth()));
    echo("alpha", model->alpha());
  }
  auto mode = f.model.empty() ? pstlm::VocabMode::Extend : pstlm::VocabMode::Lookup;
  auto stream = pstlm::stream_from_file(f.input, model->symbols(), rules_from(f), mode);
  if (f.frozen) model->freeze();
  Stopwatch watch;
  auto report = pstlm::evaluate(*model, stream, f.adapt);
  log_line("scored " + std::to_string(report.token_count) + " tokens in " +
           fmt(watch.seconds()) + "s");
  print_report(report);
  return 0;
}

int run_generate(const Flags& f) {
  echo("command", std::string("generate"));
  echo("model", f.model);
  echo("seed", f.seed);
  echo("words", f.words);

  pstlm::Model model = load_model(f.model);
  pstlm::WalkConfig config;
  config.word_count = f.words;
  config.seed = f.seed;
  auto words = pstlm::generate(model, config);
  std::string line;
  for (const auto& w : words) {
    if (!line.empty()) line += ' ';
    line += w;
  }
  std::cout << line << "\n";
  return 0;
}

int run_rank(const Flags& f) {
  echo("command", std::string("rank"));
  echo("model", f.model);
  echo("candidates", f.candidates);
  echo_tokenizer(f);

  std::ifstream in(f.candidates);
  if (!in) throw std::runtime_error("cannot open candidate file: " + f.candidates);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }

  pstlm::Model model = load_model(f.model);
  model.freeze();
  auto ranked = pstlm::rank_candidates(model, lines, rules_from(f));
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& c = ranked[i];
    std::cout << "candidate rank=" << i << " input=" << c.input_index
              << " tokens=" << c.token_count << " neg_log2=" << fmt(c.neg_log2_likelihood)
              << " posterior=" << fmt(c.posterior) << "\n";
  }
  std::printf("\n");
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::printf("  %2zu. p=%.3f  -log2=%9.3f  %s\n", i + 1, ranked[i].posterior,
                ranked[i].neg_log2_likelihood, ranked[i].text.c_str());
  }
  return 0;
}

int run_prune(const Flags& f) {
  echo("command", std::string("prune"));
  echo("model", f.model);
  echo("output", f.output);
  echo("prune_threshold", f.prune_threshold);

  pstlm::Model model = load_model(f.model);
  std::uint64_t before = model.node_count();
  std::uint64_t removed = model.prune(f.prune_threshold);
  echo("nodes_before", before);
  echo("nodes_removed", removed);
  echo("nodes_after", model.node_count());
  save_model(model, f.output);
  return 0;
}

int run_stats(const Flags& f) {
  echo("command", std::string("stats"));
  echo("model", f.model);

  pstlm::Model model = load_model(f.model);
  echo("depth", std::uint64_t(model.max_depth()));
  echo("alpha", model.alpha());
  echo("prune_interval", model.options().prune_interval);
  echo("prune_threshold", model.options().prune_threshold);
  echo("tokens", model.tokens_seen());
  echo("vocab", std::uint64_t(model.symbols().size()));
  echo("nodes", model.node_count());
  echo("frozen", std::string(model.frozen() ? "true" : "false"));
  echo("map_tree", std::string(model.map_tree() ? "true" : "false"));
  return 0;
}

int run_split(const Flags& f) {
  echo("command", std::string("split"));
  echo("input", f.input);
  echo("train_fraction", f.train_fraction);
  echo("seed", f.seed);
  echo("train_output", f.train_output);
  echo("test_output", f.test_output);
  echo_tokenizer(f);

  pstlm::SymbolTable symbols;
  auto stream = pstlm::stream_from_file(f.input, symbols, rules_from(f));
  auto [train, test] = pstlm::split_corpus(stream, f.train_fraction, f.seed);

  // Re-emit normalized sentences, one per line. The output is the
  // tokenizer's view of the text, which is exactly what training reads.
  auto write_side = [&](const pstlm::TokenStream& side, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t s = 0; s < side.sentence_starts.size(); ++s) {
      std::size_t begin = side.sentence_starts[s];
      std::size_t end = s + 1 < side.sentence_starts.size() ? side.sentence_starts[s + 1]
                                                            : side.ids.size();
      for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out << ' ';
        out << symbols.surface(side.ids[i]);
      }
      out << '\n';
    }
  };
  write_side(train, f.train_output);
  write_side(test, f.test_output);
  echo("train_sentences", std::uint64_t(train.sentence_starts.size()));
  echo("train_tokens", std::uint64_t(train.ids.size()));
  echo("test_sentences", std::uint64_t(test.sentence_starts.size()));
  echo("test_tokens", std::uint64_t(test.ids.size()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  CLI::App app{"Suffix-trie language model: train, evaluate, generate, rank"};
  app.require_subcommand(1);

  auto alpha_check = CLI::Validator(
      [](std::string& s) {
        double v = std::strtod(s.c_str(), nullptr);
        return (v > 0.0 && v < 1.0) ? std::string()
                                    : std::string("alpha must lie strictly between 0 and 1");
      },
      "ALPHA");
  auto fraction_check = CLI::Validator(
      [](std::string& s) {
        double v = std::strtod(s.c_str(), nullptr);
        return (v > 0.0 && v < 1.0)
                   ? std::string()
                   : std::string("train fraction must lie strictly between 0 and 1");
      },
      "FRACTION");
  auto lowercase_check = CLI::IsMember({"on", "off"});

  auto* train = app.add_subcommand("train", "Online-train a model on a text file");
  train->add_option("--input", f.input, "training text")->required();
  train->add_option("--model", f.model, "where to save the trained model");
  train->add_option("--depth", f.depth, "maximum context depth")->check(CLI::Range(0, 64));
  train->add_option("--alpha", f.alpha, "prior leaf probability")->check(alpha_check);
  train->add_option("--prune-interval", f.prune_interval,
                    "tokens between automatic prunes (0 disables)");
  train->add_option("--prune-threshold", f.prune_threshold,
                    "minimum visits a node needs to survive a prune");
  train->add_option("--lowercase", f.lowercase, "fold case: on|off")->check(lowercase_check);
  train->callback([&] { run_train(f); });

  auto* eval = app.add_subcommand("eval", "Score a text file (perplexity report)");
  eval->add_option("--input", f.input, "text to score")->required();
  eval->add_option("--model", f.model, "model file (omit for a fresh adaptive pass)");
  eval->add_flag("--adapt", f.adapt, "learn online while scoring");
  eval->add_flag("--frozen", f.frozen, "score without mutating the model");
  eval->add_option("--depth", f.depth, "depth for a fresh model")->check(CLI::Range(0, 64));
  eval->add_option("--alpha", f.alpha, "alpha for a fresh model")->check(alpha_check);
  eval->add_option("--lowercase", f.lowercase, "fold case: on|off")->check(lowercase_check);
  eval->callback([&] { run_eval(f); });

  auto* generate = app.add_subcommand("generate", "Random-walk word generation");
  generate->add_option("--model", f.model, "model file")->required();
  generate->add_option("--seed", f.seed, "random seed")->required();
  generate->add_option("--words", f.words, "words to generate")
      ->check(CLI::PositiveNumber);
  generate->callback([&] { run_generate(f); });

  auto* rank = app.add_subcommand("rank", "Rank candidate sentences by likelihood");
  rank->add_option("--model", f.model, "model file")->required();
  rank->add_option("--candidates", f.candidates, "file with one sentence per line")
      ->required();
  rank->add_option("--lowercase", f.lowercase, "fold case: on|off")->check(lowercase_check);
  rank->callback([&] { run_rank(f); });

  auto* prune = app.add_subcommand("prune", "Prune a saved model by visit count");
  prune->add_option("--model", f.model, "model file to read")->required();
  prune->add_option("--output", f.output, "where to save the pruned model")->required();
  prune->add_option("--prune-threshold", f.prune_threshold,
                    "minimum visits a node needs to survive");
  prune->callback([&] { run_prune(f); });

  auto* stats = app.add_subcommand("stats", "Print a saved model's configuration");
  stats->add_option("--model", f.model, "model file")->required();
  stats->callback([&] { run_stats(f); });

  auto* split = app.add_subcommand("split", "Seeded sentence-level train/test split");
  split->add_option("--input", f.input, "text to split")->required();
  split->add_option("--train-fraction", f.train_fraction, "train share of sentences")
      ->required()
      ->check(fraction_check);
  split->add_option("--seed", f.seed, "random seed")->required();
  split->add_option("--train-output", f.train_output, "train side output path")->required();
  split->add_option("--test-output", f.test_output, "held-out side output path")->required();
  split->add_option("--lowercase", f.lowercase, "fold case: on|off")->check(lowercase_check);
  split->callback([&] { run_split(f); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pstlm::IoError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
