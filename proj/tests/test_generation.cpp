#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pstlm/evaluation.hpp"
#include "pstlm/generation.hpp"
#include "test_util.hpp"

using namespace pstlm;
using testutil::random_tokens;
using testutil::train_online;

namespace {

constexpr WordId A = 2;

}  // namespace

TEST_CASE("a single-word model can only emit that word") {
  Model m(ModelOptions{.max_depth = 1, .alpha = 0.5});
  m.symbols().intern("only");
  train_online(m, {A, A, A});
  auto words = generate(m, WalkConfig{.word_count = 20, .seed = 5});
  REQUIRE(words.size() == 20);
  for (const auto& w : words) CHECK(w == "only");
}

TEST_CASE("generation is deterministic per seed") {
  std::mt19937_64 rng(301);
  Model m(ModelOptions{.max_depth = 2, .alpha = 0.5});
  for (int i = 0; i < 6; ++i) m.symbols().intern("w" + std::to_string(i));
  train_online(m, random_tokens(rng, 300, 6));

  auto w1 = generate(m, WalkConfig{.word_count = 50, .seed = 123});
  auto w2 = generate(m, WalkConfig{.word_count = 50, .seed = 123});
  CHECK(w1 == w2);
  auto w3 = generate(m, WalkConfig{.word_count = 50, .seed = 124});
  CHECK(w1 != w3);
}

TEST_CASE("generated words come from the trained vocabulary only") {
  std::mt19937_64 rng(302);
  Model m(ModelOptions{.max_depth = 3, .alpha = 0.5});
  std::set<std::string> vocab;
  for (int i = 0; i < 5; ++i) {
    vocab.insert("v" + std::to_string(i));
    m.symbols().intern("v" + std::to_string(i));
  }
  train_online(m, random_tokens(rng, 400, 5));

  for (const auto& w : generate(m, WalkConfig{.word_count = 300, .seed = 9})) {
    CHECK(vocab.count(w) == 1);
    CHECK(w != "<pad>");
    CHECK(w != "<unk>");
  }
}

TEST_CASE("an untrained model cannot generate") {
  Model m(ModelOptions{.max_depth = 1, .alpha = 0.5});
  CHECK_THROWS_AS(generate(m, WalkConfig{.word_count = 1, .seed = 1}), std::logic_error);
}

TEST_CASE("depth-0 generation converges to the root distribution") {
  // Root counts a:3, b:1. The walk draws from the smoothed distribution and
  // retries novel draws from the seen words renormalized, which makes the
  // effective distribution exactly counts over total: 3/4 and 1/4.
  Model m(ModelOptions{.max_depth = 0, .alpha = 0.5});
  m.symbols().intern("a");
  m.symbols().intern("b");
  train_online(m, {A, A, 3, A});

  std::map<std::string, int> freq;
  auto words = generate(m, WalkConfig{.word_count = 8000, .seed = 77});
  for (const auto& w : words) ++freq[w];
  CHECK(freq["a"] + freq["b"] == 8000);
  CHECK(std::abs(freq["a"] / 8000.0 - 0.75) < 0.02);
}

TEST_CASE("map models generate with deterministic stops") {
  std::mt19937_64 rng(303);
  Model m(ModelOptions{.max_depth = 2, .alpha = 0.5});
  for (int i = 0; i < 4; ++i) m.symbols().intern("m" + std::to_string(i));
  train_online(m, random_tokens(rng, 200, 4));
  Model map = extract_map(m);
  auto w1 = generate(map, WalkConfig{.word_count = 40, .seed = 11});
  auto w2 = generate(map, WalkConfig{.word_count = 40, .seed = 11});
  CHECK(w1 == w2);
  REQUIRE(w1.size() == 40);
}

TEST_CASE("the seed context steers the first draw") {
  // Train a hard alternation so the context determines the next word
  // almost surely, then start the walk inside the pattern.
  Model m(ModelOptions{.max_depth = 1, .alpha = 0.5});
  WordId x = m.symbols().intern("x");
  WordId y = m.symbols().intern("y");
  std::vector<WordId> tokens;
  for (int i = 0; i < 60; ++i) {
    tokens.push_back(x);
    tokens.push_back(y);
  }
  train_online(m, tokens);

  int x_after_y = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    WalkConfig cfg{.word_count = 1, .seed = seed, .initial_history = {y}};
    if (generate(m, cfg)[0] == "x") ++x_after_y;
  }
  CHECK(x_after_y >= 35);  // overwhelmingly x after y
}
