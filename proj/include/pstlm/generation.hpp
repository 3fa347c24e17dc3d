#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pstlm/trie.hpp"

namespace pstlm {

struct WalkConfig {
  std::uint64_t word_count = 1;
  std::uint64_t seed = 0;

  /// Seed context, newest word first; padded with the boundary symbol up to
  /// the model depth. Empty means "start of text".
  std::vector<WordId> initial_history;
};

/// Samples the next word: descends the matched path, stopping at each
/// context with its leaf probability q (a missing deeper context forces a
/// stop without spending randomness; the depth bound always stops), then
/// draws from the stopped context's smoothed distribution. Drawing the
/// novel mass moves to the one-shorter context and redraws; at the root it
/// redraws from the seen words renormalized, so a real word always comes
/// out. Rejects a model with no counted words.
WordId walk_step(const Model& model, std::span<const WordId> history,
                 std::mt19937_64& rng);

/// Generates `word_count` surface words, feeding each drawn word back into
/// the history. Same seed, same model: same output.
std::vector<std::string> generate(const Model& model, const WalkConfig& config);

}  // namespace pstlm
