#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pstlm/trie.hpp"

namespace pstlm {

/// Witten-Bell distribution at one context: probabilities of the seen
/// successor words plus the mass reserved for a novel successor. The seen
/// entries sum to 1 - novel.
struct Distribution {
  std::vector<std::pair<WordId, double>> seen;  // ascending word id
  double novel = 1.0;
};

/// Where a word's probability mass comes from at a context:
///   SeenHere      - counted after this exact context,
///   SeenElsewhere - unseen here, but the model knows the word,
///   GloballyNew   - the model has never counted the word anywhere.
enum class NovelEventKind { SeenHere, SeenElsewhere, GloballyNew };

/// The smoothed distribution gamma at the context given newest word first.
/// With c successor events and r distinct successor words, a word counted
/// k times gets k / (c + r) and the novel mass is r / (c + r); a context
/// with no events reserves everything for novelty.
Distribution node_gamma(const Model& model, std::span<const WordId> context);

/// gamma values for the context chain: entry d is the escape-resolved
/// probability of `word` at the length-d suffix of `context` (entry 0 is
/// the root). A word unseen at a context escapes to the one-shorter
/// context, scaled by the novel mass; at the root the novel mass itself is
/// used for words with no counts anywhere.
std::vector<double> escape_chain(const Model& model, std::span<const WordId> context,
                                 WordId word);

/// Escape-resolved probability of `word` after `context` (newest first).
double word_prob_with_escape(const Model& model, std::span<const WordId> context,
                             WordId word);

NovelEventKind novel_event_kind(const Model& model, std::span<const WordId> context,
                                WordId word);

}  // namespace pstlm
