#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pstlm/estimator.hpp"
#include "pstlm/trie.hpp"

namespace pstlm {

/// Everything computed while predicting one word: per-context values along
/// the matched path (deepest context first) and the final mixture
/// probability. Node pointers stay valid until the model next mutates.
struct PathPrediction {
  struct Entry {
    const TrieNode* node;
    std::uint32_t depth;
    double gamma;        // escape-resolved estimate at this context
    double q;            // posterior weight of this context being a leaf
    double gamma_tilde;  // mixture over prunings of the subtree here
  };
  std::vector<Entry> entries;
  double probability = 0.0;
};

/// q(s) = sigmoid(R(s)): the model's current belief that context s is a
/// leaf of the generating tree. Numerically stable for any finite R.
double mixing_weight(const TrieNode& node);

/// Mixture probability of `word` after `history` (newest word first).
/// Blends the leaf estimates along the matched path bottom-up:
/// gamma_tilde(s) = q gamma(s) + (1 - q) gamma_tilde(child); at the deepest
/// matched node gamma_tilde equals gamma, which is exact because an
/// unobserved subtree predicts identically to its escape value. On a
/// maximum-posterior model the walk instead stops at the first kept leaf
/// and returns its estimate unmixed.
PathPrediction predict(const Model& model, std::span<const WordId> history, WordId word);

/// One online step: predicts `word`, then folds the outcome into the
/// per-node ratios R += log gamma(s) - log gamma_tilde(child), and finally
/// records the counts. All values in the R step are the pre-update ones.
/// Returns the predictive probability. Rejected on frozen models.
double update(Model& model, std::span<const WordId> history, WordId word);

}  // namespace pstlm
