#include "pstlm/generation.hpp"

#include <stdexcept>

#include "pstlm/estimator.hpp"
#include "pstlm/mixture.hpp"

namespace pstlm {

WordId walk_step(const Model& model, std::span<const WordId> history,
                 std::mt19937_64& rng) {
  const TrieNode* node = &model.root();
  if (node->children.empty()) {
    throw std::logic_error("cannot sample from a model with no counted words");
  }

  std::size_t depth = 0;
  std::size_t limit = std::min<std::size_t>(history.size(), model.max_depth());
  while (depth < limit) {
    const TrieNode* next = node->children.find(history[depth]);
    if (!next) break;
    double q = model.map_tree() ? (node->log_ratio >= 0.0 ? 1.0 : 0.0)
                                : mixing_weight(*node);
    if (uniform_unit(rng) < q) break;
    node = next;
    ++depth;
  }

  for (std::size_t ctx_len = depth;; --ctx_len) {
    Distribution dist = node_gamma(model, history.first(ctx_len));
    double u = uniform_unit(rng);
    double cum = 0.0;
    for (const auto& [w, p] : dist.seen) {
      cum += p;
      if (u < cum) return w;
    }
    if (ctx_len > 0) continue;  // novel mass: retry one context shorter

    // Novel draw at the root: renormalize over the seen words. Counts
    // exist (checked on entry), though pruning may have removed the
    // storage nodes; that leaves nothing to sample from.
    double total = 0.0;
    for (const auto& [w, p] : dist.seen) total += p;
    if (total <= 0.0) {
      throw std::logic_error("cannot sample from a model with no counted words");
    }
    double u2 = uniform_unit(rng) * total;
    cum = 0.0;
    for (const auto& [w, p] : dist.seen) {
      cum += p;
      if (u2 < cum) return w;
    }
    return dist.seen.back().first;  // guard against accumulated rounding
  }
}

std::vector<std::string> generate(const Model& model, const WalkConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::vector<WordId> hist(model.max_depth(), kPadId);
  for (std::size_t i = 0; i < config.initial_history.size() && i < hist.size(); ++i) {
    hist[i] = config.initial_history[i];
  }

  std::vector<std::string> words;
  words.reserve(config.word_count);
  for (std::uint64_t n = 0; n < config.word_count; ++n) {
    WordId w = walk_step(model, hist, rng);
    words.push_back(model.symbols().surface(w));
    if (!hist.empty()) {
      for (std::size_t d = hist.size() - 1; d > 0; --d) hist[d] = hist[d - 1];
      hist[0] = w;
    }
  }
  return words;
}

}  // namespace pstlm
