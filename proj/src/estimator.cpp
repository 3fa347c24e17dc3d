#include "pstlm/estimator.hpp"

namespace pstlm {

namespace {

const TrieNode* context_node(const Model& model, std::span<const WordId> context) {
  const TrieNode* node = &model.root();
  for (std::size_t d = 0; node && d < context.size(); ++d) {
    node = node->children.find(context[d]);
  }
  return node;
}

double novel_mass(const TrieNode* node) {
  if (!node) return 1.0;
  double denom = static_cast<double>(node->succ_total) + static_cast<double>(node->species);
  if (denom == 0.0) return 1.0;
  return static_cast<double>(node->species) / denom;
}

}  // namespace

Distribution node_gamma(const Model& model, std::span<const WordId> context) {
  Distribution dist;
  const TrieNode* node = context_node(model, context);
  if (!node || (node->succ_total == 0 && node->species == 0)) return dist;

  double denom = static_cast<double>(node->succ_total) + static_cast<double>(node->species);
  dist.novel = static_cast<double>(node->species) / denom;

  // c_s(w) is stored at node (s, w): walk each root child w down the
  // context. Root children enumerate every word the model has ever counted,
  // so no successor is missed. The padding symbol's node exists as a
  // context, not as a successor event; skip it.
  model.root().children.for_each([&](WordId w, const TrieNode& head) {
    if (w == kPadId) return;
    const TrieNode* storage = &head;
    for (std::size_t d = 0; storage && d < context.size(); ++d) {
      storage = storage->children.find(context[d]);
    }
    if (storage && storage->visits > 0) {
      dist.seen.emplace_back(w, static_cast<double>(storage->visits) / denom);
    }
  });
  return dist;
}

std::vector<double> escape_chain(const Model& model, std::span<const WordId> context,
                                 WordId word) {
  // Successor counts for every suffix of the context lie on the single
  // descent word, context[0], context[1], ...: count[d] = c at depth d.
  // The padding symbol is never a successor event, whatever the trie holds
  // under its node.
  std::size_t len = context.size();
  std::vector<std::uint64_t> count(len + 1, 0);
  const TrieNode* storage =
      word == kPadId ? nullptr : model.root().children.find(word);
  if (storage) count[0] = storage->visits;
  for (std::size_t d = 0; storage && d < len; ++d) {
    storage = storage->children.find(context[d]);
    if (storage) count[d + 1] = storage->visits;
  }

  std::vector<double> chain(len + 1);
  const TrieNode* node = &model.root();
  for (std::size_t d = 0; d <= len; ++d) {
    if (d > 0) node = node ? node->children.find(context[d - 1]) : nullptr;
    // Visit counts never increase with depth, so a surviving storage node
    // implies a surviving context node; the null check is pure defense.
    if (count[d] > 0 && node) {
      double denom = static_cast<double>(node->succ_total) + static_cast<double>(node->species);
      chain[d] = static_cast<double>(count[d]) / denom;
    } else if (d == 0) {
      // A word with no counts anywhere takes the root's novel mass.
      chain[d] = novel_mass(node);
    } else {
      chain[d] = novel_mass(node) * chain[d - 1];
    }
  }
  return chain;
}

double word_prob_with_escape(const Model& model, std::span<const WordId> context,
                             WordId word) {
  return escape_chain(model, context, word).back();
}

NovelEventKind novel_event_kind(const Model& model, std::span<const WordId> context,
                                WordId word) {
  if (model.successor_count(context, word) > 0) return NovelEventKind::SeenHere;
  const TrieNode* head = model.root().children.find(word);
  if (head && head->visits > 0) return NovelEventKind::SeenElsewhere;
  return NovelEventKind::GloballyNew;
}

}  // namespace pstlm
