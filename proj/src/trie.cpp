#include "pstlm/trie.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pstlm {

Model::Model(ModelOptions options) : options_(options) {
  if (!(options_.alpha > 0.0 && options_.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie strictly between 0 and 1");
  }
  if (options_.max_depth > 64) {
    throw std::invalid_argument("max depth out of range");
  }
  prior_log_ratio_ = std::log(options_.alpha / (1.0 - options_.alpha));
  root_.log_ratio = prior_log_ratio_;
  // The empty context is a (trivial) suffix of every stream prefix,
  // including the empty one.
  root_.visits = 1;
}

void Model::require_mutable(const char* op) const {
  if (frozen_) {
    throw std::logic_error(std::string(op) + " is not allowed on a frozen model");
  }
}

TrieNode* Model::child(TrieNode& node, WordId word) {
  if (frozen_) {
    return const_cast<TrieNode*>(std::as_const(node.children).find(word));
  }
  return node.children.find(word);
}

const TrieNode* Model::child(const TrieNode& node, WordId word) const {
  return node.children.find(word);
}

std::vector<const TrieNode*> Model::matched_path(std::span<const WordId> history) const {
  std::vector<const TrieNode*> path;
  path.reserve(options_.max_depth + 1);
  const TrieNode* node = &root_;
  path.push_back(node);
  std::size_t limit = std::min<std::size_t>(history.size(), options_.max_depth);
  for (std::size_t d = 0; d < limit; ++d) {
    const TrieNode* next = node->children.find(history[d]);
    if (!next) break;
    node = next;
    path.push_back(node);
  }
  return path;
}

std::vector<TrieNode*> Model::matched_path(std::span<const WordId> history) {
  std::vector<TrieNode*> path;
  path.reserve(options_.max_depth + 1);
  TrieNode* node = &root_;
  path.push_back(node);
  std::size_t limit = std::min<std::size_t>(history.size(), options_.max_depth);
  for (std::size_t d = 0; d < limit; ++d) {
    TrieNode* next = child(*node, history[d]);
    if (!next) break;
    node = next;
    path.push_back(node);
  }
  return path;
}

std::pair<TrieNode*, bool> Model::get_or_create(TrieNode& parent, WordId word) {
  auto [node, created] = parent.children.try_emplace(word);
  if (created) {
    node->word = word;
    node->log_ratio = prior_log_ratio_;
    ++node_count_;
  }
  return {node, created};
}

void Model::record_observation(std::span<const WordId> history, WordId word) {
  require_mutable("record_observation");
  if (history.size() < options_.max_depth) {
    throw std::invalid_argument("history shorter than the context window");
  }

  created_depth_.assign(options_.max_depth + 2, 0);

  // Successor path: the node for (s, word) at each context depth. All of
  // them lie on the single descent word, history[0], history[1], ...
  TrieNode* node = &root_;
  ++node->visits;
  WordId edge = word;
  for (std::uint32_t d = 0; d <= options_.max_depth; ++d) {
    auto [next, created] = get_or_create(*node, edge);
    if (created) created_depth_[d + 1] = 1;
    ++next->visits;
    node = next;
    if (d < options_.max_depth) edge = history[d];
  }

  // Context path: successor totals and species for every suffix of the
  // history. A context node can be missing only when its suffix includes
  // padding (the successor path of the previous token created all others);
  // such a context has occurred exactly once, hence visits = 1.
  TrieNode* ctx = &root_;
  ++ctx->succ_total;
  if (created_depth_[1]) ++ctx->species;
  for (std::uint32_t d = 0; d < options_.max_depth; ++d) {
    auto [next, created] = get_or_create(*ctx, history[d]);
    if (created) next->visits = 1;
    ++next->succ_total;
    if (created_depth_[d + 2]) ++next->species;
    ctx = next;
  }

  ++tokens_seen_;
  if (options_.prune_interval != 0 && tokens_seen_ % options_.prune_interval == 0) {
    prune(options_.prune_threshold);
  }
}

std::uint64_t Model::successor_count(std::span<const WordId> context, WordId word) const {
  // The padding symbol never occurs as a successor; its trie node (if any)
  // exists only as a context.
  if (word == kPadId) return 0;
  const TrieNode* node = root_.children.find(word);
  for (std::size_t d = 0; node && d < context.size(); ++d) {
    node = node->children.find(context[d]);
  }
  return node ? node->visits : 0;
}

namespace {

std::uint64_t subtree_size(const TrieNode& node) {
  std::uint64_t n = 1;
  node.children.for_each([&](WordId, const TrieNode& c) { n += subtree_size(c); });
  return n;
}

}  // namespace

std::uint64_t Model::prune_children(TrieNode& node, std::uint64_t threshold) {
  std::uint64_t removed = 0;
  std::vector<WordId> doomed;
  node.children.for_each([&](WordId w, TrieNode& c) {
    if (c.visits < threshold) {
      removed += subtree_size(c);
      doomed.push_back(w);
    } else {
      removed += prune_children(c, threshold);
    }
  });
  for (WordId w : doomed) node.children.erase(w);
  return removed;
}

std::uint64_t Model::prune(std::uint64_t threshold) {
  require_mutable("prune");
  std::uint64_t removed = prune_children(root_, threshold);
  node_count_ -= removed;
  return removed;
}

}  // namespace pstlm
