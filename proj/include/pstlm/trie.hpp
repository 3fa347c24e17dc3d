#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pstlm/corpus.hpp"
#include "pstlm/splay_map.hpp"

namespace pstlm {

/// One context in the suffix trie. The path from the root spells the
/// context newest word first, so the children of node s are the contexts
/// that extend s by one older word. The successor counts of context s are
/// not stored in s itself: c_s(w) is the visit count of node (s, w), i.e.
/// of the node reached by descending w first and then the words of s.
struct TrieNode {
  /// Edge label from the parent (the oldest word of this node's context).
  /// Unused on the root.
  WordId word = 0;

  /// Times this node's word sequence occurred in the padded stream.
  std::uint64_t visits = 0;

  /// Successor events recorded at this context (sum of c_s(w) over w).
  std::uint64_t succ_total = 0;

  /// Distinct successor words ever recorded at this context. Monotone:
  /// pruning a successor's storage node does not decrement it.
  std::uint32_t species = 0;

  /// R(s): log odds that this context is a leaf of the generating tree
  /// rather than internal. Initialized to log(alpha / (1 - alpha)).
  double log_ratio = 0.0;

  SplayMap<WordId, TrieNode> children;
};

struct ModelOptions {
  std::uint32_t max_depth = 5;
  double alpha = 0.5;

  /// Observations between automatic prunes; 0 disables pruning.
  std::uint64_t prune_interval = 0;

  /// Minimum visit count a node needs to survive a prune.
  std::uint64_t prune_threshold = 2;
};

/// Load/save failure with a machine-checkable reason.
class IoError : public std::runtime_error {
 public:
  enum class Kind { VersionMismatch, Truncated, ChecksumMismatch, Malformed };

  IoError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Suffix-trie language model state: counts, per-node mixing ratios, and
/// the vocabulary. Counting and structural maintenance live here; the
/// probability calculations live in estimator.hpp and mixture.hpp.
class Model {
 public:
  explicit Model(ModelOptions options);

  const ModelOptions& options() const { return options_; }
  double alpha() const { return options_.alpha; }
  std::uint32_t max_depth() const { return options_.max_depth; }
  std::uint64_t tokens_seen() const { return tokens_seen_; }

  /// Node count including the root.
  std::uint64_t node_count() const { return node_count_; }

  bool frozen() const { return frozen_; }

  /// True when prediction should follow the single maximum-posterior tree
  /// instead of mixing over all prunings.
  bool map_tree() const { return map_tree_; }

  SymbolTable& symbols() { return symbols_; }
  const SymbolTable& symbols() const { return symbols_; }

  TrieNode& root() { return root_; }
  const TrieNode& root() const { return root_; }

  /// Child lookup. The mutable overload splays unless the model is frozen;
  /// the const overload never restructures.
  TrieNode* child(TrieNode& node, WordId word);
  const TrieNode* child(const TrieNode& node, WordId word) const;

  /// Nodes for the empty context and every suffix of `history` (given
  /// newest word first) that exists in the trie, root first, at most
  /// max_depth + 1 entries. Stops at the first missing link.
  std::vector<const TrieNode*> matched_path(std::span<const WordId> history) const;
  std::vector<TrieNode*> matched_path(std::span<const WordId> history);

  /// Records one token: increments visit counts on the successor path for
  /// `word` (depths 0..max_depth+1) and successor statistics on the context
  /// path (depths 0..max_depth). `history` lists the preceding words newest
  /// first and must cover a full window of max_depth words. Runs an
  /// automatic prune when the configured interval divides tokens_seen.
  void record_observation(std::span<const WordId> history, WordId word);

  /// c_ctx(word): occurrences of `word` right after the context given
  /// newest word first. Zero when the storage node is absent.
  std::uint64_t successor_count(std::span<const WordId> context, WordId word) const;

  /// Removes every node with visits below the threshold, along with its
  /// descendants (visit counts never increase with depth, so the subtree is
  /// below threshold too). Returns the number of nodes removed.
  std::uint64_t prune(std::uint64_t threshold);

  /// Makes the model read-only: mutation is rejected and lookups stop
  /// splaying, so concurrent readers are safe.
  void freeze() { frozen_ = true; }

  void mark_map_tree() { map_tree_ = true; }

  /// Serializes the full state. The byte stream is canonical: saving the
  /// same logical model twice yields identical bytes regardless of splay
  /// shape.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  /// Restores a saved model. Throws IoError, leaving no partial state with
  /// the caller. Loaded order, counts, ratios, and vocabulary are exactly
  /// what was saved.
  static Model load(std::istream& in);
  static Model load_file(const std::string& path);

  /// log(alpha / (1 - alpha)): prior log odds for a fresh node.
  double prior_log_ratio() const { return prior_log_ratio_; }

 private:
  friend struct ModelWireFormat;

  void require_mutable(const char* op) const;
  std::pair<TrieNode*, bool> get_or_create(TrieNode& parent, WordId word);
  std::uint64_t prune_children(TrieNode& node, std::uint64_t threshold);

  ModelOptions options_;
  double prior_log_ratio_;
  TrieNode root_;
  SymbolTable symbols_;
  std::uint64_t tokens_seen_ = 0;
  std::uint64_t node_count_ = 1;
  bool frozen_ = false;
  bool map_tree_ = false;

  // Scratch for record_observation: which depths on the successor path
  // allocated a new node this observation.
  std::vector<char> created_depth_;
};

}  // namespace pstlm
