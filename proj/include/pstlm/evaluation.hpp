#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pstlm/corpus.hpp"
#include "pstlm/estimator.hpp"
#include "pstlm/trie.hpp"

namespace pstlm {

struct TokenScore {
  WordId word;
  double log2_prob;
  NovelEventKind kind;
};

struct EvalReport {
  std::uint64_t token_count = 0;
  double total_log2_prob = 0.0;
  double perplexity = 0.0;  // 2^(-total_log2_prob / token_count)
  std::uint64_t seen_here = 0;
  std::uint64_t seen_elsewhere = 0;
  std::uint64_t globally_new = 0;
  std::vector<TokenScore> trace;  // filled only on request
};

/// Runs the stream through the model, scoring every real token with the
/// current state; padding is context only and is never scored. With adapt
/// set this is exactly online training: each token is predicted first and
/// learned afterwards, so the report doubles as the training curve.
/// Rejects empty streams; adapt on a frozen model is rejected.
EvalReport evaluate(Model& model, const TokenStream& stream, bool adapt,
                    bool keep_trace = false);

/// Frozen scoring of a read-only model. No mutation happens on this path.
EvalReport evaluate(const Model& model, const TokenStream& stream,
                    bool keep_trace = false);

/// The single most probable pruning under the current posterior: a frozen
/// copy whose predictions stop at the first context with R >= 0 (ties kept
/// as leaves) instead of mixing. The counting structure is retained intact
/// so escape estimates keep working.
Model extract_map(const Model& model);

/// Normalized posteriors from per-candidate costs: candidate i gets
/// 2^(-cost_i) / sum_j 2^(-cost_j), computed after shifting by the minimum
/// cost so the exponentials cannot underflow together.
std::vector<double> posterior_weights(std::span<const double> neg_log2_likelihoods);

struct RankedCandidate {
  std::size_t input_index;
  std::string text;
  std::uint64_t token_count;
  double neg_log2_likelihood;
  double posterior;
};

/// Scores each candidate line as an independent padded stream (frozen, the
/// model is untouched), then ranks by posterior, highest first; ties keep
/// input order. Words outside the vocabulary score as the unknown symbol.
/// Rejects an empty candidate list and candidates with no tokens.
std::vector<RankedCandidate> rank_candidates(const Model& model,
                                             const std::vector<std::string>& candidates,
                                             const TokenizerRules& rules = {});

}  // namespace pstlm
