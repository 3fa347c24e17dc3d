#include "pstlm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "pstlm/mixture.hpp"

namespace pstlm {

EvalReport evaluate(Model& model, const TokenStream& stream, bool adapt, bool keep_trace) {
  if (stream.empty()) throw std::invalid_argument("cannot evaluate an empty stream");
  if (adapt && model.frozen()) {
    throw std::logic_error("adaptive evaluation needs a mutable model");
  }

  const std::uint32_t depth = model.max_depth();
  TokenStream p = padded(stream, depth);
  const std::size_t first = static_cast<std::size_t>(depth) + 1;

  EvalReport rep;
  if (keep_trace) rep.trace.reserve(stream.size());
  std::vector<WordId> hist(depth);
  for (std::size_t i = first; i < p.ids.size(); ++i) {
    WordId w = p.ids[i];
    if (w == kPadId) throw std::invalid_argument("padding symbol inside the stream");
    for (std::uint32_t d = 0; d < depth; ++d) hist[d] = p.ids[i - 1 - d];

    // Classify against the deepest context the model actually matched;
    // that is where the escape chain for this token starts.
    std::size_t matched = std::as_const(model).matched_path(hist).size() - 1;
    NovelEventKind kind =
        novel_event_kind(model, std::span<const WordId>(hist).first(matched), w);

    double prob =
        adapt ? update(model, hist, w) : predict(model, hist, w).probability;
    double lp = std::log2(prob);
    rep.total_log2_prob += lp;
    ++rep.token_count;
    switch (kind) {
      case NovelEventKind::SeenHere: ++rep.seen_here; break;
      case NovelEventKind::SeenElsewhere: ++rep.seen_elsewhere; break;
      case NovelEventKind::GloballyNew: ++rep.globally_new; break;
    }
    if (keep_trace) rep.trace.push_back({w, lp, kind});
  }
  rep.perplexity = std::exp2(-rep.total_log2_prob / static_cast<double>(rep.token_count));
  return rep;
}

EvalReport evaluate(const Model& model, const TokenStream& stream, bool keep_trace) {
  // The adapt=false path only ever reads; the cast just reuses the engine.
  return evaluate(const_cast<Model&>(model), stream, /*adapt=*/false, keep_trace);
}

Model extract_map(const Model& model) {
  Model map = model;
  map.freeze();
  map.mark_map_tree();
  return map;
}

std::vector<double> posterior_weights(std::span<const double> neg_log2_likelihoods) {
  if (neg_log2_likelihoods.empty()) {
    throw std::invalid_argument("no likelihoods to normalize");
  }
  double best = *std::min_element(neg_log2_likelihoods.begin(), neg_log2_likelihoods.end());
  std::vector<double> weights(neg_log2_likelihoods.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = std::exp2(best - neg_log2_likelihoods[i]);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<RankedCandidate> rank_candidates(const Model& model,
                                             const std::vector<std::string>& candidates,
                                             const TokenizerRules& rules) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to rank");

  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  std::vector<double> costs;
  costs.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    TokenStream ts;
    ts.source = "candidate";
    ts.sentence_starts.push_back(0);
    for (const std::string& wordtext : tokenize(candidates[i], rules)) {
      ts.ids.push_back(model.symbols().lookup(wordtext).value_or(kUnkId));
    }
    if (ts.ids.empty()) {
      throw std::invalid_argument("candidate " + std::to_string(i + 1) + " has no tokens");
    }
    EvalReport rep = evaluate(model, ts, /*keep_trace=*/false);
    out.push_back({i, candidates[i], rep.token_count, -rep.total_log2_prob, 0.0});
    costs.push_back(-rep.total_log2_prob);
  }

  std::vector<double> posts = posterior_weights(costs);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].posterior = posts[i];
  std::stable_sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    return a.posterior > b.posterior;
  });
  return out;
}

}  // namespace pstlm
