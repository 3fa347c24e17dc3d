#include "pstlm/mixture.hpp"

#include <cmath>
#include <stdexcept>

namespace pstlm {

double mixing_weight(const TrieNode& node) {
  double r = node.log_ratio;
  if (r >= 0.0) {
    return 1.0 / (1.0 + std::exp(-r));
  }
  double e = std::exp(r);
  return e / (1.0 + e);
}

namespace {

PathPrediction mix_path(const Model& model, std::span<const TrieNode* const> path,
                        std::span<const WordId> history, WordId word) {
  std::size_t len = path.size();  // contexts at depths 0 .. len-1
  std::vector<double> gammas = escape_chain(model, history.first(len - 1), word);

  PathPrediction out;
  out.entries.reserve(len);
  double tilde = gammas[len - 1];
  out.entries.push_back({path[len - 1], static_cast<std::uint32_t>(len - 1), gammas[len - 1],
                         mixing_weight(*path[len - 1]), tilde});
  for (std::size_t d = len - 1; d-- > 0;) {
    double q = mixing_weight(*path[d]);
    tilde = q * gammas[d] + (1.0 - q) * tilde;
    out.entries.push_back({path[d], static_cast<std::uint32_t>(d), gammas[d], q, tilde});
  }
  out.probability = tilde;
  return out;
}

PathPrediction map_leaf_prediction(const Model& model,
                                   std::span<const TrieNode* const> path,
                                   std::span<const WordId> history, WordId word) {
  // The kept tree's leaf on this path: the first context with R >= 0, a
  // depth-bound context, or the deepest existing node (deeper unobserved
  // contexts share its escape value).
  std::size_t stop = path.size() - 1;
  for (std::size_t d = 0; d + 1 < path.size(); ++d) {
    if (path[d]->log_ratio >= 0.0) {
      stop = d;
      break;
    }
  }
  double gamma = escape_chain(model, history.first(stop), word).back();
  PathPrediction out;
  out.entries.push_back({path[stop], static_cast<std::uint32_t>(stop), gamma, 1.0, gamma});
  out.probability = gamma;
  return out;
}

}  // namespace

PathPrediction predict(const Model& model, std::span<const WordId> history, WordId word) {
  if (word == kPadId) {
    throw std::invalid_argument("the padding symbol cannot be predicted");
  }
  std::vector<const TrieNode*> path = model.matched_path(history);
  if (model.map_tree()) return map_leaf_prediction(model, path, history, word);
  return mix_path(model, path, history, word);
}

double update(Model& model, std::span<const WordId> history, WordId word) {
  if (model.frozen()) {
    throw std::logic_error("update is not allowed on a frozen model");
  }
  if (word == kPadId) {
    throw std::invalid_argument("the padding symbol cannot be predicted");
  }

  std::vector<TrieNode*> path = model.matched_path(history);
  std::vector<const TrieNode*> view(path.begin(), path.end());
  PathPrediction pred = mix_path(model, view, history, word);

  // Ratio step before the counts change: entry len-1-d holds depth d.
  std::size_t len = path.size();
  for (std::size_t d = 0; d + 1 < len; ++d) {
    const PathPrediction::Entry& here = pred.entries[len - 1 - d];
    const PathPrediction::Entry& deeper = pred.entries[len - 2 - d];
    path[d]->log_ratio += std::log(here.gamma) - std::log(deeper.gamma_tilde);
  }

  model.record_observation(history, word);
  return pred.probability;
}

}  // namespace pstlm
