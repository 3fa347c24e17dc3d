#include "reference/reference_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pstlm::reference {

namespace {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

Sequence RefCounts::key(std::span<const WordId> newest_first, std::size_t len) {
  Sequence s(newest_first.first(len).begin(), newest_first.first(len).end());
  std::reverse(s.begin(), s.end());
  return s;
}

void RefCounts::record(std::span<const WordId> history, WordId word) {
  for (std::size_t len = 0; len <= depth_; ++len) {
    Ctx& c = table_[key(history, len)];
    ++c.succ[word];
    ++c.total;
  }
}

std::uint64_t RefCounts::successor_count(std::span<const WordId> context, WordId word) const {
  auto it = table_.find(key(context, context.size()));
  if (it == table_.end()) return 0;
  auto s = it->second.succ.find(word);
  return s == it->second.succ.end() ? 0 : s->second;
}

std::uint64_t RefCounts::total(std::span<const WordId> context) const {
  auto it = table_.find(key(context, context.size()));
  return it == table_.end() ? 0 : it->second.total;
}

std::uint64_t RefCounts::species(std::span<const WordId> context) const {
  auto it = table_.find(key(context, context.size()));
  return it == table_.end() ? 0 : it->second.succ.size();
}

double RefCounts::gamma(std::span<const WordId> context, WordId word) const {
  std::uint64_t cw = successor_count(context, word);
  std::uint64_t tot = total(context);
  std::uint64_t r = species(context);
  if (cw > 0) return static_cast<double>(cw) / static_cast<double>(tot + r);
  double novel = (tot + r == 0) ? 1.0
                                : static_cast<double>(r) / static_cast<double>(tot + r);
  if (context.empty()) return novel;
  // Escape drops the oldest word of the context.
  return novel * gamma(context.first(context.size() - 1), word);
}

ExplicitMixture::ExplicitMixture(std::uint32_t depth, double alpha)
    : depth_(depth), alpha_(alpha), counts_(depth) {
  padded_.assign(depth_ + 1, kPadId);
}

Sequence ExplicitMixture::suffix(std::size_t len) const {
  return Sequence(padded_.end() - static_cast<std::ptrdiff_t>(len), padded_.end());
}

double ExplicitMixture::log_root_mixture() const {
  auto it = log_lmix_.find(Sequence{});
  return it == log_lmix_.end() ? 0.0 : it->second;
}

ExplicitMixture::Step ExplicitMixture::compute(WordId word) const {
  Step st;
  st.log_l.resize(depth_ + 1);
  st.log_lmix.resize(depth_ + 1);

  Sequence hist(padded_.rbegin(), padded_.rend());  // newest word first

  for (std::size_t k = 0; k <= depth_; ++k) {
    double g = counts_.gamma(std::span<const WordId>(hist).first(k), word);
    auto it = log_l_.find(suffix(k));
    double prev = it == log_l_.end() ? 0.0 : it->second;
    st.log_l[k] = prev + std::log(g);
  }

  // Contexts at the depth bound never split further: their mixture is the
  // leaf likelihood itself.
  st.log_lmix[depth_] = st.log_l[depth_];
  for (std::size_t k = depth_; k-- > 0;) {
    Sequence s = suffix(k);
    Sequence deeper = suffix(k + 1);
    double children_sum = 0.0;
    bool deeper_included = false;
    auto it = children_.find(s);
    if (it != children_.end()) {
      for (WordId u : it->second) {
        Sequence child = s;
        child.insert(child.begin(), u);
        if (child == deeper) {
          children_sum += st.log_lmix[k + 1];
          deeper_included = true;
        } else {
          children_sum += log_lmix_.at(child);
        }
      }
    }
    // A context seen for the first time enters the product from log 1.
    if (!deeper_included) children_sum += st.log_lmix[k + 1];
    st.log_lmix[k] =
        log_add(std::log(alpha_) + st.log_l[k], std::log1p(-alpha_) + children_sum);
  }
  return st;
}

double ExplicitMixture::predictive(WordId word) const {
  Step st = compute(word);
  return std::exp(st.log_lmix[0] - log_root_mixture());
}

double ExplicitMixture::observe(WordId word) {
  Step st = compute(word);
  double prob = std::exp(st.log_lmix[0] - log_root_mixture());

  Sequence hist(padded_.rbegin(), padded_.rend());
  for (std::size_t k = 0; k <= depth_; ++k) {
    Sequence s = suffix(k);
    log_l_[s] = st.log_l[k];
    log_lmix_[s] = st.log_lmix[k];
    if (k < depth_) children_[s].insert(suffix(k + 1).front());
  }
  counts_.record(hist, word);
  padded_.push_back(word);
  return prob;
}

BruteForce::BruteForce(std::span<const WordId> tokens, std::uint32_t depth, double alpha,
                       std::size_t max_trees)
    : depth_(depth), alpha_(alpha), max_trees_(max_trees) {
  Sequence padded(depth_ + 1, kPadId);
  padded.insert(padded.end(), tokens.begin(), tokens.end());

  steps_ = tokens.size();
  RefCounts counts(depth_);
  std::set<Sequence> observed;
  gamma_.resize(steps_);
  paths_.resize(steps_);
  for (std::size_t i = 0; i < steps_; ++i) {
    std::size_t pos = depth_ + 1 + i;  // index of token i in the padded stream
    // Everything before pos, newest word first.
    Sequence hist(padded.rend() - static_cast<std::ptrdiff_t>(pos), padded.rend());
    gamma_[i].resize(depth_ + 1);
    paths_[i].resize(depth_ + 1);
    for (std::size_t k = 0; k <= depth_; ++k) {
      gamma_[i][k] = counts.gamma(std::span<const WordId>(hist).first(k), padded[pos]);
      Sequence ctx(padded.begin() + static_cast<std::ptrdiff_t>(pos - k),
                   padded.begin() + static_cast<std::ptrdiff_t>(pos));
      paths_[i][k] = ctx;
      observed.insert(ctx);
    }
    counts.record(hist, padded[pos]);
  }

  for (const Sequence& s : observed) {
    if (s.size() >= depth_ + 1) continue;
    for (const Sequence& t : observed) {
      if (t.size() == s.size() + 1 && std::equal(s.begin(), s.end(), t.begin() + 1)) {
        kids_[s].push_back(t);
      }
    }
  }

  std::map<Sequence, bool> marks;
  std::vector<Sequence> worklist;
  if (depth_ > 0 && steps_ > 0) worklist.push_back(Sequence{});
  if (steps_ > 0) {
    enumerate(std::move(worklist), marks);
  }

  log_total_ = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    double v = trees_[t].log_prior + trees_[t].log_like;
    log_total_ = (t == 0) ? v : log_add(log_total_, v);
  }
}

void BruteForce::enumerate(std::vector<Sequence> worklist, std::map<Sequence, bool>& marks) {
  if (worklist.empty()) {
    emit(marks);
    return;
  }
  Sequence s = worklist.back();
  worklist.pop_back();

  marks[s] = true;  // leaf here
  enumerate(worklist, marks);

  marks[s] = false;  // internal: the observed extensions must now decide
  std::vector<Sequence> extended = worklist;
  auto it = kids_.find(s);
  if (it != kids_.end()) {
    for (const Sequence& child : it->second) {
      if (child.size() < depth_) extended.push_back(child);
    }
  }
  enumerate(std::move(extended), marks);
  marks.erase(s);
}

void BruteForce::emit(const std::map<Sequence, bool>& marks) {
  if (trees_.size() >= max_trees_) {
    throw std::length_error("pruning enumeration too large");
  }
  Tree tree;
  tree.leaf_marks = marks;
  tree.log_prior = 0.0;
  for (const auto& [s, leaf] : marks) {
    tree.log_prior += leaf ? std::log(alpha_) : std::log1p(-alpha_);
  }
  tree.log_like = 0.0;
  for (std::size_t i = 0; i < steps_; ++i) {
    std::size_t matched = depth_;
    for (std::size_t k = 0; k < depth_; ++k) {
      if (marks.at(paths_[i][k])) {
        matched = k;
        break;
      }
    }
    tree.log_like += std::log(gamma_[i][matched]);
  }
  trees_.push_back(std::move(tree));
}

double BruteForce::total_prior() const {
  double t = 0.0;
  for (const Tree& tree : trees_) t += std::exp(tree.log_prior);
  return t;
}

std::vector<Sequence> BruteForce::decidable_children(const Sequence& s) const {
  std::vector<Sequence> out;
  auto it = kids_.find(s);
  if (it == kids_.end()) return out;
  for (const Sequence& child : it->second) {
    if (child.size() < depth_) out.push_back(child);
  }
  return out;
}

}  // namespace pstlm::reference
