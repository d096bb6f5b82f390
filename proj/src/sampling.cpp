#include "gsnk/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gsnk/errors.hpp"

namespace gsnk {

namespace {

// NaN never wins; among equal scores the first (smallest) index is kept.
bool beats(double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  return std::isnan(incumbent) || candidate > incumbent;
}

double score_of(GreedyRule rule, Index row, double residual, double grad_norm_sq) {
  const double r2 = residual * residual;
  if (rule == GreedyRule::MaxResidual) return r2;
  if (!(grad_norm_sq > 0.0)) throw DegenerateRowError(row);
  return r2 / grad_norm_sq;
}

}  // namespace

const char* to_string(GreedyRule rule) {
  return rule == GreedyRule::MaxResidual ? "MR" : "MD";
}

IndexSet sample_subset(RngStream& rng, Index m, Index beta) {
  if (m < 1 || beta < 1 || beta > m) {
    throw InputError("sample_subset: need 1 <= beta <= m, got beta=" + std::to_string(beta) +
                     ", m=" + std::to_string(m));
  }
  IndexSet out;
  out.reserve(static_cast<std::size_t>(beta));
  if (beta == m) {
    out.resize(static_cast<std::size_t>(m));
    std::iota(out.begin(), out.end(), Index{0});
    return out;
  }
  // Floyd's algorithm: every beta-subset is equally likely.
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  for (Index j = m - beta; j < m; ++j) {
    const auto t = static_cast<Index>(rng.below(static_cast<std::uint64_t>(j) + 1));
    const Index pick = taken[static_cast<std::size_t>(t)] ? j : t;
    taken[static_cast<std::size_t>(pick)] = 1;
  }
  for (Index i = 0; i < m; ++i) {
    if (taken[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

Vector rule_scores(GreedyRule rule, const Vector& residuals, const Vector& grad_norms_sq) {
  if (rule == GreedyRule::MaxDistance && grad_norms_sq.size() != residuals.size()) {
    throw InputError("rule_scores: gradient norms and residuals differ in length");
  }
  Vector out(residuals.size());
  for (Index i = 0; i < residuals.size(); ++i) {
    out[i] = score_of(rule, i, residuals[i],
                      rule == GreedyRule::MaxDistance ? grad_norms_sq[i] : 1.0);
  }
  return out;
}

GreedySelection greedy_select(GreedyRule rule, std::span<const Index> subset,
                              std::span<const double> residuals,
                              std::span<const double> grad_norms_sq) {
  if (subset.empty()) throw InputError("greedy_select: empty subset");
  if (residuals.size() != subset.size() ||
      (rule == GreedyRule::MaxDistance && grad_norms_sq.size() != subset.size())) {
    throw InputError("greedy_select: inputs must run parallel to the subset");
  }
  GreedySelection sel;
  bool first = true;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const double g = rule == GreedyRule::MaxDistance ? grad_norms_sq[j] : 1.0;
    const double s = score_of(rule, subset[j], residuals[j], g);
    if (first || beats(s, sel.delta) || (s == sel.delta && subset[j] < sel.index)) {
      sel.index = subset[j];
      sel.delta = s;
      first = false;
    }
  }
  sel.index_set = {sel.index};
  return sel;
}

GreedySelection expand_index_set(std::span<const Index> subset, const Vector& scores_all,
                                 std::span<const Index> ground) {
  const Index m = scores_all.size();
  if (subset.empty()) throw InputError("expand_index_set: empty subset");
  std::vector<char> in_subset(static_cast<std::size_t>(m), 0);
  GreedySelection sel;
  bool first = true;
  for (const Index i : subset) {
    if (i < 0 || i >= m) throw InputError("expand_index_set: subset index out of range");
    in_subset[static_cast<std::size_t>(i)] = 1;
    const double s = scores_all[i];
    if (first || beats(s, sel.delta) || (s == sel.delta && i < sel.index)) {
      sel.index = i;
      sel.delta = s;
      first = false;
    }
  }
  auto consider = [&](Index h) {
    if (!in_subset[static_cast<std::size_t>(h)] && scores_all[h] >= sel.delta) {
      sel.index_set.push_back(h);
    }
  };
  if (ground.empty()) {
    for (Index h = 0; h < m; ++h) consider(h);
  } else {
    for (const Index h : ground) consider(h);
  }
  sel.index_set.push_back(sel.index);
  std::sort(sel.index_set.begin(), sel.index_set.end());
  return sel;
}

std::vector<Index> default_block_sizes(Index m, Index nu) {
  if (nu < 1 || nu > m) {
    throw InputError("block count nu=" + std::to_string(nu) + " outside [1, " +
                     std::to_string(m) + "]");
  }
  std::vector<Index> sizes(static_cast<std::size_t>(nu), m / nu);
  for (Index j = 0; j < m % nu; ++j) ++sizes[static_cast<std::size_t>(j)];
  return sizes;
}

PartitionSelection select_representatives(std::vector<IndexSet> blocks, const Vector& scores_all) {
  PartitionSelection out;
  out.representatives.reserve(blocks.size());
  for (auto& block : blocks) {
    if (block.empty()) throw InputError("select_representatives: empty block");
    std::sort(block.begin(), block.end());
    Index best = block.front();
    for (const Index i : block) {
      if (i < 0 || i >= scores_all.size()) {
        throw InputError("select_representatives: index out of range");
      }
      if (beats(scores_all[i], scores_all[best])) best = i;
    }
    out.representatives.push_back(best);
  }
  std::sort(out.representatives.begin(), out.representatives.end());
  out.blocks = std::move(blocks);
  return out;
}

PartitionSelection partition_select(RngStream& rng, std::span<const Index> ground, Index nu,
                                    const Vector& scores_all, std::span<const Index> sizes) {
  const auto m = static_cast<Index>(ground.size());
  std::vector<Index> block_sizes;
  if (sizes.empty()) {
    block_sizes = default_block_sizes(m, nu);
  } else {
    if (static_cast<Index>(sizes.size()) != nu) {
      throw InputError("partition_select: expected " + std::to_string(nu) + " block sizes");
    }
    Index total = 0;
    for (const Index s : sizes) {
      if (s < 1) throw InputError("partition_select: block sizes must be positive");
      total += s;
    }
    if (total != m) throw InputError("partition_select: block sizes must sum to the row count");
    block_sizes.assign(sizes.begin(), sizes.end());
  }

  // Shuffling the ground set and slicing it is the same as drawing each block
  // uniformly from the remaining indices without replacement.
  IndexSet order(ground.begin(), ground.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<IndexSet> blocks;
  blocks.reserve(block_sizes.size());
  auto it = order.begin();
  for (const Index s : block_sizes) {
    blocks.emplace_back(it, it + s);
    it += s;
  }
  return select_representatives(std::move(blocks), scores_all);
}

PartitionSelection partition_select(RngStream& rng, Index m, Index nu, const Vector& scores_all,
                                    std::span<const Index> sizes) {
  IndexSet ground(static_cast<std::size_t>(std::max<Index>(m, 0)));
  std::iota(ground.begin(), ground.end(), Index{0});
  return partition_select(rng, ground, nu, scores_all, sizes);
}

std::optional<Index> sample_proportional_residual(RngStream& rng, const Vector& residuals) {
  const double total = residuals.squaredNorm();
  if (!(total > 0.0)) return std::nullopt;
  const double target = rng.uniform(0.0, total);
  double acc = 0.0;
  Index last_positive = 0;
  for (Index i = 0; i < residuals.size(); ++i) {
    const double w = residuals[i] * residuals[i];
    if (w <= 0.0) continue;
    acc += w;
    last_positive = i;
    if (target < acc) return i;
  }
  // Rounding can leave target a hair above the accumulated sum.
  return last_positive;
}

Index CyclicSelector::next(Index m) {
  if (m < 1) throw InputError("CyclicSelector: m must be positive");
  const auto i = static_cast<Index>(counter_ % static_cast<std::uint64_t>(m));
  ++counter_;
  return i;
}

}  // namespace gsnk
