#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gsnk/rng.hpp"
#include "gsnk/types.hpp"

namespace gsnk {

/// Greedy selection criterion.
///   MaxResidual: score_i = |f_i|^2
///   MaxDistance: score_i = |f_i|^2 / ||grad f_i||^2
enum class GreedyRule { MaxResidual, MaxDistance };

const char* to_string(GreedyRule rule);

struct GreedySelection {
  Index index = 0;       ///< winning row i_k
  double delta = 0.0;    ///< its score
  IndexSet index_set;    ///< I_k, sorted; {i_k} unless produced by expand_index_set
};

struct PartitionSelection {
  std::vector<IndexSet> blocks;  ///< each block sorted ascending
  IndexSet representatives;      ///< one argmax per block, sorted ascending
};

/// `beta` distinct indices drawn uniformly from [0, m), sorted ascending.
IndexSet sample_subset(RngStream& rng, Index m, Index beta);

/// Scores for every row. `grad_norms_sq` is ignored for MaxResidual and may be
/// empty then; MaxDistance throws DegenerateRowError on a zero norm.
Vector rule_scores(GreedyRule rule, const Vector& residuals, const Vector& grad_norms_sq);

/// Argmax of the rule score over `subset`. `residuals` and `grad_norms_sq`
/// run parallel to `subset`. Ties go to the smallest row index.
GreedySelection greedy_select(GreedyRule rule, std::span<const Index> subset,
                              std::span<const double> residuals,
                              std::span<const double> grad_norms_sq);

/// Threshold expansion around the subset argmax:
///   I_k = { h in ground \ subset : score(h) >= delta_k } U { i_k }.
/// `scores_all` is indexed by row; an empty `ground` means [0, scores_all.size()).
GreedySelection expand_index_set(std::span<const Index> subset, const Vector& scores_all,
                                 std::span<const Index> ground = {});

/// Default block sizes: floor(m / nu), the first (m mod nu) blocks one larger.
std::vector<Index> default_block_sizes(Index m, Index nu);

/// Uniformly random partition of `ground` into blocks of the given sizes
/// (default_block_sizes when `sizes` is empty), then the per-block argmax.
PartitionSelection partition_select(RngStream& rng, std::span<const Index> ground, Index nu,
                                    const Vector& scores_all, std::span<const Index> sizes = {});
PartitionSelection partition_select(RngStream& rng, Index m, Index nu, const Vector& scores_all,
                                    std::span<const Index> sizes = {});

/// Per-block argmax for a partition fixed by the caller.
PartitionSelection select_representatives(std::vector<IndexSet> blocks, const Vector& scores_all);

/// Index drawn with probability |f_i|^2 / ||f||^2. Empty when the residual is
/// exactly zero, i.e. the caller should already have stopped.
std::optional<Index> sample_proportional_residual(RngStream& rng, const Vector& residuals);

/// Cyclic row selector; the counter persists across calls.
class CyclicSelector {
 public:
  explicit CyclicSelector(std::uint64_t start = 0) : counter_(start) {}
  Index next(Index m);
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t counter_;
};

}  // namespace gsnk
