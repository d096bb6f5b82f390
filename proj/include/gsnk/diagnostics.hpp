#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsnk/method.hpp"
#include "gsnk/problem.hpp"
#include "gsnk/rng.hpp"

namespace gsnk {

/// Largest subset / partition count the exact oracles will enumerate.
inline constexpr std::uint64_t kEnumerationGuard = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(Index n, Index k);

/// Calls `fn` with every size-k subset of [0, n) in lexicographic order.
/// Throws CapacityError when C(n, k) exceeds `guard`.
void for_each_subset(Index n, Index k, const std::function<void(std::span<const Index>)>& fn,
                     std::uint64_t guard = kEnumerationGuard);

// ---------------------------------------------------------------------------
// Cone condition

/// Empirical cone-condition constants. eta_rows[i] is the largest observed
///   |f_i(x1) - f_i(x2) - grad f_i(x1)^T (x1 - x2)| / |f_i(x1) - f_i(x2)|
/// over pairs whose denominator is at least 1e-12. This is a lower bound
/// on the true eta for the sampled region, never a certificate.
struct ConeConditionEstimate {
  double eta_hat = 0.0;
  Vector eta_rows;
  std::int64_t samples = 0;  ///< ratios that entered the maximum
};

/// Folds the pair (x1, x2) into `est` (gradient taken at x1).
void accumulate_eta(ConeConditionEstimate& est, const NonlinearSystem& sys, const Vector& x1,
                    const Vector& x2);

/// Monte Carlo estimate over `pairs` pairs drawn uniformly from the box [lo, hi].
ConeConditionEstimate estimate_eta(const NonlinearSystem& sys, const Vector& lo, const Vector& hi,
                                   std::int64_t pairs, RngStream& rng);

// ---------------------------------------------------------------------------
// xi_k / zeta_k

struct SubsetRatioReport {
  double xi = 1.0;    ///< sum ||f_tau||_2^2 / sum ||f_tau||_inf^2
  double zeta = 1.0;  ///< same with u = f / ||grad f||
  Index beta = 0;
  Index m = 0;
  std::uint64_t subsets = 0;
};

/// Exact sums over every size-beta subset of the rows. When every subset has
/// a zero max (f(x) = 0) the ratio is reported as 1.
SubsetRatioReport exact_subset_ratios(const NonlinearSystem& sys, const Vector& x, Index beta,
                                      std::uint64_t guard = kEnumerationGuard);

// ---------------------------------------------------------------------------
// Convergence factors

/// eps (BSNK1) or alpha (BSNK2): min h2^2(J^+) - 2 eta max sigma_max^2(J^+)
/// over a family of index sets J.
struct BlockConstant {
  double value = 0.0;
  double h2_sq_min = 0.0;         ///< min over sets of h2^2(J^+) = 1 / sigma_max^2(J) (0 if rank deficient)
  double sigma_sq_max = 0.0;      ///< max over sets of 1 / sigma_min_nonzero^2(J)
  Index min_set_size = 0;
  std::size_t sets = 0;
};

BlockConstant block_constant(const NonlinearSystem& sys, const Vector& x, double eta,
                             const std::vector<IndexSet>& sets);

/// Every I_k the BSNK1 rule can produce at x (one per tau), deduplicated.
/// Subject to the enumeration guard.
std::vector<IndexSet> all_bsnk1_index_sets(const NonlinearSystem& sys, const Vector& x,
                                           GreedyRule rule, Index beta,
                                           std::uint64_t guard = kEnumerationGuard);

/// Ingredients the theorems take from outside the current Jacobian.
struct BoundInputs {
  double eta = 0.0;
  std::optional<SubsetRatioReport> ratios;  ///< SNK / NK / BSNK1
  std::optional<Index> index_set_size;      ///< |I| for BSNK1
  std::optional<IndexSet> tau_h;            ///< the BSNK2 block with the smallest max score
  std::optional<double> block_constant;     ///< eps (BSNK1) or alpha (BSNK2)
};

struct BoundReport {
  MethodKind method = MethodKind::NRK;
  double rho = 1.0;
  double eta = 0.0;
  double h2 = 0.0;             ///< h2 of f', G, f'_tau_h or G_tau_h as the theorem uses
  double sigma_max = 0.0;      ///< of the same matrix
  double norm_sq = 0.0;        ///< ||f'||_F^2 (NRK), ||f'||_{2,inf}^2 (MR-SNK), min ||grad f_i||^2 (MD block)
  double ratio = 1.0;          ///< xi or zeta where used
  double set_size = 0.0;       ///< |I| or |tau_h|
  double block_constant = 0.0; ///< eps or alpha
  bool eta_ok = true;          ///< eta < 1/2
  bool constant_ok = true;     ///< eps > 0 or alpha > 0 (true when not applicable)

  bool hypotheses_hold() const { return eta_ok && constant_ok; }
};

/// Evaluates the factor exactly as displayed in the matching theorem; NURK
/// and NRK share the NRK factor. Violated hypotheses are flagged, not clamped.
/// Throws InputError when `in` lacks or contradicts what the method needs
/// (NK has no factor and is rejected).
BoundReport convergence_factor(const Method& method, const NonlinearSystem& sys, const Vector& x,
                               const BoundInputs& in);

/// E[ ||x_{k+1} - x_star||^2 | x_k = x ] by enumerating every random choice the
/// method can make at x, with the production selection code. NK is rejected.
double exact_expected_decrease(const Method& method, const NonlinearSystem& sys, const Vector& x,
                               const Vector& x_star, std::uint64_t guard = kEnumerationGuard);

// ---------------------------------------------------------------------------
// Lemma checks

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;  ///< the side that must be smaller
  double rhs = 0.0;
  bool holds = true;

  double slack() const { return rhs - lhs; }
};

struct LemmaReport {
  std::vector<InequalityCheck> checks;

  bool all_hold() const;
};

/// Relative slack allowed for rounding when comparing the two sides.
inline constexpr double kInequalityRoundoff = 1e-12;

/// Block linearization bounds at (x1, x2):
///   ||df - f'_tau(x1) d||^2 <= eta^2 ||df||^2
///   ||df||^2 >= ||f'_tau(x1) d||^2 / (1 + eta^2)
/// with d = x1 - x2, df = f_tau(x1) - f_tau(x2). An empty tau passes.
LemmaReport check_block_linearization(const NonlinearSystem& sys, const Vector& x1,
                                      const Vector& x2, std::span<const Index> tau, double eta);

/// The normalized form at a root x_star:
///   ||u_tau - G_tau (x - x_star)||^2 <= eta^2 ||u_tau||^2
///   ||u_tau||^2 >= ||G_tau (x - x_star)||^2 / (1 + eta^2)
LemmaReport check_normalized_linearization(const NonlinearSystem& sys, const Vector& x,
                                           const Vector& x_star, std::span<const Index> tau,
                                           double eta);

/// Both pairs above with x2 = x_star.
LemmaReport check_lemma_inequalities(const NonlinearSystem& sys, const Vector& x,
                                     const Vector& x_star, std::span<const Index> tau, double eta);

/// Per-step decrease:
///   single row i in tau: ||x+ - x*||^2 <= ||x - x*||^2 - (1 - 2 eta) f_i^2 / ||grad f_i||^2
///   block tau:           ||x+ - x*||^2 <= ||x - x*||^2 - (h2^2(J^+) - 2 eta sigma_max^2(J^+)) ||f_tau||^2
LemmaReport check_projection_decrease(const NonlinearSystem& sys, const Vector& x,
                                      const Vector& x_star, std::span<const Index> tau, double eta);

}  // namespace gsnk
