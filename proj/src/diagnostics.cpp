#include "gsnk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "gsnk/errors.hpp"
#include "gsnk/linalg.hpp"
#include "gsnk/sampling.hpp"
#include "gsnk/solver.hpp"

namespace gsnk {

namespace {

constexpr double kEtaDenominatorFloor = 1e-12;

double sq(double v) { return v * v; }

void require_point(const NonlinearSystem& sys, const Vector& x, const char* what) {
  if (x.size() != sys.cols()) {
    throw InputError(std::string(what) + " has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(sys.cols()));
  }
}

InequalityCheck compare(std::string name, double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return {std::move(name), lhs, rhs, lhs <= rhs + kInequalityRoundoff * scale};
}

// Labelled partitions of `rows` into blocks of the given sizes, each visited once.
void for_each_partition(const IndexSet& rows, std::span<const Index> sizes,
                        std::vector<IndexSet>& blocks,
                        const std::function<void(const std::vector<IndexSet>&)>& fn) {
  if (sizes.empty()) {
    fn(blocks);
    return;
  }
  const Index size = sizes.front();
  for_each_subset(static_cast<Index>(rows.size()), size, [&](std::span<const Index> pick) {
    IndexSet block;
    IndexSet rest;
    block.reserve(pick.size());
    std::size_t p = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (p < pick.size() && static_cast<Index>(j) == pick[p]) {
        block.push_back(rows[j]);
        ++p;
      } else {
        rest.push_back(rows[j]);
      }
    }
    blocks.push_back(std::move(block));
    for_each_partition(rest, sizes.subspan(1), blocks, fn);
    blocks.pop_back();
  }, std::numeric_limits<std::uint64_t>::max());
}

std::uint64_t multinomial(Index m, std::span<const Index> sizes) {
  std::uint64_t total = 1;
  Index left = m;
  for (const Index s : sizes) {
    const std::uint64_t c = binomial(left, s);
    if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= c;
    left -= s;
  }
  return total;
}

}  // namespace

std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t c = 1;
  for (Index j = 1; j <= k; ++j) {
    // c * (n - k + j) / j stays integral at every step.
    const auto num = static_cast<std::uint64_t>(n - k + j);
    const std::uint64_t g = std::gcd(c, static_cast<std::uint64_t>(j));
    const std::uint64_t cj = c / g;
    const std::uint64_t jj = static_cast<std::uint64_t>(j) / g;
    const std::uint64_t numj = num / jj;
    if (cj != 0 && numj > kMax / cj) return kMax;
    c = cj * numj;
  }
  return c;
}

void for_each_subset(Index n, Index k, const std::function<void(std::span<const Index>)>& fn,
                     std::uint64_t guard) {
  if (k < 0 || k > n) throw InputError("subset size out of range");
  const std::uint64_t count = binomial(n, k);
  if (count > guard) {
    throw CapacityError("C(" + std::to_string(n) + ", " + std::to_string(k) + ") = " +
                        std::to_string(count) + " subsets exceeds the enumeration guard of " +
                        std::to_string(guard));
  }
  IndexSet idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), Index{0});
  while (true) {
    fn(idx);
    Index j = k - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - k + j) --j;
    if (j < 0) return;
    ++idx[static_cast<std::size_t>(j)];
    for (Index t = j + 1; t < k; ++t) {
      idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
    }
  }
}

// --- cone condition --------------------------------------------------------

void accumulate_eta(ConeConditionEstimate& est, const NonlinearSystem& sys, const Vector& x1,
                    const Vector& x2) {
  require_point(sys, x1, "x1");
  require_point(sys, x2, "x2");
  if (est.eta_rows.size() != sys.rows()) est.eta_rows = Vector::Zero(sys.rows());
  const Vector f1 = sys.residual(x1);
  const Vector f2 = sys.residual(x2);
  const Vector d = x1 - x2;
  for (Index i = 0; i < sys.rows(); ++i) {
    const double df = f1[i] - f2[i];
    if (!(std::abs(df) >= kEtaDenominatorFloor)) continue;
    const double ratio = std::abs(df - sys.gradient_row(i, x1).dot(d)) / std::abs(df);
    est.eta_rows[i] = std::max(est.eta_rows[i], ratio);
    est.eta_hat = std::max(est.eta_hat, ratio);
    ++est.samples;
  }
}

ConeConditionEstimate estimate_eta(const NonlinearSystem& sys, const Vector& lo, const Vector& hi,
                                   std::int64_t pairs, RngStream& rng) {
  require_point(sys, lo, "box lower corner");
  require_point(sys, hi, "box upper corner");
  if (pairs < 1) throw InputError("estimate_eta needs at least one pair");
  if ((hi.array() < lo.array()).any()) throw InputError("empty box");

  ConeConditionEstimate est;
  est.eta_rows = Vector::Zero(sys.rows());
  auto draw = [&] {
    Vector x(sys.cols());
    for (Index j = 0; j < x.size(); ++j) x[j] = lo[j] == hi[j] ? lo[j] : rng.uniform(lo[j], hi[j]);
    return x;
  };
  for (std::int64_t p = 0; p < pairs; ++p) {
    const Vector x1 = draw();
    const Vector x2 = draw();
    accumulate_eta(est, sys, x1, x2);
  }
  return est;
}

// --- xi / zeta -------------------------------------------------------------

SubsetRatioReport exact_subset_ratios(const NonlinearSystem& sys, const Vector& x, Index beta,
                                      std::uint64_t guard) {
  require_point(sys, x, "x");
  const Index m = sys.rows();
  if (beta < 1 || beta > m) throw InputError("beta outside [1, m]");
  const Vector f = sys.residual(x);
  const Vector g = sys.gradient_norms_sq(x);
  Vector u(m);
  for (Index i = 0; i < m; ++i) {
    if (!(g[i] > 0.0)) throw DegenerateRowError(i);
    u[i] = f[i] / std::sqrt(g[i]);
  }

  double f_two = 0.0, f_inf = 0.0, u_two = 0.0, u_inf = 0.0;
  std::uint64_t count = 0;
  for_each_subset(m, beta, [&](std::span<const Index> tau) {
    double ft = 0.0, fi = 0.0, ut = 0.0, ui = 0.0;
    for (const Index i : tau) {
      ft += sq(f[i]);
      fi = std::max(fi, sq(f[i]));
      ut += sq(u[i]);
      ui = std::max(ui, sq(u[i]));
    }
    f_two += ft;
    f_inf += fi;
    u_two += ut;
    u_inf += ui;
    ++count;
  }, guard);

  SubsetRatioReport r;
  r.beta = beta;
  r.m = m;
  r.subsets = count;
  r.xi = f_inf > 0.0 ? f_two / f_inf : 1.0;
  r.zeta = u_inf > 0.0 ? u_two / u_inf : 1.0;
  return r;
}

// --- convergence factors ---------------------------------------------------

BlockConstant block_constant(const NonlinearSystem& sys, const Vector& x, double eta,
                             const std::vector<IndexSet>& sets) {
  require_point(sys, x, "x");
  if (sets.empty()) throw InputError("block_constant needs at least one index set");
  BlockConstant out;
  out.h2_sq_min = std::numeric_limits<double>::infinity();
  out.min_set_size = std::numeric_limits<Index>::max();
  for (const IndexSet& set : sets) {
    if (set.empty()) throw InputError("block_constant: empty index set");
    const SpectralSummary s = spectral_summary(sys.jacobian_block(set, x));
    const bool full_row_rank = s.rank == static_cast<Index>(set.size());
    // J^+ is n x r; it has full column rank exactly when J has full row rank.
    const double h2_sq = full_row_rank ? 1.0 / sq(s.sigma_max) : 0.0;
    const double sig_sq = s.rank > 0 ? 1.0 / sq(s.sigma_min_nonzero) : 0.0;
    out.h2_sq_min = std::min(out.h2_sq_min, h2_sq);
    out.sigma_sq_max = std::max(out.sigma_sq_max, sig_sq);
    out.min_set_size = std::min(out.min_set_size, static_cast<Index>(set.size()));
  }
  out.sets = sets.size();
  out.value = out.h2_sq_min - 2.0 * eta * out.sigma_sq_max;
  return out;
}

std::vector<IndexSet> all_bsnk1_index_sets(const NonlinearSystem& sys, const Vector& x,
                                           GreedyRule rule, Index beta, std::uint64_t guard) {
  require_point(sys, x, "x");
  const Vector f = sys.residual(x);
  const Vector scores = rule_scores(rule, f, rule == GreedyRule::MaxDistance
                                                 ? sys.gradient_norms_sq(x)
                                                 : Vector());
  std::set<IndexSet> unique;
  for_each_subset(sys.rows(), beta, [&](std::span<const Index> tau) {
    unique.insert(expand_index_set(tau, scores).index_set);
  }, guard);
  return {unique.begin(), unique.end()};
}

BoundReport convergence_factor(const Method& method, const NonlinearSystem& sys, const Vector& x,
                               const BoundInputs& in) {
  require_point(sys, x, "x");
  const Index m = sys.rows();
  method.validate(m);
  if (!(in.eta >= 0.0)) throw InputError("eta must be nonnegative");

  BoundReport r;
  r.method = method.kind;
  r.eta = in.eta;
  r.eta_ok = in.eta < 0.5;
  const double eta = in.eta;
  const double md = static_cast<double>(m);

  const bool needs_ratios = method.kind != MethodKind::NRK && method.kind != MethodKind::NURK &&
                            !method.uses_nu();
  if (needs_ratios) {
    if (!in.ratios) throw InputError(method.name() + " needs the xi/zeta subset ratios");
    if (in.ratios->beta != method.subset_size(m) || in.ratios->m != m) {
      throw InputError(method.name() + ": subset ratios were computed for beta=" +
                       std::to_string(in.ratios->beta) + ", m=" + std::to_string(in.ratios->m));
    }
  } else if (in.ratios) {
    throw InputError(method.name() + " takes no subset ratios");
  }
  const bool bsnk1 = method.kind == MethodKind::MR_BSNK1 || method.kind == MethodKind::MD_BSNK1;
  if (bsnk1 != in.index_set_size.has_value()) {
    throw InputError(method.name() + (bsnk1 ? " needs |I|" : " takes no |I|"));
  }
  if (method.uses_nu() != in.tau_h.has_value()) {
    throw InputError(method.name() + (method.uses_nu() ? " needs tau_h" : " takes no tau_h"));
  }
  if (method.is_block() != in.block_constant.has_value()) {
    throw InputError(method.name() +
                     (method.is_block() ? " needs the block constant" : " takes no block constant"));
  }

  auto min_grad_sq = [&] { return sys.gradient_norms_sq(x).minCoeff(); };
  const double beta = static_cast<double>(method.subset_size(m));

  switch (method.kind) {
    case MethodKind::NK:
      throw InputError("NK has no convergence factor");
    case MethodKind::NRK:
    case MethodKind::NURK: {
      const SpectralSummary s = spectral_summary(sys.jacobian(x));
      r.h2 = s.h2;
      r.sigma_max = s.sigma_max;
      r.norm_sq = sq(s.frob_norm);
      r.rho = 1.0 - (1.0 - 2.0 * eta) / sq(1.0 + eta) * sq(s.h2) / (r.norm_sq * md);
      break;
    }
    case MethodKind::MR_SNK:
    case MethodKind::MR_NK: {
      const SpectralSummary s = spectral_summary(sys.jacobian(x));
      r.h2 = s.h2;
      r.sigma_max = s.sigma_max;
      r.norm_sq = sq(s.row_inf_norm);
      r.ratio = in.ratios->xi;
      r.rho = 1.0 - (1.0 - 2.0 * eta) / (1.0 + sq(eta)) * (beta / r.ratio) * sq(s.h2) /
                        (r.norm_sq * md);
      break;
    }
    case MethodKind::MD_SNK:
    case MethodKind::MD_NK: {
      const SpectralSummary s = spectral_summary(normalized_view(sys, x).G);
      r.h2 = s.h2;
      r.sigma_max = s.sigma_max;
      r.ratio = in.ratios->zeta;
      r.rho = 1.0 - (1.0 - 2.0 * eta) / (1.0 + sq(eta)) * (beta / r.ratio) * sq(s.h2) / md;
      break;
    }
    case MethodKind::MR_BSNK1: {
      const SpectralSummary s = spectral_summary(sys.jacobian(x));
      r.h2 = s.h2;
      r.sigma_max = s.sigma_max;
      r.ratio = in.ratios->xi;
      r.set_size = static_cast<double>(*in.index_set_size);
      r.block_constant = *in.block_constant;
      r.rho = 1.0 - r.block_constant * r.set_size * (1.0 / r.ratio) * (beta / md) *
                        (1.0 / (1.0 + sq(eta))) * sq(s.h2);
      break;
    }
    case MethodKind::MD_BSNK1: {
      const SpectralSummary s = spectral_summary(normalized_view(sys, x).G);
      r.h2 = s.h2;
      r.sigma_max = s.sigma_max;
      r.norm_sq = min_grad_sq();
      r.ratio = in.ratios->zeta;
      r.set_size = static_cast<double>(*in.index_set_size);
      r.block_constant = *in.block_constant;
      r.rho = 1.0 - r.block_constant * r.norm_sq * r.set_size * (beta / r.ratio) *
                        (1.0 / (1.0 + sq(eta))) * sq(s.h2) / md;
      break;
    }
    case MethodKind::MR_BSNK2:
    case MethodKind::MD_BSNK2: {
      const IndexSet& tau_h = *in.tau_h;
      if (tau_h.empty()) throw InputError("tau_h is empty");
      const bool md_rule = method.kind == MethodKind::MD_BSNK2;
      Matrix block = sys.jacobian_block(tau_h, x);
      if (md_rule) {
        for (Index j = 0; j < block.rows(); ++j) {
          const double norm = block.row(j).norm();
          if (!(norm > 0.0)) throw DegenerateRowError(tau_h[static_cast<std::size_t>(j)]);
          block.row(j) /= norm;
        }
      }
      const SpectralSummary s = spectral_summary(block);
      r.h2 = s.h2;
      r.sigma_max = s.sigma_max;
      r.set_size = static_cast<double>(tau_h.size());
      r.block_constant = *in.block_constant;
      const double nu = static_cast<double>(method.nu);
      const double lead = md_rule ? (r.norm_sq = min_grad_sq()) : 1.0;
      r.rho = 1.0 - lead * r.block_constant * nu / r.set_size * sq(s.h2) / (1.0 + sq(eta));
      break;
    }
  }
  if (method.is_block()) r.constant_ok = r.block_constant > 0.0;
  return r;
}

// --- exact expectation -----------------------------------------------------

double exact_expected_decrease(const Method& method, const NonlinearSystem& sys, const Vector& x,
                               const Vector& x_star, std::uint64_t guard) {
  require_point(sys, x, "x");
  require_point(sys, x_star, "x_star");
  const Index m = sys.rows();
  method.validate(m);
  const Vector f = sys.residual(x);
  auto dist_sq = [&](const Vector& y) { return (y - x_star).squaredNorm(); };
  // A zero residual row leaves x in place; single_step would still divide.
  auto after_single = [&](Index i) { return f[i] == 0.0 ? x : single_step(sys, x, i); };

  switch (method.kind) {
    case MethodKind::NK:
      throw InputError("NK is deterministic; exact_expected_decrease needs a randomized method");
    case MethodKind::NURK: {
      double total = 0.0;
      for (Index i = 0; i < m; ++i) total += dist_sq(after_single(i));
      return total / static_cast<double>(m);
    }
    case MethodKind::NRK: {
      const double norm_sq = f.squaredNorm();
      if (norm_sq == 0.0) return dist_sq(x);
      double total = 0.0;
      for (Index i = 0; i < m; ++i) {
        if (f[i] != 0.0) total += sq(f[i]) / norm_sq * dist_sq(after_single(i));
      }
      return total;
    }
    case MethodKind::MR_SNK:
    case MethodKind::MD_SNK:
    case MethodKind::MR_NK:
    case MethodKind::MD_NK: {
      const GreedyRule rule = *method.rule();
      const Vector g = rule == GreedyRule::MaxDistance ? sys.gradient_norms_sq(x) : Vector();
      std::vector<double> res, norms;
      double total = 0.0;
      std::uint64_t count = 0;
      for_each_subset(m, method.subset_size(m), [&](std::span<const Index> tau) {
        res.resize(tau.size());
        norms.resize(g.size() > 0 ? tau.size() : 0);
        for (std::size_t j = 0; j < tau.size(); ++j) {
          res[j] = f[tau[j]];
          if (g.size() > 0) norms[j] = g[tau[j]];
        }
        const GreedySelection sel = greedy_select(rule, tau, res, norms);
        total += dist_sq(after_single(sel.index));
        ++count;
      }, guard);
      return total / static_cast<double>(count);
    }
    case MethodKind::MR_BSNK1:
    case MethodKind::MD_BSNK1: {
      const GreedyRule rule = *method.rule();
      const Vector scores =
          rule_scores(rule, f, rule == GreedyRule::MaxDistance ? sys.gradient_norms_sq(x) : Vector());
      double total = 0.0;
      std::uint64_t count = 0;
      for_each_subset(m, method.beta, [&](std::span<const Index> tau) {
        const GreedySelection sel = expand_index_set(tau, scores);
        total += dist_sq(block_step(sys, x, sel.index_set));
        ++count;
      }, guard);
      return total / static_cast<double>(count);
    }
    case MethodKind::MR_BSNK2:
    case MethodKind::MD_BSNK2: {
      const GreedyRule rule = *method.rule();
      const Vector scores =
          rule_scores(rule, f, rule == GreedyRule::MaxDistance ? sys.gradient_norms_sq(x) : Vector());
      const std::vector<Index> sizes =
          method.block_sizes.empty() ? default_block_sizes(m, method.nu) : method.block_sizes;
      const std::uint64_t count = multinomial(m, sizes);
      if (count > guard) {
        throw CapacityError(std::to_string(count) + " partitions exceed the enumeration guard of " +
                            std::to_string(guard));
      }
      IndexSet rows(static_cast<std::size_t>(m));
      std::iota(rows.begin(), rows.end(), Index{0});
      std::vector<IndexSet> blocks;
      double total = 0.0;
      for_each_partition(rows, sizes, blocks, [&](const std::vector<IndexSet>& part) {
        const PartitionSelection sel = select_representatives(part, scores);
        total += dist_sq(block_step(sys, x, sel.representatives));
      });
      return total / static_cast<double>(count);
    }
  }
  return 0.0;
}

// --- lemma checks ----------------------------------------------------------

bool LemmaReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.holds; });
}

LemmaReport check_block_linearization(const NonlinearSystem& sys, const Vector& x1,
                                      const Vector& x2, std::span<const Index> tau, double eta) {
  require_point(sys, x1, "x1");
  require_point(sys, x2, "x2");
  LemmaReport rep;
  if (tau.empty()) {
    rep.checks.push_back({"linearization-error", 0.0, 0.0, true});
    rep.checks.push_back({"linearization-lower", 0.0, 0.0, true});
    return rep;
  }
  const Vector df = sys.residual_block(tau, x1) - sys.residual_block(tau, x2);
  const Vector lin = sys.jacobian_block(tau, x1) * (x1 - x2);
  const double df_sq = df.squaredNorm();
  rep.checks.push_back(compare("linearization-error", (df - lin).squaredNorm(), sq(eta) * df_sq));
  rep.checks.push_back(compare("linearization-lower", lin.squaredNorm() / (1.0 + sq(eta)), df_sq));
  return rep;
}

LemmaReport check_normalized_linearization(const NonlinearSystem& sys, const Vector& x,
                                           const Vector& x_star, std::span<const Index> tau,
                                           double eta) {
  require_point(sys, x, "x");
  require_point(sys, x_star, "x_star");
  LemmaReport rep;
  if (tau.empty()) {
    rep.checks.push_back({"normalized-error", 0.0, 0.0, true});
    rep.checks.push_back({"normalized-lower", 0.0, 0.0, true});
    return rep;
  }
  const Vector f = sys.residual_block(tau, x);
  Matrix J = sys.jacobian_block(tau, x);
  Vector u(f.size());
  for (Index j = 0; j < J.rows(); ++j) {
    const double norm = J.row(j).norm();
    if (!(norm > 0.0)) throw DegenerateRowError(tau[static_cast<std::size_t>(j)]);
    u[j] = f[j] / norm;
    J.row(j) /= norm;
  }
  const Vector lin = J * (x - x_star);
  const double u_sq = u.squaredNorm();
  rep.checks.push_back(compare("normalized-error", (u - lin).squaredNorm(), sq(eta) * u_sq));
  rep.checks.push_back(compare("normalized-lower", lin.squaredNorm() / (1.0 + sq(eta)), u_sq));
  return rep;
}

LemmaReport check_lemma_inequalities(const NonlinearSystem& sys, const Vector& x,
                                     const Vector& x_star, std::span<const Index> tau, double eta) {
  LemmaReport rep = check_block_linearization(sys, x, x_star, tau, eta);
  const LemmaReport normalized = check_normalized_linearization(sys, x, x_star, tau, eta);
  rep.checks.insert(rep.checks.end(), normalized.checks.begin(), normalized.checks.end());
  return rep;
}

LemmaReport check_projection_decrease(const NonlinearSystem& sys, const Vector& x,
                                      const Vector& x_star, std::span<const Index> tau,
                                      double eta) {
  require_point(sys, x, "x");
  require_point(sys, x_star, "x_star");
  LemmaReport rep;
  if (tau.empty()) return rep;
  const double before = (x - x_star).squaredNorm();
  for (const Index i : tau) {
    const double fi = sys.residual_entry(i, x);
    const double g = sys.gradient_norm_sq(i, x);
    if (!(g > 0.0)) throw DegenerateRowError(i);
    const double after = (single_step(sys, x, i) - x_star).squaredNorm();
    rep.checks.push_back(compare("single-step row " + std::to_string(i), after,
                                 before - (1.0 - 2.0 * eta) * sq(fi) / g));
  }
  const IndexSet set(tau.begin(), tau.end());
  const BlockConstant c = block_constant(sys, x, eta, {set});
  const double after = (block_step(sys, x, tau) - x_star).squaredNorm();
  rep.checks.push_back(
      compare("block-step", after, before - c.value * sys.residual_block(tau, x).squaredNorm()));
  return rep;
}

}  // namespace gsnk
