#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gsnk/method.hpp"
#include "gsnk/problem.hpp"
#include "gsnk/types.hpp"

namespace gsnk {

/// Emitted after every accepted step when SolverConfig::observer is set.
struct StepEvent {
  std::int64_t k;            ///< iteration that produced x_after (x_after = x_{k+1})
  const IndexSet& sampled;   ///< tau_k (empty for NK / NURK / NRK / BSNK2)
  const IndexSet& selected;  ///< rows the projection enforced (i_k, I_k or J_k, plus anchors)
  const Vector& x_before;
  const Vector& x_after;
};

using StepObserver = std::function<void(const StepEvent&)>;

struct SolverConfig {
  Method method;
  Vector x0;
  double tol = 1e-6;                ///< stop once ||f(x_k)||^2 < tol at a check
  std::int64_t max_iter = 200000;
  std::uint64_t seed = 0;
  std::int64_t check_every = 1;     ///< full-residual stopping check period
  /// Rows the selectors draw from; empty means every row.
  IndexSet sample_rows;
  /// Rows appended to every block step (the GLM hybrid mode puts the affine
  /// rows here). Only valid for block methods; must not overlap sample_rows.
  IndexSet anchor_rows;
  StepObserver observer;

  void validate(const NonlinearSystem& sys) const;
};

enum class RunStatus { Converged, IterationCap, DegenerateRow };

std::string_view to_string(RunStatus status);

struct TraceRecord {
  std::int64_t k;
  double residual_sq;
  double elapsed_seconds;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::IterationCap;
  Iterate final_iterate;
  /// IT: the k at which the stopping check first passed, else the last k reached.
  std::int64_t iterations = 0;
  double elapsed_seconds = 0.0;
  std::optional<Index> degenerate_row;
};

/// x - f_i(x) / ||grad f_i(x)||^2 * grad f_i(x). Throws DegenerateRowError.
Vector single_step(const NonlinearSystem& sys, const Vector& x, Index i);

/// x - (f'_tau(x))^+ f_tau(x).
Vector block_step(const NonlinearSystem& sys, const Vector& x, std::span<const Index> subset);

/// Runs the configured method until ||f||^2 < tol at a check or max_iter steps.
RunTrace run(const NonlinearSystem& sys, const SolverConfig& cfg);

}  // namespace gsnk
