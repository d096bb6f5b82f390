#include "gsnk/solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "gsnk/errors.hpp"
#include "gsnk/linalg.hpp"
#include "gsnk/rng.hpp"
#include "gsnk/sampling.hpp"

namespace gsnk {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged:
      return "converged";
    case RunStatus::IterationCap:
      return "iteration-cap";
    case RunStatus::DegenerateRow:
      return "degenerate-row";
  }
  return "?";
}

void SolverConfig::validate(const NonlinearSystem& sys) const {
  if (x0.size() != sys.cols()) {
    throw InputError("x0 has length " + std::to_string(x0.size()) + ", expected " +
                     std::to_string(sys.cols()));
  }
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (check_every < 1) throw InputError("check_every must be at least 1");

  auto check_rows = [&](const IndexSet& rows, const char* what) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j] < 0 || rows[j] >= sys.rows()) {
        throw InputError(std::string(what) + ": row index out of range");
      }
      if (j > 0 && rows[j] <= rows[j - 1]) {
        throw InputError(std::string(what) + ": rows must be strictly increasing");
      }
    }
  };
  check_rows(sample_rows, "sample_rows");
  check_rows(anchor_rows, "anchor_rows");
  if (!anchor_rows.empty()) {
    if (!method.is_block()) throw InputError("anchor rows need a block method");
    for (const Index a : anchor_rows) {
      if (std::binary_search(sample_rows.begin(), sample_rows.end(), a)) {
        throw InputError("anchor rows overlap the sampled rows");
      }
    }
  }
  const Index ground = sample_rows.empty() ? sys.rows() : static_cast<Index>(sample_rows.size());
  method.validate(ground);
}

Vector single_step(const NonlinearSystem& sys, const Vector& x, Index i) {
  const double fi = sys.residual_block(std::span<const Index>(&i, 1), x)[0];
  const Vector grad = sys.gradient_row(i, x);
  const double norm_sq = grad.squaredNorm();
  if (!(norm_sq > 0.0)) throw DegenerateRowError(i);
  return x - (fi / norm_sq) * grad;
}

Vector block_step(const NonlinearSystem& sys, const Vector& x, std::span<const Index> subset) {
  if (subset.empty()) throw InputError("block_step: empty index set");
  return x - least_norm_solve(sys.jacobian_block(subset, x), sys.residual_block(subset, x));
}

namespace {

class Runner {
 public:
  Runner(const NonlinearSystem& sys, const SolverConfig& cfg)
      : sys_(sys),
        cfg_(cfg),
        rng_(cfg.seed, streams::kSolver),
        rule_(cfg.method.rule()),
        x_(cfg.x0) {
    if (cfg.sample_rows.empty()) {
      ground_.resize(static_cast<std::size_t>(sys.rows()));
      std::iota(ground_.begin(), ground_.end(), Index{0});
    } else {
      ground_ = cfg.sample_rows;
    }
  }

  RunTrace run() {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    RunTrace trace;
    std::int64_t k = 0;
    double res_sq = refresh_residual();
    trace.records.push_back({k, res_sq, elapsed()});
    bool converged = res_sq < cfg_.tol;
    bool fresh = true;

    try {
      while (!converged && k < cfg_.max_iter) {
        step(k);
        ++k;
        fresh = false;
        if (k % cfg_.check_every == 0 || k == cfg_.max_iter) {
          res_sq = refresh_residual();
          fresh = true;
          trace.records.push_back({k, res_sq, elapsed()});
          converged = res_sq < cfg_.tol;
        }
      }
      trace.status = converged ? RunStatus::Converged : RunStatus::IterationCap;
    } catch (const DegenerateRowError& e) {
      trace.status = RunStatus::DegenerateRow;
      trace.degenerate_row = e.row();
    }

    if (!fresh) {
      res_sq = refresh_residual();
      trace.records.push_back({k, res_sq, elapsed()});
    }
    trace.iterations = k;
    trace.elapsed_seconds = elapsed();
    trace.final_iterate = Iterate{x_, k, res_sq, true};
    return trace;
  }

 private:
  double refresh_residual() {
    residual_ = sys_.residual(x_);
    residual_valid_ = true;
    return residual_.squaredNorm();
  }

  const Vector& current_residual() {
    if (!residual_valid_) {
      residual_ = sys_.residual(x_);
      residual_valid_ = true;
    }
    return residual_;
  }

  Index ground_size() const { return static_cast<Index>(ground_.size()); }

  Vector scores_over_ground() {
    const Vector& f = current_residual();
    Vector scores = Vector::Constant(sys_.rows(), -1.0);
    if (*rule_ == GreedyRule::MaxResidual) {
      for (const Index i : ground_) scores[i] = f[i] * f[i];
    } else {
      const Vector g = sys_.gradient_norms_sq(x_);
      for (const Index i : ground_) {
        if (!(g[i] > 0.0)) throw DegenerateRowError(i);
        scores[i] = f[i] * f[i] / g[i];
      }
    }
    return scores;
  }

  void project_single(Index i, double fi) {
    Vector grad = sys_.gradient_row(i, x_);
    const double norm_sq = grad.squaredNorm();
    if (!(norm_sq > 0.0)) throw DegenerateRowError(i);
    x_ -= (fi / norm_sq) * grad;
  }

  void project_block(const IndexSet& rows) {
    x_ = block_step(sys_, x_, rows);
  }

  IndexSet with_anchors(IndexSet rows) const {
    if (cfg_.anchor_rows.empty()) return rows;
    IndexSet merged;
    merged.reserve(rows.size() + cfg_.anchor_rows.size());
    std::merge(rows.begin(), rows.end(), cfg_.anchor_rows.begin(), cfg_.anchor_rows.end(),
               std::back_inserter(merged));
    return merged;
  }

  void step(std::int64_t k) {
    const Method& method = cfg_.method;
    const bool observe = static_cast<bool>(cfg_.observer);
    if (observe) x_before_ = x_;
    sampled_.clear();
    selected_.clear();

    switch (method.kind) {
      case MethodKind::NK: {
        const Index i = ground_[static_cast<std::size_t>(cyclic_.next(ground_size()))];
        selected_ = {i};
        project_single(i, sys_.residual_entry(i, x_));
        break;
      }
      case MethodKind::NURK: {
        const Index i =
            ground_[static_cast<std::size_t>(rng_.below(static_cast<std::uint64_t>(ground_size())))];
        selected_ = {i};
        project_single(i, sys_.residual_entry(i, x_));
        break;
      }
      case MethodKind::NRK: {
        const Vector& f = current_residual();
        Vector sub(ground_size());
        for (Index j = 0; j < ground_size(); ++j) sub[j] = f[ground_[static_cast<std::size_t>(j)]];
        const auto pick = sample_proportional_residual(rng_, sub);
        // A zero sub-residual with a nonzero full residual leaves NRK stuck;
        // fall back to a uniform pick so the run still terminates at the cap.
        const Index pos = pick ? *pick
                               : static_cast<Index>(rng_.below(static_cast<std::uint64_t>(ground_size())));
        const Index i = ground_[static_cast<std::size_t>(pos)];
        selected_ = {i};
        project_single(i, f[i]);
        break;
      }
      case MethodKind::MR_SNK:
      case MethodKind::MD_SNK:
      case MethodKind::MR_NK:
      case MethodKind::MD_NK: {
        draw_subset(method.subset_size(ground_size()));
        std::vector<double> res(sampled_.size());
        std::vector<double> norms;
        for (std::size_t j = 0; j < sampled_.size(); ++j) res[j] = sys_.residual_entry(sampled_[j], x_);
        if (*rule_ == GreedyRule::MaxDistance) {
          norms.resize(sampled_.size());
          for (std::size_t j = 0; j < sampled_.size(); ++j) {
            norms[j] = sys_.gradient_norm_sq(sampled_[j], x_);
          }
        }
        const GreedySelection sel = greedy_select(*rule_, sampled_, res, norms);
        selected_ = {sel.index};
        const auto pos = std::lower_bound(sampled_.begin(), sampled_.end(), sel.index) - sampled_.begin();
        project_single(sel.index, res[static_cast<std::size_t>(pos)]);
        break;
      }
      case MethodKind::MR_BSNK1:
      case MethodKind::MD_BSNK1: {
        draw_subset(method.beta);
        const Vector scores = scores_over_ground();
        GreedySelection sel = expand_index_set(sampled_, scores, ground_);
        selected_ = with_anchors(std::move(sel.index_set));
        project_block(selected_);
        break;
      }
      case MethodKind::MR_BSNK2:
      case MethodKind::MD_BSNK2: {
        const Vector scores = scores_over_ground();
        PartitionSelection part = partition_select(rng_, ground_, method.nu, scores, method.block_sizes);
        selected_ = with_anchors(std::move(part.representatives));
        project_block(selected_);
        break;
      }
    }
    residual_valid_ = false;
    if (observe) cfg_.observer(StepEvent{k, sampled_, selected_, x_before_, x_});
  }

  void draw_subset(Index beta) {
    sampled_ = sample_subset(rng_, ground_size(), beta);
    for (Index& pos : sampled_) pos = ground_[static_cast<std::size_t>(pos)];
  }

  const NonlinearSystem& sys_;
  const SolverConfig& cfg_;
  RngStream rng_;
  std::optional<GreedyRule> rule_;
  CyclicSelector cyclic_;
  IndexSet ground_;
  Vector x_;
  Vector x_before_;
  Vector residual_;
  bool residual_valid_ = false;
  IndexSet sampled_;
  IndexSet selected_;
};

}  // namespace

RunTrace run(const NonlinearSystem& sys, const SolverConfig& cfg) {
  cfg.validate(sys);
  return Runner(sys, cfg).run();
}

}  // namespace gsnk
