#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsnk/method.hpp"
#include "gsnk/problem.hpp"
#include "gsnk/problems/glm.hpp"
#include "gsnk/solver.hpp"

namespace gsnk {

/// Raw `key = value` pairs, in file order of last assignment.
using KeyValues = std::map<std::string, std::string>;

/// Reads the flat config grammar: one `key = value` per line, `#` starts a
/// comment, blank lines ignored. Throws ParseError on a line without '='.
KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

struct ExperimentConfig {
  // problem.*
  std::string problem_kind = "brown";  ///< brown | linear | glm | glm-synthetic
  Index n = 50;                        ///< brown size; linear column count
  Index m = 6;                         ///< linear row count
  double cond = 10.0;                  ///< linear condition target
  std::string path;                    ///< glm dataset
  std::optional<double> lambda;        ///< glm regularization, default 1/p
  Index d = 10;                        ///< glm-synthetic features
  Index p = 200;                       ///< glm-synthetic samples
  double flip = 0.1;                   ///< glm-synthetic label noise
  std::uint64_t problem_seed = 1;      ///< generator seed for synthetic problems

  // method.*
  std::vector<Method> methods{Method{}};

  int runs = 10;
  std::uint64_t seed = 0;
  std::string out;        ///< primary CSV output; empty means stdout
  std::string trace_out;  ///< optional per-run trace CSV for bench
  double tol = 1e-6;
  std::int64_t max_iter = 200000;
  std::int64_t check_every = 1;

  bool restrict_nonlinear_rows = false;  ///< GLM single-sample methods: sample rows [d, d+p) only
  bool glm_hybrid = true;                ///< GLM block methods: affine rows enforced every step

  std::string sweep_parameter;  ///< beta | nu
  std::vector<Index> sweep_values;

  int verify_states = 20;

  /// Throws InputError naming the offending key.
  void validate() const;
};

/// Applies every recognized key; unknown keys are an InputError.
void apply_key_values(const KeyValues& kv, ExperimentConfig& cfg);

/// A constructed problem plus the row scopes the harness uses with it.
struct ProblemInstance {
  std::unique_ptr<NonlinearSystem> system;
  Vector x0;
  std::optional<Vector> x_star;
  const GlmProblem* glm = nullptr;  ///< set when system is a GLM
};

ProblemInstance make_problem(const ExperimentConfig& cfg);

/// SolverConfig for one run of `method`, with the GLM row scoping applied.
SolverConfig make_solver_config(const ExperimentConfig& cfg, const ProblemInstance& inst,
                                const Method& method, std::uint64_t run_seed);

struct RunRecord {
  int run_id = 0;
  RunTrace trace;
};

struct SummaryRow {
  Method method;
  double mean_it = 0.0;
  double mean_cpu = 0.0;
  double convergence_rate = 0.0;
  std::vector<RunRecord> runs;
};

/// runs x methods grid; run r of every method uses derive_run_seed(seed, r).
std::vector<SummaryRow> run_bench(const ExperimentConfig& cfg, const ProblemInstance& inst);

struct SweepRow {
  std::string parameter;
  Index value = 0;
  SummaryRow summary;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const ProblemInstance& inst);

// CSV schemas consumed by the plotting scripts.
inline constexpr const char* kTraceHeader = "run_id,method,k,residual_sq,elapsed_seconds";
inline constexpr const char* kSummaryHeader = "method,beta,nu,mean_IT,mean_CPU,convergence_rate";
inline constexpr const char* kSweepHeader = "parameter,value,method,mean_IT,mean_CPU";

void write_trace_csv(std::ostream& out, const std::string& method,
                     const std::vector<RunRecord>& runs, bool header = true);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Single-line stats report: "d=.. p=.. L=.. density=.. cond=..".
std::string format_stats(const DatasetStats& s);

struct VerifyRow {
  std::string check;
  std::string method;
  int state = 0;
  std::string status;  ///< pass | fail | capacity
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

inline constexpr const char* kVerifyHeader = "check,method,state,status,lhs,rhs,slack,detail";

/// Expected-decrease-vs-bound and lemma checks at random states around the
/// known root. Linear problems use eta = 0; other problems use an empirical
/// eta over the sampled states.
std::vector<VerifyRow> run_verify(const ExperimentConfig& cfg, const ProblemInstance& inst);

void write_verify_csv(std::ostream& out, const std::vector<VerifyRow>& rows);

/// CLI exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitIterationCap = 1,
  kExitDegenerate = 2,
  kExitUsage = 3,
  kExitVerifyFailed = 4,
};

int exit_code_for(RunStatus status);

}  // namespace gsnk
