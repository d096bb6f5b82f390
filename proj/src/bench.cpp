#include "gsnk/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gsnk/diagnostics.hpp"
#include "gsnk/errors.hpp"
#include "gsnk/libsvm.hpp"
#include "gsnk/problems/brown.hpp"
#include "gsnk/problems/linear.hpp"
#include "gsnk/rng.hpp"

namespace gsnk {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size() || value.empty()) {
    throw InputError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw InputError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::string fmt(double v, const char* pattern = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    kv[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  return parse_key_values(in);
}

void apply_key_values(const KeyValues& kv, ExperimentConfig& cfg) {
  // Method parameters apply to every listed method, so read the list first.
  std::optional<Index> beta, nu;
  std::optional<std::vector<Index>> block_sizes;
  std::optional<std::vector<MethodKind>> kinds;

  for (const auto& [key, value] : kv) {
    if (key == "problem.kind") {
      cfg.problem_kind = value;
    } else if (key == "problem.n") {
      cfg.n = parse_number<Index>(key, value);
    } else if (key == "problem.m") {
      cfg.m = parse_number<Index>(key, value);
    } else if (key == "problem.cond") {
      cfg.cond = parse_number<double>(key, value);
    } else if (key == "problem.path") {
      cfg.path = value;
    } else if (key == "problem.lambda") {
      cfg.lambda = parse_number<double>(key, value);
    } else if (key == "problem.d") {
      cfg.d = parse_number<Index>(key, value);
    } else if (key == "problem.p") {
      cfg.p = parse_number<Index>(key, value);
    } else if (key == "problem.flip") {
      cfg.flip = parse_number<double>(key, value);
    } else if (key == "problem.seed") {
      cfg.problem_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "method.name") {
      std::vector<MethodKind> list;
      for (const std::string& name : split_list(value)) {
        if (name == "table" || name == "brown-table") {
          const auto t = brown_table_methods();
          list.insert(list.end(), t.begin(), t.end());
        } else {
          list.push_back(parse_method_kind(name));
        }
      }
      if (list.empty()) throw InputError("config key 'method.name' is empty");
      kinds = std::move(list);
    } else if (key == "method.beta") {
      beta = parse_number<Index>(key, value);
    } else if (key == "method.nu") {
      nu = parse_number<Index>(key, value);
    } else if (key == "method.block_sizes") {
      std::vector<Index> sizes;
      for (const std::string& s : split_list(value)) sizes.push_back(parse_number<Index>(key, s));
      block_sizes = std::move(sizes);
    } else if (key == "runs") {
      cfg.runs = parse_number<int>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "trace_out") {
      cfg.trace_out = value;
    } else if (key == "tol") {
      cfg.tol = parse_number<double>(key, value);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_number<std::int64_t>(key, value);
    } else if (key == "check_every") {
      cfg.check_every = parse_number<std::int64_t>(key, value);
    } else if (key == "restrict_nonlinear_rows") {
      cfg.restrict_nonlinear_rows = parse_bool(key, value);
    } else if (key == "glm.hybrid") {
      cfg.glm_hybrid = parse_bool(key, value);
    } else if (key == "sweep.parameter") {
      cfg.sweep_parameter = value;
    } else if (key == "sweep.values") {
      cfg.sweep_values.clear();
      for (const std::string& s : split_list(value)) {
        cfg.sweep_values.push_back(parse_number<Index>(key, s));
      }
    } else if (key == "verify.states") {
      cfg.verify_states = parse_number<int>(key, value);
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }

  if (kinds) {
    std::vector<Method> methods;
    for (const MethodKind k : *kinds) {
      Method m;
      m.kind = k;
      // Keep previously configured parameters when only the list changes.
      if (!cfg.methods.empty()) {
        m.beta = cfg.methods.front().beta;
        m.nu = cfg.methods.front().nu;
        m.block_sizes = cfg.methods.front().block_sizes;
      }
      methods.push_back(std::move(m));
    }
    cfg.methods = std::move(methods);
  }
  for (Method& m : cfg.methods) {
    if (beta) m.beta = *beta;
    if (nu) m.nu = *nu;
    if (block_sizes) m.block_sizes = *block_sizes;
  }
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw InputError("runs must be at least 1");
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (check_every < 1) throw InputError("check_every must be at least 1");
  if (methods.empty()) throw InputError("no method configured");
  if (problem_kind != "brown" && problem_kind != "linear" && problem_kind != "glm" &&
      problem_kind != "glm-synthetic") {
    throw InputError("problem.kind must be brown, linear, glm or glm-synthetic");
  }
  if (problem_kind == "glm" && path.empty()) throw InputError("problem.path is required for glm");
  if (lambda && !(*lambda > 0.0)) throw InputError("problem.lambda must be positive");
  if (!sweep_parameter.empty() && sweep_parameter != "beta" && sweep_parameter != "nu") {
    throw InputError("sweep.parameter must be beta or nu");
  }
  if (verify_states < 1) throw InputError("verify.states must be at least 1");
}

ProblemInstance make_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  ProblemInstance inst;
  if (cfg.problem_kind == "brown") {
    auto brown = std::make_unique<BrownProblem>(cfg.n);
    inst.x0 = brown->default_start();
    inst.x_star = Vector::Ones(cfg.n);
    inst.system = std::move(brown);
  } else if (cfg.problem_kind == "linear") {
    RngStream rng(cfg.problem_seed, streams::kProblem);
    LinearInstance lin = linear_make(rng, cfg.m, cfg.n, cfg.cond);
    inst.x0 = Vector::Zero(cfg.n);
    inst.x_star = lin.x_star;
    inst.system = std::make_unique<LinearProblem>(std::move(lin.problem));
  } else {
    GlmData data;
    if (cfg.problem_kind == "glm") {
      data = load_libsvm(cfg.path);
    } else {
      RngStream rng(cfg.problem_seed, streams::kProblem);
      data = glm_synthetic(rng, cfg.d, cfg.p, cfg.flip);
    }
    const double lambda = cfg.lambda.value_or(1.0 / static_cast<double>(data.A.cols()));
    auto glm = std::make_unique<GlmProblem>(std::move(data.A), std::move(data.y), lambda);
    inst.x0 = Vector::Zero(glm->cols());
    inst.glm = glm.get();
    inst.system = std::move(glm);
  }
  return inst;
}

SolverConfig make_solver_config(const ExperimentConfig& cfg, const ProblemInstance& inst,
                                const Method& method, std::uint64_t run_seed) {
  SolverConfig sc;
  sc.method = method;
  sc.x0 = inst.x0;
  sc.tol = cfg.tol;
  sc.max_iter = cfg.max_iter;
  sc.check_every = cfg.check_every;
  sc.seed = run_seed;
  if (inst.glm != nullptr) {
    if (method.is_block() && cfg.glm_hybrid) {
      sc.anchor_rows = inst.glm->linear_rows();
      sc.sample_rows = inst.glm->nonlinear_rows();
    } else if (cfg.restrict_nonlinear_rows) {
      sc.sample_rows = inst.glm->nonlinear_rows();
    }
  }
  return sc;
}

std::vector<SummaryRow> run_bench(const ExperimentConfig& cfg, const ProblemInstance& inst) {
  cfg.validate();
  std::vector<SummaryRow> rows;
  for (const Method& method : cfg.methods) {
    // Validate every method up front so a bad grid fails before any run.
    make_solver_config(cfg, inst, method, 0).validate(*inst.system);
  }
  for (const Method& method : cfg.methods) {
    SummaryRow row;
    row.method = method;
    double it = 0.0, cpu = 0.0;
    int converged = 0;
    for (int r = 0; r < cfg.runs; ++r) {
      const SolverConfig sc =
          make_solver_config(cfg, inst, method, derive_run_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      RunRecord rec{r, run(*inst.system, sc)};
      it += static_cast<double>(rec.trace.iterations);
      cpu += rec.trace.elapsed_seconds;
      converged += rec.trace.status == RunStatus::Converged ? 1 : 0;
      row.runs.push_back(std::move(rec));
    }
    const double n = static_cast<double>(cfg.runs);
    row.mean_it = it / n;
    row.mean_cpu = cpu / n;
    row.convergence_rate = converged / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const ProblemInstance& inst) {
  if (cfg.sweep_parameter.empty()) throw InputError("sweep.parameter is not set");
  if (cfg.sweep_values.empty()) throw InputError("sweep.values is empty");
  const bool is_beta = cfg.sweep_parameter == "beta";
  for (const Method& m : cfg.methods) {
    if (is_beta ? !m.uses_beta() : !m.uses_nu()) {
      throw InputError(m.name() + " does not take " + cfg.sweep_parameter);
    }
  }
  std::vector<SweepRow> out;
  for (const Index value : cfg.sweep_values) {
    ExperimentConfig point = cfg;
    for (Method& m : point.methods) {
      (is_beta ? m.beta : m.nu) = value;
      if (!is_beta) m.block_sizes.clear();
    }
    for (SummaryRow& row : run_bench(point, inst)) {
      out.push_back({cfg.sweep_parameter, value, std::move(row)});
    }
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::string& method,
                     const std::vector<RunRecord>& runs, bool header) {
  if (header) out << kTraceHeader << '\n';
  for (const RunRecord& r : runs) {
    for (const TraceRecord& t : r.trace.records) {
      out << r.run_id << ',' << method << ',' << t.k << ',' << fmt(t.residual_sq) << ','
          << fmt(t.elapsed_seconds, "%.9g") << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << r.method.name() << ',' << (r.method.uses_beta() ? std::to_string(r.method.beta) : "")
        << ',' << (r.method.uses_nu() ? std::to_string(r.method.nu) : "") << ','
        << fmt(r.mean_it, "%.10g") << ',' << fmt(r.mean_cpu, "%.9g") << ','
        << fmt(r.convergence_rate, "%.6g") << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.parameter << ',' << r.value << ',' << r.summary.method.name() << ','
        << fmt(r.summary.mean_it, "%.10g") << ',' << fmt(r.summary.mean_cpu, "%.9g") << '\n';
  }
}

std::string format_stats(const DatasetStats& s) {
  return "d=" + std::to_string(s.d) + " p=" + std::to_string(s.p) + " L=" + fmt(s.L, "%.6g") +
         " density=" + fmt(s.density, "%.6g") + " cond=" + fmt(s.cond, "%.6g");
}

// --- verify ----------------------------------------------------------------

namespace {

VerifyRow row_from(const InequalityCheck& c, const std::string& check, int state) {
  return {check + ":" + c.name, "-", state, c.holds ? "pass" : "fail", c.lhs, c.rhs, ""};
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

// Largest factor over every block a BSNK2 partition can produce; alpha is
// taken over every nu-subset, a superset of the realizable J_k.
BoundReport conservative_bsnk2_bound(const Method& method, const NonlinearSystem& sys,
                                     const Vector& x, double eta) {
  const Index m = sys.rows();
  std::vector<IndexSet> reps;
  for_each_subset(m, method.nu, [&](std::span<const Index> s) { reps.emplace_back(s.begin(), s.end()); });
  const double alpha = block_constant(sys, x, eta, reps).value;

  std::vector<Index> sizes = method.block_sizes.empty() ? default_block_sizes(m, method.nu)
                                                        : method.block_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  BoundReport worst;
  worst.rho = -std::numeric_limits<double>::infinity();
  for (const Index s : sizes) {
    for_each_subset(m, s, [&](std::span<const Index> block) {
      BoundInputs in;
      in.eta = eta;
      in.tau_h = IndexSet(block.begin(), block.end());
      in.block_constant = alpha;
      const BoundReport r = convergence_factor(method, sys, x, in);
      if (r.rho > worst.rho) worst = r;
    });
  }
  return worst;
}

BoundReport theorem_bound(const Method& method, const NonlinearSystem& sys, const Vector& x,
                          double eta) {
  const Index m = sys.rows();
  BoundInputs in;
  in.eta = eta;
  switch (method.kind) {
    case MethodKind::NRK:
    case MethodKind::NURK:
      break;
    case MethodKind::MR_BSNK1:
    case MethodKind::MD_BSNK1: {
      in.ratios = exact_subset_ratios(sys, x, method.beta);
      const auto sets = all_bsnk1_index_sets(sys, x, *method.rule(), method.beta);
      const BlockConstant c = block_constant(sys, x, eta, sets);
      in.index_set_size = c.min_set_size;
      in.block_constant = c.value;
      break;
    }
    case MethodKind::MR_BSNK2:
    case MethodKind::MD_BSNK2:
      return conservative_bsnk2_bound(method, sys, x, eta);
    default:
      in.ratios = exact_subset_ratios(sys, x, method.subset_size(m));
      break;
  }
  return convergence_factor(method, sys, x, in);
}

}  // namespace

std::vector<VerifyRow> run_verify(const ExperimentConfig& cfg, const ProblemInstance& inst) {
  if (!inst.x_star) throw InputError("verify needs a problem with a known root (brown or linear)");
  const NonlinearSystem& sys = *inst.system;
  const Vector& x_star = *inst.x_star;
  const bool linear = cfg.problem_kind == "linear";
  RngStream rng(cfg.seed, streams::kDiagnostics);

  std::vector<Vector> states;
  for (int s = 0; s < cfg.verify_states; ++s) {
    Vector x = x_star;
    const double scale = linear ? 1.0 : 1e-3;
    for (Index j = 0; j < x.size(); ++j) x[j] += scale * rng.uniform(-1.0, 1.0);
    states.push_back(std::move(x));
  }

  double eta = 0.0;
  std::string eta_note = "eta=0 (linear)";
  if (!linear) {
    ConeConditionEstimate est;
    for (std::size_t a = 0; a < states.size(); ++a) {
      accumulate_eta(est, sys, states[a], x_star);
      for (std::size_t b = 0; b < states.size(); ++b) {
        if (a != b) accumulate_eta(est, sys, states[a], states[b]);
      }
    }
    eta = est.eta_hat;
    eta_note = "empirical eta=" + fmt(eta, "%.6g");
  }

  std::vector<VerifyRow> rows;
  IndexSet all(static_cast<std::size_t>(sys.rows()));
  std::iota(all.begin(), all.end(), Index{0});

  for (const Method& method : cfg.methods) {
    if (method.kind == MethodKind::NK) continue;  // deterministic, no theorem
    for (int s = 0; s < static_cast<int>(states.size()); ++s) {
      const Vector& x = states[static_cast<std::size_t>(s)];
      {
        VerifyRow row{"expected-decrease", method.name(), s, "pass", 0.0, 0.0, eta_note};
        try {
          const double expected = exact_expected_decrease(method, sys, x, x_star);
          const BoundReport bound = theorem_bound(method, sys, x, eta);
          row.lhs = expected;
          row.rhs = bound.rho * (x - x_star).squaredNorm();
          const double scale = std::max({1.0, std::abs(row.lhs), std::abs(row.rhs)});
          const bool ok = row.lhs <= row.rhs + kInequalityRoundoff * scale;
          row.status = ok ? "pass" : "fail";
          if (!bound.hypotheses_hold()) row.detail += " (hypotheses violated)";
        } catch (const CapacityError& e) {
          row.status = "capacity";
          row.detail = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  for (int s = 0; s < static_cast<int>(states.size()); ++s) {
    const Vector& x = states[static_cast<std::size_t>(s)];
    for (const auto& c : check_lemma_inequalities(sys, x, x_star, all, eta).checks) {
      rows.push_back(row_from(c, "lemma", s));
    }
    for (const auto& c : check_projection_decrease(sys, x, x_star, all, eta).checks) {
      rows.push_back(row_from(c, "decrease", s));
    }
  }
  return rows;
}

void write_verify_csv(std::ostream& out, const std::vector<VerifyRow>& rows) {
  out << kVerifyHeader << '\n';
  for (const VerifyRow& r : rows) {
    out << r.check << ',' << r.method << ',' << r.state << ',' << r.status << ',' << fmt(r.lhs)
        << ',' << fmt(r.rhs) << ',' << fmt(r.rhs - r.lhs) << ',' << csv_safe(r.detail) << '\n';
  }
}

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::Converged:
      return kExitOk;
    case RunStatus::IterationCap:
      return kExitIterationCap;
    case RunStatus::DegenerateRow:
      return kExitDegenerate;
  }
  return kExitUsage;
}

}  // namespace gsnk
