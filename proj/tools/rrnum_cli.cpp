#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rrnum/rrnum.hpp"

namespace {

enum ExitCode { kOk = 0, kNotConverged = 1, kValidation = 2, kIo = 3 };

struct CommonFlags {
  std::string instance;
  std::string policy;
  std::string schedule;
  std::string solver = "distributed";
  std::string method = "interior-point";
  double beta0 = 0.0;
  std::size_t max_iters = 0;
  double tol_gap = 0.0;
  std::size_t trace_stride = 0;
  std::string out = "rrnum_out";
  bool strict = false;
  bool permissive = false;
  bool no_trace = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_solver_flags) {
  cmd->add_option("--instance", f.instance, "instance file");
  cmd->add_option("--seed", f.seed, "random instance seed, used when --instance is absent");
  auto* strict = cmd->add_flag("--strict", f.strict, "reject instances failing the convexity checks");
  cmd->add_flag("--permissive", f.permissive, "demote convexity failures to warnings")->excludes(strict);
  cmd->add_option("--out", f.out, "output directory");
  if (!with_solver_flags) return;
  cmd->add_option("--beta0", f.beta0, "initial step size")->check(CLI::PositiveNumber);
  cmd->add_option("--schedule", f.schedule, "step schedule")
      ->check(CLI::IsMember({"diminishing", "constant"}));
  cmd->add_option("--max-iters", f.max_iters, "iteration limit")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-gap", f.tol_gap, "relative duality gap tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--trace-stride", f.trace_stride, "record every k-th iteration")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-trace", f.no_trace, "skip per-iteration trace files");
}

struct Loaded {
  rrnum::NetworkSpec net;
  rrnum::ExperimentSpec spec;
  std::vector<std::string> defaults_used;
};

Loaded load(const CommonFlags& f, const std::string& default_policy) {
  Loaded out;
  rrnum::LoadedInstance inst;
  if (!f.instance.empty()) {
    inst = rrnum::load_instance_file(f.instance);
    out.spec.instance_path = f.instance;
  } else if (f.seed != 0) {
    inst.network = rrnum::random_instance(f.seed);
    inst.solver.seed = f.seed;
    out.spec.instance_path = "random:" + std::to_string(f.seed);
  } else {
    throw rrnum::ValidationError("give --instance <path> or --seed <n> for a random instance");
  }
  out.net = inst.network;
  out.defaults_used = inst.defaults_used;
  auto& s = out.spec;
  s.settings = inst.solver;
  s.sweep = inst.sweep;
  s.policy = inst.solver.policy.value_or(rrnum::parse_policy(default_policy));
  if (!f.policy.empty()) s.policy = rrnum::parse_policy(f.policy);
  if (!f.schedule.empty()) s.settings.schedule.kind = rrnum::parse_schedule(f.schedule);
  if (f.beta0 > 0.0) {
    s.settings.schedule.beta0 = f.beta0;
    s.settings.beta0_given = true;
  }
  if (f.max_iters > 0) s.settings.stop.max_iterations = f.max_iters;
  if (f.tol_gap > 0.0) s.settings.stop.gap_tolerance = f.tol_gap;
  if (f.trace_stride > 0) s.settings.trace_stride = f.trace_stride;
  if (f.strict) s.settings.strict = true;
  if (f.permissive) s.settings.strict = false;
  if (f.seed != 0) s.settings.seed = f.seed;
  s.solver = f.solver == "oracle" ? rrnum::SolverKind::oracle : rrnum::SolverKind::distributed;
  s.out_dir = f.out;
  s.write_traces = !f.no_trace;
  return out;
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& m : w) std::cerr << "warning: " << m << "\n";
}

// Checks the policy's convexity requirements up front so that strict-mode
// rejections surface as validation errors before any output is written.
void check_instance(const rrnum::NetworkSpec& net, rrnum::Policy policy, bool strict) {
  const bool elasticity = policy == rrnum::Policy::differentiated;
  auto report = rrnum::enforce_validation(net, elasticity, strict);
  print_warnings(report.warnings);
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const Loaded& in,
                    const std::vector<rrnum::PolicyRun>& runs) {
  rrnum::detail::write_text(dir / "manifest.json", rrnum::manifest_json(command, in.spec, in.net, runs));
}

int run_solve(const CommonFlags& f) {
  auto in = load(f, "integrated");
  check_instance(in.net, in.spec.policy, in.spec.settings.strict);
  rrnum::preflight_output_dir(in.spec.out_dir);
  auto run = rrnum::run_policy(in.net, in.spec.policy, in.spec.settings, rrnum::SolverKind::distributed,
                               in.spec.write_traces, rrnum::policy_name(in.spec.policy));
  const std::filesystem::path dir = in.spec.out_dir;
  rrnum::emit_run_files(dir, in.net, run, in.spec.write_traces);
  rrnum::detail::write_text(dir / "solution.csv", rrnum::solution_csv(in.net, run.result));
  rrnum::detail::write_text(dir / "code_rates.csv", rrnum::code_rates_csv(in.net, run.result));
  write_manifest(dir, "solve", in, {run});
  const auto& r = run.result;
  std::printf("%s: total utility %.12g, best dual %.12g, gap %.3g, %zu iterations, %s\n",
              rrnum::policy_name(r.policy), r.total_utility, r.best_dual_value, r.relative_gap,
              r.iterations, r.stop_reason.c_str());
  print_warnings(r.warnings);
  return r.converged ? kOk : kNotConverged;
}

int run_sweep_a(const CommonFlags& f) {
  auto in = load(f, "integrated");
  if (in.spec.sweep.kind != rrnum::SweepKind::a_sweep) in.spec.sweep = rrnum::SweepSettings::default_a();
  check_instance(in.net, in.spec.policy, in.spec.settings.strict);
  rrnum::preflight_output_dir(in.spec.out_dir);
  auto sweep = rrnum::run_a_sweep(in.net, in.spec.policy, in.spec.settings, in.spec.solver,
                                  in.spec.sweep, in.spec.write_traces);
  const std::filesystem::path dir = in.spec.out_dir;
  for (const auto& run : sweep.runs) rrnum::emit_run_files(dir, in.net, run, in.spec.write_traces);
  rrnum::detail::write_text(dir / "tradeoff.csv", rrnum::tradeoff_csv(in.net, sweep));
  write_manifest(dir, "sweep-a", in, sweep.runs);
  bool all = true;
  for (const auto& run : sweep.runs) {
    all = all && run.result.converged;
    if (!run.result.converged) std::cerr << "not converged: " << run.label << "\n";
  }
  std::printf("a-sweep: %zu points, %zu rows written to %s\n", sweep.grid.size(), sweep.points.size(),
              (dir / "tradeoff.csv").string().c_str());
  return all ? kOk : kNotConverged;
}

int run_sweep_v(const CommonFlags& f) {
  auto in = load(f, "differentiated");
  if (in.spec.sweep.kind != rrnum::SweepKind::v_sweep) in.spec.sweep = rrnum::SweepSettings::default_v();
  check_instance(in.net, rrnum::Policy::differentiated, in.spec.settings.strict);
  rrnum::preflight_output_dir(in.spec.out_dir);
  auto sweep = rrnum::run_v_sweep(in.net, in.spec.settings, in.spec.solver, in.spec.sweep,
                                  in.spec.write_traces);
  const std::filesystem::path dir = in.spec.out_dir;
  for (const auto& run : sweep.runs) rrnum::emit_run_files(dir, in.net, run, in.spec.write_traces);
  rrnum::detail::write_text(dir / "comparison.csv", rrnum::comparison_csv(sweep));
  write_manifest(dir, "sweep-v", in, sweep.runs);
  bool all = true;
  for (const auto& run : sweep.runs) {
    all = all && run.result.converged;
    if (!run.result.converged) std::cerr << "not converged: " << run.label << "\n";
  }
  for (const auto& r : sweep.rows) {
    std::printf("v=%.2f static=%.9g integrated=%.9g differentiated=%.9g\n", r.v, r.static_utility,
                r.integrated_utility, r.differentiated_utility);
  }
  return all ? kOk : kNotConverged;
}

int run_validate(const CommonFlags& f) {
  auto in = load(f, "integrated");
  for (const auto& d : in.defaults_used) std::printf("default: %s\n", d.c_str());
  const bool elasticity = in.spec.policy == rrnum::Policy::differentiated;
  auto report = rrnum::validate_network(in.net, elasticity);
  for (std::size_t l = 0; l < report.links.size(); ++l) {
    const auto& r = report.links[l];
    std::printf("link %s: lemma1 bound N > %.6g %s, grid convex %s\n", in.net.label_link(l).c_str(),
                r.minimum_n, r.holds_for_n ? "holds" : "fails", r.grid_convex ? "yes" : "no");
  }
  for (std::size_t s = 0; s < report.sources.size(); ++s) {
    std::printf("source %s: lemma2 %s\n", in.net.label_source(s).c_str(),
                report.sources[s].holds ? "holds" : "fails");
  }
  print_warnings(report.warnings);
  for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
  if (report.ok()) {
    std::printf("valid for policy %s\n", rrnum::policy_name(in.spec.policy));
    return kOk;
  }
  return in.spec.settings.strict ? kValidation : kOk;
}

int run_oracle(const CommonFlags& f) {
  auto in = load(f, "integrated");
  check_instance(in.net, in.spec.policy, in.spec.settings.strict);
  rrnum::preflight_output_dir(in.spec.out_dir);
  rrnum::OracleConfig cfg;
  cfg.method = f.method == "grid-refine" ? rrnum::OracleConfig::Method::grid_refine
                                         : rrnum::OracleConfig::Method::interior_point;
  rrnum::OracleSolution sol;
  switch (in.spec.policy) {
    case rrnum::Policy::static_reliability: sol = rrnum::solve_basic_num(in.net, rrnum::kStaticLinkError, cfg); break;
    case rrnum::Policy::integrated: sol = rrnum::solve_global_integrated(in.net, cfg); break;
    case rrnum::Policy::differentiated: sol = rrnum::solve_global_differentiated(in.net, cfg); break;
  }
  rrnum::PolicyRun run;
  run.label = std::string("oracle_") + rrnum::policy_name(in.spec.policy);
  run.result = rrnum::result_from_oracle(sol);
  run.certificate = sol.certificate;
  const std::filesystem::path dir = in.spec.out_dir;
  rrnum::detail::write_text(dir / "solution.csv", rrnum::solution_csv(in.net, run.result));
  rrnum::detail::write_text(dir / "code_rates.csv", rrnum::code_rates_csv(in.net, run.result));
  const std::string hash = rrnum::hash_hex(rrnum::instance_hash(in.net));
  rrnum::detail::write_text(dir / ("fixture_" + hash + "_" + rrnum::policy_name(in.spec.policy) + ".txt"),
                            rrnum::oracle_fixture_text(in.net, sol));
  in.spec.solver = rrnum::SolverKind::oracle;
  write_manifest(dir, "oracle", in, {run});
  std::printf("%s oracle (%s): total utility %.12g, certificate %s\n", rrnum::policy_name(sol.policy),
              rrnum::oracle_method_name(cfg.method), sol.total_utility,
              sol.certificate.complete ? "complete" : "incomplete");
  return run.result.converged ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-reliability network utility maximization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rrnum::kVersion);

  CommonFlags f;
  auto* solve = app.add_subcommand("solve", "run one distributed algorithm on an instance");
  auto* sweep_a = app.add_subcommand("sweep-a", "rate-reliability tradeoff over a shared weight a");
  auto* sweep_v = app.add_subcommand("sweep-v", "policy comparison over the weight spread v");
  auto* validate = app.add_subcommand("validate", "check an instance file and its convexity conditions");
  auto* oracle = app.add_subcommand("oracle", "centralized reference solution");
  for (auto* cmd : {solve, sweep_a, sweep_v, oracle}) add_common(cmd, f, cmd != oracle);
  add_common(validate, f, false);
  for (auto* cmd : {solve, sweep_a, validate, oracle}) {
    cmd->add_option("--policy", f.policy, "static, integrated or differentiated")
        ->check(CLI::IsMember({"static", "integrated", "differentiated"}));
  }
  for (auto* cmd : {sweep_a, sweep_v}) {
    cmd->add_option("--solver", f.solver, "distributed algorithms or the centralized oracle")
        ->check(CLI::IsMember({"distributed", "oracle"}));
  }
  oracle->add_option("--method", f.method, "oracle method")
      ->check(CLI::IsMember({"interior-point", "grid-refine"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*solve) return run_solve(f);
    if (*sweep_a) return run_sweep_a(f);
    if (*sweep_v) return run_sweep_v(f);
    if (*validate) return run_validate(f);
    if (*oracle) return run_oracle(f);
  } catch (const rrnum::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const rrnum::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const rrnum::DomainError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const rrnum::StructuralError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const rrnum::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNotConverged;
  }
  return kOk;
}
