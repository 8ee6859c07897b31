#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rrnum/config.hpp"
#include "rrnum/differentiated.hpp"
#include "rrnum/integrated.hpp"
#include "rrnum/oracle.hpp"

namespace rrnum {

inline constexpr const char* kVersion = "0.1.0";

// Step sizes used when the instance and the command line leave beta0 open.
// The differentiated iteration is stiffer in log-rate coordinates.
inline constexpr double kDefaultBetaIntegrated = 0.01;
inline constexpr double kDefaultBetaDifferentiated = 0.0005;

enum class SolverKind { distributed, oracle };

inline const char* solver_kind_name(SolverKind k) {
  return k == SolverKind::distributed ? "distributed" : "oracle";
}

struct ExperimentSpec {
  std::string instance_path;
  Policy policy = Policy::integrated;
  SolverKind solver = SolverKind::distributed;
  SolverSettings settings;
  SweepSettings sweep;
  std::string out_dir;
  bool write_traces = true;
};

// One solved instance for one policy, normalized across solver kinds.
struct PolicyRun {
  std::string label;
  SolveResult result;
  IterationTrace trace;
  std::optional<OracleCertificate> certificate;
};

struct TradeoffPoint {
  std::size_t source = 0;
  double a = 0.0;
  double x = 0.0;
  double reliability = 0.0;
  bool converged = false;
};

struct ComparisonRow {
  double v = 0.0;
  double static_utility = 0.0;
  double integrated_utility = 0.0;
  double differentiated_utility = 0.0;
  bool static_ok = false;
  bool integrated_converged = false;
  bool differentiated_converged = false;
};

struct ASweepResult {
  std::vector<double> grid;
  std::vector<TradeoffPoint> points;  // sorted by (source, a)
  std::vector<PolicyRun> runs;        // grid order
};

struct VSweepResult {
  std::vector<ComparisonRow> rows;
  std::vector<PolicyRun> runs;  // grid order, three per v
};

// 4-link chain with 4 long flows and one single-hop flow per link.
inline NetworkSpec default_topology(double capacity = 2.0) {
  std::vector<LinkSpec> links;
  for (int l = 1; l <= 4; ++l) {
    links.push_back({"L" + std::to_string(l), capacity, ErrorModel::exponential(100.0, 1.0)});
  }
  const std::vector<std::vector<std::size_t>> routes = {{0, 1, 2, 3}, {0, 1}, {1, 2}, {2, 3},
                                                        {0},          {1},    {2},    {3}};
  std::vector<SourceSpec> sources;
  for (std::size_t s = 0; s < routes.size(); ++s) {
    sources.push_back(make_source("S" + std::to_string(s + 1), routes[s], UtilityParams{}));
  }
  return NetworkSpec(std::move(links), std::move(sources));
}

// a_s = 0.5 - v for odd s and 0.5 + v for even s, counting sources from 1.
inline std::vector<double> spread_weights(std::size_t num_sources, double v) {
  std::vector<double> w(num_sources);
  for (std::size_t s = 0; s < num_sources; ++s) w[s] = (s % 2 == 0) ? 0.5 - v : 0.5 + v;
  return w;
}

inline SolverOptions make_solver_options(const SolverSettings& settings, Policy policy) {
  SolverOptions o;
  o.schedule = settings.schedule;
  if (!settings.beta0_given) {
    o.schedule.beta0 = policy == Policy::differentiated ? kDefaultBetaDifferentiated
                                                        : kDefaultBetaIntegrated;
  }
  o.stop = settings.stop;
  o.check_interval = settings.check_interval;
  o.trace_stride = settings.trace_stride;
  o.strict = settings.strict;
  return o;
}

inline SolveResult result_from_oracle(const OracleSolution& sol) {
  SolveResult r;
  r.policy = sol.policy;
  r.allocation = sol.allocation;
  r.utilities = sol.utilities;
  r.total_utility = sol.total_utility;
  r.lambda = sol.lambda;
  r.mu = sol.mu;
  r.dual_value = sol.total_utility + (std::isfinite(sol.certificate.gap_bound) ? sol.certificate.gap_bound : 0.0);
  r.best_dual_value = r.dual_value;
  r.relative_gap = 0.0;
  r.feasible = sol.feasible;
  r.converged = sol.certificate.complete && sol.feasible;
  r.stop_reason = sol.certificate.complete ? "certified" : "incomplete certificate";
  if (!sol.certificate.note.empty()) r.warnings.push_back(sol.certificate.note);
  return r;
}

inline PolicyRun run_policy(const NetworkSpec& net, Policy policy, const SolverSettings& settings,
                            SolverKind solver, bool record_trace, const std::string& label) {
  PolicyRun run;
  run.label = label;
  if (policy == Policy::static_reliability) {
    auto sol = solve_basic_num(net);
    run.result = result_from_oracle(sol);
    run.certificate = sol.certificate;
    run.trace.policy = policy;
    return run;
  }
  if (solver == SolverKind::oracle) {
    auto sol = policy == Policy::integrated ? solve_global_integrated(net)
                                            : solve_global_differentiated(net);
    run.result = result_from_oracle(sol);
    run.certificate = sol.certificate;
    run.trace.policy = policy;
    return run;
  }
  auto opt = make_solver_options(settings, policy);
  opt.record_trace = record_trace;
  auto out = policy == Policy::integrated ? run_integrated(net, opt) : run_differentiated(net, opt);
  run.result = std::move(out.result);
  run.trace = std::move(out.trace);
  return run;
}

inline ASweepResult run_a_sweep(const NetworkSpec& net, Policy policy, const SolverSettings& settings,
                                SolverKind solver, const SweepSettings& sweep,
                                bool record_trace = true) {
  ASweepResult out;
  out.grid = sweep.grid();
  for (double a : out.grid) {
    const std::vector<double> w(net.num_sources(), a);
    char label[64];
    std::snprintf(label, sizeof label, "a_%.2f", a);
    out.runs.push_back(run_policy(net.with_weights(w), policy, settings, solver, record_trace, label));
  }
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
      const auto& r = out.runs[i].result;
      out.points.push_back({s, out.grid[i], r.allocation.x[s], r.allocation.reliability[s], r.converged});
    }
  }
  return out;
}

inline VSweepResult run_v_sweep(const NetworkSpec& net, const SolverSettings& settings, SolverKind solver,
                                const SweepSettings& sweep, bool record_trace = true) {
  VSweepResult out;
  for (double v : sweep.grid()) {
    const auto w = spread_weights(net.num_sources(), v);
    if (std::any_of(w.begin(), w.end(), [](double a) { return a < 0.0 || a > 1.0; })) {
      throw ValidationError("v-sweep value " + detail::format_number(v) + " puts a weight outside [0, 1]");
    }
    const auto inst = net.with_weights(w);
    char tag[32];
    std::snprintf(tag, sizeof tag, "v_%.2f", v);
    ComparisonRow row;
    row.v = v;
    for (Policy p : {Policy::static_reliability, Policy::integrated, Policy::differentiated}) {
      auto run = run_policy(inst, p, settings, solver, record_trace,
                            std::string(tag) + "_" + policy_name(p));
      const double u = run.result.total_utility;
      const bool ok = run.result.converged;
      if (p == Policy::static_reliability) {
        row.static_utility = u;
        row.static_ok = ok;
      } else if (p == Policy::integrated) {
        row.integrated_utility = u;
        row.integrated_converged = ok;
      } else {
        row.differentiated_utility = u;
        row.differentiated_converged = ok;
      }
      out.runs.push_back(std::move(run));
    }
    out.rows.push_back(row);
  }
  return out;
}

// FNV-1a over the canonical serialization of the network.
inline std::uint64_t instance_hash(const NetworkSpec& net) {
  const std::string text = write_instance(net, SolverSettings{}, SweepSettings{});
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

inline std::vector<std::string> vector_header(const std::string& prefix, std::size_t n) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i + 1));
  return h;
}

}  // namespace detail

// Fails before any solve when the directory cannot be created or written.
inline void preflight_output_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  const fs::path probe = fs::path(dir) / ".rrnum_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory " + dir + " is not writable");
  }
  fs::remove(probe, ec);
}

inline std::string trace_csv(const NetworkSpec& net, const IterationTrace& trace) {
  const bool per_pair = trace.policy == Policy::differentiated;
  const std::size_t nr = per_pair ? net.num_pairs() : net.num_links();
  const std::size_t ns = net.num_sources();
  std::vector<std::string> header = {"t", "step", "utility", "repaired_utility", "dual_value"};
  auto add = [&](const std::string& p, std::size_t n) {
    auto h = detail::vector_header(p, n);
    header.insert(header.end(), h.begin(), h.end());
  };
  // Per-pair columns are named by link and source index, l<i>_s<j>.
  auto add_links = [&](const std::string& p) {
    if (!per_pair) return add(p, nr);
    for (const auto& pr : net.pairs()) {
      header.push_back(p + "l" + std::to_string(pr.link + 1) + "_s" + std::to_string(pr.source + 1));
    }
  };
  add("x_", ns);
  add("R_", ns);
  add_links("r_");
  if (per_pair) add_links("c_");
  add_links("lambda_");
  add("mu_", ns);
  add_links("capacity_residual_");
  add("reliability_residual_", ns);
  std::string out;
  detail::append_row(out, header);
  for (const auto& rec : trace.records) {
    std::vector<std::string> row = {std::to_string(rec.t), detail::fmt12(rec.step),
                                    detail::fmt12(rec.utility), detail::fmt12(rec.repaired_utility),
                                    detail::fmt12(rec.dual_value)};
    auto put = [&](const std::vector<double>& v) {
      for (double d : v) row.push_back(detail::fmt12(d));
    };
    put(rec.x);
    put(rec.reliability);
    put(rec.code_rates);
    if (per_pair) put(rec.shares);
    put(rec.lambda);
    put(rec.mu);
    put(rec.capacity_residual);
    put(rec.reliability_residual);
    detail::append_row(out, row);
  }
  return out;
}

inline std::string solution_csv(const NetworkSpec& net, const SolveResult& r) {
  std::string out;
  detail::append_row(out, {"source", "x", "R", "utility", "mu"});
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    detail::append_row(out, {net.label_source(s), detail::fmt12(r.allocation.x[s]),
                             detail::fmt12(r.allocation.reliability[s]), detail::fmt12(r.utilities[s]),
                             s < r.mu.size() ? detail::fmt12(r.mu[s]) : ""});
  }
  return out;
}

inline std::string code_rates_csv(const NetworkSpec& net, const SolveResult& r) {
  std::string out;
  detail::append_row(out, {"link", "source", "r", "c", "lambda"});
  const auto& cr = r.allocation.code_rates;
  if (cr.layout == CodeRates::Layout::per_link) {
    for (std::size_t l = 0; l < net.num_links(); ++l) {
      detail::append_row(out, {net.label_link(l), "", detail::fmt12(cr.values[l]),
                               detail::fmt12(net.link(l).capacity_max),
                               l < r.lambda.size() ? detail::fmt12(r.lambda[l]) : ""});
    }
  } else {
    for (std::size_t p = 0; p < net.num_pairs(); ++p) {
      const auto& pr = net.pairs()[p];
      detail::append_row(out, {net.label_link(pr.link), net.label_source(pr.source),
                               detail::fmt12(cr.values[p]),
                               p < r.allocation.shares.size() ? detail::fmt12(r.allocation.shares[p]) : "",
                               p < r.lambda.size() ? detail::fmt12(r.lambda[p]) : ""});
    }
  }
  return out;
}

inline std::string tradeoff_csv(const NetworkSpec& net, const ASweepResult& sweep) {
  std::string out;
  detail::append_row(out, {"source", "a", "x", "R", "converged"});
  for (const auto& p : sweep.points) {
    detail::append_row(out, {net.label_source(p.source), detail::fmt12(p.a), detail::fmt12(p.x),
                             detail::fmt12(p.reliability), p.converged ? "1" : "0"});
  }
  return out;
}

inline std::string comparison_csv(const VSweepResult& sweep) {
  std::string out;
  detail::append_row(out, {"v", "static", "integrated", "differentiated", "integrated_over_static",
                           "differentiated_over_static", "static_ok", "integrated_converged",
                           "differentiated_converged"});
  for (const auto& r : sweep.rows) {
    detail::append_row(out, {detail::fmt12(r.v), detail::fmt12(r.static_utility),
                             detail::fmt12(r.integrated_utility), detail::fmt12(r.differentiated_utility),
                             detail::fmt12(r.integrated_utility / r.static_utility),
                             detail::fmt12(r.differentiated_utility / r.static_utility),
                             r.static_ok ? "1" : "0", r.integrated_converged ? "1" : "0",
                             r.differentiated_converged ? "1" : "0"});
  }
  return out;
}

inline nlohmann::ordered_json run_summary(const PolicyRun& run) {
  const auto& r = run.result;
  nlohmann::ordered_json j;
  j["label"] = run.label;
  j["policy"] = policy_name(r.policy);
  j["total_utility"] = r.total_utility;
  j["best_dual_value"] = r.best_dual_value;
  j["relative_gap"] = r.relative_gap;
  j["converged"] = r.converged;
  j["feasible"] = r.feasible;
  j["stop_reason"] = r.stop_reason;
  j["iterations"] = r.iterations;
  j["max_lambda_slackness"] = r.max_lambda_slackness;
  j["max_mu_slackness"] = r.max_mu_slackness;
  j["warnings"] = r.warnings;
  if (run.certificate) {
    const auto& c = *run.certificate;
    j["certificate"] = {{"method", oracle_method_name(c.method)},
                        {"complete", c.complete},
                        {"gap_bound", std::isfinite(c.gap_bound) ? nlohmann::json(c.gap_bound) : nlohmann::json()},
                        {"convexity_guaranteed", c.convexity_guaranteed},
                        {"note", c.note}};
  }
  return j;
}

// The manifest echoes the full configuration as an instance file, so loading
// the "config" string reproduces the run.
inline std::string manifest_json(const std::string& command, const ExperimentSpec& spec,
                                 const NetworkSpec& net, const std::vector<PolicyRun>& runs) {
  nlohmann::ordered_json j;
  j["tool"] = "rrnum";
  j["version"] = kVersion;
  j["command"] = command;
  j["instance_path"] = spec.instance_path;
  j["instance_hash"] = hash_hex(instance_hash(net));
  j["policy"] = policy_name(spec.policy);
  j["solver"] = solver_kind_name(spec.solver);
  SolverSettings echoed = spec.settings;
  echoed.policy = spec.policy;
  j["config"] = write_instance(net, echoed, spec.sweep);
  bool all_converged = true;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    list.push_back(run_summary(r));
    all_converged = all_converged && r.result.converged;
  }
  j["all_converged"] = all_converged;
  j["runs"] = std::move(list);
  return j.dump(2) + "\n";
}

// Oracle fixtures: plain key = value text keyed by the instance hash.
inline std::string oracle_fixture_text(const NetworkSpec& net, const OracleSolution& sol) {
  std::ostringstream os;
  os << "instance_hash = " << hash_hex(instance_hash(net)) << "\n"
     << "policy = " << policy_name(sol.policy) << "\n"
     << "method = " << oracle_method_name(sol.certificate.method) << "\n"
     << "complete = " << (sol.certificate.complete ? "true" : "false") << "\n"
     << "total_utility = " << detail::format_number(sol.total_utility) << "\n";
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    os << "x." << net.label_source(s) << " = " << detail::format_number(sol.allocation.x[s]) << "\n"
       << "R." << net.label_source(s) << " = " << detail::format_number(sol.allocation.reliability[s])
       << "\n";
  }
  return os.str();
}

struct OracleFixture {
  std::string instance_hash;
  std::string policy;
  double total_utility = 0.0;
  std::map<std::string, double> values;
};

inline OracleFixture parse_oracle_fixture(std::istream& in) {
  OracleFixture f;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = detail::trim(line.substr(0, eq));
    const std::string v = detail::trim(line.substr(eq + 1));
    if (k == "instance_hash") {
      f.instance_hash = v;
    } else if (k == "policy") {
      f.policy = v;
    } else if (k == "method" || k == "complete") {
      continue;
    } else {
      try {
        const double d = std::stod(v);
        if (k == "total_utility") f.total_utility = d;
        else f.values[k] = d;
      } catch (const std::exception&) {
        throw ValidationError("fixture line " + std::to_string(n) + ": bad number for " + k);
      }
    }
  }
  return f;
}

inline void emit_run_files(const std::filesystem::path& dir, const NetworkSpec& net, const PolicyRun& run,
                           bool write_trace) {
  if (write_trace && !run.trace.records.empty()) {
    detail::write_text(dir / ("trace_" + run.label + ".csv"), trace_csv(net, run.trace));
  }
}

}  // namespace rrnum
