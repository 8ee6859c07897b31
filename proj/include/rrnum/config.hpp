#pragma once

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rrnum/errors.hpp"
#include "rrnum/network.hpp"
#include "rrnum/schedule.hpp"
#include "rrnum/validation.hpp"

namespace rrnum {

// Instance files are line oriented:
//
//   [defaults]   key = value, applied to every link or source lacking the key
//   [links]      name = key=value key=value ...
//   [sources]    name = route=L1,L2 key=value ...
//   [solver]     key = value
//   [sweep]      key = value
//
// '#' and ';' start comments. Link keys: capacity, model, N, R0, kappa.
// Source keys: route, a, alpha, x_min, x_max, r_min.

enum class SweepKind { none, a_sweep, v_sweep };

inline const char* sweep_name(SweepKind k) {
  switch (k) {
    case SweepKind::none: return "none";
    case SweepKind::a_sweep: return "a";
    case SweepKind::v_sweep: return "v";
  }
  return "?";
}

struct SweepSettings {
  SweepKind kind = SweepKind::none;
  double start = 0.0;
  double stop = 1.0;
  double step = 0.1;

  std::vector<double> grid() const {
    if (!(step > 0.0)) throw ValidationError("sweep step must be positive");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      // Round to 12 digits so that 0.1 * 3 prints as 0.3.
      const double v = start + static_cast<double>(i) * step;
      g.push_back(std::round(v * 1e12) / 1e12);
    }
    return g;
  }

  static SweepSettings default_a() { return {SweepKind::a_sweep, 0.0, 1.0, 0.1}; }
  static SweepSettings default_v() { return {SweepKind::v_sweep, 0.0, 0.5, 0.05}; }
};

struct SolverSettings {
  std::optional<Policy> policy;
  StepSchedule schedule;
  bool beta0_given = false;
  StopCriteria stop;
  std::size_t check_interval = 10;
  std::size_t trace_stride = 1;
  bool strict = true;
  std::uint64_t seed = 1;
};

struct LoadedInstance {
  NetworkSpec network;
  SolverSettings solver;
  SweepSettings sweep;
  std::vector<std::string> defaults_used;
  ValidationReport validation;
};

namespace detail {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class ConfigContext {
 public:
  explicit ConfigContext(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(std::size_t line, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << origin_ << ":" << line;
    if (!field.empty()) os << ": field '" << field << "'";
    os << ": " << msg;
    throw ValidationError(os.str());
  }

  double number(const Entry& e) const {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [ptr, ec] = std::from_chars(b, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(e.line, e.key, "expected a finite number, got '" + e.value + "'");
    }
    return v;
  }

  std::size_t count(const Entry& e) const {
    const double v = number(e);
    if (v < 0 || v != std::floor(v)) fail(e.line, e.key, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const Entry& e) const {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e.line, e.key, "expected true or false");
  }

 private:
  std::string origin_;
};

// "k1=v1 k2=v2" attribute list on one line.
inline std::vector<Entry> split_attributes(const ConfigContext& ctx, const std::string& text,
                                           std::size_t line) {
  std::vector<Entry> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
      ctx.fail(line, tok, "expected key=value");
    }
    out.push_back({tok.substr(0, eq), tok.substr(eq + 1), line});
  }
  return out;
}

}  // namespace detail

inline LoadedInstance parse_instance(std::istream& in, const std::string& origin = "<input>") {
  using detail::Entry;
  detail::ConfigContext ctx(origin);

  std::string section;
  std::map<std::string, Entry> defaults;
  std::vector<Entry> link_lines, source_lines, solver_lines, sweep_lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = detail::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail(line_no, "", "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "defaults" && section != "links" && section != "sources" &&
          section != "solver" && section != "sweep") {
        ctx.fail(line_no, "", "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail(line_no, "", "expected 'key = value'");
    Entry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), line_no};
    if (e.key.empty()) ctx.fail(line_no, "", "missing key");
    if (e.value.empty()) ctx.fail(line_no, e.key, "missing value");
    if (section.empty()) ctx.fail(line_no, e.key, "entry outside any section");
    if (section == "defaults") {
      if (defaults.count(e.key)) ctx.fail(line_no, e.key, "duplicate default");
      defaults.emplace(e.key, e);
    } else if (section == "links") {
      link_lines.push_back(e);
    } else if (section == "sources") {
      source_lines.push_back(e);
    } else if (section == "solver") {
      solver_lines.push_back(e);
    } else {
      sweep_lines.push_back(e);
    }
  }

  LoadedInstance out;

  // Look up `key` on the line, then in [defaults], then fall back to a builtin.
  auto pick = [&](const std::vector<Entry>& attrs, const std::string& owner, const std::string& key,
                  const std::string& builtin) -> Entry {
    for (const auto& a : attrs) {
      if (a.key == key) return a;
    }
    if (auto it = defaults.find(key); it != defaults.end()) return it->second;
    out.defaults_used.push_back(owner + "." + key + " = " + builtin);
    return Entry{key, builtin, 0};
  };
  auto check_keys = [&](const std::vector<Entry>& attrs, std::initializer_list<const char*> allowed) {
    for (const auto& a : attrs) {
      bool ok = false;
      for (const char* k : allowed) ok = ok || a.key == k;
      if (!ok) ctx.fail(a.line, a.key, "unknown key");
    }
  };
  for (const auto& [key, e] : defaults) {
    static const char* known[] = {"capacity", "model", "N", "R0", "kappa", "a", "alpha",
                                  "x_min", "x_max", "r_min"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) ctx.fail(e.line, key, "unknown default");
  }

  std::vector<LinkSpec> links;
  std::map<std::string, std::size_t> link_index;
  for (const auto& line : link_lines) {
    if (link_index.count(line.key)) ctx.fail(line.line, line.key, "duplicate link name");
    const auto attrs = detail::split_attributes(ctx, line.value, line.line);
    check_keys(attrs, {"capacity", "model", "N", "R0", "kappa"});
    LinkSpec l;
    l.name = line.key;
    const Entry cap = pick(attrs, line.key, "capacity", "2");
    l.capacity_max = ctx.number(cap);
    if (!(l.capacity_max > 0.0)) ctx.fail(cap.line ? cap.line : line.line, "capacity", "must be positive");
    const Entry model = pick(attrs, line.key, "model", "exponential");
    const Entry n = pick(attrs, line.key, "N", "100");
    const Entry r0 = pick(attrs, line.key, "R0", "1");
    try {
      if (model.value == "exponential") {
        l.error_model = ErrorModel::exponential(ctx.number(n), ctx.number(r0));
      } else if (model.value == "binary") {
        l.error_model = ErrorModel::binary(ctx.number(n), ctx.number(r0));
      } else if (model.value == "quadratic") {
        const Entry kappa = pick(attrs, line.key, "kappa", "1");
        l.error_model = ErrorModel::quadratic(ctx.number(n), ctx.number(kappa), ctx.number(r0));
      } else {
        ctx.fail(model.line ? model.line : line.line, "model",
                 "unknown error model '" + model.value + "' (binary, exponential, quadratic)");
      }
    } catch (const DomainError& err) {
      ctx.fail(line.line, line.key, err.what());
    }
    link_index.emplace(l.name, links.size());
    links.push_back(std::move(l));
  }

  std::vector<SourceSpec> sources;
  std::map<std::string, std::size_t> source_names;
  for (const auto& line : source_lines) {
    if (source_names.count(line.key)) ctx.fail(line.line, line.key, "duplicate source name");
    source_names.emplace(line.key, sources.size());
    const auto attrs = detail::split_attributes(ctx, line.value, line.line);
    check_keys(attrs, {"route", "a", "alpha", "x_min", "x_max", "r_min"});
    std::vector<std::size_t> route;
    bool have_route = false;
    for (const auto& a : attrs) {
      if (a.key != "route") continue;
      have_route = true;
      std::istringstream rs(a.value);
      std::string hop;
      while (std::getline(rs, hop, ',')) {
        auto it = link_index.find(hop);
        if (it == link_index.end()) ctx.fail(a.line, "route", "unknown link '" + hop + "'");
        route.push_back(it->second);
      }
    }
    if (!have_route) ctx.fail(line.line, line.key, "source needs route=...");
    UtilityParams p;
    p.a = ctx.number(pick(attrs, line.key, "a", "0.5"));
    p.alpha = ctx.number(pick(attrs, line.key, "alpha", "1.1"));
    p.x_min = ctx.number(pick(attrs, line.key, "x_min", "0.1"));
    p.x_max = ctx.number(pick(attrs, line.key, "x_max", "2"));
    p.r_min = ctx.number(pick(attrs, line.key, "r_min", "0.9"));
    auto require = [&](bool ok, const std::string& key, const std::string& msg) {
      if (ok) return;
      const auto it = std::find_if(attrs.begin(), attrs.end(), [&](const auto& a) { return a.key == key; });
      ctx.fail(it == attrs.end() ? line.line : it->line, key, msg);
    };
    require(p.a >= 0.0 && p.a <= 1.0, "a", "utility weight must lie in [0, 1]");
    require(p.alpha > 0.0, "alpha", "must be positive");
    require(p.x_min > 0.0, "x_min", "must be positive");
    require(p.x_max > p.x_min, "x_max", "must exceed x_min");
    require(p.r_min >= 0.0 && p.r_min < 1.0, "r_min", "must lie in [0, 1)");
    try {
      sources.push_back(make_source(line.key, std::move(route), p));
    } catch (const DomainError& err) {
      ctx.fail(line.line, line.key, err.what());
    }
  }

  if (links.empty()) ctx.fail(line_no, "", "no links defined");
  if (sources.empty()) ctx.fail(line_no, "", "no sources defined");
  try {
    out.network = NetworkSpec(std::move(links), std::move(sources));
  } catch (const ValidationError& err) {
    ctx.fail(line_no, "", err.what());
  }

  for (const auto& e : solver_lines) {
    auto& s = out.solver;
    if (e.key == "policy") {
      try {
        s.policy = parse_policy(e.value);
      } catch (const ValidationError& err) {
        ctx.fail(e.line, e.key, err.what());
      }
    } else if (e.key == "schedule") {
      try {
        s.schedule.kind = parse_schedule(e.value);
      } catch (const ValidationError& err) {
        ctx.fail(e.line, e.key, err.what());
      }
    } else if (e.key == "beta0") {
      s.schedule.beta0 = ctx.number(e);
      if (!(s.schedule.beta0 > 0.0)) ctx.fail(e.line, e.key, "must be positive");
      s.beta0_given = true;
    } else if (e.key == "max_iters") {
      s.stop.max_iterations = ctx.count(e);
    } else if (e.key == "tol_gap") {
      s.stop.gap_tolerance = ctx.number(e);
    } else if (e.key == "tol_price") {
      s.stop.price_tolerance = ctx.number(e);
    } else if (e.key == "check_interval") {
      s.check_interval = ctx.count(e);
    } else if (e.key == "trace_stride") {
      s.trace_stride = ctx.count(e);
      if (s.trace_stride == 0) ctx.fail(e.line, e.key, "must be at least 1");
    } else if (e.key == "strict") {
      s.strict = ctx.boolean(e);
    } else if (e.key == "seed") {
      s.seed = ctx.count(e);
    } else {
      ctx.fail(e.line, e.key, "unknown solver key");
    }
  }

  // The kind sets the default grid, so it is read before the bounds.
  for (const auto& e : sweep_lines) {
    if (e.key != "kind") continue;
    if (e.value == "none") {
      out.sweep.kind = SweepKind::none;
    } else if (e.value == "a") {
      out.sweep = SweepSettings::default_a();
    } else if (e.value == "v") {
      out.sweep = SweepSettings::default_v();
    } else {
      ctx.fail(e.line, e.key, "expected none, a or v");
    }
  }
  for (const auto& e : sweep_lines) {
    auto& w = out.sweep;
    if (e.key == "kind") {
      continue;
    } else if (e.key == "start") {
      w.start = ctx.number(e);
    } else if (e.key == "stop") {
      w.stop = ctx.number(e);
    } else if (e.key == "step") {
      w.step = ctx.number(e);
      if (!(w.step > 0.0)) ctx.fail(e.line, e.key, "must be positive");
    } else {
      ctx.fail(e.line, e.key, "unknown sweep key");
    }
  }
  if (out.sweep.stop < out.sweep.start) ctx.fail(line_no, "stop", "sweep stop below start");

  out.validation = validate_network(out.network, false);
  return out;
}

inline LoadedInstance parse_instance_text(const std::string& text, const std::string& origin = "<string>") {
  std::istringstream is(text);
  return parse_instance(is, origin);
}

inline LoadedInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file " + path);
  return parse_instance(in, path);
}

namespace detail {

// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace detail

// Serializes an instance so that parse_instance reproduces it exactly.
inline std::string write_instance(const NetworkSpec& net, const SolverSettings& solver,
                                  const SweepSettings& sweep) {
  using detail::format_number;
  std::ostringstream os;
  os << "[links]\n";
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const auto& link = net.link(l);
    const auto& m = link.error_model;
    os << net.label_link(l) << " = capacity=" << format_number(link.capacity_max);
    switch (m.kind()) {
      case ErrorModel::Kind::exponential: os << " model=exponential"; break;
      case ErrorModel::Kind::binary: os << " model=binary"; break;
      case ErrorModel::Kind::quadratic:
        os << " model=quadratic kappa=" << format_number(m.kappa());
        break;
      case ErrorModel::Kind::general:
        throw ValidationError("link " + net.label_link(l) + ": general error models cannot be serialized");
    }
    os << " N=" << format_number(m.block_length()) << " R0=" << format_number(m.cutoff_rate()) << "\n";
  }
  os << "\n[sources]\n";
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const auto& src = net.source(s);
    if (!src.utility.is_alpha_fair()) {
      throw ValidationError("source " + net.label_source(s) + ": custom utilities cannot be serialized");
    }
    const auto& p = src.utility.params();
    os << net.label_source(s) << " = route=";
    for (std::size_t i = 0; i < src.route.size(); ++i) {
      os << (i ? "," : "") << net.label_link(src.route[i]);
    }
    os << " a=" << format_number(p.a) << " alpha=" << format_number(p.alpha)
       << " x_min=" << format_number(p.x_min) << " x_max=" << format_number(p.x_max)
       << " r_min=" << format_number(p.r_min) << "\n";
  }
  os << "\n[solver]\n";
  if (solver.policy) os << "policy = " << policy_name(*solver.policy) << "\n";
  os << "schedule = " << schedule_name(solver.schedule.kind) << "\n";
  if (solver.beta0_given) os << "beta0 = " << format_number(solver.schedule.beta0) << "\n";
  os << "max_iters = " << solver.stop.max_iterations << "\n"
     << "tol_gap = " << format_number(solver.stop.gap_tolerance) << "\n"
     << "tol_price = " << format_number(solver.stop.price_tolerance) << "\n"
     << "check_interval = " << solver.check_interval << "\n"
     << "trace_stride = " << solver.trace_stride << "\n"
     << "strict = " << (solver.strict ? "true" : "false") << "\n"
     << "seed = " << solver.seed << "\n";
  os << "\n[sweep]\nkind = " << sweep_name(sweep.kind) << "\n";
  if (sweep.kind != SweepKind::none) {
    os << "start = " << format_number(sweep.start) << "\nstop = " << format_number(sweep.stop)
       << "\nstep = " << format_number(sweep.step) << "\n";
  }
  return os.str();
}

}  // namespace rrnum
