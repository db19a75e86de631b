#include "cpd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "cpd/errors.hpp"
#include "cpd/fields.hpp"

namespace cpd::cli {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool parse_int(const std::string& s, int& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// "2^-k" or "2^k" -> exponent
std::optional<int> power_of_two_exponent(const std::string& s) {
  if (s.rfind("2^", 0) != 0) return std::nullopt;
  int k = 0;
  if (!parse_int(s.substr(2), k)) return std::nullopt;
  return k;
}

double parse_scalar(const std::string& item) {
  if (auto k = power_of_two_exponent(item)) return std::ldexp(1.0, *k);
  double v = 0.0;
  const char* end = item.data() + item.size();
  auto [ptr, ec] = std::from_chars(item.data(), end, v);
  if (ec != std::errc() || ptr != end || item.empty()) {
    throw ArgumentError("cannot parse '" + item + "' as a number or 2^k");
  }
  return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_scalar(item));
      continue;
    }
    const auto lo = power_of_two_exponent(trim(item.substr(0, dots)));
    const auto hi = power_of_two_exponent(trim(item.substr(dots + 2)));
    if (!lo || !hi) throw ArgumentError("range '" + item + "' must look like 2^-a..2^-b");
    const int dir = *hi >= *lo ? 1 : -1;
    for (int k = *lo;; k += dir) {
      out.push_back(std::ldexp(1.0, k));
      if (k == *hi) break;
    }
  }
  if (out.empty()) throw ArgumentError("empty grid '" + text + "'");
  return out;
}

namespace {

struct RawOptions {
  std::string problem;
  std::string method;
  std::string eps;
  std::string h;
  std::optional<double> t_end;
  std::string out;
  std::int64_t record_every = 1;
  int jobs = 1;
  double rtol = 1e-12;
  double atol = 1e-12;
  bool timing = false;
};

std::string catalog_footer() {
  std::string s = "Problems: ";
  const auto names = problem_names();
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
  s += "\nMethods: s2new, s2vp\nGrids: 0.125 | 2^-3 | 2^-4..2^-10 | comma lists of these";
  return s;
}

struct Parser {
  std::unique_ptr<CLI::App> app;
  RawOptions raw;
  CLI::App* simulate = nullptr;
  CLI::App* converge = nullptr;
  CLI::App* eps_scan = nullptr;
  CLI::App* energy = nullptr;
};

void add_common(CLI::App* sub, RawOptions& raw, bool sweep) {
  sub->add_option("--problem", raw.problem, "problem id")->required();
  sub->add_option("--method", raw.method, "s2new, s2vp or a comma list");
  sub->add_option("--eps", raw.eps, "eps grid");
  sub->add_option("--h", raw.h, "step-size grid");
  sub->add_option("--t-end", raw.t_end, "final time");
  sub->add_option("--out", raw.out, "output CSV path (default: stdout)");
  if (sweep) {
    sub->add_option("--jobs", raw.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--rtol", raw.rtol, "reference solver rtol")->check(CLI::PositiveNumber);
    sub->add_option("--atol", raw.atol, "reference solver atol")->check(CLI::PositiveNumber);
    sub->add_flag("--timing", raw.timing, "fill the wall_time_ms column");
  } else {
    sub->add_option("--record-every", raw.record_every, "record every N-th step")
        ->check(CLI::PositiveNumber);
  }
  sub->footer(catalog_footer());
}

std::unique_ptr<Parser> make_parser() {
  auto p = std::make_unique<Parser>();
  p->app = std::make_unique<CLI::App>(
      "Splitting integrators for charged-particle dynamics in strong magnetic fields", "cpd");
  // -h is the step-size flag, so help is long-form only
  p->app->set_help_flag("--help", "print this help and exit");
  p->app->require_subcommand(1);
  p->app->footer(catalog_footer());
  p->simulate = p->app->add_subcommand("simulate", "integrate one trajectory");
  p->converge = p->app->add_subcommand("converge", "error sweep over (method, eps, h)");
  p->eps_scan = p->app->add_subcommand("eps-scan", "error vs eps at fixed h");
  p->energy = p->app->add_subcommand("energy", "energy error along a long run");
  add_common(p->simulate, p->raw, false);
  add_common(p->converge, p->raw, true);
  add_common(p->eps_scan, p->raw, true);
  add_common(p->energy, p->raw, false);
  return p;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_method(trim(item)));
  if (out.empty()) throw ArgumentError("empty method list");
  return out;
}

CliInvocation build(const Parser& p) {
  const RawOptions& raw = p.raw;
  CliInvocation inv;
  CLI::App* sub = nullptr;
  if (p.simulate->parsed()) {
    inv.subcommand = Subcommand::simulate;
    sub = p.simulate;
  } else if (p.converge->parsed()) {
    inv.subcommand = Subcommand::converge;
    sub = p.converge;
  } else if (p.eps_scan->parsed()) {
    inv.subcommand = Subcommand::eps_scan;
    sub = p.eps_scan;
  } else {
    inv.subcommand = Subcommand::energy;
    sub = p.energy;
  }
  const std::string usage = sub->help();
  try {
    inv.problem = find_problem(raw.problem).name;
    const bool single_run =
        inv.subcommand == Subcommand::simulate || inv.subcommand == Subcommand::energy;

    switch (inv.subcommand) {
      case Subcommand::simulate:
        inv.methods = {Method::s2new};
        inv.eps = {std::ldexp(1.0, -4)};
        inv.h = {std::ldexp(1.0, -8)};
        inv.t_end = find_problem(inv.problem).t_end;
        break;
      case Subcommand::converge:
        inv.methods = {Method::s2new, Method::s2vp};
        inv.eps = {std::ldexp(1.0, -4), std::ldexp(1.0, -6), std::ldexp(1.0, -8),
                   std::ldexp(1.0, -10)};
        inv.h = dyadic_range(4, 10);
        inv.t_end = 1.0;
        break;
      case Subcommand::eps_scan:
        inv.methods = {Method::s2new, Method::s2vp};
        inv.eps = dyadic_range(4, 10);
        inv.h = {std::ldexp(1.0, -8)};
        inv.t_end = 1.0;
        break;
      case Subcommand::energy:
        inv.methods = {Method::s2new, Method::s2vp};
        inv.eps = {std::ldexp(1.0, -4)};
        inv.h = {std::ldexp(1.0, -6)};
        inv.t_end = 100.0;
        break;
    }
    if (!raw.method.empty()) inv.methods = parse_methods(raw.method);
    if (!raw.eps.empty()) inv.eps = parse_grid(raw.eps);
    if (!raw.h.empty()) inv.h = parse_grid(raw.h);
    if (raw.t_end) inv.t_end = *raw.t_end;
    if (!raw.out.empty()) inv.out = raw.out;
    inv.record_every = raw.record_every;
    inv.jobs = raw.jobs;
    inv.rtol = raw.rtol;
    inv.atol = raw.atol;
    inv.timing = raw.timing;

    for (double e : inv.eps) {
      if (!(e > 0.0 && e <= 1.0)) throw ArgumentError("--eps values must lie in (0, 1]");
    }
    for (double h : inv.h) {
      if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("--h values must be positive");
    }
    if (!(inv.t_end > 0.0) || !std::isfinite(inv.t_end)) {
      throw ArgumentError("--t-end must be positive");
    }
    if (single_run && (inv.eps.size() != 1 || inv.h.size() != 1)) {
      throw ArgumentError("this subcommand takes a single --eps and a single --h");
    }
    if (inv.subcommand == Subcommand::simulate && inv.methods.size() != 1) {
      throw ArgumentError("simulate takes a single --method");
    }
  } catch (const Error& e) {
    throw UsageError(e.what(), usage);
  }
  return inv;
}

}  // namespace

CliInvocation parse_args(const std::vector<std::string>& args) {
  auto p = make_parser();
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    p->app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CliInvocation inv;
    inv.help = true;
    const CLI::App* target = p->app.get();
    for (const CLI::App* sub : {p->simulate, p->converge, p->eps_scan, p->energy}) {
      if (sub->parsed()) target = sub;
    }
    inv.help_text = target->help();
    return inv;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (msg.empty()) msg = "invalid arguments";
    throw UsageError(msg, p->app->help());
  }
  return build(*p);
}

namespace {

void print_fit(std::ostream& err, const std::string& label, const SlopeFit& fit) {
  err << label << ": slope " << format_double(fit.slope) << ", r2 " << format_double(fit.r2)
      << '\n';
}

void emit(const CliInvocation& inv, std::ostream& out,
          const std::function<void(std::ostream&)>& writer) {
  if (!inv.out) {
    writer(out);
    return;
  }
  std::ofstream file(*inv.out, std::ios::binary);
  if (!file) throw Error("cannot open '" + *inv.out + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw Error("write to '" + *inv.out + "' failed");
}

}  // namespace

void execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const ProblemSpec& problem = find_problem(inv.problem);
  switch (inv.subcommand) {
    case Subcommand::simulate: {
      const SchemeContext ctx(problem, inv.eps.front(), inv.h.front());
      const Trajectory traj =
          integrate_until(ctx, inv.methods.front(), inv.t_end, inv.record_every);
      emit(inv, out, [&](std::ostream& os) { write_trajectory_csv(os, problem, traj); });
      break;
    }
    case Subcommand::converge:
    case Subcommand::eps_scan: {
      SweepConfig cfg;
      cfg.problem = inv.problem;
      cfg.methods = inv.methods;
      cfg.eps_list = inv.eps;
      cfg.h_list = inv.h;
      cfg.t_end = inv.t_end;
      cfg.ref_cfg.rtol = inv.rtol;
      cfg.ref_cfg.atol = inv.atol;
      cfg.jobs = inv.jobs;
      const auto rows = run_sweep(cfg);
      emit(inv, out, [&](std::ostream& os) { write_csv(os, rows, {inv.timing}); });

      const bool by_h = inv.subcommand == Subcommand::converge;
      // group rows per (method, eps) for converge, per (method, h) for eps-scan
      std::vector<std::vector<SweepResult>> groups;
      for (const auto& r : rows) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
          return g.front().method == r.method && (by_h ? g.front().eps == r.eps : g.front().h == r.h);
        });
        if (it == groups.end()) {
          groups.push_back({r});
        } else {
          it->push_back(r);
        }
      }
      for (const auto& g : groups) {
        const auto good = std::count_if(g.begin(), g.end(), [](const auto& r) { return r.ok; });
        if (good < 3) continue;
        const std::string label = std::string(to_string(g.front().method)) +
                                  (by_h ? " eps=" + format_double(g.front().eps) +
                                              " error vs h"
                                        : " h=" + format_double(g.front().h) +
                                              " error vs eps");
        print_fit(err, label, by_h ? fit_error_vs_h(g) : fit_error_vs_eps(g));
      }
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok; });
      if (failed > 0) err << failed << " cell(s) failed; see the status/reason columns\n";
      break;
    }
    case Subcommand::energy: {
      std::vector<EnergySeries> series;
      for (Method m : inv.methods) {
        series.push_back(energy_study(inv.problem, m, inv.eps.front(), inv.h.front(), inv.t_end,
                                      inv.record_every));
      }
      emit(inv, out, [&](std::ostream& os) { write_energy_csv(os, inv.methods, series); });
      break;
    }
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color) {
  const std::string prefix = color ? "\033[31merror:\033[0m " : "error: ";
  CliInvocation inv;
  try {
    inv = parse_args(args);
  } catch (const UsageError& e) {
    err << prefix << e.what() << '\n' << e.usage();
    return 2;
  }
  if (inv.help) {
    out << inv.help_text;
    return 0;
  }
  try {
    execute(inv, out, err);
  } catch (const std::exception& e) {
    err << prefix << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cpd::cli
