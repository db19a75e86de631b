#include "cpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "cpd/errors.hpp"

namespace cpd {

namespace {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Work items must not
// throw; each writes only its own output slot.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t count = std::min(workers, n);
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> sorted_desc_unique(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end(), std::greater<>());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<Method> sorted_methods(std::vector<Method> ms) {
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

struct Reference {
  std::optional<ParticleState> state;
  std::string failure;
};

Reference compute_reference(const ProblemSpec& p, double eps, double t_end,
                            const RefSolverConfig& cfg) {
  try {
    return {reference_solve(p, eps, t_end, cfg), {}};
  } catch (const std::exception& e) {
    return {std::nullopt, std::string("reference: ") + e.what()};
  }
}

SweepResult run_cell(const ProblemSpec& p, Method method, double eps, double h, double t_end,
                     const Reference& ref) {
  SweepResult row;
  row.problem = p.name;
  row.method = method;
  row.eps = eps;
  row.h = h;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!ref.state) throw Error(ref.failure);
    const SchemeContext ctx(p, eps, h);
    const Trajectory traj =
        integrate_until(ctx, method, t_end, std::numeric_limits<std::int64_t>::max());
    const ParticleState& last = traj.back();
    const ErrorReport rep = error_report(p, eps, last, *ref.state);
    row.errx = rep.errx;
    row.errv_par = rep.errv_par;
    row.errv_perp = rep.errv_perp;
    row.error = rep.error;
    const double h0 = hamiltonian(p, traj.front());
    row.e_H_final = std::abs(hamiltonian(p, last) - h0) / std::abs(h0);
  } catch (const std::exception& e) {
    row.ok = false;
    row.reason = e.what();
    row.errx = row.errv_par = row.errv_perp = row.error = row.e_H_final =
        std::numeric_limits<double>::quiet_NaN();
  }
  const auto stop = std::chrono::steady_clock::now();
  row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return row;
}

}  // namespace

void validate(const SweepConfig& cfg) {
  (void)find_problem(cfg.problem);
  if (cfg.methods.empty()) throw ArgumentError("sweep needs at least one method");
  if (cfg.eps_list.empty() || cfg.h_list.empty()) {
    throw ArgumentError("sweep needs non-empty eps and h lists");
  }
  for (double e : cfg.eps_list) {
    if (!(e > 0.0 && e <= 1.0)) throw ArgumentError("eps values must lie in (0, 1]");
  }
  for (double h : cfg.h_list) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("h values must be positive");
  }
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw ArgumentError("t_end must be positive");
  }
}

std::vector<SweepResult> run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const ProblemSpec& p = find_problem(cfg.problem);
  const auto methods = sorted_methods(cfg.methods);
  const auto eps_list = sorted_desc_unique(cfg.eps_list);
  const auto h_list = sorted_desc_unique(cfg.h_list);

  std::vector<Reference> refs(eps_list.size());
  if (cfg.cache_references) {
    parallel_for(eps_list.size(), cfg.jobs, [&](std::size_t i) {
      refs[i] = compute_reference(p, eps_list[i], cfg.t_end, cfg.ref_cfg);
    });
  }

  struct Cell {
    Method method;
    std::size_t eps_index;
    double h;
  };
  std::vector<Cell> cells;
  for (Method m : methods)
    for (std::size_t e = 0; e < eps_list.size(); ++e)
      for (double h : h_list) cells.push_back({m, e, h});

  std::vector<SweepResult> rows(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    const Cell& c = cells[i];
    const double eps = eps_list[c.eps_index];
    if (cfg.cache_references) {
      rows[i] = run_cell(p, c.method, eps, c.h, cfg.t_end, refs[c.eps_index]);
    } else {
      const Reference ref = compute_reference(p, eps, cfg.t_end, cfg.ref_cfg);
      rows[i] = run_cell(p, c.method, eps, c.h, cfg.t_end, ref);
    }
  });
  return rows;
}

std::vector<double> dyadic_range(int from, int to) {
  std::vector<double> out;
  const int dir = to >= from ? 1 : -1;
  for (int k = from;; k += dir) {
    out.push_back(std::ldexp(1.0, -k));
    if (k == to) break;
  }
  return out;
}

namespace {

SlopeFit fit_rows(const std::vector<SweepResult>& rows, double SweepResult::*axis) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    xs.push_back(r.*axis);
    ys.push_back(r.error);
  }
  return loglog_slope(xs, ys);
}

}  // namespace

SlopeFit fit_error_vs_h(const std::vector<SweepResult>& rows) {
  return fit_rows(rows, &SweepResult::h);
}

SlopeFit fit_error_vs_eps(const std::vector<SweepResult>& rows) {
  return fit_rows(rows, &SweepResult::eps);
}

std::vector<EpsConvergence> convergence_study(const std::string& problem, Method method,
                                              std::vector<double> h_list,
                                              std::vector<double> eps_list,
                                              const RefSolverConfig& ref_cfg, int jobs) {
  if (h_list.empty()) h_list = dyadic_range(4, 10);
  if (eps_list.empty()) eps_list = {std::ldexp(1.0, -4), std::ldexp(1.0, -6),
                                    std::ldexp(1.0, -8), std::ldexp(1.0, -10)};
  SweepConfig cfg;
  cfg.problem = problem;
  cfg.methods = {method};
  cfg.eps_list = std::move(eps_list);
  cfg.h_list = std::move(h_list);
  cfg.ref_cfg = ref_cfg;
  cfg.jobs = jobs;
  const auto rows = run_sweep(cfg);

  std::vector<EpsConvergence> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back().eps != r.eps) out.push_back({r.eps, {}, {}});
    out.back().rows.push_back(r);
  }
  for (auto& c : out) c.fit = fit_error_vs_h(c.rows);
  return out;
}

EpsScan eps_scaling_study(const std::string& problem, Method method, double h_fixed,
                          std::vector<double> eps_list, const RefSolverConfig& ref_cfg,
                          int jobs) {
  if (eps_list.empty()) eps_list = dyadic_range(4, 10);
  SweepConfig cfg;
  cfg.problem = problem;
  cfg.methods = {method};
  cfg.eps_list = std::move(eps_list);
  cfg.h_list = {h_fixed};
  cfg.ref_cfg = ref_cfg;
  cfg.jobs = jobs;
  EpsScan scan;
  scan.rows = run_sweep(cfg);
  scan.fit = fit_error_vs_eps(scan.rows);
  return scan;
}

EnergySeries energy_study(const std::string& problem, Method method, double eps, double h,
                          double t_end, std::int64_t record_every) {
  const ProblemSpec& p = find_problem(problem);
  const SchemeContext ctx(p, eps, h);
  const Trajectory traj = integrate_until(ctx, method, t_end, record_every);
  return energy_series(p, traj);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kEol = "\r\n";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepResult>& rows, const CsvOptions& opts) {
  os << kSweepCsvHeader << kEol;
  for (const auto& r : rows) {
    os << csv_field(r.problem) << ',' << to_string(r.method) << ',' << format_double(r.eps)
       << ',' << format_double(r.h) << ',' << format_double(r.errx) << ','
       << format_double(r.errv_par) << ',' << format_double(r.errv_perp) << ','
       << format_double(r.error) << ',' << format_double(r.e_H_final) << ','
       << (opts.include_timing ? format_double(r.wall_time_ms) : std::string()) << ','
       << (r.ok ? "ok" : "error") << ',' << csv_field(r.reason) << kEol;
  }
}

void write_csv(const std::vector<SweepResult>& rows, const std::filesystem::path& path,
               const CsvOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  }
  write_csv(out, rows, opts);
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void write_trajectory_csv(std::ostream& os, const ProblemSpec& problem, const Trajectory& traj) {
  os << "t,x1,x2,x3,v1,v2,v3,e_H" << kEol;
  const EnergySeries es = energy_series(problem, traj);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj[i];
    os << format_double(s.t);
    for (std::size_t k = 0; k < 3; ++k) os << ',' << format_double(s.x[k]);
    for (std::size_t k = 0; k < 3; ++k) os << ',' << format_double(s.v[k]);
    os << ',' << format_double(es.e_H[i]) << kEol;
  }
}

void write_energy_csv(std::ostream& os, const std::vector<Method>& methods,
                      const std::vector<EnergySeries>& series) {
  if (methods.size() != series.size()) {
    throw ArgumentError("write_energy_csv: one series per method expected");
  }
  os << "method,t,e_H" << kEol;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const auto& s = series[m];
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      os << to_string(methods[m]) << ',' << format_double(s.times[i]) << ','
         << format_double(s.e_H[i]) << kEol;
    }
  }
}

}  // namespace cpd
