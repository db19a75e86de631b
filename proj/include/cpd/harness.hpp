#pragma once

// Experiment orchestration: convergence sweeps over (method, eps, h),
// eps-scaling studies at fixed h, long-time energy runs and CSV output.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpd/diagnostics.hpp"
#include "cpd/integrators.hpp"

namespace cpd {

struct SweepConfig {
  std::string problem;
  std::vector<Method> methods{Method::s2new, Method::s2vp};
  std::vector<double> eps_list;
  std::vector<double> h_list;
  double t_end = 1.0;
  RefSolverConfig ref_cfg;
  /// Worker threads; results do not depend on this.
  int jobs = 1;
  /// Compute one reference per eps and share it across cells. Turning this
  /// off recomputes the reference in every cell (same rows, more work).
  bool cache_references = true;
};

struct SweepResult {
  std::string problem;
  Method method = Method::s2new;
  double eps = 0.0;
  double h = 0.0;
  double errx = 0.0;
  double errv_par = 0.0;
  double errv_perp = 0.0;
  double error = 0.0;
  double e_H_final = 0.0;
  double wall_time_ms = 0.0;
  bool ok = true;
  std::string reason;
};

/// Throws ArgumentError for an unknown problem or empty/non-positive grids.
void validate(const SweepConfig& cfg);

/// One row per (method, eps, h), ordered by method, then eps descending,
/// then h descending. Cell failures become rows with ok = false.
std::vector<SweepResult> run_sweep(const SweepConfig& cfg);

/// Powers 2^-from ... 2^-to (either direction), inclusive.
std::vector<double> dyadic_range(int from, int to);

struct EpsConvergence {
  double eps = 0.0;
  SlopeFit fit;
  std::vector<SweepResult> rows;
};

/// Error vs h for each eps. Defaults: h = 2^-4..2^-10, eps = 2^-4, 2^-6,
/// 2^-8, 2^-10, t_end = 1.
std::vector<EpsConvergence> convergence_study(const std::string& problem, Method method,
                                              std::vector<double> h_list = {},
                                              std::vector<double> eps_list = {},
                                              const RefSolverConfig& ref_cfg = {},
                                              int jobs = 1);

/// Log-log fits of the total error column against h or eps; failed rows
/// are skipped.
SlopeFit fit_error_vs_h(const std::vector<SweepResult>& rows);
SlopeFit fit_error_vs_eps(const std::vector<SweepResult>& rows);

struct EpsScan {
  SlopeFit fit;
  std::vector<SweepResult> rows;
};

/// Error vs eps at fixed h. Default eps grid 2^-4..2^-10, t_end = 1.
EpsScan eps_scaling_study(const std::string& problem, Method method, double h_fixed,
                          std::vector<double> eps_list = {},
                          const RefSolverConfig& ref_cfg = {}, int jobs = 1);

/// e_H along a run to t_end, sampled every record_every steps plus the end.
EnergySeries energy_study(const std::string& problem, Method method, double eps, double h,
                          double t_end = 100.0, std::int64_t record_every = 1);

struct CsvOptions {
  /// wall_time_ms is left empty unless requested, so reruns are byte-identical.
  bool include_timing = false;
};

inline constexpr const char* kSweepCsvHeader =
    "problem,method,eps,h,errx,errv_par,errv_perp,error,e_H_final,wall_time_ms,status,reason";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

void write_csv(std::ostream& os, const std::vector<SweepResult>& rows,
               const CsvOptions& opts = {});
void write_csv(const std::vector<SweepResult>& rows, const std::filesystem::path& path,
               const CsvOptions& opts = {});

/// t,x1,x2,x3,v1,v2,v3,e_H
void write_trajectory_csv(std::ostream& os, const ProblemSpec& problem, const Trajectory& traj);

/// method,t,e_H
void write_energy_csv(std::ostream& os, const std::vector<Method>& methods,
                      const std::vector<EnergySeries>& series);

}  // namespace cpd
