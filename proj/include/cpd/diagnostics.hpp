#pragma once

#include <span>
#include <vector>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"

namespace cpd {

/// Relative errors at the final time. error = errx + errv_par.
/// errv_perp is reported for information only; no bound is claimed for it.
struct ErrorReport {
  double errx = 0.0;
  double errv_par = 0.0;
  double errv_perp = 0.0;
  double error = 0.0;
};

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> e_H;
};

/// Least-squares line through (log2 x, log2 y).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Reference-norm floor below which relative errors are refused.
inline constexpr double kRelativeGuard = 1e-14;

/// H = |v|^2/2 + U(x).
double hamiltonian(const ProblemSpec& problem, const ParticleState& s);

/// Projection of v onto the direction of B(eps^q x), evaluated at s.x.
Vec3 v_parallel(const ProblemSpec& problem, double eps, const ParticleState& s);

ErrorReport error_report(const ProblemSpec& problem, double eps, const ParticleState& numerical,
                         const ParticleState& reference);

/// |H(s_n) - H(s_0)| / |H(s_0)| for each recorded state.
EnergySeries energy_series(const ProblemSpec& problem, std::span<const ParticleState> trajectory);

SlopeFit loglog_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace cpd
