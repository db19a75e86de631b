#include "cpd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cpd/errors.hpp"

namespace cpd {

double hamiltonian(const ProblemSpec& problem, const ParticleState& s) {
  return 0.5 * dot(s.v, s.v) + potential(problem, s.x);
}

Vec3 v_parallel(const ProblemSpec& problem, double eps, const ParticleState& s) {
  const Vec3 b = scaled_B(problem, eps, s.x);
  const double nb = norm(b);
  if (nb < 1e-12) throw SingularityError("v_parallel: magnetic field vanishes at x");
  const Vec3 dir = (1.0 / nb) * b;
  return dot(dir, s.v) * dir;
}

namespace {

double relative(const Vec3& num, const Vec3& ref, const char* what) {
  const double denom = norm(ref);
  if (denom < kRelativeGuard) {
    std::ostringstream os;
    os << "relative error of " << what << " undefined: reference norm " << denom;
    throw SingularityError(os.str());
  }
  return norm(num - ref) / denom;
}

}  // namespace

ErrorReport error_report(const ProblemSpec& problem, double eps, const ParticleState& numerical,
                         const ParticleState& reference) {
  ErrorReport r;
  r.errx = relative(numerical.x, reference.x, "x");
  // each parallel component uses B at its own position
  const Vec3 par_num = v_parallel(problem, eps, numerical);
  const Vec3 par_ref = v_parallel(problem, eps, reference);
  r.errv_par = relative(par_num, par_ref, "v_par");
  r.error = r.errx + r.errv_par;

  const Vec3 perp_num = numerical.v - par_num;
  const Vec3 perp_ref = reference.v - par_ref;
  const double perp_norm = norm(perp_ref);
  // informational column: fall back to the absolute difference
  r.errv_perp = perp_norm < kRelativeGuard ? norm(perp_num - perp_ref)
                                           : norm(perp_num - perp_ref) / perp_norm;
  return r;
}

EnergySeries energy_series(const ProblemSpec& problem,
                           std::span<const ParticleState> trajectory) {
  EnergySeries out;
  if (trajectory.empty()) return out;
  const double h0 = hamiltonian(problem, trajectory.front());
  if (std::abs(h0) < kRelativeGuard) {
    throw SingularityError("energy error undefined: initial energy is (near) zero");
  }
  out.times.reserve(trajectory.size());
  out.e_H.reserve(trajectory.size());
  for (const auto& s : trajectory) {
    out.times.push_back(s.t);
    out.e_H.push_back(std::abs(hamiltonian(problem, s) - h0) / std::abs(h0));
  }
  return out;
}

SlopeFit loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ArgumentError("loglog_slope: xs and ys differ in length");
  if (xs.size() < 3) throw ArgumentError("loglog_slope: need at least 3 points");
  const auto n = static_cast<double>(xs.size());
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw ArgumentError("loglog_slope: data must be positive and finite");
    }
    lx.push_back(std::log2(xs[i]));
    ly.push_back(std::log2(ys[i]));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("loglog_slope: xs must not all be equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  // a constant series is fitted perfectly by a flat line
  fit.r2 = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

}  // namespace cpd
