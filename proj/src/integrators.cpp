#include "cpd/integrators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "cpd/errors.hpp"

namespace cpd {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::s2new:
      return "s2new";
    case Method::s2vp:
      return "s2vp";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "s2new") return Method::s2new;
  if (name == "s2vp") return Method::s2vp;
  throw ArgumentError("unknown method '" + std::string(name) + "' (expected s2new or s2vp)");
}

SchemeContext::SchemeContext(ProblemSpec problem, double eps, double h)
    : SchemeContext(problem, eps, h, problem.x0) {}

SchemeContext::SchemeContext(ProblemSpec problem, double eps, double h, const Vec3& anchor)
    : problem_(std::move(problem)), eps_(eps), h_(h), anchor_(anchor) {
  validate(problem_);
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("eps must lie in (0, 1]");
  if (!std::isfinite(h) || h == 0.0) throw ArgumentError("step size must be finite and nonzero");
  if (!is_finite(anchor)) throw ArgumentError("anchor position must be finite");
  b0_ = scaled_B(problem_, eps_, anchor_);
  b0_hat_ = hat(b0_);
  const ExpPhi1 half = rodrigues_exp_phi1(decompose(b0_, (0.5 * h_) / eps_));
  half_exp_ = half.exp;
  half_phi1_ = half.phi1;
}

SchemeContext SchemeContext::with_step(double h) const {
  return SchemeContext(problem_, eps_, h, anchor_);
}

ParticleState subflow_S(const SchemeContext& ctx, const ParticleState& s, double dt) {
  if (dt == 0.0) return s;
  ExpPhi1 blocks;
  if (dt == 0.5 * ctx.h()) {
    blocks = {ctx.half_exp(), ctx.half_phi1()};
  } else {
    blocks = rodrigues_exp_phi1(decompose(ctx.b0(), dt / ctx.eps()));
  }
  return {s.x + dt * (blocks.phi1 * s.v), blocks.exp * s.v, s.t + dt};
}

ParticleState subflow_T(const SchemeContext& ctx, const ParticleState& s, double dt) {
  if (dt == 0.0) return s;
  const Vec3 diff = scaled_B(ctx.problem(), ctx.eps(), s.x) - ctx.b0();
  const ExpPhi1 m = rodrigues_exp_phi1(decompose(diff, dt / ctx.eps()));
  const Vec3 e = e_field(ctx.problem(), s.x);
  return {s.x, m.exp * s.v + dt * (m.phi1 * e), s.t + dt};
}

ParticleState step_s2_new(const SchemeContext& ctx, const ParticleState& s) {
  const double h = ctx.h();
  const Mat3& half_exp = ctx.half_exp();
  const Mat3& half_phi = ctx.half_phi1();

  const Vec3 zbar = s.x + (0.5 * h) * (half_phi * s.v);
  const Vec3 diff = scaled_B(ctx.problem(), ctx.eps(), zbar) - ctx.b0();
  const ExpPhi1 kick = rodrigues_exp_phi1(decompose(diff, h / ctx.eps()));
  const Vec3 e = e_field(ctx.problem(), zbar);

  // kicked = e^{hD} e^{hB0/2} v + h phi1(hD) E(zbar), D = (B_zbar - B0)/eps
  const Vec3 kicked = kick.exp * (half_exp * s.v) + h * (kick.phi1 * e);
  // x + h/2 phi1(hB0/2)(I + e^{hD} e^{hB0/2}) v + h^2/2 phi1(hB0/2) phi1(hD) E
  const Vec3 x_next = s.x + (0.5 * h) * (half_phi * (s.v + kicked));
  return {x_next, half_exp * kicked, s.t + h};
}

ParticleState step_s2_vp(const SchemeContext& ctx, const ParticleState& s) {
  const double h = ctx.h();
  const Vec3 x_half = s.x + (0.5 * h) * s.v;
  const Vec3 b = scaled_B(ctx.problem(), ctx.eps(), x_half);
  const ExpPhi1 m = rodrigues_exp_phi1(decompose(b, h / ctx.eps()));
  const Vec3 e = e_field(ctx.problem(), x_half);
  // v first: the position update uses v^{n+1}.
  const Vec3 v_next = m.exp * s.v + h * (m.phi1 * e);
  const Vec3 x_next = x_half + (0.5 * h) * v_next;
  return {x_next, v_next, s.t + h};
}

ParticleState step_s2_new_rescaled(const SchemeContext& ctx, const ParticleState& s,
                                   double frak_h) {
  if (frak_h == 0.0) return s;
  const double eps = ctx.eps();
  const ExpPhi1 half = rodrigues_exp_phi1(decompose(ctx.b0(), 0.5 * frak_h));
  const Vec3& z = s.x;
  const Vec3& w = s.v;

  const Vec3 zbar = z + (0.5 * eps * frak_h) * (half.phi1 * w);
  const Vec3 diff = scaled_B(ctx.problem(), eps, zbar) - ctx.b0();
  const ExpPhi1 kick = rodrigues_exp_phi1(decompose(diff, frak_h));
  const Vec3 e = e_field(ctx.problem(), zbar);

  const Vec3 rotated = kick.exp * (half.exp * w);
  const Vec3 z_next = z + (0.5 * eps * frak_h) * (half.phi1 * (w + rotated)) +
                      (0.5 * eps * eps * frak_h * frak_h) * (half.phi1 * (kick.phi1 * e));
  const Vec3 w_next = half.exp * rotated + (eps * frak_h) * (half.exp * (kick.phi1 * e));
  return {z_next, w_next, s.t + frak_h};
}

ParticleState step(const SchemeContext& ctx, Method method, const ParticleState& s) {
  return method == Method::s2new ? step_s2_new(ctx, s) : step_s2_vp(ctx, s);
}

namespace {

void check_blow_up(const ParticleState& s) {
  const double size = norm(s.x) + norm(s.v);
  if (!std::isfinite(size) || size > kBlowUpThreshold) {
    std::ostringstream os;
    os << "trajectory blew up at t = " << s.t << " (|x| + |v| = " << size << ")";
    throw BlowUpError(os.str());
  }
}

ParticleState initial_state(const ProblemSpec& p) { return {p.x0, p.v0, 0.0}; }

}  // namespace

Trajectory integrate(const SchemeContext& ctx, Method method, std::int64_t n_steps,
                     std::int64_t record_every) {
  if (n_steps < 1) throw ArgumentError("n_steps must be at least 1");
  if (record_every < 1) throw ArgumentError("record_every must be at least 1");
  Trajectory traj;
  ParticleState s = initial_state(ctx.problem());
  traj.push_back(s);
  for (std::int64_t n = 1; n <= n_steps; ++n) {
    s = step(ctx, method, s);
    check_blow_up(s);
    if (n % record_every == 0 || n == n_steps) traj.push_back(s);
  }
  return traj;
}

Trajectory integrate_until(const SchemeContext& ctx, Method method, double t_end,
                           std::int64_t record_every) {
  const double h = ctx.h();
  if (!(h > 0.0)) throw ArgumentError("integrate_until needs a positive step");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ArgumentError("t_end must be positive");
  if (record_every < 1) throw ArgumentError("record_every must be at least 1");

  const double ratio = t_end / h;
  auto n_full = static_cast<std::int64_t>(std::floor(ratio));
  // dyadic h with T = 1 hits the horizon exactly; absorb rounding noise
  const auto nearest = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(nearest)) <= 1e-9 * std::max(1.0, ratio)) {
    n_full = nearest;
  }
  const double remainder = t_end - static_cast<double>(n_full) * h;
  const bool partial = remainder > 1e-12 * t_end;

  Trajectory traj;
  ParticleState s = initial_state(ctx.problem());
  traj.push_back(s);
  for (std::int64_t n = 1; n <= n_full; ++n) {
    s = step(ctx, method, s);
    check_blow_up(s);
    if (n % record_every == 0 || (n == n_full && !partial)) traj.push_back(s);
  }
  if (partial) {
    const SchemeContext short_ctx = ctx.with_step(remainder);
    s = step(short_ctx, method, s);
    check_blow_up(s);
    s.t = t_end;
    traj.push_back(s);
  }
  return traj;
}

namespace {

using State6 = std::array<double, 6>;

State6 pack(const ParticleState& s) {
  return {s.x[0], s.x[1], s.x[2], s.v[0], s.v[1], s.v[2]};
}

ParticleState unpack(const State6& y, double t) {
  return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}, t};
}

class Rhs {
 public:
  Rhs(const ProblemSpec& p, double eps) : p_(p), eps_(eps), inv_eps_(1.0 / eps) {}

  State6 operator()(const State6& y) const {
    const Vec3 x{y[0], y[1], y[2]};
    const Vec3 v{y[3], y[4], y[5]};
    const Vec3 b = scaled_B(p_, eps_, x);
    const Vec3 a = inv_eps_ * cross(v, b) + e_field(p_, x);
    return {v[0], v[1], v[2], a[0], a[1], a[2]};
  }

 private:
  const ProblemSpec& p_;
  double eps_;
  double inv_eps_;
};

// y + h * sum_j a_j k_j
template <std::size_t K>
State6 combine(const State6& y, double h, const std::array<double, K>& a,
               const std::array<const State6*, K>& k) {
  State6 r = y;
  for (std::size_t i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < K; ++j) acc += a[j] * (*k[j])[i];
    r[i] += h * acc;
  }
  return r;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr std::array<double, 1> a2{1.0 / 5};
constexpr std::array<double, 2> a3{3.0 / 40, 9.0 / 40};
constexpr std::array<double, 3> a4{44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr std::array<double, 4> a5{19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                                   -212.0 / 729};
constexpr std::array<double, 5> a6{9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                   -5103.0 / 18656};
constexpr std::array<double, 6> a7{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                   -2187.0 / 6784, 11.0 / 84};
// fifth-order minus embedded fourth-order weights
constexpr std::array<double, 7> err_w{71.0 / 57600,  0.0,         -71.0 / 16695, 71.0 / 1920,
                                      -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace

ParticleState reference_solve(const ProblemSpec& problem, double eps, double t_end,
                              const RefSolverConfig& cfg, const StepObserver& observer) {
  validate(problem);
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("eps must lie in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ArgumentError("t_end must be >= 0");
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) throw ArgumentError("rtol and atol must be > 0");
  if (cfg.max_steps < 1) throw ArgumentError("max_steps must be at least 1");

  ParticleState start = initial_state(problem);
  if (t_end == 0.0) return start;

  const Rhs f(problem, eps);
  State6 y = pack(start);
  double t = 0.0;
  double h = cfg.initial_step > 0.0 ? cfg.initial_step : std::min(1e-3, eps / 10.0);
  h = std::min(h, t_end);

  // PI controller constants (Hairer, Norsett & Wanner).
  constexpr double beta = 0.04;
  constexpr double alpha = 0.2 - 0.75 * beta;
  constexpr double safety = 0.9;
  constexpr double fac_min = 0.2;  // step may shrink to 0.2x ...
  constexpr double fac_max = 10.0;  // ... or grow to 10x per step
  double err_old = 1e-4;
  bool last_rejected = false;

  State6 k1 = f(y);
  std::int64_t attempts = 0;
  while (t < t_end) {
    if (++attempts > cfg.max_steps) {
      std::ostringstream os;
      os << "reference solver exceeded " << cfg.max_steps << " steps; reached t = " << t
         << " of " << t_end;
      throw MaxStepsError(os.str(), t);
    }
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    const State6 k2 = f(combine<1>(y, h, a2, {&k1}));
    const State6 k3 = f(combine<2>(y, h, a3, {&k1, &k2}));
    const State6 k4 = f(combine<3>(y, h, a4, {&k1, &k2, &k3}));
    const State6 k5 = f(combine<4>(y, h, a5, {&k1, &k2, &k3, &k4}));
    const State6 k6 = f(combine<5>(y, h, a6, {&k1, &k2, &k3, &k4, &k5}));
    const State6 y_new = combine<6>(y, h, a7, {&k1, &k2, &k3, &k4, &k5, &k6});
    const State6 k7 = f(y_new);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const double e = h * (err_w[0] * k1[i] + err_w[2] * k3[i] + err_w[3] * k4[i] +
                            err_w[4] * k5[i] + err_w[5] * k6[i] + err_w[6] * k7[i]);
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_sq += (e / sc) * (e / sc);
    }
    const double err = std::sqrt(err_sq / 6.0);
    if (!std::isfinite(err)) {
      throw BlowUpError("reference solver produced a non-finite error estimate at t = " +
                        std::to_string(t));
    }

    const double fac11 = std::pow(std::max(err, 1e-300), alpha);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(err_old, beta);
      fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      err_old = std::max(err, 1e-4);
      last_rejected = false;

      y = y_new;
      k1 = k7;
      t = final_step ? t_end : t + h;
      if (observer) observer(unpack(y, t));
      h = h_new;
    } else {
      h = h / std::min(1.0 / fac_min, fac11 / safety);
      last_rejected = true;
    }
  }
  return unpack(y, t_end);
}

ParticleState rk4_oracle(const ProblemSpec& problem, double eps, double t_end, double h) {
  validate(problem);
  if (!(h > 0.0)) throw ArgumentError("rk4 step must be positive");
  if (!(t_end >= 0.0)) throw ArgumentError("t_end must be >= 0");
  ParticleState start = initial_state(problem);
  if (t_end == 0.0) return start;
  const double ratio = t_end / h;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-6) {
    throw ArgumentError("rk4 step must divide t_end");
  }
  const double dt = t_end / static_cast<double>(n);
  const Rhs f(problem, eps);
  constexpr std::array<double, 1> half{0.5};
  constexpr std::array<double, 1> one{1.0};
  constexpr std::array<double, 4> w{1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  State6 y = pack(start);
  for (std::int64_t i = 0; i < n; ++i) {
    const State6 k1 = f(y);
    const State6 k2 = f(combine<1>(y, dt, half, {&k1}));
    const State6 k3 = f(combine<1>(y, dt, half, {&k2}));
    const State6 k4 = f(combine<1>(y, dt, one, {&k3}));
    y = combine<4>(y, dt, w, {&k1, &k2, &k3, &k4});
  }
  return unpack(y, t_end);
}

}  // namespace cpd
