#pragma once

// Time steppers for
//   x' = v,  v' = v x B(eps^q x)/eps + E(x).
//
// S2-new freezes the field matrix at an anchor position x0 inside the
// gyration subflow and moves the spatial variation of B into the kick
// subflow; S2-VP is the classical drift/kick Strang splitting. Both are
// explicit and time symmetric. The reference solvers (Dormand-Prince 5(4)
// and fixed-step RK4) integrate the full system directly.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/fields.hpp"
#include "cpd/smallmat.hpp"

namespace cpd {

struct ParticleState {
  Vec3 x;
  Vec3 v;
  double t = 0.0;

  friend bool operator==(const ParticleState&, const ParticleState&) = default;
};

enum class Method { s2new, s2vp };

std::string_view to_string(Method m);
/// Accepts "s2new" / "s2vp"; throws ArgumentError otherwise.
Method parse_method(std::string_view name);

/// Immutable per-(problem, eps, h) data shared by all steps of a run.
///
/// The frozen matrix hat(B(eps^q x0)) uses the anchor position, which is the
/// problem's x0 unless a restart anchor is given explicitly. The step h may
/// be negative (backward steps); it may not be zero.
class SchemeContext {
 public:
  SchemeContext(ProblemSpec problem, double eps, double h);
  SchemeContext(ProblemSpec problem, double eps, double h, const Vec3& anchor);

  /// Same problem, eps and anchor with a different step.
  SchemeContext with_step(double h) const;

  const ProblemSpec& problem() const { return problem_; }
  double eps() const { return eps_; }
  double h() const { return h_; }
  const Vec3& anchor() const { return anchor_; }
  /// B(eps^q x0), unscaled.
  const Vec3& b0() const { return b0_; }
  const Mat3& b0_hat() const { return b0_hat_; }
  /// e^{h hat(B0) / (2 eps)}
  const Mat3& half_exp() const { return half_exp_; }
  /// phi1(h hat(B0) / (2 eps))
  const Mat3& half_phi1() const { return half_phi1_; }

 private:
  ProblemSpec problem_;
  double eps_;
  double h_;
  Vec3 anchor_;
  Vec3 b0_;
  Mat3 b0_hat_;
  Mat3 half_exp_;
  Mat3 half_phi1_;
};

/// Exact flow of x' = v, v' = hat(B0) v / eps over dt.
ParticleState subflow_S(const SchemeContext& ctx, const ParticleState& s, double dt);

/// Exact flow of x' = 0, v' = (hat(B(eps^q x)) - hat(B0)) v / eps + E(x) over dt.
ParticleState subflow_T(const SchemeContext& ctx, const ParticleState& s, double dt);

/// One S2-new step of size ctx.h(): S(h/2) o T(h) o S(h/2) in closed form.
ParticleState step_s2_new(const SchemeContext& ctx, const ParticleState& s);

/// One S2-VP step of size ctx.h(): drift(h/2) o kick(h) o drift(h/2).
ParticleState step_s2_vp(const SchemeContext& ctx, const ParticleState& s);

/// S2-new applied to the time-rescaled system tau = t/eps,
///   z' = eps w,  w' = w x B(eps^q z) + eps E(z),
/// with rescaled step frak_h. The state holds (z, w, tau). The context's h
/// is not used; its eps, problem and frozen B0 are.
ParticleState step_s2_new_rescaled(const SchemeContext& ctx, const ParticleState& s,
                                   double frak_h);

ParticleState step(const SchemeContext& ctx, Method method, const ParticleState& s);

/// Blow-up guard: |x| + |v| above this (or non-finite) aborts a run.
inline constexpr double kBlowUpThreshold = 1e12;

using Trajectory = std::vector<ParticleState>;

/// n_steps steps from (x0, v0, 0). Records the initial state, every
/// record_every-th state, and the final state.
Trajectory integrate(const SchemeContext& ctx, Method method, std::int64_t n_steps,
                     std::int64_t record_every);

/// Integrates from t = 0 to t_end: floor(t_end/h) full steps plus one short
/// step when t_end is not a multiple of h. Recording as in integrate().
Trajectory integrate_until(const SchemeContext& ctx, Method method, double t_end,
                           std::int64_t record_every);

struct RefSolverConfig {
  double rtol = 1e-12;
  double atol = 1e-12;
  std::int64_t max_steps = 50'000'000;
  /// <= 0 selects min(1e-3, eps/10).
  double initial_step = 0.0;
};

/// Called after every accepted step of the reference solver.
using StepObserver = std::function<void(const ParticleState&)>;

/// Adaptive Dormand-Prince 5(4) with PI step-size control. The last step is
/// clamped so the returned state sits exactly at t_end.
ParticleState reference_solve(const ProblemSpec& problem, double eps, double t_end,
                              const RefSolverConfig& cfg = {},
                              const StepObserver& observer = {});

/// Classical fixed-step RK4; h must divide t_end up to rounding.
ParticleState rk4_oracle(const ProblemSpec& problem, double eps, double t_end, double h);

}  // namespace cpd
