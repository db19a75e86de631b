#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cpd/diagnostics.hpp"
#include "cpd/errors.hpp"
#include "test_support.hpp"

using namespace cpd;
using cpd::testing::Rng;

TEST_CASE("hamiltonian: Problem 1 initial energy") {
  const auto& p = find_problem("p1-uniform");
  const ParticleState s{p.x0, p.v0, 0.0};
  // 0.0253 + 1/sqrt(1.01)
  CHECK(hamiltonian(p, s) == doctest::Approx(1.02033719020998913566527375374).epsilon(1e-15));
}

TEST_CASE("v_parallel: values and invariants") {
  const auto& p1 = find_problem("p1-uniform");
  const ParticleState s{p1.x0, p1.v0, 0.0};
  const Vec3 par = v_parallel(p1, 0.5, s);
  CHECK(par[0] == doctest::Approx(0.152).epsilon(1e-15));
  CHECK(par[1] == 0.0);
  CHECK(par[2] == doctest::Approx(0.076).epsilon(1e-15));

  Rng rng(41);
  for (const auto& p : catalog()) {
    for (int i = 0; i < 100; ++i) {
      const double eps = rng.log_uniform(1e-3, 1.0);
      const ParticleState st{rng.vec(-3.0, 3.0), rng.vec(-2.0, 2.0), 0.0};
      const Vec3 vp = v_parallel(p, eps, st);
      CHECK(norm(vp) <= norm(st.v) * (1 + 1e-15));
      const ParticleState again{st.x, vp, 0.0};
      CHECK(norm_inf(v_parallel(p, eps, again) - vp) <= 1e-15 * std::max(1.0, norm(vp)));
      const Vec3 b = scaled_B(p, eps, st.x);
      CHECK(norm(cross(vp, b)) <= 1e-14 * norm(b) * std::max(1.0, norm(vp)));
    }
  }

  MagneticField ramp{"ramp", [](const Vec3& y) { return Vec3{1.0 - y[0], 0.0, 0.0}; }, false};
  const ProblemSpec p =
      cpd::testing::variant(find_problem("p4-q1"), "ramp", ramp, sine_potential());
  CHECK_THROWS_AS(v_parallel(p, 1.0, {{1.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 0.0}), SingularityError);
}

TEST_CASE("error_report: zero for identical states, scales with perturbation") {
  const auto& p = find_problem("p2-q2");
  const ParticleState ref{{0.4, -0.3, 0.8}, {0.2, 0.5, -0.1}, 1.0};
  const ErrorReport zero = error_report(p, 0.1, ref, ref);
  CHECK(zero.errx == 0.0);
  CHECK(zero.errv_par == 0.0);
  CHECK(zero.errv_perp == 0.0);
  CHECK(zero.error == 0.0);

  const Vec3 dx{1e-6, 0.0, 0.0};
  const ParticleState shifted{ref.x + dx, ref.v, 1.0};
  const ErrorReport r = error_report(p, 0.1, shifted, ref);
  CHECK(r.errx == doctest::Approx(1e-6 / norm(ref.x)).epsilon(1e-9));
  CHECK(r.error == r.errx + r.errv_par);

  const ParticleState shifted2{ref.x + 2.0 * dx, ref.v, 1.0};
  const ErrorReport r2 = error_report(p, 0.1, shifted2, ref);
  CHECK(r2.errx / r.errx == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r2.errv_par / r.errv_par == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("error_report: uniform field, velocity-only perturbations") {
  const auto& p = find_problem("p1-uniform");
  const ParticleState ref{{0.0, 1.0, 0.1}, {0.09, 0.05, 0.2}, 0.0};
  // perturb along b: only the parallel part changes
  const Vec3 bhat = (1.0 / std::sqrt(1.25)) * Vec3{1.0, 0.0, 0.5};
  const ParticleState along{ref.x, ref.v + 1e-3 * bhat, 0.0};
  const ErrorReport r = error_report(p, 0.5, along, ref);
  CHECK(r.errx == 0.0);
  CHECK(r.errv_par == doctest::Approx(1e-3 / (0.19 / std::sqrt(1.25))).epsilon(1e-9));
  CHECK(r.errv_perp <= 1e-15);
}

TEST_CASE("error_report: refuses near-zero reference norms") {
  const auto& p = find_problem("p4-q1");
  const ParticleState origin{{0.0, 0.0, 0.0}, {0.2, 0.3, 0.4}, 0.0};
  CHECK_THROWS_AS(error_report(p, 0.1, origin, origin), SingularityError);

  // v perpendicular to B makes v_par vanish
  const auto& p1 = find_problem("p1-uniform");
  const ParticleState perp{{0.0, 1.0, 0.1}, {0.0, 1.0, 0.0}, 0.0};
  CHECK_THROWS_AS(error_report(p1, 0.1, perp, perp), SingularityError);
}

TEST_CASE("energy_series: relative drift per sample") {
  const auto& p = find_problem("p1-uniform");
  const ParticleState s0{p.x0, p.v0, 0.0};
  ParticleState s1 = s0;
  s1.v = 1.1 * s0.v;
  s1.t = 0.5;
  const std::vector<ParticleState> traj{s0, s1};
  const EnergySeries es = energy_series(p, traj);
  REQUIRE(es.e_H.size() == 2);
  CHECK(es.e_H[0] == 0.0);
  CHECK(es.times[1] == 0.5);
  const double h0 = hamiltonian(p, s0);
  CHECK(es.e_H[1] == doctest::Approx(0.21 * 0.5 * dot(s0.v, s0.v) / h0).epsilon(1e-12));
  CHECK(energy_series(p, std::vector<ParticleState>{}).e_H.empty());
}

TEST_CASE("loglog_slope: exact power laws and input checks") {
  const std::vector<double> xs{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * x * x);
  SlopeFit fit = loglog_slope(xs, ys);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-14));

  const std::vector<double> flat{7.0, 7.0, 7.0, 7.0};
  fit = loglog_slope(xs, flat);
  CHECK(fit.slope == 0.0);
  CHECK(fit.r2 == 1.0);

  const std::vector<double> noisy{1.0, 0.3, 0.2, 0.01};
  fit = loglog_slope(xs, noisy);
  CHECK(fit.r2 > 0.0);
  CHECK(fit.r2 < 1.0);

  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(loglog_slope(two, two), ArgumentError);
  const std::vector<double> bad{1.0, 0.0, 2.0, 3.0};
  CHECK_THROWS_AS(loglog_slope(xs, bad), ArgumentError);
  const std::vector<double> nan{1.0, std::numeric_limits<double>::quiet_NaN(), 2.0, 3.0};
  CHECK_THROWS_AS(loglog_slope(xs, nan), ArgumentError);
  CHECK_THROWS_AS(loglog_slope(flat, xs), ArgumentError);
  CHECK_THROWS_AS(loglog_slope(xs, std::vector<double>{1.0, 2.0, 3.0}), ArgumentError);
}
