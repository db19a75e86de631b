#include "cpd/fields.hpp"

#include <cmath>
#include <sstream>

#include "cpd/errors.hpp"

namespace cpd {

namespace {

void guard_origin(const ElectricField& f, const Vec3& x) {
  if (f.coulomb && norm(x) < kCoulombGuard) {
    std::ostringstream os;
    os << "Coulomb potential '" << f.name << "' evaluated at the origin (|x| = " << norm(x)
       << ")";
    throw SingularityError(os.str());
  }
}

}  // namespace

MagneticField uniform_field(const Vec3& b) {
  return {"uniform", [b](const Vec3&) { return b; }, true};
}

MagneticField trig_field() {
  return {"trig",
          [](const Vec3& y) {
            return Vec3{1.0 - 0.5 * std::sin(y[1]), 1.0 + 0.5 * std::cos(y[2]),
                        1.0 + 0.5 * std::cos(y[0])};
          },
          false};
}

ElectricField coulomb_potential() {
  ElectricField f;
  f.name = "coulomb";
  f.coulomb = true;
  f.potential = [](const Vec3& x) { return 1.0 / norm(x); };
  // grad(1/r) = -x/r^3
  f.gradient = [](const Vec3& x) {
    const double r = norm(x);
    return (-1.0 / (r * r * r)) * x;
  };
  return f;
}

ElectricField quartic_potential() {
  ElectricField f;
  f.name = "quartic";
  f.potential = [](const Vec3& x) {
    const double a = x[0], b = x[1], c = x[2];
    return a * a * a - b * b * b + 0.2 * a * a * a * a + b * b * b * b + c * c * c * c;
  };
  f.gradient = [](const Vec3& x) {
    const double a = x[0], b = x[1], c = x[2];
    return Vec3{3.0 * a * a + 0.8 * a * a * a, -3.0 * b * b + 4.0 * b * b * b, 4.0 * c * c * c};
  };
  return f;
}

ElectricField sine_potential() {
  ElectricField f;
  f.name = "sine";
  f.potential = [](const Vec3& x) {
    return -std::sin(0.5 * x[0]) * std::sin(x[1]) * std::sin(x[2]);
  };
  f.gradient = [](const Vec3& x) {
    const double s1 = std::sin(0.5 * x[0]), c1 = std::cos(0.5 * x[0]);
    const double s2 = std::sin(x[1]), c2 = std::cos(x[1]);
    const double s3 = std::sin(x[2]), c3 = std::cos(x[2]);
    return Vec3{-0.5 * c1 * s2 * s3, -s1 * c2 * s3, -s1 * s2 * c3};
  };
  return f;
}

ElectricField zero_potential() {
  ElectricField f;
  f.name = "zero";
  f.potential = [](const Vec3&) { return 0.0; };
  f.gradient = [](const Vec3&) { return Vec3{}; };
  return f;
}

void validate(const ProblemSpec& spec) {
  if (!(spec.q >= 1.0 && spec.q <= 2.0)) {
    throw ArgumentError("problem '" + spec.name + "': q must lie in [1, 2]");
  }
  if (!(spec.t_end > 0.0) || !std::isfinite(spec.t_end)) {
    throw ArgumentError("problem '" + spec.name + "': t_end must be positive");
  }
  if (!is_finite(spec.x0) || !is_finite(spec.v0)) {
    throw ArgumentError("problem '" + spec.name + "': initial data must be finite");
  }
  if (!spec.magnetic.eval || !spec.electric.potential || !spec.electric.gradient) {
    throw ArgumentError("problem '" + spec.name + "': field evaluators missing");
  }
  if (!(norm(spec.magnetic.eval(Vec3{})) > 0.0)) {
    throw ArgumentError("problem '" + spec.name + "': requires |B(0)| > 0");
  }
}

Vec3 scaled_B(const ProblemSpec& spec, double eps, const Vec3& x) {
  if (spec.magnetic.uniform) return spec.magnetic.eval(x);
  return spec.magnetic.eval(std::pow(eps, spec.q) * x);
}

Vec3 e_field(const ProblemSpec& spec, const Vec3& x) {
  guard_origin(spec.electric, x);
  return -spec.electric.gradient(x);
}

double potential(const ProblemSpec& spec, const Vec3& x) {
  guard_origin(spec.electric, x);
  return spec.electric.potential(x);
}

const std::vector<ProblemSpec>& catalog() {
  static const std::vector<ProblemSpec> problems = [] {
    const Vec3 x0{1.0 / 6.0, 1.0 / 8.0, 1.0 / 4.0};
    const Vec3 v0{1.0 / 5.0, 1.0 / 3.0, 1.0 / 2.0};
    std::vector<ProblemSpec> p;
    // q is irrelevant for a constant field; 2 is recorded for bookkeeping.
    p.push_back({"p1-uniform", uniform_field({1.0, 0.0, 0.5}), coulomb_potential(), 2.0,
                 {0.0, 1.0, 0.1}, {0.09, 0.05, 0.2}, 1.0});
    p.push_back({"p2-q2", trig_field(), coulomb_potential(), 2.0, x0, v0, 1.0});
    p.push_back({"p3-q15", trig_field(), quartic_potential(), 1.5, x0, v0, 1.0});
    p.push_back({"p4-q1", trig_field(), sine_potential(), 1.0, x0, v0, 1.0});
    return p;
  }();
  return problems;
}

const ProblemSpec& find_problem(std::string_view name) {
  for (const auto& p : catalog()) {
    if (p.name == name) return p;
  }
  throw ArgumentError("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names;
  for (const auto& p : catalog()) names.push_back(p.name);
  return names;
}

}  // namespace cpd
