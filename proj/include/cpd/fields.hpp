#pragma once

// Electromagnetic environment under maximal-ordering scaling: the particle
// sees B(eps^q x)/eps and E(x) = -grad U(x).

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/smallmat.hpp"

namespace cpd {

/// Unscaled magnetic field y -> B(y). The caller supplies y = eps^q x.
struct MagneticField {
  std::string name;
  std::function<Vec3(const Vec3&)> eval;
  bool uniform = false;
};

/// Scalar potential with its analytic gradient.
struct ElectricField {
  std::string name;
  std::function<double(const Vec3&)> potential;
  std::function<Vec3(const Vec3&)> gradient;
  /// Potential has a 1/|x| singularity at the origin.
  bool coulomb = false;
};

struct ProblemSpec {
  std::string name;
  MagneticField magnetic;
  ElectricField electric;
  double q = 2.0;
  Vec3 x0;
  Vec3 v0;
  double t_end = 1.0;
};

/// Checks q in [1,2], t_end > 0, finite initial data and |B(0)| > 0.
void validate(const ProblemSpec& spec);

/// B(eps^q x), without the 1/eps factor.
Vec3 scaled_B(const ProblemSpec& spec, double eps, const Vec3& x);

/// -grad U(x). Throws SingularityError for Coulomb potentials at |x| < 1e-12.
Vec3 e_field(const ProblemSpec& spec, const Vec3& x);

/// U(x), same singularity guard as e_field.
double potential(const ProblemSpec& spec, const Vec3& x);

inline constexpr double kCoulombGuard = 1e-12;

/// The four built-in test problems, in order p1-uniform, p2-q2, p3-q15, p4-q1.
const std::vector<ProblemSpec>& catalog();

/// Catalog lookup by CLI identifier; throws ArgumentError if unknown.
const ProblemSpec& find_problem(std::string_view name);

std::vector<std::string> problem_names();

// Building blocks used by the catalog, exposed for custom problems.
MagneticField uniform_field(const Vec3& b);
/// (1 - sin(y2)/2, 1 + cos(y3)/2, 1 + cos(y1)/2)
MagneticField trig_field();
ElectricField coulomb_potential();
/// x1^3 - x2^3 + x1^4/5 + x2^4 + x3^4
ElectricField quartic_potential();
/// -sin(x1/2) sin(x2) sin(x3)
ElectricField sine_potential();
ElectricField zero_potential();

}  // namespace cpd
