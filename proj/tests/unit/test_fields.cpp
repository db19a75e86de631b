#include <doctest.h>

#include <cmath>

#include "cpd/errors.hpp"
#include "cpd/fields.hpp"
#include "test_support.hpp"

using namespace cpd;
using cpd::testing::Rng;

TEST_CASE("catalog: four problems with stable ids and initial data") {
  const auto& cat = catalog();
  REQUIRE(cat.size() == 4);
  CHECK(cat[0].name == "p1-uniform");
  CHECK(cat[1].name == "p2-q2");
  CHECK(cat[2].name == "p3-q15");
  CHECK(cat[3].name == "p4-q1");

  CHECK(cat[0].q == 2.0);
  CHECK(cat[0].magnetic.uniform);
  CHECK(cat[1].q == 2.0);
  CHECK(cat[2].q == 1.5);
  CHECK(cat[3].q == 1.0);

  CHECK(cat[0].x0 == Vec3{0.0, 1.0, 0.1});
  CHECK(cat[0].v0 == Vec3{0.09, 0.05, 0.2});
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(cat[i].x0 == Vec3{1.0 / 6, 1.0 / 8, 1.0 / 4});
    CHECK(cat[i].v0 == Vec3{1.0 / 5, 1.0 / 3, 1.0 / 2});
  }
  for (const auto& p : cat) {
    CHECK(p.t_end == 1.0);
    CHECK_NOTHROW(validate(p));
  }
  CHECK(problem_names() == std::vector<std::string>{"p1-uniform", "p2-q2", "p3-q15", "p4-q1"});
  CHECK_THROWS_AS(find_problem("p5"), ArgumentError);
}

TEST_CASE("scaled_B: catalog values") {
  const auto& p1 = find_problem("p1-uniform");
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    CHECK(scaled_B(p1, rng.uniform(1e-3, 1.0), rng.vec(-5, 5)) == Vec3{1.0, 0.0, 0.5});
  }
  CHECK(scaled_B(find_problem("p2-q2"), 0.3, Vec3{}) == Vec3{1.0, 1.5, 1.5});

  const Vec3 b4 = scaled_B(find_problem("p4-q1"), 1e-12, {1.0 / 6, 1.0 / 8, 1.0 / 4});
  CHECK(norm_inf(b4 - Vec3{1.0, 1.5, 1.5}) <= 1e-12);

  // B(eps^q x) with the trig field, evaluated by hand
  const Vec3 x{0.7, -1.3, 2.1};
  const double s = std::pow(0.5, 1.5);
  const Vec3 b3 = scaled_B(find_problem("p3-q15"), 0.5, x);
  CHECK(b3[0] == doctest::Approx(1.0 - 0.5 * std::sin(s * x[1])).epsilon(1e-15));
  CHECK(b3[1] == doctest::Approx(1.0 + 0.5 * std::cos(s * x[2])).epsilon(1e-15));
  CHECK(b3[2] == doctest::Approx(1.0 + 0.5 * std::cos(s * x[0])).epsilon(1e-15));
}

TEST_CASE("|B(0)| is positive for every catalog problem") {
  CHECK(norm(find_problem("p1-uniform").magnetic.eval(Vec3{})) ==
        doctest::Approx(std::sqrt(1.25)));
  for (const char* name : {"p2-q2", "p3-q15", "p4-q1"}) {
    CHECK(norm(find_problem(name).magnetic.eval(Vec3{})) == doctest::Approx(std::sqrt(5.5)));
  }
}

TEST_CASE("e_field: analytic values") {
  // x/|x|^3 at (0, 1, 0.1); 30-digit reference value
  const Vec3 e1 = e_field(find_problem("p1-uniform"), {0.0, 1.0, 0.1});
  CHECK(e1[0] == 0.0);
  CHECK(e1[1] == doctest::Approx(0.985185336841573401648785894790742).epsilon(1e-15));
  CHECK(e1[2] == doctest::Approx(0.0985185336841573401648785894790742).epsilon(1e-15));

  CHECK(e_field(find_problem("p3-q15"), Vec3{}) == Vec3{0.0, 0.0, 0.0});

  const Vec3 x{0.0, 0.4, -1.1};
  const Vec3 e4 = e_field(find_problem("p4-q1"), x);
  CHECK(e4[0] == doctest::Approx(0.5 * std::sin(0.4) * std::sin(-1.1)).epsilon(1e-15));
  CHECK(e4[1] == 0.0);
  CHECK(e4[2] == 0.0);
}

TEST_CASE("e_field: Coulomb singularity is an error, not Inf") {
  for (const char* name : {"p1-uniform", "p2-q2"}) {
    const auto& p = find_problem(name);
    CHECK_THROWS_AS(e_field(p, Vec3{}), SingularityError);
    CHECK_THROWS_AS(potential(p, Vec3{1e-13, 0.0, 0.0}), SingularityError);
    CHECK_NOTHROW(e_field(p, Vec3{1e-6, 0.0, 0.0}));
  }
  CHECK_NOTHROW(e_field(find_problem("p4-q1"), Vec3{}));
}

TEST_CASE("property: analytic gradients match central differences") {
  Rng rng(22);
  for (const auto& p : catalog()) {
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = p.electric.coulomb ? rng.position(-2.0, 2.0, 0.1) : rng.vec(-2.0, 2.0);
      const Vec3 fd = cpd::testing::central_gradient(p.electric.potential, x, 1e-5);
      CAPTURE(p.name);
      CHECK(norm_inf(fd + e_field(p, x)) <= 1e-6);
    }
  }
}

TEST_CASE("validate: rejects bad problem data") {
  ProblemSpec p = find_problem("p2-q2");
  p.q = 2.5;
  CHECK_THROWS_AS(validate(p), ArgumentError);
  p = find_problem("p2-q2");
  p.t_end = 0.0;
  CHECK_THROWS_AS(validate(p), ArgumentError);
  p = find_problem("p2-q2");
  p.magnetic = uniform_field({0.0, 0.0, 0.0});
  CHECK_THROWS_AS(validate(p), ArgumentError);
}
