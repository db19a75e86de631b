#pragma once

// Fixed-size 3-vector / 3x3 kernels and the two matrix functions the
// splitting schemes need: e^A and phi1(A) for skew-symmetric A.

#include <array>
#include <cmath>
#include <cstddef>

namespace cpd {

struct Vec3 {
  std::array<double, 3> e{0.0, 0.0, 0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double a, double b, double c) : e{a, b, c} {}

  constexpr double& operator[](std::size_t i) { return e[i]; }
  constexpr double operator[](std::size_t i) const { return e[i]; }

  constexpr Vec3& operator+=(const Vec3& o) {
    e[0] += o.e[0];
    e[1] += o.e[1];
    e[2] += o.e[2];
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    e[0] -= o.e[0];
    e[1] -= o.e[1];
    e[2] -= o.e[2];
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    e[0] *= s;
    e[1] *= s;
    e[2] *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Component order matches hat(b) * v row by row, so both give the same bits.
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
double norm_inf(const Vec3& a);
bool is_finite(const Vec3& a);

/// Dense row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> a{};

  constexpr double& operator()(std::size_t r, std::size_t c) { return a[3 * r + c]; }
  constexpr double operator()(std::size_t r, std::size_t c) const { return a[3 * r + c]; }

  static constexpr Mat3 identity() {
    Mat3 m;
    m.a = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    return m;
  }
  static constexpr Mat3 zero() { return Mat3{}; }

  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

Mat3 operator+(const Mat3& x, const Mat3& y);
Mat3 operator-(const Mat3& x, const Mat3& y);
Mat3 operator*(double s, const Mat3& x);
Mat3 operator*(const Mat3& x, const Mat3& y);
Vec3 operator*(const Mat3& m, const Vec3& v);
Mat3 transpose(const Mat3& m);
double det(const Mat3& m);
/// Max absolute row sum.
double norm_inf(const Mat3& m);
/// Largest absolute entry.
double max_abs(const Mat3& m);
bool is_finite(const Mat3& m);

/// Skew matrix with hat(b) * v == cross(v, b):
///   [[0, b3, -b2], [-b3, 0, b1], [b2, -b1, 0]]
Mat3 hat(const Vec3& b);

/// t * hat(b) written as angle * hat(axis) with angle >= 0.
struct SkewAngle {
  Vec3 axis{0.0, 0.0, 1.0};
  double angle = 0.0;
};

SkewAngle decompose(const Vec3& b, double t);

/// Below this angle the phi1 coefficients switch to their Taylor expansions.
inline constexpr double kSmallAngle = 1e-4;

/// Rodrigues: e^{theta K} = I + sin(theta) K + (1 - cos(theta)) K^2, K = hat(axis).
Mat3 rodrigues_exp(const SkewAngle& s);

/// phi1(theta K) = I + ((1 - cos theta)/theta) K + ((theta - sin theta)/theta) K^2.
Mat3 rodrigues_phi1(const SkewAngle& s);

/// Both matrix functions at once; they share the trig evaluations.
struct ExpPhi1 {
  Mat3 exp;
  Mat3 phi1;
};
ExpPhi1 rodrigues_exp_phi1(const SkewAngle& s);

// Independent brute-force oracles (scaling and squaring over a truncated
// Taylor series). Used by tests; not on any stepper path.
Mat3 series_exp_oracle(const Mat3& A);
Mat3 series_phi1_oracle(const Mat3& A);

}  // namespace cpd
