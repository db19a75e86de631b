#include "cpd/smallmat.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cpd {

double norm_inf(const Vec3& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

bool is_finite(const Vec3& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

Mat3 operator+(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

Mat3 operator-(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

Mat3 operator*(double s, const Mat3& x) {
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
  return r;
}

Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
    }
  }
  return r;
}

Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2],
          m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
          m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

Mat3 transpose(const Mat3& m) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = m(j, i);
  return r;
}

double det(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double norm_inf(const Mat3& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    best = std::max(best, std::abs(m(i, 0)) + std::abs(m(i, 1)) + std::abs(m(i, 2)));
  }
  return best;
}

double max_abs(const Mat3& m) {
  double best = 0.0;
  for (double x : m.a) best = std::max(best, std::abs(x));
  return best;
}

bool is_finite(const Mat3& m) {
  return std::all_of(m.a.begin(), m.a.end(), [](double x) { return std::isfinite(x); });
}

Mat3 hat(const Vec3& b) {
  Mat3 m;
  m.a = {0.0, b[2], -b[1], -b[2], 0.0, b[0], b[1], -b[0], 0.0};
  return m;
}

SkewAngle decompose(const Vec3& b, double t) {
  const double nb = norm(b);
  SkewAngle s;
  if (nb == 0.0 || t == 0.0) return s;
  s.angle = std::abs(t) * nb;
  const double scale = (t < 0.0 ? -1.0 : 1.0) / nb;
  s.axis = scale * b;
  return s;
}

namespace {

// Coefficients c1, c2 of I + c1 K + c2 K^2 for e^{theta K} and phi1(theta K).
struct RodriguesCoeffs {
  double exp_k;
  double exp_k2;
  double phi_k;
  double phi_k2;
};

RodriguesCoeffs coefficients(double theta) {
  const double sn = std::sin(theta);
  const double half = std::sin(0.5 * theta);
  const double one_minus_cos = 2.0 * half * half;
  RodriguesCoeffs c{sn, one_minus_cos, 0.0, 0.0};
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    // (1 - cos t)/t and (t - sin t)/t, four terms each
    c.phi_k = theta * (1.0 / 2.0 - t2 * (1.0 / 24.0 - t2 * (1.0 / 720.0 - t2 / 40320.0)));
    c.phi_k2 = t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 / 362880.0)));
  } else {
    c.phi_k = one_minus_cos / theta;
    c.phi_k2 = (theta - sn) / theta;
  }
  return c;
}

Mat3 combine(const Mat3& k, const Mat3& k2, double ck, double ck2) {
  Mat3 r = Mat3::identity();
  for (std::size_t i = 0; i < 9; ++i) r.a[i] += ck * k.a[i] + ck2 * k2.a[i];
  return r;
}

// e^M for a small dense matrix in long double: scale so the norm is below
// 1/2, sum 30 Taylor terms (remainder < 0.5^31/31! relative), square back.
template <std::size_t N>
using LMat = std::array<long double, N * N>;

template <std::size_t N>
LMat<N> lmul(const LMat<N>& x, const LMat<N>& y) {
  LMat<N> r{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      const long double xik = x[i * N + k];
      for (std::size_t j = 0; j < N; ++j) r[i * N + j] += xik * y[k * N + j];
    }
  return r;
}

template <std::size_t N>
LMat<N> expm_scaling_squaring(LMat<N> m) {
  long double nrm = 0.0L;
  for (std::size_t i = 0; i < N; ++i) {
    long double row = 0.0L;
    for (std::size_t j = 0; j < N; ++j) row += std::fabs(m[i * N + j]);
    nrm = std::max(nrm, row);
  }
  int squarings = 0;
  while (nrm > 0.5L) {
    nrm *= 0.5L;
    ++squarings;
  }
  const long double scale = std::ldexp(1.0L, -squarings);
  for (auto& x : m) x *= scale;

  LMat<N> sum{};
  LMat<N> term{};
  for (std::size_t i = 0; i < N; ++i) {
    sum[i * N + i] = 1.0L;
    term[i * N + i] = 1.0L;
  }
  for (int k = 1; k <= 30; ++k) {
    term = lmul<N>(term, m);
    for (auto& x : term) x /= static_cast<long double>(k);
    for (std::size_t i = 0; i < N * N; ++i) sum[i] += term[i];
  }
  for (int i = 0; i < squarings; ++i) sum = lmul<N>(sum, sum);
  return sum;
}

}  // namespace

ExpPhi1 rodrigues_exp_phi1(const SkewAngle& s) {
  if (s.angle == 0.0) return {Mat3::identity(), Mat3::identity()};
  const Mat3 k = hat(s.axis);
  const Mat3 k2 = k * k;
  const RodriguesCoeffs c = coefficients(s.angle);
  return {combine(k, k2, c.exp_k, c.exp_k2), combine(k, k2, c.phi_k, c.phi_k2)};
}

Mat3 rodrigues_exp(const SkewAngle& s) { return rodrigues_exp_phi1(s).exp; }

Mat3 rodrigues_phi1(const SkewAngle& s) { return rodrigues_exp_phi1(s).phi1; }

Mat3 series_exp_oracle(const Mat3& A) {
  LMat<3> m{};
  for (std::size_t i = 0; i < 9; ++i) m[i] = A.a[i];
  const LMat<3> e = expm_scaling_squaring<3>(m);
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = static_cast<double>(e[i]);
  return r;
}

// exp([[A, I], [0, 0]]) = [[e^A, phi1(A)], [0, I]]; the upper-right block is
// the full series sum_k A^k/(k+1)! without forming it term by term at large
// norm, where the alternating terms would cancel catastrophically.
Mat3 series_phi1_oracle(const Mat3& A) {
  LMat<6> m{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m[i * 6 + j] = A(i, j);
    m[i * 6 + 3 + i] = 1.0L;
  }
  const LMat<6> e = expm_scaling_squaring<6>(m);
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = static_cast<double>(e[i * 6 + 3 + j]);
  return r;
}

}  // namespace cpd
