#pragma once

// Reference computations used by the tests. They share no code with the
// library: linear algebra goes through Eigen, integrals through Boost
// quadrature, and combinatorial minima are brute force over all 2^m subsets.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "prstab/linalg.hpp"

namespace oracle {

using prstab::Field;
using prstab::MeasurementMatrix;
using prstab::Vector;

inline Eigen::MatrixXcd to_eigen(const MeasurementMatrix& a) {
  Eigen::MatrixXcd out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) out(i, k) = a(i, k);
  return out;
}

inline Eigen::VectorXcd to_eigen(const Vector& v) {
  Eigen::VectorXcd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
  return out;
}

inline Vector from_eigen(const Eigen::VectorXcd& v, Field field) {
  std::vector<std::complex<double>> e(v.data(), v.data() + v.size());
  if (field == Field::Real)
    for (auto& z : e) z = z.real();
  return Vector(field, std::move(e));
}

inline double spectral_norm(const MeasurementMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a));
  return svd.singularValues()(0);
}

/// Top right singular vector of A (real part taken for real matrices).
inline Vector top_right_singular_vector(const MeasurementMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a), Eigen::ComputeFullV);
  return from_eigen(svd.matrixV().col(0), a.field());
}

inline double lambda_min_rows(const Eigen::MatrixXd& a, unsigned long mask) {
  const long d = a.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  for (long i = 0; i < a.rows(); ++i)
    if ((mask >> i) & 1ul) g += a.row(i).transpose() * a.row(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(0));
}

/// min over all subsets I of sqrt(lmin(A_I) + lmin(A_Ic)) (combine = sum)
/// or max(sqrt(lmin(A_I)), sqrt(lmin(A_Ic))) (combine = max); brute force.
inline double subset_min(const MeasurementMatrix& a, bool use_max) {
  const Eigen::MatrixXd ar = to_eigen(a).real();
  const long m = ar.rows();
  const unsigned long full = (1ul << m) - 1;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask <= full; ++mask) {
    const double l1 = lambda_min_rows(ar, mask);
    const double l2 = lambda_min_rows(ar, full & ~mask);
    const double v = use_max ? std::max(std::sqrt(l1), std::sqrt(l2)) : std::sqrt(l1 + l2);
    best = std::min(best, v);
  }
  return best;
}

inline double exact_lower_real(const MeasurementMatrix& a) { return subset_min(a, false); }
inline double sigma_real(const MeasurementMatrix& a) { return subset_min(a, true); }

/// dist(x, y) = min_{|c| = 1} ||x - c y||, by a phase scan plus golden refinement.
inline double dist_scan(const Vector& x, const Vector& y) {
  const auto xe = to_eigen(x);
  const auto ye = to_eigen(y);
  if (x.field() == Field::Real) return std::min((xe - ye).norm(), (xe + ye).norm());
  auto f = [&](double phi) { return (xe - std::polar(1.0, phi) * ye).norm(); };
  const int n = 720;
  int best = 0;
  for (int k = 1; k < n; ++k)
    if (f(2 * std::numbers::pi * k / n) < f(2 * std::numbers::pi * best / n)) best = k;
  double lo = 2 * std::numbers::pi * (best - 1) / n, hi = 2 * std::numbers::pi * (best + 1) / n;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (f(m1) < f(m2))
      hi = m2;
    else
      lo = m1;
  }
  return f(0.5 * (lo + hi));
}

/// || |Ax| - |Ay| ||_2 / dist(x, y) through Eigen.
inline double ratio(const MeasurementMatrix& a, const Vector& x, const Vector& y) {
  const auto ae = to_eigen(a);
  const Eigen::VectorXd ax = (ae * to_eigen(x)).cwiseAbs();
  const Eigen::VectorXd ay = (ae * to_eigen(y)).cwiseAbs();
  return (ax - ay).norm() / dist_scan(x, y);
}

/// E|<y,a><a,x>| for a ~ N(0, I_2): in polar coordinates the radial part gives
/// E rho^2 = 2 and the angular part is integrated numerically.
inline double kernel_real(double theta) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double phi) { return std::abs(std::cos(phi) * std::cos(phi - theta)); };
  // Split at the zeros of the integrand so each panel is smooth.
  std::vector<double> cuts{0.0, 2 * std::numbers::pi};
  for (double z : {std::numbers::pi / 2, 3 * std::numbers::pi / 2, theta + std::numbers::pi / 2,
                   theta + 3 * std::numbers::pi / 2}) {
    z = std::fmod(z, 2 * std::numbers::pi);
    if (z > 0 && z < 2 * std::numbers::pi) cuts.push_back(z);
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) sum += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-14);
  return 2.0 * sum / (2 * std::numbers::pi);
}

/// Complex counterpart with a = (r1 e^{ia1}, r2 e^{ia2}), |a_k|^2 ~ Exp(1):
/// E r1 |c r1 + s r2 e^{ig}|. With r1 = R cos w, r2 = R sin w the radial factor
/// integrates to 1, leaving a 2-D integral over (w, g).
inline double kernel_complex(double theta) {
  using boost::math::quadrature::gauss_kronrod;
  const double c = std::cos(theta), s = std::sin(theta);
  auto inner = [&](double w) {
    const double cw = std::cos(w), sw = std::sin(w);
    auto g = [&](double gam) {
      const double arg = c * c * cw * cw + s * s * sw * sw + 2 * c * s * cw * sw * std::cos(gam);
      return std::sqrt(std::max(0.0, arg));
    };
    // symmetric in gamma about pi; the only kink sits at gamma = pi
    const double half = gauss_kronrod<double, 61>::integrate(g, 0.0, std::numbers::pi, 12, 1e-13);
    return 4.0 * cw * sw * cw * 2.0 * half / (2 * std::numbers::pi);
  };
  const double w_kink = std::atan2(c, s);  // where c cos w = s sin w
  double total = 0.0;
  std::vector<double> cuts{0.0, std::numbers::pi / 2};
  if (w_kink > 0 && w_kink < std::numbers::pi / 2) cuts.insert(cuts.begin() + 1, w_kink);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += gauss_kronrod<double, 61>::integrate(inner, cuts[i], cuts[i + 1], 12, 1e-13);
  return total;
}

/// Closed-form lower bound on beta for real m x d matrices, written out here.
inline double md_bound(int m) {
  return 1.0 / std::sqrt(1.0 - 1.0 / (m * std::sin(std::numbers::pi / (2.0 * m))));
}

/// beta of the harmonic frame E_m from its two closed forms.
inline double harmonic_beta(int m) {
  const double pi = std::numbers::pi;
  if (m % 2 == 0) return 1.0 / std::sqrt(1.0 - 2.0 / (m * std::sin(pi / m)));
  return 1.0 / std::sqrt(1.0 - 1.0 / (m * std::sin(pi / (2.0 * m))));
}

inline MeasurementMatrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t d, Field field) {
  std::normal_distribution<double> n01;
  std::vector<std::complex<double>> e(m * d);
  for (auto& z : e) z = field == Field::Real ? std::complex<double>(n01(rng)) : std::complex<double>(n01(rng), n01(rng));
  return MeasurementMatrix(field, m, d, std::move(e));
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t d, Field field) {
  std::normal_distribution<double> n01;
  std::vector<std::complex<double>> e(d);
  for (auto& z : e) z = field == Field::Real ? std::complex<double>(n01(rng)) : std::complex<double>(n01(rng), n01(rng));
  return Vector(field, std::move(e));
}

}  // namespace oracle
