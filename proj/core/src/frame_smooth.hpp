#pragma once

// Smooth surrogate of the m x 2 real frame condition number and a small BFGS
// driver, used to bring the frame optimizer close to a minimizer before the
// exact (nonsmooth) objective is polished by pattern search.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace prstab::detail {

// Smoothed log-condition number of an m x 2 real frame in Cartesian row
// coordinates; row 0 is pinned to (1, 0). Eigenvalue kinks are regularized by
// eps * trace and the minimum over splits by a soft-min of sharpness kappa.
class SmoothFrameObjective {
 public:
  SmoothFrameObjective(std::size_t m, double kappa, double eps) : m_(m), kappa_(kappa), eps_(eps) {
    const std::size_t n = std::size_t{1} << (m - 1);
    s_.resize(n);
    c_.resize(n);
  }

  double operator()(const std::vector<double>& x, std::vector<double>* grad) {
    const std::size_t m = m_;
    std::vector<double> u(m), v(m);
    u[0] = 1.0;
    v[0] = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
      u[k] = x[2 * (k - 1)];
      v[k] = x[2 * (k - 1) + 1];
    }
    double P = 0.0, Q = 0.0, R = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      P += u[k] * u[k];
      Q += u[k] * v[k];
      R += v[k] * v[k];
    }
    const double T = P + R;
    const double e2t2 = eps_ * eps_ * T * T;

    const std::size_t n = s_.size();
    double p = 0.0, q = 0.0, r = 0.0;
    std::uint32_t mask = 0;
    double smin = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < n; ++g) {
      if (g > 0) {
        const int bit = std::countr_zero(static_cast<std::uint32_t>(g));
        const double sign = (mask >> bit) & 1u ? -1.0 : 1.0;
        mask ^= 1u << bit;
        p += sign * u[bit] * u[bit];
        q += sign * u[bit] * v[bit];
        r += sign * v[bit] * v[bit];
      }
      const double pj = P - p, qj = Q - q, rj = R - r;
      const double di = std::sqrt((p - r) * (p - r) + 4.0 * q * q + e2t2);
      const double dj = std::sqrt((pj - rj) * (pj - rj) + 4.0 * qj * qj + e2t2);
      // Shifted so the empty split contributes 0 and rank-1 splits stay >= 0.
      s_[g] = 0.5 * (p + r - di) + 0.5 * (pj + rj - dj) + eps_ * T;
      smin = std::min(smin, s_[g]);
      if (grad) {
        auto& c = c_[g];
        c.mask = mask;
        c.i = {0.5 * (1.0 - (p - r) / di), -2.0 * q / di, 0.5 * (1.0 + (p - r) / di)};
        c.j = {0.5 * (1.0 - (pj - rj) / dj), -2.0 * qj / dj, 0.5 * (1.0 + (pj - rj) / dj)};
        c.t = eps_ - eps_ * eps_ * T * (0.5 / di + 0.5 / dj);
      }
    }
    double z = 0.0;
    for (std::size_t g = 0; g < n; ++g) z += std::exp(-kappa_ * (s_[g] - smin) / T);
    // Soft-min against the mean, so smin <= lsq <= mean(s).
    const double lsq = smin - T / kappa_ * std::log(z / static_cast<double>(n));
    const double dg = std::sqrt((P - R) * (P - R) + 4.0 * Q * Q + e2t2);
    const double usq = 0.5 * (T + dg);
    if (!(lsq > 0.0)) {
      if (grad) grad->assign(x.size(), 0.0);
      return std::numeric_limits<double>::infinity();
    }
    const double value = std::log(usq) - std::log(lsq);
    if (!grad) return value;

    // d(lsq) = (F - sum w y + sum w dS/dT) dT + sum w dS/dG
    const double f_norm = lsq / T;
    double wy = 0.0, wt = 0.0;
    std::vector<std::array<double, 3>> acc(m, {0.0, 0.0, 0.0});
    std::array<double, 3> acc_j{0.0, 0.0, 0.0};
    for (std::size_t g = 0; g < n; ++g) {
      const double w = std::exp(-kappa_ * (s_[g] - smin) / T) / z;
      if (w < 1e-300) continue;
      const auto& c = c_[g];
      wy += w * s_[g] / T;
      wt += w * c.t;
      for (int e = 0; e < 3; ++e) acc_j[e] += w * c.j[e];
      for (std::uint32_t bits = c.mask; bits != 0; bits &= bits - 1) {
        const int k = std::countr_zero(bits);
        for (int e = 0; e < 3; ++e) acc[k][e] += w * (c.i[e] - c.j[e]);
      }
    }
    const double lt = f_norm - wy + wt;
    const std::array<double, 3> cu{0.5 * (1.0 + (P - R) / dg), 2.0 * Q / dg, 0.5 * (1.0 - (P - R) / dg)};
    const double ut = eps_ * eps_ * T / (2.0 * dg);
    grad->assign(x.size(), 0.0);
    for (std::size_t k = 1; k < m; ++k) {
      std::array<double, 3> a = acc[k];
      for (int e = 0; e < 3; ++e) a[e] += acc_j[e];
      const double dl_du = 2.0 * u[k] * a[0] + v[k] * a[1] + 2.0 * u[k] * lt;
      const double dl_dv = u[k] * a[1] + 2.0 * v[k] * a[2] + 2.0 * v[k] * lt;
      const double du_du = 2.0 * u[k] * cu[0] + v[k] * cu[1] + 2.0 * u[k] * ut;
      const double du_dv = u[k] * cu[1] + 2.0 * v[k] * cu[2] + 2.0 * v[k] * ut;
      (*grad)[2 * (k - 1)] = du_du / usq - dl_du / lsq;
      (*grad)[2 * (k - 1) + 1] = du_dv / usq - dl_dv / lsq;
    }
    return value;
  }

 private:
  struct Coeffs {
    std::uint32_t mask = 0;
    std::array<double, 3> i{}, j{};
    double t = 0.0;
  };
  std::size_t m_;
  double kappa_, eps_;
  std::vector<double> s_;
  std::vector<Coeffs> c_;
};

constexpr std::array<std::pair<double, double>, 6> kSmoothingSchedule{
    {{30.0, 1e-1}, {100.0, 3e-2}, {300.0, 1e-2}, {1e3, 3e-3}, {3e3, 1e-3}, {1e4, 3e-4}}};

// BFGS with Armijo backtracking; returns evaluations used.
template <typename F>
long bfgs_minimize(F& f, std::vector<double>& x, int max_iters, long max_evals) {
  const std::size_t n = x.size();
  std::vector<double> g, g_new, x_new(n), dir(n), s(n), y(n);
  double fx = f(x, &g);
  long evals = 1;
  if (!std::isfinite(fx)) return evals;
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  for (int it = 0; it < max_iters && evals < max_evals; ++it) {
    double gnorm = 0.0;
    for (const double gi : g) gnorm = std::max(gnorm, std::abs(gi));
    if (gnorm < 1e-11) break;
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) dir[i] -= h[i * n + j] * g[j];
      slope += dir[i] * g[i];
    }
    if (slope >= 0.0) {
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        h[i * n + i] = 1.0;
        dir[i] = -g[i];
      }
      slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
    }
    double step = 1.0, f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40 && evals < max_evals; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = f(x_new, &g_new);
      ++evals;
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
      sy += s[i] * y[i];
    }
    const double improvement = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (sy > 1e-14) {
      std::vector<double> hy(n, 0.0);
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * y[j];
        yhy += y[i] * hy[i];
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
      }
    }
    if (improvement < 1e-15 * (1.0 + std::abs(fx))) break;
  }
  return evals;
}


}  // namespace prstab::detail
