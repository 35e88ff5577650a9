#pragma once

// Derivative-free local search shared by the numeric Lipschitz estimator and the
// frame optimizer. Both objectives are only piecewise smooth, so the poll set is
// a randomly rotated coordinate frame, redrawn after every unsuccessful poll.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "prstab/rng.hpp"

namespace prstab::detail {

struct SearchResult {
  std::vector<double> point;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

struct SearchOptions {
  double initial_step = 0.25;
  double min_step = 1e-10;
  long max_evaluations = 20000;
  int max_iterations = 4000;
  int polls_before_shrink = 1;  // rotated bases tried before halving the step
};

inline std::vector<double> random_rotation(std::size_t n, CounterRng& rng) {
  std::vector<double> q(n * n);
  for (auto& v : q) v = rng.normal();
  // Modified Gram-Schmidt on the rows.
  for (std::size_t i = 0; i < n; ++i) {
    double* qi = &q[i * n];
    for (std::size_t j = 0; j < i; ++j) {
      const double* qj = &q[j * n];
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += qi[k] * qj[k];
      for (std::size_t k = 0; k < n; ++k) qi[k] -= dot * qj[k];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm += qi[k] * qi[k];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      for (std::size_t k = 0; k < n; ++k) qi[k] = (k == i) ? 1.0 : 0.0;
    } else {
      for (std::size_t k = 0; k < n; ++k) qi[k] /= norm;
    }
  }
  return q;
}

/// Pattern search with opportunistic polling. `objective` maps a point to a
/// value; `recenter` may project an accepted point back onto its chart.
template <typename Objective, typename Recenter>
SearchResult pattern_search(Objective&& objective, std::vector<double> start, const SearchOptions& opts,
                            CounterRng& rng, Recenter&& recenter) {
  const std::size_t n = start.size();
  SearchResult res;
  res.point = std::move(start);
  res.value = objective(res.point);
  res.evaluations = 1;
  double step = opts.initial_step;
  int failures = 0;
  auto basis = random_rotation(n, rng);
  std::vector<double> trial(n);

  while (res.iterations < opts.max_iterations && res.evaluations < opts.max_evaluations) {
    if (step < opts.min_step) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    bool improved = false;
    for (std::size_t k = 0; k < n && !improved; ++k) {
      for (const double sign : {1.0, -1.0}) {
        for (std::size_t j = 0; j < n; ++j) trial[j] = res.point[j] + sign * step * basis[k * n + j];
        const double v = objective(trial);
        ++res.evaluations;
        if (v < res.value) {
          res.value = v;
          res.point = trial;
          recenter(res.point);
          improved = true;
          break;
        }
      }
    }
    if (improved) {
      step = std::min(step * 2.0, opts.initial_step);
      failures = 0;
    } else {
      if (++failures >= opts.polls_before_shrink) {
        step *= 0.5;
        failures = 0;
      }
      basis = random_rotation(n, rng);
    }
  }
  if (step < opts.min_step) res.converged = true;
  return res;
}

template <typename Objective>
SearchResult pattern_search(Objective&& objective, std::vector<double> start, const SearchOptions& opts,
                            CounterRng& rng) {
  return pattern_search(std::forward<Objective>(objective), std::move(start), opts, rng,
                        [](std::vector<double>&) {});
}

/// Golden-section minimization of a scalar function on [lo, hi].
template <typename Objective>
std::pair<double, double> golden_section(Objective&& f, double lo, double hi, double tol, int max_iters,
                                         long& evaluations) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  evaluations += 2;
  for (int it = 0; it < max_iters && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evaluations;
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace prstab::detail
