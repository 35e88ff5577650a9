#pragma once

#include <cstdint>
#include <vector>

#include "prstab/linalg.hpp"

namespace prstab {

/// i.i.d. rows: N(0, 1) entries (real) or N(0, 1/2) + i N(0, 1/2) (complex).
/// Draws come from stream `stream` of `seed`.
MeasurementMatrix sample_gaussian_matrix(std::size_t m, std::size_t d, Field field, std::uint64_t seed,
                                         std::uint64_t stream = 0);

/// Standard Gaussian vector with the same per-entry convention.
Vector sample_gaussian_vector(std::size_t d, Field field, std::uint64_t seed, std::uint64_t stream = 0);

/// E|<y, a><a, x>| for unit real x, y at angle theta:
/// (2/pi)(sin theta + (pi/2 - theta) cos theta). Angles outside [0, pi/2] are
/// reduced to arccos|cos theta|.
double kernel_expectation_real(double theta);

struct SphereQuadrature {
  int n_polar = 128;
  int n_azimuth = 256;
};

/// Complex counterpart, as the surface integral
/// (1/4pi) \iint_{S^2} sqrt(1 + x cos t - y sin t) sqrt(1 + x cos t + y sin t) dS.
double kernel_expectation_complex(double theta, const SphereQuadrature& quad = {});

/// Right-hand side 1 - dist^2 / (2 beta0^2) with dist^2 = 2 - 2 cos theta.
double kernel_expectation_bound(Field field, double theta);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Sample mean of |<y, a><a, x>| over n Gaussian draws of a, with x = e_1 and
/// y = cos theta e_1 + sin theta e_2.
MonteCarloEstimate mc_kernel_expectation(Field field, double theta, long n, std::uint64_t seed,
                                         unsigned threads = 0);

struct GaussianExperiment {
  Field field = Field::Real;
  std::size_t d = 2;
  std::vector<std::size_t> m_values;
  int trials = 1;
  std::uint64_t seed = 0;
  int restarts = 0;  // 0 selects max(32, 8 d)
  int max_iters = 4000;
  unsigned threads = 0;
};

struct BetaEstimateRow {
  std::size_t m = 0;
  int trial = 0;
  double upper = 0.0;
  double lower = 0.0;
  double beta = 0.0;
  double beta0 = 0.0;
  double excess = 0.0;
};

/// One row per (m, trial), sorted by (m, trial). Trial k of size m draws its
/// matrix from stream (m, k), so rows do not depend on the thread count.
std::vector<BetaEstimateRow> gaussian_beta_experiment(const GaussianExperiment& cfg);

}  // namespace prstab
