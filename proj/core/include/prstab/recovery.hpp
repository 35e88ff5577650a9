#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prstab/linalg.hpp"

namespace prstab {

/// Observations b = |A x0| + eta. x0 and eta are kept when known so the
/// recovery can be scored and the error bound checked.
struct RecoveryProblem {
  MeasurementMatrix a;
  std::vector<double> b;
  std::optional<Vector> x0;
  std::optional<std::vector<double>> eta;

  /// Builds b = phaseless_map(a, x0) + eta.
  static RecoveryProblem with_truth(MeasurementMatrix a, Vector x0, std::vector<double> eta);
};

struct RecoveryOptions {
  int restarts = 16;
  int max_iters = 500;
  double tol = 1e-12;  // stop once the relative residual decrease falls below tol
  std::uint64_t seed = 0;
  bool spectral_init = true;
  unsigned threads = 0;
};

struct RecoveryResult {
  Vector x_hat;
  double residual = 0.0;  // || |A x_hat| - b ||_2
  std::optional<double> dist_to_truth;
  bool certified = false;  // residual <= ||eta||_2 (needs eta)
  int best_start = -1;     // 0 is the spectral start when enabled
  int iterations = 0;      // of the best start
  int starts = 0;
  std::vector<double> residual_history;  // of the best start, initial residual first
};

/// Alternating minimization for min_x || |Ax| - b ||_2: fix the phases of Ax,
/// solve the linear least-squares problem, repeat. Multi-start, best residual wins
/// (ties broken by start index).
RecoveryResult solve_quadratic_model(const RecoveryProblem& p, const RecoveryOptions& opts = {});

struct ErrorBoundCheck {
  double bound = 0.0;     // 2 beta0 / (1 - delta) * ||eta|| / sqrt(m)
  double achieved = 0.0;  // dist(x_hat, x0)
  bool holds = false;
};

ErrorBoundCheck check_error_bound(const RecoveryResult& r, const RecoveryProblem& p, double delta = 0.05);

}  // namespace prstab
