#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "prstab/linalg.hpp"

namespace prstab {

enum class LowerMethod { ExactRealSubset, NumericOrthPair };

std::string_view to_string(LowerMethod method);

/// Row subset I (0-based) attaining an enumerated minimum. The last row is always
/// in the complement, so each split {I, I^c} is visited once.
struct SubsetCertificate {
  std::vector<std::size_t> subset;
};

/// Orthogonal pair (x, y = t u) attaining a numeric minimum of the Lipschitz ratio.
struct PairCertificate {
  Vector x;
  Vector y;
  double scale = 0.0;  // t = ||y||
  int restart = -1;    // which start produced the pair
  int iterations = 0;  // local-search iterations of that start
  long evaluations = 0;
  bool converged = false;
};

struct StabilityReport {
  double upper = 0.0;
  double lower = 0.0;
  double beta = 0.0;  // +inf when lower is numerically zero
  LowerMethod method = LowerMethod::ExactRealSubset;
  std::variant<SubsetCertificate, PairCertificate> certificate;
};

struct EnumerationOptions {
  std::size_t max_rows = 24;
  unsigned threads = 0;
};

struct SubsetMinimum {
  double value = 0.0;
  SubsetCertificate certificate;
};

struct NumericOptions {
  int restarts = 32;
  int max_iters = 4000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct NumericMinimum {
  double value = 0.0;
  PairCertificate certificate;
};

struct AnalysisOptions {
  EnumerationOptions enumeration;
  NumericOptions numeric;
  double zero_threshold = 1e-10;  // relative to upper
};

/// U_A = ||A||_2.
double upper_lipschitz(const MeasurementMatrix& a);

/// Exact real lower Lipschitz constant
///   min_I sqrt(lambda_min(A_I^T A_I) + lambda_min(A_{I^c}^T A_{I^c})).
SubsetMinimum delta_lower_exact_real(const MeasurementMatrix& a, const EnumerationOptions& opts = {});

/// min_I max(sqrt(lambda_min(A_I^T A_I)), sqrt(lambda_min(A_{I^c}^T A_{I^c}))).
SubsetMinimum sigma_bound(const MeasurementMatrix& a, const EnumerationOptions& opts = {});

/// Multi-start minimization of || |Ax| - |Ay| || / dist(x, y) over unit x, y = t u
/// with u a unit vector orthogonal to x and t in [0, 1]. The result is always an
/// upper bound on L_A.
NumericMinimum lower_lipschitz_numeric(const MeasurementMatrix& a, const NumericOptions& opts = {});

/// || |Ax| - |Ay| ||_2 / dist(x, y); requires dist(x, y) > 0.
double lipschitz_ratio(const MeasurementMatrix& a, const Vector& x, const Vector& y);

StabilityReport condition_number(const MeasurementMatrix& a, LowerMethod method, const AnalysisOptions& opts = {});

/// sqrt(pi/(pi-2)) for R, sqrt(4/(4-pi)) for C.
double universal_lower_bound(Field field);

/// 1 / sqrt(1 - 1/(m sin(pi/2m))), valid for every real m x d matrix; m >= 3.
double real_md_lower_bound(int m);

/// Real m x 2 frame in polar form: row i is radii[i] * (cos angles[i], sin angles[i]).
struct FramePolar {
  std::vector<double> radii;
  std::vector<double> angles;

  MeasurementMatrix to_matrix() const;
};

struct FrameOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  long budget = 20000;  // objective evaluations per start
  unsigned threads = 0;
};

struct FrameOptimum {
  FramePolar frame;
  double beta = 0.0;
  int best_restart = -1;
  long evaluations = 0;
};

/// Searches R^{m x 2} frames for the smallest condition number (exact lower bound
/// inside the objective). Gauge: angles[0] = 0 and sum radii^2 = m.
FrameOptimum optimize_frame_r2(int m, const FrameOptions& opts = {});

}  // namespace prstab
