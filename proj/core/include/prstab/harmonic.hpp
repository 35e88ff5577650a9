#pragma once

#include <utility>

#include "prstab/linalg.hpp"

namespace prstab {

/// m unit vectors at angles j*pi/m, j = 0..m-1, on the upper semicircle.
struct HarmonicFrame {
  int m = 0;
  MeasurementMatrix matrix;
};

HarmonicFrame harmonic_frame(int m);

/// G_m(theta) = sum_{j<m} |sin(2 j pi / m + 2 theta)|, summed directly.
double g_m(int m, double theta);

/// Closed form of G_m: 2 cos(2t - pi/m) / sin(pi/m) for even m on [0, pi/m] and
/// cos(2t - pi/2m) / sin(pi/2m) for odd m on [0, pi/2m], extended periodically.
double g_m_closed(int m, double theta);

/// Period of G_m: pi/m (even m) or pi/(2m) (odd m).
double g_m_period(int m);

struct GmMaximum {
  double value = 0.0;
  double theta = 0.0;
};

GmMaximum g_m_max(int m);

/// Condition number of E_m.
double harmonic_beta(int m);

/// Lower Lipschitz constant of E_m, sqrt(m/2 - max G_m / 2).
double harmonic_lower(int m);

/// Unit orthogonal pair (x, y) attaining the lower Lipschitz constant of E_m.
std::pair<Vector, Vector> harmonic_witness(int m);

}  // namespace prstab
