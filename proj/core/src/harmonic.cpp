#include "prstab/harmonic.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace prstab {

namespace {

constexpr double pi = std::numbers::pi;

void require_m(int m) {
  if (m < 3) throw PreconditionError("harmonic frame needs m >= 3");
}

}  // namespace

HarmonicFrame harmonic_frame(int m) {
  require_m(m);
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double angle = pi * j / m;
    rows.push_back({std::cos(angle), std::sin(angle)});
  }
  return {m, MeasurementMatrix::from_real_rows(rows)};
}

double g_m(int m, double theta) {
  require_m(m);
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += std::abs(std::sin(2.0 * j * pi / m + 2.0 * theta));
  return s;
}

double g_m_period(int m) {
  require_m(m);
  return m % 2 == 0 ? pi / m : pi / (2.0 * m);
}

double g_m_closed(int m, double theta) {
  const double period = g_m_period(m);
  const double reduced = theta - period * std::floor(theta / period);
  if (m % 2 == 0) return 2.0 * std::cos(2.0 * reduced - pi / m) / std::sin(pi / m);
  return std::cos(2.0 * reduced - pi / (2.0 * m)) / std::sin(pi / (2.0 * m));
}

GmMaximum g_m_max(int m) {
  require_m(m);
  if (m % 2 == 0) return {2.0 / std::sin(pi / m), pi / (2.0 * m)};
  return {1.0 / std::sin(pi / (2.0 * m)), pi / (4.0 * m)};
}

double harmonic_beta(int m) {
  require_m(m);
  if (m % 2 == 0) return 1.0 / std::sqrt(1.0 - 2.0 / (m * std::sin(pi / m)));
  return 1.0 / std::sqrt(1.0 - 1.0 / (m * std::sin(pi / (2.0 * m))));
}

double harmonic_lower(int m) {
  return std::sqrt(0.5 * m - 0.5 * g_m_max(m).value);
}

std::pair<Vector, Vector> harmonic_witness(int m) {
  const double theta = g_m_max(m).theta;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {Vector::real({c, -s}), Vector::real({-s, -c})};
}

}  // namespace prstab
