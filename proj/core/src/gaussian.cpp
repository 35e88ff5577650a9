#include "prstab/gaussian.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "prstab/parallel.hpp"
#include "prstab/rng.hpp"
#include "prstab/stability.hpp"

namespace prstab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t kMatrixStream = 3;
constexpr std::uint64_t kKernelStream = 4;
constexpr long kMcBlock = 1L << 16;

double reduce_angle(double theta) { return std::acos(std::min(1.0, std::abs(std::cos(theta)))); }

Scalar draw(Field field, CounterRng& rng) {
  if (field == Field::Real) return rng.normal();
  const double re = rng.normal() * std::numbers::sqrt2 / 2.0;
  const double im = rng.normal() * std::numbers::sqrt2 / 2.0;
  return {re, im};
}

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl;
  for (const double z : boost::math::legendre_p_zeros<double>(n)) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    gl.nodes.push_back(z);
    gl.weights.push_back(w);
    if (z != 0.0) {
      gl.nodes.push_back(-z);
      gl.weights.push_back(w);
    }
  }
  return gl;
}

}  // namespace

MeasurementMatrix sample_gaussian_matrix(std::size_t m, std::size_t d, Field field, std::uint64_t seed,
                                         std::uint64_t stream) {
  if (m < 1 || d < 1) throw PreconditionError("Gaussian matrix needs m, d >= 1");
  CounterRng rng(seed, stream);
  std::vector<Scalar> entries(m * d);
  for (auto& e : entries) e = draw(field, rng);
  return MeasurementMatrix(field, m, d, std::move(entries));
}

Vector sample_gaussian_vector(std::size_t d, Field field, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<Scalar> entries(d);
  for (auto& e : entries) e = draw(field, rng);
  return Vector(field, std::move(entries));
}

double kernel_expectation_real(double theta) {
  const double t = reduce_angle(theta);
  return (2.0 / pi) * (std::sin(t) + (pi / 2.0 - t) * std::cos(t));
}

double kernel_expectation_complex(double theta, const SphereQuadrature& quad) {
  if (quad.n_polar < 16 || quad.n_azimuth < 16) throw PreconditionError("quadrature sizes must be at least 16");
  const double t = reduce_angle(theta);
  const double ct = std::cos(t);
  const double st = std::sin(t);
  // Polar axis along y: y = cos psi, (x, z) = sin psi (cos phi, sin phi).
  // For fixed psi the integrand is supported on cos phi >= c*, with a square-root
  // edge at phi*; phi = phi* - u^2 makes the azimuthal integrand smooth.
  // The support reaches phi = pi at psi = pi/2 -+ t; split the polar range there.
  const auto ga = gauss_legendre(quad.n_azimuth / 2);
  const double cuts[4] = {0.0, 0.5 * pi - t, 0.5 * pi + t, pi};
  double total = 0.0;
  for (int panel = 0; panel < 3; ++panel) {
    const double a = cuts[panel], b = cuts[panel + 1];
    if (b - a <= 0.0) continue;
    const int n = std::max(8, static_cast<int>(std::lround(quad.n_polar * (b - a) / pi)));
    const auto gl = gauss_legendre(n);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double psi = a + 0.5 * (b - a) * (gl.nodes[k] + 1.0);
      const double y = std::cos(psi);
      const double s = std::sin(psi);
      const double edge = s * ct > 0.0 ? (std::abs(y) * st - 1.0) / (s * ct) : -2.0;
      if (edge >= 1.0) continue;
      const double phi_star = edge <= -1.0 ? pi : std::acos(edge);
      const double umax = std::sqrt(phi_star);
      double ring = 0.0;
      for (std::size_t j = 0; j < ga.nodes.size(); ++j) {
        const double u = 0.5 * umax * (ga.nodes[j] + 1.0);
        const double x = s * std::cos(phi_star - u * u);
        const double lhs = std::max(0.0, 1.0 + x * ct - y * st);
        const double rhs = std::max(0.0, 1.0 + x * ct + y * st);
        ring += ga.weights[j] * std::sqrt(lhs * rhs) * 2.0 * u;
      }
      // both halves of the circle; the u map contributes umax / 2
      total += 0.5 * (b - a) * gl.weights[k] * s * umax * ring;
    }
  }
  return total / (4.0 * pi);
}

double kernel_expectation_bound(Field field, double theta) {
  const double beta0 = universal_lower_bound(field);
  const double dist2 = 2.0 - 2.0 * std::cos(reduce_angle(theta));
  return 1.0 - dist2 / (2.0 * beta0 * beta0);
}

MonteCarloEstimate mc_kernel_expectation(Field field, double theta, long n, std::uint64_t seed, unsigned threads) {
  if (n < 1000) throw PreconditionError("Monte Carlo needs at least 1000 samples");
  const double t = reduce_angle(theta);
  const double ct = std::cos(t);
  const double st = std::sin(t);
  const std::size_t blocks = static_cast<std::size_t>((n + kMcBlock - 1) / kMcBlock);
  std::vector<double> sums(blocks, 0.0);
  std::vector<double> squares(blocks, 0.0);
  parallel_for(blocks, threads, [&](std::size_t b) {
    CounterRng rng(seed, stream_id(kKernelStream, b));
    const long begin = static_cast<long>(b) * kMcBlock;
    const long end = std::min(n, begin + kMcBlock);
    double s = 0.0, s2 = 0.0;
    for (long i = begin; i < end; ++i) {
      const Scalar a1 = draw(field, rng);
      const Scalar a2 = draw(field, rng);
      // |<y, a>| |<a, x>| with x = e1, y = (cos t, sin t).
      const double v = std::abs(a1) * std::abs(ct * a1 + st * a2);
      s += v;
      s2 += v * v;
    }
    sums[b] = s;
    squares[b] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    s += sums[b];
    s2 += squares[b];
  }
  const double nn = static_cast<double>(n);
  const double mean = s / nn;
  const double var = std::max(0.0, (s2 - nn * mean * mean) / (nn - 1.0));
  return {mean, std::sqrt(var / nn)};
}

std::vector<BetaEstimateRow> gaussian_beta_experiment(const GaussianExperiment& cfg) {
  if (cfg.m_values.empty()) throw PreconditionError("experiment needs at least one m value");
  if (cfg.trials < 1) throw PreconditionError("experiment needs at least one trial");
  if (cfg.d < 1) throw PreconditionError("experiment needs d >= 1");
  for (std::size_t i = 0; i < cfg.m_values.size(); ++i) {
    if (cfg.m_values[i] < 1) throw PreconditionError("m values must be positive");
    if (i > 0 && cfg.m_values[i] <= cfg.m_values[i - 1]) throw PreconditionError("m values must be strictly increasing");
  }

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t cells = cfg.m_values.size() * trials;
  std::vector<BetaEstimateRow> rows(cells);
  const double beta0 = universal_lower_bound(cfg.field);

  parallel_for(cells, cfg.threads, [&](std::size_t c) {
    const std::size_t m = cfg.m_values[c / trials];
    const int trial = static_cast<int>(c % trials);
    const std::uint64_t stream = stream_id(kMatrixStream, m, static_cast<std::uint64_t>(trial));
    const auto a = sample_gaussian_matrix(m, cfg.d, cfg.field, cfg.seed, stream);

    NumericOptions no;
    no.restarts = cfg.restarts > 0 ? cfg.restarts : std::max(32, 8 * static_cast<int>(cfg.d));
    no.max_iters = cfg.max_iters;
    no.seed = CounterRng::mix(cfg.seed ^ stream);
    no.threads = 1;

    BetaEstimateRow& row = rows[c];
    row.m = m;
    row.trial = trial;
    row.upper = upper_lipschitz(a);
    row.lower = lower_lipschitz_numeric(a, no).value;
    row.beta = row.lower > 1e-10 * row.upper ? row.upper / row.lower : std::numeric_limits<double>::infinity();
    row.beta0 = beta0;
    row.excess = row.beta - beta0;
  });
  return rows;
}

}  // namespace prstab
