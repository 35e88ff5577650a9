#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frame_smooth.hpp"
#include "oracles.hpp"
#include "prstab/harmonic.hpp"
#include "prstab/stability.hpp"

using namespace prstab;
using doctest::Approx;

namespace {

const MeasurementMatrix kIdentity = MeasurementMatrix::from_real_rows({{1.0, 0.0}, {0.0, 1.0}});
const MeasurementMatrix kThreeRows =
    MeasurementMatrix::from_real_rows({{1.0, 0.0}, {0.0, 1.0}, {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});

MeasurementMatrix right_multiply(const MeasurementMatrix& a, const Eigen::MatrixXcd& q) {
  const Eigen::MatrixXcd prod = oracle::to_eigen(a) * q;
  std::vector<Scalar> e(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      e[i * a.cols() + k] = a.field() == Field::Real ? Scalar(prod(i, k).real()) : prod(i, k);
  return MeasurementMatrix(a.field(), a.rows(), a.cols(), std::move(e));
}

}  // namespace

TEST_CASE("upper Lipschitz constant") {
  for (int m : {3, 4, 5}) CHECK(upper_lipschitz(harmonic_frame(m).matrix) == Approx(std::sqrt(m / 2.0)).epsilon(1e-14));
  CHECK(upper_lipschitz(MeasurementMatrix::zeros(Field::Real, 3, 2)) == 0.0);
  CHECK(upper_lipschitz(kThreeRows) == Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("exact lower constant and sigma on fixed examples") {
  const auto e3 = harmonic_frame(3).matrix;
  CHECK(delta_lower_exact_real(e3).value == Approx(std::sqrt(0.5)).epsilon(1e-13));
  CHECK(sigma_bound(e3).value == Approx(std::sqrt(0.5)).epsilon(1e-13));
  CHECK(delta_lower_exact_real(kIdentity).value == Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(sigma_bound(kIdentity).value == Approx(0.0).scale(1.0).epsilon(1e-15));

  const auto three = delta_lower_exact_real(kThreeRows);
  CHECK(three.value == Approx(oracle::exact_lower_real(kThreeRows)).epsilon(1e-12));
  CHECK(three.value == Approx(0.541196).epsilon(1e-6));
  CHECK(sigma_bound(kThreeRows).value == Approx(oracle::sigma_real(kThreeRows)).epsilon(1e-12));
  CHECK(sigma_bound(kThreeRows).value == Approx(0.541196).epsilon(1e-6));
}

TEST_CASE("subset certificate reproduces the minimum") {
  std::mt19937_64 rng(4);
  const auto a = oracle::random_matrix(rng, 7, 2, Field::Real);
  const auto res = delta_lower_exact_real(a);
  const Eigen::MatrixXd ar = oracle::to_eigen(a).real();
  unsigned long mask = 0;
  for (const auto i : res.certificate.subset) mask |= 1ul << i;
  CHECK((mask >> 6 & 1ul) == 0ul);  // last row always in the complement
  const double v = std::sqrt(oracle::lambda_min_rows(ar, mask) + oracle::lambda_min_rows(ar, 0x7ful & ~mask));
  CHECK(v == Approx(res.value).epsilon(1e-12));
}

TEST_CASE("exact lower constant matches brute force on random matrices") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 2 + t % 2;
    const std::size_t m = 2 * d - 1 + static_cast<std::size_t>(t % 5);
    const auto a = oracle::random_matrix(rng, m, d, Field::Real);
    const double delta = delta_lower_exact_real(a).value;
    const double sigma = sigma_bound(a).value;
    CHECK(delta == Approx(oracle::exact_lower_real(a)).epsilon(1e-10));
    CHECK(sigma == Approx(oracle::sigma_real(a)).epsilon(1e-10));
    CHECK(sigma <= delta + 1e-12);
    CHECK(delta <= std::sqrt(2.0) * sigma + 1e-9);
  }
}

TEST_CASE("enumeration is independent of the thread count") {
  std::mt19937_64 rng(1);
  const auto a = oracle::random_matrix(rng, 18, 3, Field::Real);
  EnumerationOptions one{24, 1}, four{24, 4};
  const auto r1 = delta_lower_exact_real(a, one);
  const auto r4 = delta_lower_exact_real(a, four);
  CHECK(r1.value == r4.value);
  CHECK(r1.certificate.subset == r4.certificate.subset);
}

TEST_CASE("exact methods reject unsupported input") {
  std::mt19937_64 rng(2);
  const auto c = oracle::random_matrix(rng, 5, 2, Field::Complex);
  CHECK_THROWS_AS(delta_lower_exact_real(c), PreconditionError);
  CHECK_THROWS_AS(sigma_bound(c), PreconditionError);
  CHECK_THROWS_AS(condition_number(c, LowerMethod::ExactRealSubset), PreconditionError);
  const auto big = oracle::random_matrix(rng, 25, 2, Field::Real);
  CHECK_THROWS_AS(delta_lower_exact_real(big), PreconditionError);
}

TEST_CASE("numeric lower constant on fixed examples") {
  const auto e3 = harmonic_frame(3).matrix;
  const auto res = lower_lipschitz_numeric(e3, {32, 4000, 1e-10, 7, 1});
  CHECK(res.value == Approx(std::sqrt(0.5)).epsilon(1e-7));
  const auto& c = res.certificate;
  CHECK(c.x.norm() == Approx(1.0).epsilon(1e-10));
  CHECK(c.y.norm() <= 1.0 + 1e-10);
  CHECK(std::abs(inner(c.x, c.y)) < 1e-10);
  CHECK(oracle::ratio(e3, c.x, c.y) == Approx(res.value).epsilon(1e-8));

  const auto id = lower_lipschitz_numeric(kIdentity, {32, 4000, 1e-10, 7, 1});
  CHECK(id.value < 1e-6);
}

TEST_CASE("numeric lower constant matches the exact value on random real matrices") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + t % 2;
    const std::size_t m = d == 2 ? 3 + t % 6 : 5 + t % 4;
    const auto a = oracle::random_matrix(rng, m, d, Field::Real);
    const double exact = oracle::exact_lower_real(a);
    NumericOptions opts;
    opts.seed = static_cast<std::uint64_t>(t);
    opts.threads = 1;
    const auto num = lower_lipschitz_numeric(a, opts);
    CHECK(num.value >= exact * (1.0 - 1e-6));
    CHECK(num.value <= exact * (1.0 + 1e-4));
    CHECK(oracle::ratio(a, num.certificate.x, num.certificate.y) == Approx(num.value).epsilon(1e-8));
  }
}

TEST_CASE("numeric certificates on complex input") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 5; ++t) {
    const auto a = oracle::random_matrix(rng, 8, 2, Field::Complex);
    const auto num = lower_lipschitz_numeric(a, {32, 4000, 1e-10, 3, 1});
    const auto& c = num.certificate;
    CHECK(c.x.field() == Field::Complex);
    CHECK(c.x.norm() == Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(inner(c.x, c.y)) < 1e-10);
    CHECK(oracle::ratio(a, c.x, c.y) == Approx(num.value).epsilon(1e-8));
    // sampled pairs never beat a true minimum by much; the numeric value is an upper bound
    CHECK(num.value > 0.0);
  }
}

TEST_CASE("numeric search is deterministic across thread counts") {
  std::mt19937_64 rng(6);
  const auto a = oracle::random_matrix(rng, 9, 3, Field::Complex);
  NumericOptions one{16, 4000, 1e-10, 5, 1};
  NumericOptions four{16, 4000, 1e-10, 5, 4};
  const auto r1 = lower_lipschitz_numeric(a, one);
  const auto r4 = lower_lipschitz_numeric(a, four);
  CHECK(r1.value == r4.value);
  CHECK(r1.certificate.restart == r4.certificate.restart);
}

TEST_CASE("condition number examples") {
  CHECK(condition_number(harmonic_frame(3).matrix, LowerMethod::ExactRealSubset).beta ==
        Approx(std::sqrt(3.0)).epsilon(1e-12));
  const auto id = condition_number(kIdentity, LowerMethod::ExactRealSubset);
  CHECK(std::isinf(id.beta));
  CHECK(id.lower == Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(condition_number(harmonic_frame(4).matrix, LowerMethod::ExactRealSubset).beta ==
        Approx(1.8477590650225737).epsilon(1e-12));
  const auto num = condition_number(harmonic_frame(3).matrix, LowerMethod::NumericOrthPair);
  CHECK(num.method == LowerMethod::NumericOrthPair);
  CHECK(std::holds_alternative<PairCertificate>(num.certificate));
  CHECK(num.beta == Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK(to_string(LowerMethod::ExactRealSubset) == "exact_real_subset");
  CHECK(to_string(LowerMethod::NumericOrthPair) == "numeric_orth_pair");
}

TEST_CASE("condition number invariances") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 8; ++t) {
    const auto a = oracle::random_matrix(rng, 6, 2, Field::Real);
    const double beta = condition_number(a, LowerMethod::ExactRealSubset).beta;

    // per-row sign flips
    std::vector<Scalar> flipped(a.entries().begin(), a.entries().end());
    for (std::size_t i = 0; i < a.rows(); i += 2)
      for (std::size_t k = 0; k < a.cols(); ++k) flipped[i * a.cols() + k] *= -1.0;
    const MeasurementMatrix af(Field::Real, a.rows(), a.cols(), flipped);
    CHECK(condition_number(af, LowerMethod::ExactRealSubset).beta == Approx(beta).epsilon(1e-11));

    // right rotation
    const double phi = n01(rng);
    Eigen::MatrixXcd q(2, 2);
    q << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    CHECK(condition_number(right_multiply(a, q), LowerMethod::ExactRealSubset).beta == Approx(beta).epsilon(1e-11));

    // global scaling
    const auto scaled = condition_number(a.scaled(3.5), LowerMethod::ExactRealSubset);
    const auto base = condition_number(a, LowerMethod::ExactRealSubset);
    CHECK(scaled.beta == Approx(beta).epsilon(1e-11));
    CHECK(scaled.lower == Approx(3.5 * base.lower).epsilon(1e-11));
    CHECK(scaled.upper == Approx(3.5 * base.upper).epsilon(1e-11));
  }
  // unimodular row scaling for complex input
  const auto c = oracle::random_matrix(rng, 7, 2, Field::Complex);
  std::vector<Scalar> rot(c.entries().begin(), c.entries().end());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t k = 0; k < c.cols(); ++k) rot[i * c.cols() + k] *= std::polar(1.0, 0.3 * static_cast<double>(i));
  const MeasurementMatrix cr(Field::Complex, c.rows(), c.cols(), rot);
  const double b1 = condition_number(c, LowerMethod::NumericOrthPair).beta;
  const double b2 = condition_number(cr, LowerMethod::NumericOrthPair).beta;
  CHECK(b2 == Approx(b1).epsilon(1e-6));
}

TEST_CASE("universal and real bounds") {
  CHECK(universal_lower_bound(Field::Real) == Approx(1.659).epsilon(5e-4));
  CHECK(universal_lower_bound(Field::Complex) == Approx(2.159).epsilon(5e-4));
  CHECK(universal_lower_bound(Field::Real) == Approx(std::sqrt(std::numbers::pi / (std::numbers::pi - 2.0))));
  CHECK(universal_lower_bound(Field::Complex) == Approx(std::sqrt(4.0 / (4.0 - std::numbers::pi))));
  CHECK(real_md_lower_bound(3) == Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(real_md_lower_bound(5) == Approx(1.6836155).epsilon(1e-4));
  CHECK(std::abs(real_md_lower_bound(10001) - universal_lower_bound(Field::Real)) < 1e-6);
  CHECK_THROWS_AS(real_md_lower_bound(2), PreconditionError);
  for (int m = 3; m < 60; ++m) CHECK(real_md_lower_bound(m) == Approx(oracle::md_bound(m)).epsilon(1e-14));
}

TEST_CASE("every sampled matrix respects the lower bounds on beta") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + t % 2;
    const std::size_t m = 2 * d - 1 + static_cast<std::size_t>(t % 4);
    const auto a = oracle::random_matrix(rng, m, d, Field::Real);
    const double beta = condition_number(a, LowerMethod::ExactRealSubset).beta;
    CHECK(beta >= universal_lower_bound(Field::Real) - 1e-9);
    CHECK(beta >= real_md_lower_bound(static_cast<int>(m)) - 1e-9);
  }
}

TEST_CASE("upper bound is attained at the top singular vector and never exceeded") {
  std::mt19937_64 rng(8);
  for (const Field field : {Field::Real, Field::Complex}) {
    const auto a = oracle::random_matrix(rng, 6, 3, field);
    const double u = upper_lipschitz(a);
    const auto v = oracle::top_right_singular_vector(a);
    CHECK(lipschitz_ratio(a, v, Vector::zeros(field, 3)) == Approx(u).epsilon(1e-12));
    for (int s = 0; s < 500; ++s) {
      const auto x = oracle::random_vector(rng, 3, field);
      const auto y = oracle::random_vector(rng, 3, field);
      CHECK(lipschitz_ratio(a, x, y) <= u + 1e-9);
    }
  }
  CHECK_THROWS_AS(lipschitz_ratio(kIdentity, Vector::real({1.0, 0.0}), Vector::real({-1.0, 0.0})), PreconditionError);
}

TEST_CASE("smoothed frame objective has a consistent gradient") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (std::size_t m : {3u, 5u, 8u}) {
    std::vector<double> x(2 * (m - 1));
    for (auto& v : x) v = n01(rng);
    for (const auto& [kappa, eps] : detail::kSmoothingSchedule) {
      detail::SmoothFrameObjective f(m, kappa, eps);
      std::vector<double> g;
      const double f0 = f(x, &g);
      REQUIRE(std::isfinite(f0));
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        const double h = 1e-6;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (f(xp, nullptr) - f(xm, nullptr)) / (2 * h);
        CHECK(g[i] == Approx(fd).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("frame optimizer") {
  FrameOptions opts;
  opts.threads = 1;
  const auto r3 = optimize_frame_r2(3, opts);
  CHECK(std::abs(r3.beta - std::sqrt(3.0)) < 1e-4);
  const auto r5 = optimize_frame_r2(5, opts);
  CHECK(std::abs(r5.beta - 1.6836155) < 1e-4);
  CHECK(r5.beta >= real_md_lower_bound(5) - 1e-9);
  const auto r4 = optimize_frame_r2(4, opts);
  CHECK(r4.beta <= 1.8477590 + 1e-6);

  // gauge and reported beta
  CHECK(r5.frame.angles[0] == 0.0);
  double s = 0.0;
  for (const double r : r5.frame.radii) s += r * r;
  CHECK(s == Approx(5.0).epsilon(1e-12));
  CHECK(condition_number(r5.frame.to_matrix(), LowerMethod::ExactRealSubset).beta == Approx(r5.beta).epsilon(1e-12));

  FrameOptions four = opts;
  four.threads = 4;
  CHECK(optimize_frame_r2(5, four).beta == r5.beta);
  CHECK_THROWS_AS(optimize_frame_r2(2, opts), PreconditionError);
}
