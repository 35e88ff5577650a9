#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "prstab/gaussian.hpp"
#include "prstab/recovery.hpp"
#include "prstab/stability.hpp"

using namespace prstab;
using doctest::Approx;

namespace {

std::vector<double> scaled_noise(std::mt19937_64& rng, std::size_t m, double norm) {
  std::normal_distribution<double> n01;
  std::vector<double> eta(m);
  double s = 0.0;
  for (auto& e : eta) {
    e = n01(rng);
    s += e * e;
  }
  for (auto& e : eta) e *= norm / std::sqrt(s);
  return eta;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("noiseless recovery is exact and certified") {
  std::mt19937_64 rng(1);
  for (const Field field : {Field::Real, Field::Complex}) {
    for (int t = 0; t < 5; ++t) {
      const auto a = oracle::random_matrix(rng, 50, 5, field);
      const auto x0 = oracle::random_vector(rng, 5, field);
      const auto p = RecoveryProblem::with_truth(a, x0, std::vector<double>(50, 0.0));
      RecoveryOptions opts;
      opts.seed = static_cast<std::uint64_t>(t);
      opts.threads = 1;
      const auto r = solve_quadratic_model(p, opts);
      REQUIRE(r.dist_to_truth.has_value());
      CHECK(*r.dist_to_truth <= 1e-8);
      CHECK(r.certified);
      const auto check = check_error_bound(r, p);
      CHECK(check.bound == 0.0);
      CHECK(check.holds);
    }
  }
}

TEST_CASE("zero observations give the zero solution") {
  std::mt19937_64 rng(2);
  const auto a = oracle::random_matrix(rng, 10, 3, Field::Real);
  const RecoveryProblem p{a, std::vector<double>(10, 0.0), std::nullopt, std::nullopt};
  const auto r = solve_quadratic_model(p);
  CHECK(r.residual == 0.0);
  CHECK(r.x_hat.norm() == 0.0);
  CHECK_FALSE(r.dist_to_truth.has_value());
}

TEST_CASE("residual history is nonincreasing and matches the reported residual") {
  std::mt19937_64 rng(3);
  const auto a = oracle::random_matrix(rng, 80, 4, Field::Complex);
  const auto x0 = oracle::random_vector(rng, 4, Field::Complex);
  const auto eta = scaled_noise(rng, 80, 0.3);
  const auto p = RecoveryProblem::with_truth(a, x0, eta);
  const auto r = solve_quadratic_model(p, {8, 500, 1e-12, 4, true, 1});
  REQUIRE(r.residual_history.size() >= 2);
  for (std::size_t k = 1; k < r.residual_history.size(); ++k)
    CHECK(r.residual_history[k] <= r.residual_history[k - 1]);
  CHECK(r.residual_history.back() == r.residual);
  // residual recomputed independently
  const Eigen::VectorXd axh = (oracle::to_eigen(a) * oracle::to_eigen(r.x_hat)).cwiseAbs();
  double s = 0.0;
  for (std::size_t i = 0; i < 80; ++i) s += (axh(i) - p.b[i]) * (axh(i) - p.b[i]);
  CHECK(std::sqrt(s) == Approx(r.residual).epsilon(1e-10));
  CHECK(*r.dist_to_truth == Approx(oracle::dist_scan(r.x_hat, x0)).epsilon(1e-8));
  CHECK(r.starts == 9);
}

TEST_CASE("certified outputs satisfy the factor-two residual identity and the error bound") {
  std::mt19937_64 rng(4);
  int certified = 0, holds = 0;
  for (int t = 0; t < 30; ++t) {
    const auto a = oracle::random_matrix(rng, 500, 5, Field::Real);
    const auto x0 = oracle::random_vector(rng, 5, Field::Real);
    const auto clean = phaseless_map(a, x0);
    const auto eta = scaled_noise(rng, 500, 0.1 * l2(clean));
    const auto p = RecoveryProblem::with_truth(a, x0, eta);
    const auto r = solve_quadratic_model(p, {16, 500, 1e-12, static_cast<std::uint64_t>(t), true, 1});
    const auto check = check_error_bound(r, p, 0.05);
    CHECK(check.bound ==
          Approx(2 * universal_lower_bound(Field::Real) / 0.95 * l2(eta) / std::sqrt(500.0)).epsilon(1e-12));
    CHECK(check.achieved == *r.dist_to_truth);
    if (r.certified) {
      ++certified;
      const auto fit = phaseless_map(a, r.x_hat);
      double s = 0.0;
      for (std::size_t i = 0; i < 500; ++i) s += (fit[i] - clean[i]) * (fit[i] - clean[i]);
      CHECK(std::sqrt(s) <= 2 * l2(eta) + 1e-9);
      if (check.holds) ++holds;
    }
  }
  CHECK(certified > 0);
  CHECK(holds >= 0.95 * certified);
}

TEST_CASE("bound coefficients") {
  std::mt19937_64 rng(5);
  for (const Field field : {Field::Real, Field::Complex}) {
    const auto a = oracle::random_matrix(rng, 16, 2, field);
    const auto x0 = oracle::random_vector(rng, 2, field);
    std::vector<double> eta(16, 0.0);
    eta[0] = 4.0;  // ||eta|| / sqrt(m) = 1
    const auto p = RecoveryProblem::with_truth(a, x0, eta);
    const auto r = solve_quadratic_model(p);
    const auto check = check_error_bound(r, p, 0.05);
    const double coefficient = field == Field::Real ? 3.3178 : 4.3173;
    CHECK(check.bound * 0.95 == Approx(coefficient).epsilon(1e-4));
  }
}

TEST_CASE("preconditions") {
  std::mt19937_64 rng(6);
  const auto a = oracle::random_matrix(rng, 20, 3, Field::Real);
  const auto x0 = oracle::random_vector(rng, 3, Field::Real);
  const auto p = RecoveryProblem::with_truth(a, x0, std::vector<double>(20, 0.0));
  const auto r = solve_quadratic_model(p);
  CHECK_THROWS_AS(check_error_bound(r, p, 0.2), PreconditionError);
  CHECK_THROWS_AS(check_error_bound(r, p, 0.0), PreconditionError);
  const RecoveryProblem no_truth{a, p.b, std::nullopt, std::nullopt};
  CHECK_THROWS_AS(check_error_bound(r, no_truth, 0.05), PreconditionError);
  CHECK_THROWS_AS(RecoveryProblem::with_truth(a, x0, std::vector<double>(3, 0.0)), MismatchError);

  // duplicate columns make the least-squares step singular
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < 20; ++i) rows.push_back({a(i, 0).real(), a(i, 0).real()});
  const auto singular = MeasurementMatrix::from_real_rows(rows);
  const RecoveryProblem bad{singular, std::vector<double>(20, 1.0), std::nullopt, std::nullopt};
  CHECK_THROWS_AS(solve_quadratic_model(bad), ConditioningError);
}

TEST_CASE("recovery is deterministic across thread counts") {
  std::mt19937_64 rng(7);
  const auto a = oracle::random_matrix(rng, 60, 3, Field::Complex);
  const auto x0 = oracle::random_vector(rng, 3, Field::Complex);
  const auto p = RecoveryProblem::with_truth(a, x0, scaled_noise(rng, 60, 0.5));
  const auto r1 = solve_quadratic_model(p, {12, 500, 1e-12, 9, true, 1});
  const auto r4 = solve_quadratic_model(p, {12, 500, 1e-12, 9, true, 4});
  CHECK(r1.residual == r4.residual);
  CHECK(r1.best_start == r4.best_start);
  for (std::size_t k = 0; k < 3; ++k) CHECK(r1.x_hat[k] == r4.x_hat[k]);
}
