#include "prstab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prstab/gaussian.hpp"
#include "prstab/parallel.hpp"
#include "prstab/rng.hpp"
#include "prstab/stability.hpp"

namespace prstab {

namespace {

constexpr std::uint64_t kRecoveryStream = 5;
constexpr std::size_t kNormalEquationsMaxDim = 10;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (const double e : v) s += e * e;
  return std::sqrt(s);
}

/// Least-squares solver for min ||A x - rhs||, factorized once per problem.
/// Normal equations with Cholesky for small d, Householder QR otherwise.
class LeastSquares {
 public:
  explicit LeastSquares(const MeasurementMatrix& a) : m_(a.rows()), d_(a.cols()), a_(a.entries().begin(), a.entries().end()) {
    if (d_ <= kNormalEquationsMaxDim) {
      factor_cholesky();
    } else {
      factor_qr();
    }
  }

  std::vector<Scalar> solve(const std::vector<Scalar>& rhs) const {
    return d_ <= kNormalEquationsMaxDim ? solve_cholesky(rhs) : solve_qr(rhs);
  }

 private:
  void factor_cholesky() {
    // L L^* = A^* A, L stored lower-triangular row-major.
    std::vector<Scalar> g(d_ * d_);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < d_; ++k) {
        const Scalar ck = std::conj(a_[i * d_ + k]);
        for (std::size_t l = 0; l < d_; ++l) g[k * d_ + l] += ck * a_[i * d_ + l];
      }
    }
    for (std::size_t k = 0; k < d_; ++k) max_diag = std::max(max_diag, g[k * d_ + k].real());
    l_.assign(d_ * d_, Scalar{});
    for (std::size_t j = 0; j < d_; ++j) {
      double diag = g[j * d_ + j].real();
      for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l_[j * d_ + k]);
      if (!(diag > 1e-12 * max_diag) || !(max_diag > 0.0)) {
        throw ConditioningError("measurement matrix is rank deficient; least-squares step is singular", 0);
      }
      const double ljj = std::sqrt(diag);
      l_[j * d_ + j] = ljj;
      for (std::size_t i = j + 1; i < d_; ++i) {
        Scalar s = g[i * d_ + j];
        for (std::size_t k = 0; k < j; ++k) s -= l_[i * d_ + k] * std::conj(l_[j * d_ + k]);
        l_[i * d_ + j] = s / ljj;
      }
    }
  }

  std::vector<Scalar> solve_cholesky(const std::vector<Scalar>& rhs) const {
    std::vector<Scalar> z(d_);
    for (std::size_t k = 0; k < d_; ++k) {
      Scalar s{};
      for (std::size_t i = 0; i < m_; ++i) s += std::conj(a_[i * d_ + k]) * rhs[i];
      z[k] = s;
    }
    for (std::size_t i = 0; i < d_; ++i) {
      Scalar s = z[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_[i * d_ + k] * z[k];
      z[i] = s / l_[i * d_ + i];
    }
    for (std::size_t i = d_; i-- > 0;) {
      Scalar s = z[i];
      for (std::size_t k = i + 1; k < d_; ++k) s -= std::conj(l_[k * d_ + i]) * z[k];
      z[i] = s / l_[i * d_ + i];
    }
    return z;
  }

  void factor_qr() {
    if (m_ < d_) throw ConditioningError("fewer measurements than unknowns; least-squares step is singular", 0);
    qr_ = a_;
    tau_.assign(d_, Scalar{});
    double scale = 0.0;
    for (const auto& e : a_) scale = std::max(scale, std::abs(e));
    for (std::size_t k = 0; k < d_; ++k) {
      double norm = 0.0;
      for (std::size_t i = k; i < m_; ++i) norm += std::norm(qr_[i * d_ + k]);
      norm = std::sqrt(norm);
      if (!(norm > 1e-12 * scale * std::sqrt(static_cast<double>(m_)))) {
        throw ConditioningError("measurement matrix is rank deficient; least-squares step is singular", 0);
      }
      const Scalar x0 = qr_[k * d_ + k];
      const Scalar phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Scalar{1.0};
      const Scalar alpha = -phase * norm;
      // v = x - alpha e1, stored in place below the diagonal with v[0] kept separately.
      qr_[k * d_ + k] = x0 - alpha;
      double vnorm2 = 0.0;
      for (std::size_t i = k; i < m_; ++i) vnorm2 += std::norm(qr_[i * d_ + k]);
      tau_[k] = 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < d_; ++j) {
        Scalar s{};
        for (std::size_t i = k; i < m_; ++i) s += std::conj(qr_[i * d_ + k]) * qr_[i * d_ + j];
        s *= tau_[k];
        for (std::size_t i = k; i < m_; ++i) qr_[i * d_ + j] -= s * qr_[i * d_ + k];
      }
      diag_.push_back(alpha);
    }
  }

  std::vector<Scalar> solve_qr(const std::vector<Scalar>& rhs) const {
    std::vector<Scalar> y(rhs);
    for (std::size_t k = 0; k < d_; ++k) {
      Scalar s{};
      for (std::size_t i = k; i < m_; ++i) s += std::conj(qr_[i * d_ + k]) * y[i];
      s *= tau_[k];
      for (std::size_t i = k; i < m_; ++i) y[i] -= s * qr_[i * d_ + k];
    }
    std::vector<Scalar> x(d_);
    for (std::size_t i = d_; i-- > 0;) {
      Scalar s = y[i];
      for (std::size_t k = i + 1; k < d_; ++k) s -= qr_[i * d_ + k] * x[k];
      x[i] = s / diag_[i];
    }
    return x;
  }

  std::size_t m_;
  std::size_t d_;
  std::vector<Scalar> a_;
  std::vector<Scalar> l_;
  std::vector<Scalar> qr_;
  std::vector<Scalar> tau_;
  std::vector<Scalar> diag_;
};

std::vector<Scalar> multiply(const std::vector<Scalar>& a, std::size_t m, std::size_t d, const std::vector<Scalar>& x) {
  std::vector<Scalar> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    Scalar s{};
    for (std::size_t k = 0; k < d; ++k) s += a[i * d + k] * x[k];
    out[i] = s;
  }
  return out;
}

double residual_of(const std::vector<Scalar>& ax, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double r = std::abs(ax[i]) - b[i];
    s += r * r;
  }
  return std::sqrt(s);
}

struct StartOutcome {
  std::vector<Scalar> x;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

StartOutcome alternate(const std::vector<Scalar>& a, std::size_t m, std::size_t d, Field field,
                       const std::vector<double>& b, const LeastSquares& ls, std::vector<Scalar> x,
                       const RecoveryOptions& opts) {
  StartOutcome out;
  auto ax = multiply(a, m, d, x);
  double res = residual_of(ax, b);
  out.history.push_back(res);
  std::vector<Scalar> target(m);
  int it = 0;
  while (it < opts.max_iters && res > 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      const double mag = std::abs(ax[i]);
      Scalar phase{1.0};
      if (mag > 0.0) phase = field == Field::Real ? Scalar{ax[i].real() < 0.0 ? -1.0 : 1.0} : ax[i] / mag;
      target[i] = phase * b[i];
    }
    auto next = ls.solve(target);
    if (field == Field::Real) {
      for (auto& e : next) e = e.real();
    }
    auto next_ax = multiply(a, m, d, next);
    const double next_res = residual_of(next_ax, b);
    ++it;
    if (next_res > res) break;  // rounding-level stall; keep the better iterate
    const bool done = res - next_res <= opts.tol * res;
    x = std::move(next);
    ax = std::move(next_ax);
    res = next_res;
    out.history.push_back(res);
    if (done) break;
  }
  out.x = std::move(x);
  out.residual = res;
  out.iterations = it;
  return out;
}

std::vector<Scalar> spectral_start(const MeasurementMatrix& a, const std::vector<double>& b) {
  const std::size_t m = a.rows(), d = a.cols();
  std::vector<Scalar> h(d * d);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = b[i] * b[i];
    for (std::size_t k = 0; k < d; ++k) {
      const Scalar ck = w * std::conj(a(i, k));
      for (std::size_t l = 0; l < d; ++l) h[k * d + l] += ck * a(i, l);
    }
  }
  const auto eig = eigh(HermitianMatrix(a.field(), d, std::move(h)));
  const Vector& v = eig.vectors.back();
  std::vector<Scalar> x(v.entries().begin(), v.entries().end());
  // Best scale s for || s |Av| - b ||.
  const auto av = phaseless_map(a, v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    num += av[i] * b[i];
    den += av[i] * av[i];
  }
  const double s = den > 0.0 ? std::max(num, 0.0) / den : 0.0;
  for (auto& e : x) e *= s;
  return x;
}

std::vector<Scalar> random_start(const MeasurementMatrix& a, const std::vector<double>& b, std::uint64_t seed,
                                 std::uint64_t stream) {
  const Vector v = sample_gaussian_vector(a.cols(), a.field(), seed, stream);
  const double nav = a.apply(v).norm();
  const double s = nav > 0.0 ? norm2(b) / nav : 0.0;
  std::vector<Scalar> x(v.entries().begin(), v.entries().end());
  for (auto& e : x) e *= s;
  return x;
}

}  // namespace

RecoveryProblem RecoveryProblem::with_truth(MeasurementMatrix a, Vector x0, std::vector<double> eta) {
  if (eta.size() != a.rows()) throw MismatchError("noise length does not match the number of measurements");
  auto b = phaseless_map(a, x0);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += eta[i];
  return {std::move(a), std::move(b), std::move(x0), std::move(eta)};
}

RecoveryResult solve_quadratic_model(const RecoveryProblem& p, const RecoveryOptions& opts) {
  const std::size_t m = p.a.rows();
  const std::size_t d = p.a.cols();
  const Field field = p.a.field();
  if (m < 1 || d < 1) throw PreconditionError("recovery needs m, d >= 1");
  if (p.b.size() != m) throw MismatchError("observation length does not match the number of measurements");
  if (opts.restarts < 0) throw PreconditionError("restarts must be non-negative");
  if (!opts.spectral_init && opts.restarts == 0) throw PreconditionError("no starting point: enable spectral init or restarts");

  RecoveryResult result;
  const double bnorm = norm2(p.b);
  if (bnorm == 0.0) {
    result.x_hat = Vector::zeros(field, d);
    result.residual = 0.0;
    result.best_start = 0;
    result.starts = 1;
    result.residual_history = {0.0};
  } else {
    const LeastSquares ls(p.a);
    const std::vector<Scalar> a(p.a.entries().begin(), p.a.entries().end());
    const std::size_t offset = opts.spectral_init ? 1 : 0;
    const std::size_t starts = offset + static_cast<std::size_t>(opts.restarts);
    std::vector<StartOutcome> outcomes(starts);
    parallel_for(starts, opts.threads, [&](std::size_t s) {
      auto x = (opts.spectral_init && s == 0) ? spectral_start(p.a, p.b)
                                              : random_start(p.a, p.b, opts.seed, stream_id(kRecoveryStream, s));
      outcomes[s] = alternate(a, m, d, field, p.b, ls, std::move(x), opts);
    });
    std::size_t best = 0;
    for (std::size_t s = 1; s < starts; ++s) {
      if (outcomes[s].residual < outcomes[best].residual) best = s;
    }
    result.x_hat = Vector(field, std::move(outcomes[best].x));
    result.residual = outcomes[best].residual;
    result.best_start = static_cast<int>(best);
    result.iterations = outcomes[best].iterations;
    result.starts = static_cast<int>(starts);
    result.residual_history = std::move(outcomes[best].history);
  }

  if (p.x0) result.dist_to_truth = dist(result.x_hat, *p.x0);
  if (p.eta) result.certified = result.residual <= norm2(*p.eta) + 1e-10 * std::max(1.0, bnorm);
  return result;
}

ErrorBoundCheck check_error_bound(const RecoveryResult& r, const RecoveryProblem& p, double delta) {
  if (!p.x0 || !p.eta) throw PreconditionError("error bound check needs the ground truth x0 and the noise eta");
  if (!(delta > 0.0 && delta <= 0.05)) throw PreconditionError("delta must lie in (0, 0.05]");
  const double m = static_cast<double>(p.a.rows());
  ErrorBoundCheck out;
  out.bound = 2.0 * universal_lower_bound(p.a.field()) / (1.0 - delta) * norm2(*p.eta) / std::sqrt(m);
  out.achieved = dist(r.x_hat, *p.x0);
  out.holds = out.achieved <= out.bound + 1e-9 * std::max(1.0, p.x0->norm());
  return out;
}

}  // namespace prstab
