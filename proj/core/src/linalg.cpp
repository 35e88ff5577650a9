#include "prstab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace prstab {

std::string_view to_string(Field field) {
  return field == Field::Real ? "real" : "complex";
}

Vector::Vector(Field field, std::vector<Scalar> entries) : field_(field), entries_(std::move(entries)) {
  if (field_ == Field::Real) {
    for (const auto& e : entries_) {
      if (e.imag() != 0.0) throw MismatchError("real vector with a non-zero imaginary part");
    }
  }
}

Vector Vector::real(std::vector<double> entries) {
  std::vector<Scalar> z(entries.begin(), entries.end());
  return Vector(Field::Real, std::move(z));
}

Vector Vector::zeros(Field field, std::size_t size) {
  return Vector(field, std::vector<Scalar>(size));
}

double Vector::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e);
  return s;
}

double Vector::norm() const noexcept { return std::sqrt(squared_norm()); }

Vector Vector::scaled(Scalar c) const {
  if (field_ == Field::Real && c.imag() != 0.0) throw MismatchError("complex scale applied to a real vector");
  std::vector<Scalar> out(entries_);
  for (auto& e : out) e *= c;
  return Vector(field_, std::move(out));
}

namespace {

void require_compatible(const Vector& x, const Vector& y) {
  if (x.field() != y.field()) throw MismatchError("vectors over different fields");
  if (x.size() != y.size()) throw MismatchError("vectors of different dimension");
}

}  // namespace

Scalar inner(const Vector& x, const Vector& y) {
  require_compatible(x, y);
  Scalar s{};
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s;
}

MeasurementMatrix::MeasurementMatrix(Field field, std::size_t rows, std::size_t cols, std::vector<Scalar> entries)
    : field_(field), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) throw MismatchError("matrix entry count does not equal rows * cols");
  if (field_ == Field::Real) {
    for (const auto& e : entries_) {
      if (e.imag() != 0.0) throw MismatchError("real matrix with a non-zero imaginary part");
    }
  }
}

MeasurementMatrix MeasurementMatrix::from_real_rows(const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<Scalar>> z;
  z.reserve(rows.size());
  for (const auto& r : rows) z.emplace_back(r.begin(), r.end());
  return from_rows(Field::Real, z);
}

MeasurementMatrix MeasurementMatrix::from_rows(Field field, const std::vector<std::vector<Scalar>>& rows) {
  if (rows.empty()) throw PreconditionError("matrix needs at least one row");
  const std::size_t d = rows.front().size();
  std::vector<Scalar> entries;
  entries.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw MismatchError("rows of different dimension");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return MeasurementMatrix(field, rows.size(), d, std::move(entries));
}

MeasurementMatrix MeasurementMatrix::zeros(Field field, std::size_t rows, std::size_t cols) {
  return MeasurementMatrix(field, rows, cols, std::vector<Scalar>(rows * cols));
}

std::vector<double> MeasurementMatrix::real_entries() const {
  std::vector<double> out(entries_.size());
  std::transform(entries_.begin(), entries_.end(), out.begin(), [](const Scalar& z) { return z.real(); });
  return out;
}

Vector MeasurementMatrix::apply(const Vector& x) const {
  if (x.field() != field_) throw MismatchError("matrix and vector over different fields");
  if (x.size() != cols_) throw MismatchError("vector dimension does not match matrix columns");
  std::vector<Scalar> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Scalar s{};
    for (std::size_t k = 0; k < cols_; ++k) s += entries_[i * cols_ + k] * x[k];
    out[i] = s;
  }
  return Vector(field_, std::move(out));
}

MeasurementMatrix MeasurementMatrix::scaled(Scalar c) const {
  std::vector<Scalar> out(entries_);
  for (auto& e : out) e *= c;
  return MeasurementMatrix(field_, rows_, cols_, std::move(out));
}

HermitianMatrix::HermitianMatrix(Field field, std::size_t dim, std::vector<Scalar> entries)
    : field_(field), dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) throw MismatchError("Hermitian matrix entry count does not equal dim^2");
  for (std::size_t i = 0; i < dim_; ++i) {
    entries_[i * dim_ + i] = entries_[i * dim_ + i].real();
    for (std::size_t j = i + 1; j < dim_; ++j) {
      const Scalar avg = 0.5 * (entries_[i * dim_ + j] + std::conj(entries_[j * dim_ + i]));
      entries_[i * dim_ + j] = avg;
      entries_[j * dim_ + i] = std::conj(avg);
    }
  }
  if (field_ == Field::Real) {
    for (auto& e : entries_) e = e.real();
  }
}

double HermitianMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += entries_[i * dim_ + i].real();
  return t;
}

double HermitianMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e);
  return std::sqrt(s);
}

HermitianMatrix gram(const MeasurementMatrix& a) {
  const std::size_t d = a.cols();
  std::vector<Scalar> g(d * d);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      const Scalar ck = std::conj(r[k]);
      for (std::size_t l = k; l < d; ++l) g[k * d + l] += ck * r[l];
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t l = 0; l < k; ++l) g[k * d + l] = std::conj(g[l * d + k]);
  }
  return HermitianMatrix(a.field(), d, std::move(g));
}

namespace detail {

namespace {

double magnitude(double v) { return std::abs(v); }
double magnitude(const Scalar& v) { return std::abs(v); }
double squared(double v) { return v * v; }
double squared(const Scalar& v) { return std::norm(v); }
double real_part(double v) { return v; }
double real_part(const Scalar& v) { return v.real(); }
double conj(double v) { return v; }
Scalar conj(const Scalar& v) { return std::conj(v); }
double unit_phase(double v) { return v < 0.0 ? -1.0 : 1.0; }
Scalar unit_phase(const Scalar& v) { return v / std::abs(v); }

template <typename T>
double off_diagonal_norm(const std::vector<T>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s += squared(a[i * n + j]);
    }
  }
  return std::sqrt(s);
}

}  // namespace

template <typename T>
void jacobi(std::vector<T>& a, std::size_t n, double tol, int max_sweeps, std::vector<T>* vectors) {
  if (vectors) {
    vectors->assign(n * n, T{});
    for (std::size_t i = 0; i < n; ++i) (*vectors)[i * n + i] = T{1};
  }
  double frob = 0.0;
  for (const auto& e : a) frob += squared(e);
  frob = std::sqrt(frob);
  const double target = tol * frob;
  const int cap = max_sweeps > 0 ? max_sweeps : static_cast<int>(100 * n * n);

  double off = off_diagonal_norm(a, n);
  for (int sweep = 0; off > target; ++sweep) {
    if (sweep >= cap) throw ConvergenceError("Jacobi eigensolver did not converge", off);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T g = a[p * n + q];
        const double gabs = magnitude(g);
        if (gabs == 0.0) continue;
        // Phase-rotate to a real symmetric 2x2 block, then a real Jacobi rotation.
        const T e = unit_phase(g);
        const double app = real_part(a[p * n + p]);
        const double aqq = real_part(a[q * n + q]);
        const double tau = (aqq - app) / (2.0 * gabs);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U = [[c, s], [-s conj(e), c conj(e)]] acting on coordinates (p, q).
        const T upp = T{c};
        const T upq = T{s};
        const T uqp = -s * conj(e);
        const T uqq = c * conj(e);
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a[k * n + p];
          const T akq = a[k * n + q];
          a[k * n + p] = akp * upp + akq * uqp;
          a[k * n + q] = akp * upq + akq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a[p * n + k];
          const T aqk = a[q * n + k];
          a[p * n + k] = conj(upp) * apk + conj(uqp) * aqk;
          a[q * n + k] = conj(upq) * apk + conj(uqq) * aqk;
        }
        a[p * n + q] = T{};
        a[q * n + p] = T{};
        a[p * n + p] = T{real_part(a[p * n + p])};
        a[q * n + q] = T{real_part(a[q * n + q])};
        if (vectors) {
          auto& v = *vectors;
          for (std::size_t k = 0; k < n; ++k) {
            const T vkp = v[k * n + p];
            const T vkq = v[k * n + q];
            v[k * n + p] = vkp * upp + vkq * uqp;
            v[k * n + q] = vkp * upq + vkq * uqq;
          }
        }
      }
    }
    off = off_diagonal_norm(a, n);
  }
}

template void jacobi<double>(std::vector<double>&, std::size_t, double, int, std::vector<double>*);
template void jacobi<Scalar>(std::vector<Scalar>&, std::size_t, double, int, std::vector<Scalar>*);

double min_eig_psd(std::span<const double> a, std::size_t n) {
  double v = 0.0;
  if (n == 1) {
    v = a[0];
  } else if (n == 2) {
    const double mean = 0.5 * (a[0] + a[3]);
    const double half = 0.5 * (a[0] - a[3]);
    v = mean - std::hypot(half, a[1]);
  } else {
    std::vector<double> w(a.begin(), a.end());
    jacobi(w, n, 1e-14, 0, static_cast<std::vector<double>*>(nullptr));
    v = w[0];
    for (std::size_t i = 1; i < n; ++i) v = std::min(v, w[i * n + i]);
  }
  return std::max(v, 0.0);
}

}  // namespace detail

std::vector<double> eig_hermitian(const HermitianMatrix& h, const EigOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("eigensolver tolerance must be positive");
  const std::size_t n = h.dim();
  if (n == 0) return {};
  if (n == 1) return {h(0, 0).real()};
  if (n == 2) {
    const double mean = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double half = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double r = std::hypot(half, std::abs(h(0, 1)));
    return {mean - r, mean + r};
  }
  std::vector<Scalar> work(h.entries().begin(), h.entries().end());
  detail::jacobi(work, n, opts.tol, opts.max_sweeps, static_cast<std::vector<Scalar>*>(nullptr));
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = work[i * n + i].real();
  std::sort(values.begin(), values.end());
  return values;
}

EigenDecomposition eigh(const HermitianMatrix& h, const EigOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("eigensolver tolerance must be positive");
  const std::size_t n = h.dim();
  std::vector<Scalar> work(h.entries().begin(), h.entries().end());
  std::vector<Scalar> vecs;
  detail::jacobi(work, n, opts.tol, opts.max_sweeps, &vecs);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return work[i * n + i].real() < work[j * n + j].real(); });

  EigenDecomposition out;
  for (const std::size_t col : order) {
    out.values.push_back(work[col * n + col].real());
    std::vector<Scalar> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = vecs[k * n + col];
    if (h.field() == Field::Real) {
      for (auto& e : v) e = e.real();
    }
    out.vectors.emplace_back(h.field(), std::move(v));
  }
  return out;
}

double spectral_norm(const MeasurementMatrix& a) {
  const auto values = eig_hermitian(gram(a));
  if (values.empty()) return 0.0;
  return std::sqrt(std::max(values.back(), 0.0));
}

double dist(const Vector& x, const Vector& y) {
  require_compatible(x, y);
  if (x.field() == Field::Real) {
    double minus = 0.0;
    double plus = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double a = x[k].real();
      const double b = y[k].real();
      minus += (a - b) * (a - b);
      plus += (a + b) * (a + b);
    }
    return std::sqrt(std::min(minus, plus));
  }
  // align y to x with the optimal phase, then take the difference directly
  Scalar t{0.0, 0.0};
  for (std::size_t k = 0; k < x.size(); ++k) t += std::conj(x[k]) * y[k];
  const double at = std::abs(t);
  const Scalar p = at > 0.0 ? std::conj(t) / at : Scalar{1.0, 0.0};
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sq += std::norm(x[k] - p * y[k]);
  return std::sqrt(sq);
}

std::vector<double> phaseless_map(const MeasurementMatrix& a, const Vector& x) {
  const Vector ax = a.apply(x);
  std::vector<double> out(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) out[i] = std::abs(ax[i]);
  return out;
}

}  // namespace prstab
