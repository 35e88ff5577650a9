#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "prstab/errors.hpp"

namespace prstab {

enum class Field { Real, Complex };

std::string_view to_string(Field field);

using Scalar = std::complex<double>;

/// A vector over R or C. Entries of a Real vector have zero imaginary part.
class Vector {
 public:
  Vector() = default;
  Vector(Field field, std::vector<Scalar> entries);

  static Vector real(std::vector<double> entries);
  static Vector zeros(Field field, std::size_t size);

  Field field() const noexcept { return field_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Scalar& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Scalar> entries() const noexcept { return entries_; }

  double squared_norm() const noexcept;
  double norm() const noexcept;
  Vector scaled(Scalar c) const;

 private:
  Field field_ = Field::Real;
  std::vector<Scalar> entries_;
};

/// <x, y> = sum conj(x_k) y_k.
Scalar inner(const Vector& x, const Vector& y);

/// The m x d matrix A = (a_1, ..., a_m)^*. Row i holds the entries of a_i^*,
/// so (Ax)_i = <a_i, x>.
class MeasurementMatrix {
 public:
  MeasurementMatrix() = default;
  MeasurementMatrix(Field field, std::size_t rows, std::size_t cols, std::vector<Scalar> entries);

  static MeasurementMatrix from_real_rows(const std::vector<std::vector<double>>& rows);
  static MeasurementMatrix from_rows(Field field, const std::vector<std::vector<Scalar>>& rows);
  static MeasurementMatrix zeros(Field field, std::size_t rows, std::size_t cols);

  Field field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  const Scalar& operator()(std::size_t i, std::size_t k) const { return entries_[i * cols_ + k]; }
  std::span<const Scalar> row(std::size_t i) const {
    return std::span<const Scalar>(entries_).subspan(i * cols_, cols_);
  }
  std::span<const Scalar> entries() const noexcept { return entries_; }

  /// Row-major copy of the real parts; meaningful for Real matrices.
  std::vector<double> real_entries() const;

  Vector apply(const Vector& x) const;
  MeasurementMatrix scaled(Scalar c) const;

 private:
  Field field_ = Field::Real;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> entries_;
};

/// Dense d x d Hermitian matrix; construction symmetrizes H <- (H + H^*)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  HermitianMatrix(Field field, std::size_t dim, std::vector<Scalar> entries);

  Field field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return dim_; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  std::span<const Scalar> entries() const noexcept { return entries_; }

  double trace() const noexcept;
  double frobenius_norm() const noexcept;

 private:
  Field field_ = Field::Real;
  std::size_t dim_ = 0;
  std::vector<Scalar> entries_;
};

struct EigOptions {
  double tol = 1e-12;
  int max_sweeps = 0;  // 0 selects 100 * d^2
};

struct EigenDecomposition {
  std::vector<double> values;   // ascending
  std::vector<Vector> vectors;  // vectors[k] pairs with values[k]
};

HermitianMatrix gram(const MeasurementMatrix& a);

/// Ascending eigenvalues. Closed form for d <= 2, cyclic Jacobi otherwise.
std::vector<double> eig_hermitian(const HermitianMatrix& h, const EigOptions& opts = {});

/// Eigenvalues and orthonormal eigenvectors by cyclic Jacobi.
EigenDecomposition eigh(const HermitianMatrix& h, const EigOptions& opts = {});

double spectral_norm(const MeasurementMatrix& a);

/// min over unimodular c of ||x - c y||_2.
double dist(const Vector& x, const Vector& y);

/// |Ax|, entrywise.
std::vector<double> phaseless_map(const MeasurementMatrix& a, const Vector& x);

namespace detail {

/// Cyclic Jacobi on a row-major n x n Hermitian (or real symmetric) matrix, in place.
/// On return the diagonal holds the eigenvalues; if vectors is non-null it receives
/// the eigenvectors as columns (row-major n x n).
template <typename T>
void jacobi(std::vector<T>& a, std::size_t n, double tol, int max_sweeps, std::vector<T>* vectors);

/// Smallest eigenvalue of a real symmetric n x n matrix, clamped at 0.
double min_eig_psd(std::span<const double> a, std::size_t n);

}  // namespace detail

}  // namespace prstab
