#include "prstab/stability.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "prstab/parallel.hpp"
#include "prstab/rng.hpp"
#include "frame_smooth.hpp"
#include "search.hpp"

namespace prstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kChunk = 4096;
constexpr std::uint64_t kNumericStream = 1;
constexpr std::uint64_t kFrameStream = 2;

// ---------------------------------------------------------------------------
// Subset enumeration

struct RealRows {
  std::size_t m = 0;
  std::size_t d = 0;
  std::vector<double> data;  // row-major

  const double* row(std::size_t i) const { return &data[i * d]; }
};

void add_outer(std::vector<double>& g, const double* r, std::size_t d, double sign) {
  for (std::size_t k = 0; k < d; ++k) {
    const double rk = sign * r[k];
    for (std::size_t l = 0; l < d; ++l) g[k * d + l] += rk * r[l];
  }
}

struct SplitValue {
  double value = kInf;
  std::uint64_t mask = 0;
};

template <typename Combine>
double evaluate_mask(const RealRows& rows, std::uint64_t mask, Combine& combine) {
  const std::size_t d = rows.d;
  std::vector<double> gi(d * d, 0.0);
  std::vector<double> gc(d * d, 0.0);
  for (std::size_t i = 0; i < rows.m; ++i) {
    add_outer(((mask >> i) & 1U) ? gi : gc, rows.row(i), d, 1.0);
  }
  return combine(detail::min_eig_psd(gi, d), detail::min_eig_psd(gc, d));
}

template <typename Combine>
SubsetMinimum enumerate_splits(const MeasurementMatrix& a, const EnumerationOptions& opts, Combine combine) {
  if (a.field() != Field::Real) {
    throw PreconditionError("subset enumeration is defined for real matrices only; use the numeric method");
  }
  if (a.rows() == 0 || a.cols() == 0) throw PreconditionError("matrix must have at least one row and column");
  if (a.rows() > opts.max_rows || a.rows() > 63) {
    throw PreconditionError("m = " + std::to_string(a.rows()) + " exceeds the enumeration cap of " +
                            std::to_string(opts.max_rows) + "; use the numeric method");
  }

  RealRows rows{a.rows(), a.cols(), a.real_entries()};
  const std::size_t d = rows.d;
  std::vector<double> total(d * d, 0.0);
  for (std::size_t i = 0; i < rows.m; ++i) add_outer(total, rows.row(i), d, 1.0);

  // The last row stays in I^c; Gray-code order over the remaining m-1 rows.
  const std::uint64_t count = std::uint64_t{1} << (rows.m - 1);
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<SplitValue> best(chunks);

  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(count, begin + kChunk);
    std::vector<double> gi(d * d, 0.0);
    std::vector<double> gc(d * d);
    std::uint64_t gray = begin ^ (begin >> 1);
    for (std::size_t i = 0; i + 1 < rows.m; ++i) {
      if ((gray >> i) & 1U) add_outer(gi, rows.row(i), d, 1.0);
    }
    SplitValue local;
    for (std::uint64_t k = begin; k < end; ++k) {
      if (k != begin) {
        const int bit = std::countr_zero(k);
        gray ^= std::uint64_t{1} << bit;
        add_outer(gi, rows.row(static_cast<std::size_t>(bit)), d, ((gray >> bit) & 1U) ? 1.0 : -1.0);
      }
      for (std::size_t j = 0; j < d * d; ++j) gc[j] = total[j] - gi[j];
      const double v = combine(detail::min_eig_psd(gi, d), detail::min_eig_psd(gc, d));
      if (v < local.value) local = {v, gray};
    }
    best[c] = local;
  });

  SplitValue winner;
  for (const auto& b : best) {
    if (b.value < winner.value) winner = b;
  }

  SubsetMinimum out;
  out.value = evaluate_mask(rows, winner.mask, combine);
  for (std::size_t i = 0; i + 1 < rows.m; ++i) {
    if ((winner.mask >> i) & 1U) out.certificate.subset.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orthogonal-pair objective

struct PairValue {
  double f = kInf;  // squared ratio
  double t = 0.0;
};

/// Minimizes (p - 2 t q + t^2 r) / (1 + t^2) over t in [0, 1].
PairValue best_scale(double p, double q, double r) {
  PairValue best{p, 0.0};
  const double at_one = 0.5 * (p - 2.0 * q + r);
  if (at_one < best.f) best = {at_one, 1.0};
  if (q > 0.0) {
    // Positive root of q t^2 + (r - p) t - q = 0.
    const double b = r - p;
    const double disc = std::sqrt(b * b + 4.0 * q * q);
    const double t = b > 0.0 ? 2.0 * q / (b + disc) : (disc - b) / (2.0 * q);
    if (t > 0.0 && t < 1.0) {
      const double v = (p - 2.0 * t * q + t * t * r) / (1.0 + t * t);
      if (v < best.f) best = {v, t};
    }
  }
  best.f = std::max(best.f, 0.0);
  return best;
}

class PairObjective {
 public:
  explicit PairObjective(const MeasurementMatrix& a)
      : field_(a.field()), m_(a.rows()), d_(a.cols()), complex_(a.entries().begin(), a.entries().end()) {
    if (field_ == Field::Real) real_ = a.real_entries();
  }

  Field field() const { return field_; }
  std::size_t dim() const { return d_; }

  PairValue real_pair(const double* x, const double* u) const {
    double p = 0.0, q = 0.0, r = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &real_[i * d_];
      double ax = 0.0, au = 0.0;
      for (std::size_t k = 0; k < d_; ++k) {
        ax += row[k] * x[k];
        au += row[k] * u[k];
      }
      p += ax * ax;
      r += au * au;
      q += std::abs(ax * au);
    }
    return best_scale(p, q, r);
  }

  PairValue complex_pair(const Scalar* x, const Scalar* u) const {
    double p = 0.0, q = 0.0, r = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar* row = &complex_[i * d_];
      Scalar ax{}, au{};
      for (std::size_t k = 0; k < d_; ++k) {
        ax += row[k] * x[k];
        au += row[k] * u[k];
      }
      const double nx = std::norm(ax);
      const double nu = std::norm(au);
      p += nx;
      r += nu;
      q += std::sqrt(nx * nu);
    }
    return best_scale(p, q, r);
  }

 private:
  Field field_;
  std::size_t m_;
  std::size_t d_;
  std::vector<Scalar> complex_;
  std::vector<double> real_;
};

/// A candidate pair in parameter space plus the map back to (x, u).
struct PairPoint {
  std::vector<Scalar> x;
  std::vector<Scalar> u;
};

// Real, d = 2: x = (cos a, sin a), u = (-sin a, cos a).
PairPoint angle_pair(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{c, s}, {-s, c}};
}

// Complex, d = 2: x = (cos th, e^{i ph} sin th), u = (-e^{-i ph} sin th, cos th).
PairPoint sphere_pair(double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Scalar e = std::polar(1.0, phi);
  return {{c, e * s}, {-std::conj(e) * s, c}};
}

// General d: Gram-Schmidt on the two halves of a real parameter vector
// (interleaved re/im per entry when complex). Returns false if degenerate.
bool chart_pair(const std::vector<double>& v, std::size_t d, Field field, PairPoint& out) {
  const bool cplx = field == Field::Complex;
  out.x.assign(d, Scalar{});
  out.u.assign(d, Scalar{});
  const std::size_t half = cplx ? 2 * d : d;
  for (std::size_t k = 0; k < d; ++k) {
    if (cplx) {
      out.x[k] = {v[2 * k], v[2 * k + 1]};
      out.u[k] = {v[half + 2 * k], v[half + 2 * k + 1]};
    } else {
      out.x[k] = v[k];
      out.u[k] = v[half + k];
    }
  }
  double nx = 0.0;
  for (const auto& e : out.x) nx += std::norm(e);
  nx = std::sqrt(nx);
  if (!(nx > 1e-300)) return false;
  for (auto& e : out.x) e /= nx;
  Scalar proj{};
  for (std::size_t k = 0; k < d; ++k) proj += std::conj(out.x[k]) * out.u[k];
  double nu = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    out.u[k] -= proj * out.x[k];
    nu += std::norm(out.u[k]);
  }
  nu = std::sqrt(nu);
  if (!(nu > 1e-300)) return false;
  for (auto& e : out.u) e /= nu;
  return true;
}

std::vector<double> chart_params(const PairPoint& p, Field field) {
  std::vector<double> v;
  for (const auto* part : {&p.x, &p.u}) {
    for (const auto& e : *part) {
      v.push_back(e.real());
      if (field == Field::Complex) v.push_back(e.imag());
    }
  }
  return v;
}

PairValue evaluate(const PairObjective& obj, const PairPoint& p) {
  if (obj.field() == Field::Real) {
    double x[64], u[64];
    std::vector<double> xs, us;
    const std::size_t d = obj.dim();
    double* xp = x;
    double* up = u;
    if (d > 64) {
      xs.resize(d);
      us.resize(d);
      xp = xs.data();
      up = us.data();
    }
    for (std::size_t k = 0; k < d; ++k) {
      xp[k] = p.x[k].real();
      up[k] = p.u[k].real();
    }
    return obj.real_pair(xp, up);
  }
  return obj.complex_pair(p.x.data(), p.u.data());
}

struct StartResult {
  double f = kInf;
  double t = 0.0;
  PairPoint pair;
  int iterations = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Indices of grid local minima (cyclic neighbourhoods), best first.
std::vector<std::size_t> grid_minima(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                                     bool wrap_rows, std::size_t limit) {
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = values[i * cols + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1 && is_min; ++dj) {
          if (di == 0 && dj == 0) continue;
          long ni = static_cast<long>(i) + di;
          if (ni < 0 || ni >= static_cast<long>(rows)) {
            if (!wrap_rows) continue;
            ni = (ni + static_cast<long>(rows)) % static_cast<long>(rows);
          }
          const long nj = (static_cast<long>(j) + dj + static_cast<long>(cols)) % static_cast<long>(cols);
          const double w = values[static_cast<std::size_t>(ni) * cols + static_cast<std::size_t>(nj)];
          // Strict on one side so plateaus yield a single representative.
          const std::size_t here = i * cols + j;
          const std::size_t there = static_cast<std::size_t>(ni) * cols + static_cast<std::size_t>(nj);
          if (w < v || (w == v && there < here)) is_min = false;
        }
      }
      if (is_min) minima.push_back(i * cols + j);
    }
  }
  std::stable_sort(minima.begin(), minima.end(),
                   [&](std::size_t p, std::size_t q) { return values[p] < values[q]; });
  if (minima.size() > limit) minima.resize(limit);
  return minima;
}

NumericMinimum finish(const std::vector<StartResult>& results, long total_evals) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].f < results[best].f) best = i;
  }
  const auto& r = results[best];
  NumericMinimum out;
  out.value = std::sqrt(r.f);
  out.certificate.scale = r.t;
  out.certificate.restart = static_cast<int>(best);
  out.certificate.iterations = r.iterations;
  out.certificate.evaluations = total_evals;
  out.certificate.converged = r.converged;
  return out;
}

}  // namespace

std::string_view to_string(LowerMethod method) {
  return method == LowerMethod::ExactRealSubset ? "exact_real_subset" : "numeric_orth_pair";
}

double upper_lipschitz(const MeasurementMatrix& a) { return spectral_norm(a); }

SubsetMinimum delta_lower_exact_real(const MeasurementMatrix& a, const EnumerationOptions& opts) {
  return enumerate_splits(a, opts, [](double l1, double l2) { return std::sqrt(l1 + l2); });
}

SubsetMinimum sigma_bound(const MeasurementMatrix& a, const EnumerationOptions& opts) {
  return enumerate_splits(a, opts, [](double l1, double l2) { return std::sqrt(std::max(l1, l2)); });
}

double lipschitz_ratio(const MeasurementMatrix& a, const Vector& x, const Vector& y) {
  const double den = dist(x, y);  // also checks field and size
  if (!(den > 0.0)) throw PreconditionError("Lipschitz ratio undefined for dist(x, y) = 0");
  // |u| - |v| = Re((u - v) conj(u + v)) / (|u| + |v|) with u -+ v = A (x -+ y),
  // which stays accurate for nearby pairs.
  std::vector<Scalar> diff(x.size()), sum(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    diff[k] = x[k] - y[k];
    sum[k] = x[k] + y[k];
  }
  const Vector ad = a.apply(Vector(x.field(), diff));
  const Vector as = a.apply(Vector(x.field(), sum));
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double mag = 0.5 * (std::abs(ad[i] + as[i]) + std::abs(as[i] - ad[i]));
    const double gap = mag > 0.0 ? std::real(ad[i] * std::conj(as[i])) / mag : 0.0;
    s += gap * gap;
  }
  return std::sqrt(s) / den;
}

NumericMinimum lower_lipschitz_numeric(const MeasurementMatrix& a, const NumericOptions& opts) {
  if (a.rows() == 0 || a.cols() == 0) throw PreconditionError("matrix must have at least one row and column");
  if (opts.restarts < 1) throw PreconditionError("restarts must be at least 1");
  const std::size_t d = a.cols();
  const Field field = a.field();
  PairObjective obj(a);

  if (d == 1) {
    // x = unit scalar and y must be 0: the ratio is ||A x|| = ||A||.
    PairPoint p{{Scalar{1.0}}, {Scalar{0.0}}};
    NumericMinimum out;
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::norm(a(i, 0));
    out.value = std::sqrt(s);
    out.certificate.x = Vector(field, p.x);
    out.certificate.y = Vector(field, p.u);
    out.certificate.scale = 0.0;
    out.certificate.restart = 0;
    out.certificate.converged = true;
    return out;
  }

  const std::size_t restarts = static_cast<std::size_t>(opts.restarts);
  std::vector<StartResult> results;
  long seed_evals = 0;

  detail::SearchOptions local;
  local.min_step = opts.tol;
  local.max_iterations = opts.max_iters;
  local.max_evaluations = 200L * opts.max_iters;

  if (field == Field::Real && d == 2) {
    const std::size_t grid = 1024;
    std::vector<double> values(grid);
    for (std::size_t i = 0; i < grid; ++i) {
      values[i] = evaluate(obj, angle_pair(std::numbers::pi * static_cast<double>(i) / grid)).f;
    }
    seed_evals += static_cast<long>(grid);
    const auto starts = grid_minima(values, 1, grid, true, restarts);
    results.resize(starts.size());
    const double h = std::numbers::pi / grid;
    parallel_for(starts.size(), opts.threads, [&](std::size_t s) {
      const double center = std::numbers::pi * static_cast<double>(starts[s]) / grid;
      long evals = 0;
      auto f = [&](double ang) { return evaluate(obj, angle_pair(ang)).f; };
      const double ang = detail::golden_section(f, center - h, center + h, opts.tol, opts.max_iters, evals).first;
      StartResult r;
      r.pair = angle_pair(ang);
      const auto pv = evaluate(obj, r.pair);
      r.f = pv.f;
      r.t = pv.t;
      r.evaluations = evals;
      r.converged = true;
      results[s] = std::move(r);
    });
  } else if (field == Field::Complex && d == 2) {
    const std::size_t nt = 33, np = 64;
    std::vector<double> values(nt * np);
    auto theta_of = [&](std::size_t i) { return 0.5 * std::numbers::pi * static_cast<double>(i) / (nt - 1); };
    auto phi_of = [&](std::size_t j) { return 2.0 * std::numbers::pi * static_cast<double>(j) / np; };
    for (std::size_t i = 0; i < nt; ++i) {
      for (std::size_t j = 0; j < np; ++j) values[i * np + j] = evaluate(obj, sphere_pair(theta_of(i), phi_of(j))).f;
    }
    seed_evals += static_cast<long>(nt * np);
    const auto starts = grid_minima(values, nt, np, false, restarts);
    results.resize(starts.size());
    local.initial_step = 0.5 * std::numbers::pi / (nt - 1);
    parallel_for(starts.size(), opts.threads, [&](std::size_t s) {
      CounterRng rng(opts.seed, stream_id(kNumericStream, s));
      auto f = [&](const std::vector<double>& v) { return evaluate(obj, sphere_pair(v[0], v[1])).f; };
      const auto sr = detail::pattern_search(f, {theta_of(starts[s] / np), phi_of(starts[s] % np)}, local, rng);
      StartResult r;
      r.pair = sphere_pair(sr.point[0], sr.point[1]);
      const auto pv = evaluate(obj, r.pair);
      r.f = pv.f;
      r.t = pv.t;
      r.iterations = sr.iterations;
      r.evaluations = sr.evaluations;
      r.converged = sr.converged;
      results[s] = std::move(r);
    });
  } else {
    // Random orthonormal pairs; the best `restarts` of a larger pool are refined.
    const std::size_t pool = 16 * restarts;
    const std::size_t nparams = (field == Field::Complex ? 4 : 2) * d;
    std::vector<std::vector<double>> candidates(pool);
    std::vector<double> values(pool, kInf);
    parallel_for(pool, opts.threads, [&](std::size_t c) {
      CounterRng rng(opts.seed, stream_id(kNumericStream, c, 1));
      std::vector<double> v(nparams);
      for (auto& e : v) e = rng.normal();
      PairPoint p;
      if (chart_pair(v, d, field, p)) {
        values[c] = evaluate(obj, p).f;
        candidates[c] = chart_params(p, field);
      }
    });
    seed_evals += static_cast<long>(pool);
    std::vector<std::size_t> order(pool);
    for (std::size_t i = 0; i < pool; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return values[p] < values[q]; });
    order.resize(restarts);

    results.resize(restarts);
    parallel_for(restarts, opts.threads, [&](std::size_t s) {
      CounterRng rng(opts.seed, stream_id(kNumericStream, s, 2));
      PairPoint scratch;
      auto f = [&](const std::vector<double>& v) {
        if (!chart_pair(v, d, field, scratch)) return kInf;
        return evaluate(obj, scratch).f;
      };
      auto recenter = [&](std::vector<double>& v) {
        if (chart_pair(v, d, field, scratch)) v = chart_params(scratch, field);
      };
      const auto sr = detail::pattern_search(f, candidates[order[s]], local, rng, recenter);
      StartResult r;
      chart_pair(sr.point, d, field, r.pair);
      const auto pv = evaluate(obj, r.pair);
      r.f = pv.f;
      r.t = pv.t;
      r.iterations = sr.iterations;
      r.evaluations = sr.evaluations;
      r.converged = sr.converged;
      results[s] = std::move(r);
    });
  }

  long total = seed_evals;
  for (const auto& r : results) total += r.evaluations;
  auto out = finish(results, total);
  const auto& best = results[static_cast<std::size_t>(out.certificate.restart)];
  out.certificate.x = Vector(field, best.pair.x);
  std::vector<Scalar> y(best.pair.u);
  for (auto& e : y) e *= best.t;
  if (field == Field::Real) {
    for (auto& e : y) e = e.real();
    std::vector<Scalar> x(best.pair.x);
    for (auto& e : x) e = e.real();
    out.certificate.x = Vector(field, std::move(x));
  }
  out.certificate.y = Vector(field, std::move(y));
  return out;
}

StabilityReport condition_number(const MeasurementMatrix& a, LowerMethod method, const AnalysisOptions& opts) {
  StabilityReport rep;
  rep.method = method;
  rep.upper = upper_lipschitz(a);
  if (method == LowerMethod::ExactRealSubset) {
    auto res = delta_lower_exact_real(a, opts.enumeration);
    rep.lower = res.value;
    rep.certificate = std::move(res.certificate);
  } else {
    auto res = lower_lipschitz_numeric(a, opts.numeric);
    rep.lower = res.value;
    rep.certificate = std::move(res.certificate);
  }
  rep.beta = rep.lower <= opts.zero_threshold * rep.upper ? kInf : rep.upper / rep.lower;
  return rep;
}

double universal_lower_bound(Field field) {
  constexpr double pi = std::numbers::pi;
  return field == Field::Real ? std::sqrt(pi / (pi - 2.0)) : std::sqrt(4.0 / (4.0 - pi));
}

double real_md_lower_bound(int m) {
  if (m < 3) throw PreconditionError("the real lower bound needs m >= 3");
  const double md = static_cast<double>(m);
  return 1.0 / std::sqrt(1.0 - 1.0 / (md * std::sin(std::numbers::pi / (2.0 * md))));
}

MeasurementMatrix FramePolar::to_matrix() const {
  if (radii.size() != angles.size()) throw MismatchError("radii and angles differ in length");
  std::vector<std::vector<double>> rows;
  rows.reserve(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    rows.push_back({radii[i] * std::cos(angles[i]), radii[i] * std::sin(angles[i])});
  }
  return MeasurementMatrix::from_real_rows(rows);
}

namespace {

// Parameters: angles 1..m-1 then radii 1..m-1 (radius 0 fixed at 1 before
// normalization, angle 0 fixed at 0).
FramePolar frame_from_params(const std::vector<double>& v, std::size_t m) {
  FramePolar f;
  f.angles.assign(m, 0.0);
  f.radii.assign(m, 1.0);
  for (std::size_t i = 1; i < m; ++i) {
    f.angles[i] = v[i - 1];
    f.radii[i] = v[m - 1 + i - 1];
  }
  // Fold into the canonical chart: r >= 0, angle in [0, pi).
  for (std::size_t i = 0; i < m; ++i) {
    double ang = f.angles[i];
    if (f.radii[i] < 0.0) {
      f.radii[i] = -f.radii[i];
      ang += std::numbers::pi;
    }
    ang = std::fmod(ang, std::numbers::pi);
    if (ang < 0.0) ang += std::numbers::pi;
    f.angles[i] = ang;
  }
  double s = 0.0;
  for (const double r : f.radii) s += r * r;
  const double scale = std::sqrt(static_cast<double>(m) / s);
  for (double& r : f.radii) r *= scale;
  return f;
}

std::vector<double> cartesian_to_params(const std::vector<double>& x, std::size_t m) {
  std::vector<double> v(2 * (m - 1));
  for (std::size_t k = 1; k < m; ++k) {
    v[k - 1] = std::atan2(x[2 * (k - 1) + 1], x[2 * (k - 1)]);
    v[m - 1 + k - 1] = std::hypot(x[2 * (k - 1)], x[2 * (k - 1) + 1]);
  }
  return v;
}

double frame_beta(const FramePolar& f) {
  const auto a = f.to_matrix();
  const double upper = upper_lipschitz(a);
  EnumerationOptions eo;
  eo.threads = 1;
  const double lower = delta_lower_exact_real(a, eo).value;
  return lower <= 1e-10 * upper ? kInf : upper / lower;
}

}  // namespace

FrameOptimum optimize_frame_r2(int m, const FrameOptions& opts) {
  if (m < 3) throw PreconditionError("frame optimization needs m >= 3");
  if (m > 24) throw PreconditionError("frame optimization is limited to m <= 24 (exact objective)");
  if (opts.restarts < 1) throw PreconditionError("restarts must be at least 1");
  const std::size_t mm = static_cast<std::size_t>(m);
  const std::size_t restarts = static_cast<std::size_t>(opts.restarts);

  std::vector<detail::SearchResult> runs(restarts);
  detail::SearchOptions so;
  so.initial_step = 0.3;
  so.min_step = 1e-11;
  so.polls_before_shrink = 2;
  so.max_evaluations = opts.budget;
  so.max_iterations = static_cast<int>(std::min<long>(opts.budget, std::numeric_limits<int>::max()));

  parallel_for(restarts, opts.threads, [&](std::size_t s) {
    CounterRng rng(opts.seed, stream_id(kFrameStream, s));
    std::vector<double> cart(2 * (mm - 1));
    for (std::size_t k = 1; k < mm; ++k) {
      const double ang = std::numbers::pi * rng.uniform();
      const double rad = std::exp(0.3 * rng.normal());
      cart[2 * (k - 1)] = rad * std::cos(ang);
      cart[2 * (k - 1) + 1] = rad * std::sin(ang);
    }
    // Smoothed continuation, then exact polish from where it lands.
    long smooth_evals = 0;
    for (const auto& [kappa, eps] : detail::kSmoothingSchedule) {
      detail::SmoothFrameObjective obj(mm, kappa, eps);
      smooth_evals += detail::bfgs_minimize(obj, cart, 400, std::max<long>(opts.budget / 2 - smooth_evals, 0));
    }
    auto start = cartesian_to_params(cart, mm);
    auto f = [&](const std::vector<double>& v) { return frame_beta(frame_from_params(v, mm)); };
    auto polish = so;
    polish.initial_step = 0.02;
    polish.max_evaluations = std::max<long>(opts.budget - smooth_evals, 1);
    auto best = detail::pattern_search(f, std::move(start), polish, rng);
    best.evaluations += smooth_evals;
    // Iterated local search: kicks of shrinking size off the incumbent until the budget is spent.
    double kick = 0.02;
    while (best.evaluations < opts.budget && kick > 1e-6) {
      auto local = so;
      local.initial_step = std::max(kick, 1e-4);
      local.max_evaluations = opts.budget - best.evaluations;
      auto trial = best.point;
      for (auto& v : trial) v += kick * rng.normal();
      auto r = detail::pattern_search(f, std::move(trial), local, rng);
      best.evaluations += r.evaluations;
      best.iterations += r.iterations;
      if (r.value < best.value) {
        best.value = r.value;
        best.point = std::move(r.point);
      } else {
        kick *= 0.7;
      }
    }
    runs[s] = std::move(best);
  });

  std::size_t best = 0;
  long evals = 0;
  for (std::size_t s = 0; s < restarts; ++s) {
    evals += runs[s].evaluations;
    if (runs[s].value < runs[best].value) best = s;
  }
  FrameOptimum out;
  out.frame = frame_from_params(runs[best].point, mm);
  out.beta = frame_beta(out.frame);
  out.best_restart = static_cast<int>(best);
  out.evaluations = evals;
  return out;
}

}  // namespace prstab
