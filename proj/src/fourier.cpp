#include "kdvb/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "kdvb/error.hpp"

namespace kdvb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe; execution with new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(b.data()),
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void require_same_grid(const SpectralField& u, const SpectralField& v, const char* op) {
  if (!(u.grid() == v.grid())) {
    throw DimensionError(std::string(op) + ": grid mismatch (n=" + std::to_string(u.n()) +
                         " vs " + std::to_string(v.n()) + ")");
  }
}

}  // namespace

namespace detail {

void fft(std::span<const cplx> in, std::span<cplx> out, int sign) {
  if (in.size() != out.size()) throw DimensionError("fft: size mismatch");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = plan_cache().get(n, sign);
  // Cached plans are out-of-place; an aliased call goes through a copy.
  if (in.data() == out.data()) {
    std::vector<cplx> tmp(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  } else {
    // Out-of-place complex transforms leave the input untouched.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
}

void pad_coeffs(std::span<const cplx> coeffs, int n, std::span<cplx> padded) {
  const int m = padded_size(n);
  std::fill(padded.begin(), padded.end(), cplx{});
  for (int k = 0; k < n / 2; ++k) padded[k] = coeffs[k];
  for (int k = -n / 2 + 1; k < 0; ++k) padded[k + m] = coeffs[k + n];
  const cplx nyq = 0.5 * coeffs[n / 2];
  padded[n / 2] = nyq;
  padded[m - n / 2] = nyq;
}

void truncate_coeffs(std::span<const cplx> padded, int n, std::span<cplx> coeffs) {
  const int m = padded_size(n);
  for (int k = 0; k < n / 2; ++k) coeffs[k] = padded[k];
  for (int k = -n / 2 + 1; k < 0; ++k) coeffs[k + n] = padded[k + m];
  coeffs[n / 2] = padded[m - n / 2] + padded[n / 2];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PeriodicGrid

PeriodicGrid::PeriodicGrid(int n, double L) : n_(n), L_(L) {
  if (!is_power_of_two(n) || n < 8) {
    throw DomainError("PeriodicGrid: n must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw DomainError("PeriodicGrid: period L must be positive and finite");
  }
}

std::vector<double> PeriodicGrid::nodes() const {
  std::vector<double> x(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

// ---------------------------------------------------------------------------
// SpectralField

double hermitian_defect(const PeriodicGrid& grid, std::span<const cplx> c) {
  const int n = grid.n();
  double scale = 0.0;
  for (const auto& z : c) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  double defect = std::max(std::abs(c[0].imag()), std::abs(c[n / 2].imag()));
  for (int k = 1; k < n / 2; ++k) {
    defect = std::max(defect, std::abs(c[k] - std::conj(c[n - k])));
  }
  return defect / scale;
}

void symmetrize(const PeriodicGrid& grid, std::span<cplx> c) {
  const int n = grid.n();
  c[0] = c[0].real();
  c[n / 2] = c[n / 2].real();
  for (int k = 1; k < n / 2; ++k) {
    const cplx avg = 0.5 * (c[k] + std::conj(c[n - k]));
    c[k] = avg;
    c[n - k] = std::conj(avg);
  }
}

SpectralField::SpectralField(PeriodicGrid grid, CoeffVector coeffs, bool is_real)
    : grid_(grid), coeffs_(std::move(coeffs)), is_real_(is_real) {
  if (static_cast<int>(coeffs_.size()) != grid_.n()) {
    throw DimensionError("SpectralField: " + std::to_string(coeffs_.size()) +
                         " coefficients for a grid of " + std::to_string(grid_.n()));
  }
  if (is_real_) {
    const double defect = hermitian_defect(grid_, coeffs_);
    if (defect > 1e-12) {
      throw SymmetryError("SpectralField: coefficients flagged real are not Hermitian (defect " +
                          std::to_string(defect) + ")");
    }
  }
}

SpectralField SpectralField::zeros(const PeriodicGrid& grid, bool is_real) {
  return SpectralField(grid, CoeffVector(static_cast<std::size_t>(grid.n())), is_real);
}

SpectralField SpectralField::constant(const PeriodicGrid& grid, double value) {
  CoeffVector c(static_cast<std::size_t>(grid.n()));
  c[0] = value;
  return SpectralField(grid, std::move(c), true);
}

SpectralField SpectralField::single_mode(const PeriodicGrid& grid, int k, double a, double b) {
  if (k <= 0 || k >= grid.n() / 2) throw DomainError("single_mode: k out of range");
  CoeffVector c(static_cast<std::size_t>(grid.n()));
  // a cos + b sin = (a - i b)/2 e^{ikx} + (a + i b)/2 e^{-ikx}
  c[grid.index(k)] = cplx(0.5 * a, -0.5 * b);
  c[grid.index(-k)] = cplx(0.5 * a, 0.5 * b);
  return SpectralField(grid, std::move(c), true);
}

double SpectralField::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const auto& z : coeffs_) m = std::max(m, std::abs(z));
  return m;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "operator+");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  is_real_ = is_real_ && o.is_real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "operator-");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  is_real_ = is_real_ && o.is_real_;
  return *this;
}

SpectralField& SpectralField::operator*=(double a) noexcept {
  for (auto& z : coeffs_) z *= a;
  return *this;
}

// ---------------------------------------------------------------------------
// Transforms

SpectralField forward_transform(std::span<const double> samples, const PeriodicGrid& grid) {
  if (static_cast<int>(samples.size()) != grid.n()) {
    throw DimensionError("forward_transform: " + std::to_string(samples.size()) +
                         " samples for a grid of " + std::to_string(grid.n()));
  }
  CoeffVector c(samples.begin(), samples.end());
  detail::fft(c, c, -1);
  const double scale = 1.0 / grid.n();
  for (auto& z : c) z *= scale;
  symmetrize(grid, c);
  return SpectralField(grid, std::move(c), true);
}

SpectralField forward_transform_complex(std::span<const cplx> samples, const PeriodicGrid& grid) {
  if (static_cast<int>(samples.size()) != grid.n()) {
    throw DimensionError("forward_transform_complex: sample count does not match grid");
  }
  CoeffVector c(samples.begin(), samples.end());
  detail::fft(c, c, -1);
  const double scale = 1.0 / grid.n();
  for (auto& z : c) z *= scale;
  return SpectralField(grid, std::move(c), false);
}

std::vector<cplx> inverse_transform_complex(const SpectralField& field) {
  std::vector<cplx> out(field.coeffs());
  detail::fft(out, out, +1);
  return out;
}

std::vector<double> inverse_transform(const SpectralField& field) {
  if (!field.is_real()) {
    throw SymmetryError("inverse_transform: field is not flagged real");
  }
  const auto z = inverse_transform_complex(field);
  std::vector<double> u(z.size());
  double max_re = 1.0, max_im = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    u[j] = z[j].real();
    max_re = std::max(max_re, std::abs(z[j].real()));
    max_im = std::max(max_im, std::abs(z[j].imag()));
  }
  if (max_im > 1e-10 * max_re) {
    throw SymmetryError("inverse_transform: imaginary residue " + std::to_string(max_im) +
                        " exceeds tolerance");
  }
  return u;
}

// ---------------------------------------------------------------------------
// Spectral calculus

SpectralField differentiate(const SpectralField& field, int order) {
  if (order < 1 || order > 3) throw DomainError("differentiate: order must be 1, 2 or 3");
  const auto& grid = field.grid();
  const int n = grid.n();
  CoeffVector c(field.coeffs());
  const double k0 = 2.0 * std::numbers::pi / grid.L();
  for (int i = 0; i < n; ++i) {
    const cplx ik(0.0, k0 * grid.wavenumber(i));
    cplx m = ik;
    for (int p = 1; p < order; ++p) m *= ik;
    c[i] *= m;
  }
  if (order % 2 == 1) c[n / 2] = 0.0;
  return SpectralField(grid, std::move(c), field.is_real());
}

double sobolev_norm(const SpectralField& field, double s) {
  const auto& grid = field.grid();
  double sum = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    const double k = grid.wavenumber(i);
    sum += std::pow(1.0 + k * k, s) * std::norm(field.coeffs()[i]);
  }
  return std::sqrt(grid.L() * sum);
}

SpectralField translate(const SpectralField& field, double a) {
  const auto& grid = field.grid();
  const int n = grid.n();
  const double shift = std::fmod(a, grid.L()) / grid.L();
  CoeffVector c(field.coeffs());
  for (int i = 0; i < n; ++i) {
    if (field.is_real() && i == n / 2) continue;
    const double phase = kTwoPi * grid.wavenumber(i) * shift;
    c[i] *= cplx(std::cos(phase), std::sin(phase));
  }
  if (field.is_real()) {
    c[n / 2] *= std::cos(std::numbers::pi * n * shift);
    // Keep exact conjugate pairs.
    for (int k = 1; k < n / 2; ++k) c[n - k] = std::conj(c[k]);
  }
  return SpectralField(grid, std::move(c), field.is_real());
}

std::vector<cplx> to_padded_samples_complex(const SpectralField& field) {
  const int n = field.n();
  std::vector<cplx> padded(static_cast<std::size_t>(padded_size(n)));
  detail::pad_coeffs(field.coeffs(), n, padded);
  detail::fft(padded, padded, +1);
  return padded;
}

std::vector<double> to_padded_samples(const SpectralField& field) {
  const auto z = to_padded_samples_complex(field);
  std::vector<double> u(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) u[j] = z[j].real();
  return u;
}

SpectralField from_padded_samples_complex(std::span<const cplx> samples,
                                          const PeriodicGrid& grid) {
  const int n = grid.n();
  const int m = padded_size(n);
  if (static_cast<int>(samples.size()) != m) {
    throw DimensionError("from_padded_samples: expected " + std::to_string(m) + " samples");
  }
  std::vector<cplx> padded(samples.begin(), samples.end());
  detail::fft(padded, padded, -1);
  const double scale = 1.0 / m;
  for (auto& z : padded) z *= scale;
  CoeffVector c(static_cast<std::size_t>(n));
  detail::truncate_coeffs(padded, n, c);
  return SpectralField(grid, std::move(c), false);
}

SpectralField from_padded_samples(std::span<const double> samples, const PeriodicGrid& grid) {
  std::vector<cplx> z(samples.begin(), samples.end());
  auto f = from_padded_samples_complex(z, grid);
  CoeffVector c(f.coeffs());
  symmetrize(grid, c);
  return SpectralField(grid, std::move(c), true);
}

SpectralField multiply_dealiased(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u, v, "multiply_dealiased");
  if (u.is_real() && v.is_real()) {
    auto a = to_padded_samples(u);
    const auto b = to_padded_samples(v);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
    return from_padded_samples(a, u.grid());
  }
  auto a = to_padded_samples_complex(u);
  const auto b = to_padded_samples_complex(v);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
  return from_padded_samples_complex(a, u.grid());
}

SpectralField resample(const SpectralField& field, int n_new) {
  const PeriodicGrid grid(n_new, field.L());
  const int n = field.n();
  CoeffVector c(static_cast<std::size_t>(n_new));
  const int kmax = std::min(n, n_new) / 2;
  for (int k = -kmax + 1; k < kmax; ++k) c[grid.index(k)] = field.coeff(k);
  if (n_new > n) {
    // Split the old Nyquist coefficient over +-n/2 so the interpolant is unchanged.
    const cplx nyq = field.coeff(-n / 2);
    c[grid.index(-n / 2)] = field.is_real() ? 0.5 * nyq : nyq;
    if (field.is_real()) c[grid.index(n / 2)] = 0.5 * nyq;
  } else if (n_new < n) {
    const cplx nyq = field.coeff(-n_new / 2) + field.coeff(n_new / 2);
    c[grid.index(-n_new / 2)] = field.is_real() ? cplx(nyq.real(), 0.0) : field.coeff(-n_new / 2);
  } else {
    c[grid.index(-n / 2)] = field.coeff(-n / 2);
  }
  return SpectralField(grid, std::move(c), field.is_real());
}

SpectralField real_part(const SpectralField& field) {
  const auto& grid = field.grid();
  const int n = grid.n();
  CoeffVector c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int k = grid.wavenumber(i);
    const cplx mirrored = (k == -n / 2) ? field.coeffs()[i] : field.coeff(-k);
    c[i] = 0.5 * (field.coeffs()[i] + std::conj(mirrored));
  }
  symmetrize(grid, c);
  return SpectralField(grid, std::move(c), true);
}

SpectralField random_band_limited(const PeriodicGrid& grid, int kmax, double decay,
                                  std::uint64_t seed, double amplitude) {
  if (kmax < 1 || kmax >= grid.n() / 2) throw DomainError("random_band_limited: bad kmax");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  CoeffVector c(static_cast<std::size_t>(grid.n()));
  for (int k = 1; k <= kmax; ++k) {
    const double mag = amplitude * std::pow(1.0 + double(k) * k, -0.5 * decay);
    const double p = phase(rng);
    c[grid.index(k)] = std::polar(mag, p);
    c[grid.index(-k)] = std::polar(mag, -p);
  }
  return SpectralField(grid, std::move(c), true);
}

}  // namespace kdvb
