#pragma once

// Periodic grids, discrete Fourier analysis, spectral differentiation,
// Sobolev norms, translation and dealiased products.
//
// Coefficient convention: for a field u sampled at x_j = jL/n,
//   u_hat(k) = (1/n) sum_j u(x_j) exp(-2 pi i k x_j / L),
// the trapezoid rule for (1/L) int_0^L exp(-2 pi i k x / L) u dx, and
//   u(x_j) = sum_k u_hat(k) exp(2 pi i k x_j / L),  k = -n/2 .. n/2-1.
//
// Coefficients are stored in FFT order: index i holds k = i for i < n/2 and
// k = i - n for i >= n/2. Index n/2 is the unpaired Nyquist mode k = -n/2.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kdvb {

using cplx = std::complex<double>;
using CoeffVector = std::vector<cplx>;

class PeriodicGrid {
 public:
  /// Throws DomainError unless n is a power of two with n >= 8 and L > 0.
  PeriodicGrid(int n, double L);

  int n() const noexcept { return n_; }
  double L() const noexcept { return L_; }
  double spacing() const noexcept { return L_ / n_; }
  double node(int j) const noexcept { return j * L_ / n_; }
  std::vector<double> nodes() const;

  /// Wavenumber stored at FFT-order index i.
  int wavenumber(std::size_t i) const noexcept {
    const int ii = static_cast<int>(i);
    return ii < n_ / 2 ? ii : ii - n_;
  }
  /// FFT-order index of wavenumber k, k in [-n/2, n/2).
  std::size_t index(int k) const noexcept {
    return static_cast<std::size_t>(k >= 0 ? k : k + n_);
  }
  bool contains(int k) const noexcept { return k >= -n_ / 2 && k < n_ / 2; }

  bool operator==(const PeriodicGrid& o) const noexcept { return n_ == o.n_ && L_ == o.L_; }

 private:
  int n_;
  double L_;
};

/// Fourier coefficients of an L-periodic function on a PeriodicGrid.
class SpectralField {
 public:
  /// When is_real is set the coefficients must be Hermitian-symmetric to
  /// 1e-12 relative; otherwise SymmetryError.
  SpectralField(PeriodicGrid grid, CoeffVector coeffs, bool is_real = true);

  static SpectralField zeros(const PeriodicGrid& grid, bool is_real = true);
  static SpectralField constant(const PeriodicGrid& grid, double value);
  /// a cos(2 pi k x / L) + b sin(2 pi k x / L), 0 < k < n/2.
  static SpectralField single_mode(const PeriodicGrid& grid, int k, double a, double b = 0.0);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }
  double L() const noexcept { return grid_.L(); }
  bool is_real() const noexcept { return is_real_; }
  const CoeffVector& coeffs() const noexcept { return coeffs_; }

  /// Coefficient of wavenumber k; zero for non-representable k.
  cplx coeff(int k) const noexcept {
    return grid_.contains(k) ? coeffs_[grid_.index(k)] : cplx{};
  }
  double mean() const noexcept { return coeffs_[0].real(); }
  double max_abs_coeff() const noexcept;
  bool all_finite() const noexcept;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a) noexcept;

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  PeriodicGrid grid_;
  CoeffVector coeffs_;
  bool is_real_;
};

/// Largest |u_hat(k) - conj(u_hat(-k))| (including Im of the k=0 and Nyquist
/// entries) relative to max |u_hat|.
double hermitian_defect(const PeriodicGrid& grid, std::span<const cplx> coeffs);

/// Projects coefficients onto the Hermitian subspace in place.
void symmetrize(const PeriodicGrid& grid, std::span<cplx> coeffs);

SpectralField forward_transform(std::span<const double> samples, const PeriodicGrid& grid);
/// Transform of complex samples; result has is_real = false.
SpectralField forward_transform_complex(std::span<const cplx> samples, const PeriodicGrid& grid);

/// Samples at the grid nodes. Requires field.is_real(); an imaginary residue
/// above 1e-10 (relative to max(1, max|u|)) raises SymmetryError.
std::vector<double> inverse_transform(const SpectralField& field);
std::vector<cplx> inverse_transform_complex(const SpectralField& field);

/// Multiplies by (2 pi i k / L)^order, order in {1,2,3}. Odd orders zero the
/// Nyquist coefficient.
SpectralField differentiate(const SpectralField& field, int order);

/// sqrt(L sum_k (1 + k^2)^s |u_hat(k)|^2) over representable k.
double sobolev_norm(const SpectralField& field, double s);

/// u(. + a): u_hat(k) -> u_hat(k) exp(2 pi i k a / L). The Nyquist coefficient
/// of a real field is scaled by cos(pi n a / L), the restriction of the shifted
/// Nyquist cosine to the nodes.
SpectralField translate(const SpectralField& field, double a);

/// Pointwise product on a zero-padded 3n/2 grid, truncated back to n modes.
SpectralField multiply_dealiased(const SpectralField& u, const SpectralField& v);

/// Exact trigonometric interpolation onto a grid with n_new points (zero
/// padding or truncation of the coefficient vector).
SpectralField resample(const SpectralField& field, int n_new);

/// Coefficients of the real part of the represented function.
SpectralField real_part(const SpectralField& field);

/// Real field with random phases, |u_hat(k)| = amplitude (1 + k^2)^(-decay/2)
/// for 0 < |k| <= kmax and zero mean. Deterministic in the seed.
SpectralField random_band_limited(const PeriodicGrid& grid, int kmax, double decay,
                                  std::uint64_t seed, double amplitude = 1.0);

/// Size of the padded grid used by the 3/2 rule.
inline int padded_size(int n) { return 3 * n / 2; }

/// Maps coefficients on an n-grid to samples on the padded 3n/2 grid and back.
/// The forward map splits the Nyquist coefficient evenly between -n/2 and n/2;
/// the return map folds both back into the Nyquist slot.
std::vector<double> to_padded_samples(const SpectralField& field);
std::vector<cplx> to_padded_samples_complex(const SpectralField& field);
SpectralField from_padded_samples(std::span<const double> samples, const PeriodicGrid& grid);
SpectralField from_padded_samples_complex(std::span<const cplx> samples, const PeriodicGrid& grid);

namespace detail {

/// Unnormalized DFT with sign -1 (forward) or +1 (backward); out may alias in.
void fft(std::span<const cplx> in, std::span<cplx> out, int sign);

/// Coefficient-level helpers shared by the time integrators, operating on
/// FFT-ordered vectors of length n.
void pad_coeffs(std::span<const cplx> coeffs, int n, std::span<cplx> padded);
void truncate_coeffs(std::span<const cplx> padded, int n, std::span<cplx> coeffs);

}  // namespace detail

}  // namespace kdvb
