#pragma once

// Hill's method for the Bloch operators of the linearization about a wave,
//   L_theta u = -(d + i theta/L)^3 u + (d + i theta/L)^2 u
//               + a1(x) (d + i theta/L) u + a0(x) u,
//   a1 = c - f'(phi),  a0 = g'(phi) - f'(phi)_x,
// truncated to Fourier modes k = -N..N of period L.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "kdvb/fourier.hpp"
#include "kdvb/model.hpp"
#include "kdvb/waves.hpp"

namespace kdvb {

/// Spectral instability is declared only above this margin so the neutral
/// translation eigenvalue at lambda = 0 does not trigger it.
inline constexpr double kInstabilityMargin = 1e-6;

struct LinearizedCoefficients {
  SpectralField a1;
  SpectralField a0;
  double L() const noexcept { return a1.L(); }
};

LinearizedCoefficients linearized_coefficients(const WaveProfile& w, const ModelFunctions& model);

/// Truncated Bloch operator. Row and column index i correspond to the
/// Fourier mode k = i - N; rows are output modes.
struct BlochMatrix {
  double theta = 0.0;
  int N = 0;
  Eigen::MatrixXcd entries;
  LinearizedCoefficients coeffs;
  std::string profile_id;

  int mode(int i) const noexcept { return i - N; }
  double L() const noexcept { return coeffs.L(); }
};

/// Requires theta in (-pi, pi] (theta = -pi is accepted as the same Floquet
/// exponent) and 2N+1 <= n; TruncationError when N exceeds the resolution of
/// the profile grid.
BlochMatrix assemble_bloch(const WaveProfile& w, const ModelFunctions& model, double theta, int N);
BlochMatrix assemble_bloch(const LinearizedCoefficients& coeffs, double theta, int N);

/// All eigenvalues sorted by descending real part (ties by ascending
/// imaginary part).
std::vector<cplx> eigen_bloch(const BlochMatrix& m);

struct BlochEigenpair {
  cplx lambda;
  /// Periodic part of the Bloch eigenfunction, ||psi||_0 = 1, largest
  /// coefficient real positive; lives on a grid of at least 2N+2 points.
  SpectralField psi;
  double residual = 0.0;
};

/// Eigenpair of rank `which` in the eig_bloch ordering, checked by re-applying
/// the operator pseudospectrally; InconsistentEigenpairError above 1e-8.
BlochEigenpair eigenpair_bloch(const BlochMatrix& m, std::size_t which);

/// ||(L_theta - lambda) psi||_0 / ||psi||_0 with the operator applied
/// pseudospectrally.
double bloch_residual(const LinearizedCoefficients& coeffs, double theta, cplx lambda,
                      const SpectralField& psi);

struct BlochSpectrum {
  std::vector<double> thetas;
  std::vector<std::vector<cplx>> eigenvalues;
  int N = 0;
  double max_real = -std::numeric_limits<double>::infinity();
  double argmax_theta = 0.0;
  /// Indices into thetas whose eigensolve failed (entries left empty).
  std::vector<std::size_t> failed;

  bool unstable(double margin = kInstabilityMargin) const { return max_real > margin; }
};

/// theta_j = -pi + 2 pi j / (n_theta - 1): symmetric about 0, contains 0
/// for odd n_theta, and both ends of the Brillouin zone.
std::vector<double> theta_grid(int n_theta);

/// Floquet sweep; the theta loop runs on an OpenMP worker pool.
BlochSpectrum floquet_sweep(const WaveProfile& w, const ModelFunctions& model, int n_theta, int N);
/// Single-threaded reference for floquet_sweep.
BlochSpectrum floquet_sweep_serial(const WaveProfile& w, const ModelFunctions& model, int n_theta,
                                   int N);

/// C0 = sup_x |a0 - a1'/2|, sampled on an 8x oversampled grid.
double resolvent_constant(const LinearizedCoefficients& coeffs);

/// Largest singular value of (lambda - L_0)^{-1} for the N-truncated
/// operator at each lambda. DomainError unless Re lambda > C0 + 1.
std::vector<double> resolvent_bound_probe(const WaveProfile& w, const ModelFunctions& model,
                                          std::span<const cplx> lambdas, int N);

}  // namespace kdvb
