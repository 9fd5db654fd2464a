#pragma once

// Viscous-dispersive semigroup V(t) generated by -d^3/dx^3 + d^2/dx^2 on
// L-periodic functions: V(t) acts diagonally as exp(-Q(k) t) with
//   Q(k) = (2 pi / L)^2 k^2 - i (2 pi / L)^3 k^3.

#include <span>

#include "kdvb/fourier.hpp"

namespace kdvb {

/// Q(k) for period L > 0; DomainError otherwise.
cplx symbol_q(int k, double L);

/// exp(-Q(k) t) applied mode-wise, t >= 0. The multipliers are recomputed on
/// every call; a cache keyed on (n, L, t) would be the place to optimize.
SpectralField apply_semigroup(const SpectralField& field, double t);

/// Least-squares slope of log(||V(t) phi||_{r+delta} / ||phi||_r) against
/// log(1/t). The smoothing estimate bounds it by delta/2.
/// t_list must be non-empty, strictly decreasing and inside (0, 1).
double smoothing_exponent_probe(const SpectralField& field, double r, double delta,
                                std::span<const double> t_list);

}  // namespace kdvb
