#pragma once

// Reference computations used only by the tests. They avoid the library's
// FFT, eigensolver and minimization paths.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "kdvb/fourier.hpp"

namespace oracle {

using kdvb::cplx;

/// Direct DFT u_hat(k) = (1/n) sum_j u_j e^{-2 pi i k j / n}, FFT order.
std::vector<cplx> dft(const std::vector<double>& samples);

/// Direct evaluation of sum_k c_k e^{2 pi i k x / L} at arbitrary points,
/// using the split-Nyquist trigonometric interpolant.
std::vector<double> evaluate(const kdvb::SpectralField& f, const std::vector<double>& x);

/// c(k) = sum_{k1 + k2 = k} a(k1) b(k2) over all mode pairs; result on a's grid.
std::vector<cplx> convolution(const kdvb::SpectralField& a, const kdvb::SpectralField& b);

/// Coefficients of det(z I - A) (leading first) by Faddeev-LeVerrier.
std::vector<cplx> charpoly(const Eigen::MatrixXcd& A);
/// All roots of a polynomial (leading coefficient first), Aberth iteration.
std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs);

/// Largest distance from an element of a to the nearest element of b.
double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Brute-force min over `count` uniform shifts a in [0, L) of ||u - phi(. + a)||_s,
/// each distance evaluated directly from the shifted coefficients.
std::pair<double, double> brute_orbital_distance(const kdvb::SpectralField& u,
                                                 const kdvb::SpectralField& phi, double s,
                                                 int count);

/// exp(t A) v with the Taylor series plus scaling and squaring.
Eigen::VectorXcd expm_apply(const Eigen::MatrixXcd& A, double t, const Eigen::VectorXcd& v);

/// L sum (1 + k^2)^(r+delta) e^{-2 Re Q(k) t} |u_hat|^2, square-rooted: the
/// smoothed norm computed term by term.
double smoothed_norm(const kdvb::SpectralField& f, double s, double t);

/// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y);

/// High-resolution evaluation of the profile expression
/// -c phi' + f'(phi) phi' + phi''' - phi'' - g(phi) from analytic derivatives
/// of a trigonometric polynomial, L2 norm by a fine midpoint rule.
double profile_residual_quadrature(const kdvb::SpectralField& phi, double c,
                                   const std::function<double(double)>& df,
                                   const std::function<double(double)>& g, int points);

}  // namespace oracle
