#pragma once

// Periodic traveling waves u(x,t) = phi(x - c t) of the generalized
// KdV-Burgers equation with source. The profile solves
//   -c phi' + f'(phi) phi' + phi''' - phi'' - g(phi) = 0
// on [0, L] with both the speed c and the period L unknown.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kdvb/fourier.hpp"
#include "kdvb/model.hpp"

namespace kdvb {

struct WaveProfile {
  SpectralField phi;  // profile on [0, L]; phi.grid().L() is the period
  double c = 0.0;
  double eps = 0.0;
  double residual = 0.0;  // ||profile_residual||_0
  // KdVBF parameters the profile was computed for (NaN when not applicable).
  double r = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();

  double L() const noexcept { return phi.L(); }
  int n() const noexcept { return phi.n(); }
};

enum class Closure { speed, amplitude };

/// Default collocation size for profiles.
inline constexpr int kDefaultProfilePoints = 64;

/// -c phi' + f'(phi) phi' + phi''' - phi'' - g(phi), evaluated pseudospectrally.
SpectralField profile_residual(const WaveProfile& w, const ModelFunctions& model);

/// Amplitude measure 2 |phi_hat(1)| used as the branch closure.
double amplitude_measure(const SpectralField& phi);

/// Linear-theory seed at the Hopf point: c = -r, L = 2 pi / sqrt(r),
/// phi = sqrt(eps) cos(2 pi x / L). Requires 0 <= eps <= 0.25.
WaveProfile hopf_predictor(double r, double alpha, double eps, int n = kDefaultProfilePoints);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
};

/// Newton iteration on (phi samples, c, L) for the profile equation on the
/// rescaled domain, with phase condition Im phi_hat(1) = 0 and either
/// c = target (Closure::speed) or 2 Re phi_hat(1) = target (Closure::amplitude).
/// NoConvergenceError after max_iter; BifurcationPointError when the bordered
/// Jacobian is numerically singular.
WaveProfile refine_newton(const WaveProfile& guess, const ModelFunctions& model, Closure fix,
                          double target, const NewtonOptions& options = {});

struct WaveBranch {
  std::vector<WaveProfile> profiles;
  bool truncated = false;
  std::string message;
};

/// Natural-parameter continuation of the KdVBF branch in eps with the
/// amplitude closure a(phi) = sqrt(eps). The first failure truncates the branch.
WaveBranch continue_branch(double r, double alpha, std::span<const double> eps_list,
                           int n = kDefaultProfilePoints);

}  // namespace kdvb
