#pragma once

// Orbital-instability experiment: the translation-orbit distance, the
// evolve-then-shift map S(phi) = zeta_{cT}(u_phi(T)), and perturbation growth
// along an unstable Bloch eigenfunction.

#include <string>
#include <utility>
#include <vector>

#include "kdvb/evolution.hpp"
#include "kdvb/spectra.hpp"
#include "kdvb/waves.hpp"

namespace kdvb {

struct OrbitalDistance {
  double distance = 0.0;
  double shift = 0.0;  // minimizing a in [0, L)
};

/// inf_a ||u - phi(. + a)||_s: coarse scan over the n grid shifts using the
/// Fourier expansion of the squared distance, golden-section refinement to
/// 1e-10 in a, then a few Newton steps on the derivative.
OrbitalDistance orbital_distance(const SpectralField& u, const SpectralField& phi, double s = 3.0);
OrbitalDistance orbital_distance(const SpectralField& u, const WaveProfile& w, double s = 3.0);

/// Evolves phi0 for time T, then translates by c T. BlowUpError on blow-up.
SpectralField map_S(const WaveProfile& w, const ModelFunctions& model, const SpectralField& phi0,
                    double T, const SolverConfig& solver);

enum class Verdict { growth_confirmed, inconclusive, blow_up };
const char* to_string(Verdict v);

struct ExperimentOptions {
  /// Growth is fitted where fit_lo * delta0 <= d <= fit_hi * delta0.
  double fit_lo = 1.0;
  double fit_hi = 100.0;
  double rate_tolerance = 0.25;
  /// d must reach exit_factor * delta0.
  double exit_factor = 10.0;
  /// Shrink delta0 until delta0 exp(Re lambda T) <= max_final_amplitude.
  bool auto_shrink = true;
  double max_final_amplitude = 1e-1;
};

struct IteratedEscape {
  std::vector<double> distances;  // orbital distance after k = 0..applied iterates
  int escaped_at = -1;            // first k with distance >= exit_factor * delta0
  double period = 0.0;            // T used per iterate
};

struct InstabilityReport {
  WaveProfile profile;
  cplx lambda;
  double delta0 = 0.0;
  std::vector<double> times;
  std::vector<double> orbital_distances;
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();
  std::pair<double, double> fit_window{0.0, 0.0};
  Verdict verdict = Verdict::inconclusive;
  std::string message;
  IteratedEscape escape;
};

/// Unit-H^3 real perturbation direction Re(psi), moved onto the profile grid.
SpectralField perturbation_direction(const WaveProfile& w, const BlochEigenpair& eig);

/// Evolves u0 = phi + delta0 Re(psi)/||Re(psi)||_3 for time T and fits the
/// growth rate of the orbital distance on the quasi-linear window.
InstabilityReport instability_experiment(const WaveProfile& w, const ModelFunctions& model,
                                         const BlochEigenpair& eig, double delta0, double T,
                                         const SolverConfig& solver,
                                         const ExperimentOptions& options = {});

/// Same experiment along an arbitrary real direction (normalized to unit H^3).
InstabilityReport perturbation_experiment(const WaveProfile& w, const ModelFunctions& model,
                                          cplx lambda, const SpectralField& direction,
                                          double delta0, double T, const SolverConfig& solver,
                                          const ExperimentOptions& options = {});

/// Applies S with T_S = L / |c| (one spatial period of travel) to
/// phi + delta0 * direction up to max_iterates times, stopping once the
/// orbital distance reaches exit_factor * delta0.
IteratedEscape iterated_escape(const WaveProfile& w, const ModelFunctions& model,
                               const SpectralField& direction, double delta0, int max_iterates,
                               double exit_factor, const SolverConfig& solver);

/// Least-squares slope of log d against t over [lo, hi) indices.
double fit_log_slope(const std::vector<double>& t, const std::vector<double>& d, std::size_t lo,
                     std::size_t hi);

}  // namespace kdvb
