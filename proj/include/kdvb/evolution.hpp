#pragma once

// Time evolution of u_t + f(u)_x - u_xx + u_xxx = g(u) on the periodic grid.
// In Fourier space u_hat' = -Q(k) u_hat + F_hat(u) with F(u) = g(u) - f'(u) u_x.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdvb/fourier.hpp"
#include "kdvb/model.hpp"

namespace kdvb {

enum class Scheme { etdrk4, picard };

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::etdrk4;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  int record_every = 1;
  /// Blow-up is declared once ||u||_3 exceeds this value.
  double blowup_ceiling = 1e6;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

const char* to_string(Scheme s);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<SpectralField> fields;
  std::vector<double> norms_s;  // ||u(t)||_3
  SolverConfig config;
  std::string model_name;
  bool blew_up = false;
  double blow_up_time = 0.0;
  std::string message;
};

/// Spectral field of g(u) - f'(u) u_x, both compositions evaluated on the
/// 3/2-padded grid.
SpectralField nonlinearity(const SpectralField& u, const ModelFunctions& model);

namespace detail {

/// Pseudospectral evaluation of F(u) = g(u) - f'(u) u_x on FFT-ordered
/// coefficient vectors. Holds scratch buffers; one instance per thread.
class NonlinearKernel {
 public:
  NonlinearKernel(const PeriodicGrid& grid, const ModelFunctions& model);
  void operator()(std::span<const cplx> u, std::span<cplx> out);

 private:
  PeriodicGrid grid_;
  const ModelFunctions* model_;
  std::vector<cplx> pad_u_, pad_ux_;
  CoeffVector ux_;
  std::vector<double> ik_;
};

}  // namespace detail

/// Fourth-order exponential time differencing Runge-Kutta stepper with the
/// exact semigroup as linear part. The phi-function coefficients are obtained
/// by averaging over a circle of radius 1 (32 points) around -Q(k) dt.
class Etdrk4Stepper {
 public:
  Etdrk4Stepper(const PeriodicGrid& grid, double dt, const ModelFunctions& model);

  /// Advances the FFT-ordered coefficient vector by one step in place.
  /// Returns false if the result contains non-finite values.
  bool advance(CoeffVector& u);

  double dt() const noexcept { return dt_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }

 private:
  PeriodicGrid grid_;
  double dt_;
  detail::NonlinearKernel kernel_;
  CoeffVector e_, e2_, q_, f1_, f2_, f3_;
  CoeffVector nu_, na_, nb_, nc_, a_, b_, c_;
};

/// One ETDRK4 step; BlowUpError (time = dt) on non-finite output.
SpectralField step_etdrk4(const SpectralField& u, double dt, const ModelFunctions& model);

/// Marches to config.t_end (dt adjusted so an integer number of steps lands on
/// t_end). On blow-up the trace is returned truncated with blew_up set.
EvolutionTrace solve(const SpectralField& u0, const ModelFunctions& model,
                     const SolverConfig& config);

struct PicardResult {
  SpectralField u;
  int iterations = 0;
  /// sup-in-time ||u^{m+1} - u^m||_3 per iteration.
  std::vector<double> increments;
  /// increments[m] / increments[m-1].
  std::vector<double> ratios;
};

/// Fixed-point iteration of the Duhamel map
///   u^{m+1}(t) = V(t) u0 + int_0^t V(t - tau) F(u^m(tau)) dtau
/// on [0, T] with 16 uniform panels, 4-point Gauss quadrature per panel and
/// cubic interpolation of the iterate between panel endpoints.
/// NonContractionError when max_iter is exceeded.
PicardResult solve_picard(const SpectralField& u0, const ModelFunctions& model, double T,
                          double tol = 1e-10, int max_iter = 50);

struct ContinuityProbeResult {
  /// sup_{t <= T} ||u(t) - v(t)||_3 / delta for each delta; NaN on blow-up.
  std::vector<double> ratios;
  std::vector<bool> blew_up;
};

/// Perturbs u0 by delta * direction (direction defaults to a seeded random
/// smooth field with unit H^3 norm), evolves both and reports the
/// sup-in-time difference ratio. Deltas must be positive and decreasing.
ContinuityProbeResult data_map_continuity_probe(
    const SpectralField& u0, const ModelFunctions& model, double T,
    std::span<const double> deltas, double dt = 1e-3,
    const std::optional<SpectralField>& direction = std::nullopt, std::uint64_t seed = 7);

}  // namespace kdvb
