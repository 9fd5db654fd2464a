#include "kdvb/evolution.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "kdvb/error.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/semigroup.hpp"

namespace kdvb {

namespace {

constexpr int kContourPoints = 32;

double h3_norm_coeffs(const PeriodicGrid& grid, const CoeffVector& c) {
  double sum = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    const double k = grid.wavenumber(i);
    const double w = 1.0 + k * k;
    sum += w * w * w * std::norm(c[i]);
  }
  return std::sqrt(grid.L() * sum);
}

bool finite(const CoeffVector& c) {
  return std::all_of(c.begin(), c.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

}  // namespace

namespace detail {

NonlinearKernel::NonlinearKernel(const PeriodicGrid& grid, const ModelFunctions& model)
    : grid_(grid), model_(&model), pad_u_(padded_size(grid.n())), pad_ux_(pad_u_.size()),
      ux_(static_cast<std::size_t>(grid.n())), ik_(static_cast<std::size_t>(grid.n())) {
  const double k0 = 2.0 * std::numbers::pi / grid.L();
  for (int i = 0; i < grid.n(); ++i) ik_[i] = k0 * grid.wavenumber(i);
  ik_[grid.n() / 2] = 0.0;
}

// u and u_x are real in physical space, so both ride on one complex
// transform of u + i u_x on the padded grid.
void NonlinearKernel::operator()(std::span<const cplx> u, std::span<cplx> out) {
  const int n = grid_.n();
  const int m = padded_size(n);
  for (int i = 0; i < n; ++i) ux_[i] = cplx(0.0, ik_[i]) * u[i];
  detail::pad_coeffs(u, n, pad_u_);
  detail::pad_coeffs(ux_, n, pad_ux_);
  for (int j = 0; j < m; ++j) pad_u_[j] += cplx(0.0, 1.0) * pad_ux_[j];
  detail::fft(pad_u_, pad_u_, +1);
  for (int j = 0; j < m; ++j) {
    const double uj = pad_u_[j].real();
    const double uxj = pad_u_[j].imag();
    pad_u_[j] = model_->g(uj) - model_->df(uj) * uxj;
  }
  detail::fft(pad_u_, pad_u_, -1);
  const double scale = 1.0 / m;
  for (auto& z : pad_u_) z *= scale;
  detail::truncate_coeffs(pad_u_, n, out);
  symmetrize(grid_, out);
}

}  // namespace detail

using detail::NonlinearKernel;

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end: must be positive");
  if (!(dt < t_end) && dt != t_end) throw ConfigError("dt: must not exceed t_end");
  if (!(picard_tol >= 1e-14)) throw ConfigError("picard_tol: must be >= 1e-14");
  if (picard_max_iter < 1) throw ConfigError("picard_max_iter: must be positive");
  if (record_every < 1) throw ConfigError("record_every: must be positive");
  if (!(blowup_ceiling > 0.0)) throw ConfigError("blowup_ceiling: must be positive");
}

const char* to_string(Scheme s) { return s == Scheme::etdrk4 ? "etdrk4" : "picard"; }

SpectralField nonlinearity(const SpectralField& u, const ModelFunctions& model) {
  if (!u.is_real()) throw SymmetryError("nonlinearity: field must be real");
  NonlinearKernel kernel(u.grid(), model);
  CoeffVector out(static_cast<std::size_t>(u.n()));
  kernel(u.coeffs(), out);
  return SpectralField(u.grid(), std::move(out), true);
}

// ---------------------------------------------------------------------------
// ETDRK4

Etdrk4Stepper::Etdrk4Stepper(const PeriodicGrid& grid, double dt, const ModelFunctions& model)
    : grid_(grid), dt_(dt), kernel_(grid, model) {
  if (!(dt > 0.0)) throw DomainError("Etdrk4Stepper: dt must be positive");
  const int n = grid.n();
  const auto sz = static_cast<std::size_t>(n);
  for (auto* v : {&e_, &e2_, &q_, &f1_, &f2_, &f3_, &nu_, &na_, &nb_, &nc_, &a_, &b_, &c_}) {
    v->assign(sz, cplx{});
  }
  std::array<cplx, kContourPoints> roots;
  for (int j = 0; j < kContourPoints; ++j) {
    roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / kContourPoints);
  }
  const auto fill = [&](int idx, int k, bool conj_of_positive) {
    const cplx z = -symbol_q(k, grid.L()) * dt;
    cplx q{}, f1{}, f2{}, f3{};
    for (const cplx& r : roots) {
      const cplx w = z + r;
      const cplx ew = std::exp(w);
      const cplx w3 = w * w * w;
      q += (std::exp(0.5 * w) - 1.0) / w;
      f1 += (-4.0 - w + ew * (4.0 - 3.0 * w + w * w)) / w3;
      f2 += (2.0 + w + ew * (w - 2.0)) / w3;
      f3 += (-4.0 - 3.0 * w - w * w + ew * (4.0 - w)) / w3;
    }
    const double s = dt / kContourPoints;
    cplx vals[6] = {std::exp(z), std::exp(0.5 * z), q * s, f1 * s, f2 * s, f3 * s};
    if (conj_of_positive) {
      for (auto& v : vals) v = std::conj(v);
    }
    e_[idx] = vals[0];
    e2_[idx] = vals[1];
    q_[idx] = vals[2];
    f1_[idx] = vals[3];
    f2_[idx] = vals[4];
    f3_[idx] = vals[5];
  };
  for (int k = 0; k < n / 2; ++k) {
    fill(static_cast<int>(grid.index(k)), k, false);
    if (k > 0) fill(static_cast<int>(grid.index(-k)), k, true);
  }
  // Nyquist: keep the real part so real fields stay real.
  fill(n / 2, -n / 2, false);
  for (auto* v : {&e_, &e2_, &q_, &f1_, &f2_, &f3_}) (*v)[n / 2] = (*v)[n / 2].real();
}

bool Etdrk4Stepper::advance(CoeffVector& u) {
  const std::size_t n = u.size();
  auto& kernel = kernel_;
  kernel(u, nu_);
  for (std::size_t i = 0; i < n; ++i) a_[i] = e2_[i] * u[i] + q_[i] * nu_[i];
  kernel(a_, na_);
  for (std::size_t i = 0; i < n; ++i) b_[i] = e2_[i] * u[i] + q_[i] * na_[i];
  kernel(b_, nb_);
  for (std::size_t i = 0; i < n; ++i) c_[i] = e2_[i] * a_[i] + q_[i] * (2.0 * nb_[i] - nu_[i]);
  kernel(c_, nc_);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = e_[i] * u[i] + f1_[i] * nu_[i] + 2.0 * f2_[i] * (na_[i] + nb_[i]) + f3_[i] * nc_[i];
  }
  return finite(u);
}

SpectralField step_etdrk4(const SpectralField& u, double dt, const ModelFunctions& model) {
  if (!u.is_real()) throw SymmetryError("step_etdrk4: field must be real");
  Etdrk4Stepper stepper(u.grid(), dt, model);
  CoeffVector c(u.coeffs());
  if (!stepper.advance(c)) throw BlowUpError(dt, "step_etdrk4: non-finite values after step");
  symmetrize(u.grid(), c);
  return SpectralField(u.grid(), std::move(c), true);
}

EvolutionTrace solve(const SpectralField& u0, const ModelFunctions& model,
                     const SolverConfig& config) {
  config.validate();
  if (!u0.is_real()) throw SymmetryError("solve: initial data must be real");
  EvolutionTrace trace;
  trace.config = config;
  trace.model_name = model.name;

  const auto& grid = u0.grid();
  const long nsteps = std::max(1L, std::lround(std::ceil(config.t_end / config.dt - 1e-9)));
  const double dt = config.t_end / static_cast<double>(nsteps);

  const auto record = [&](double t, const CoeffVector& c) {
    trace.times.push_back(t);
    trace.fields.emplace_back(grid, c, true);
    trace.norms_s.push_back(h3_norm_coeffs(grid, c));
  };

  CoeffVector u(u0.coeffs());
  record(0.0, u);

  std::optional<Etdrk4Stepper> stepper;
  if (config.scheme == Scheme::etdrk4) stepper.emplace(grid, dt, model);

  for (long step = 1; step <= nsteps; ++step) {
    const double t = dt * static_cast<double>(step);
    bool ok = true;
    if (stepper) {
      ok = stepper->advance(u);
    } else {
      try {
        auto res = solve_picard(SpectralField(grid, u, true), model, dt, config.picard_tol,
                                config.picard_max_iter);
        u = res.u.coeffs();
      } catch (const NonContractionError& e) {
        trace.blew_up = true;
        trace.blow_up_time = t;
        trace.message = e.what();
        return trace;
      }
    }
    if (ok) symmetrize(grid, u);
    const double norm = ok ? h3_norm_coeffs(grid, u) : std::numeric_limits<double>::infinity();
    if (!ok || !(norm <= config.blowup_ceiling)) {
      trace.blew_up = true;
      trace.blow_up_time = t;
      trace.message = ok ? "H3 norm exceeded blow-up ceiling" : "non-finite values";
      return trace;
    }
    if (step % config.record_every == 0 || step == nsteps) record(t, u);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Picard iteration on the Duhamel form

PicardResult solve_picard(const SpectralField& u0, const ModelFunctions& model, double T,
                          double tol, int max_iter) {
  if (!(T > 0.0)) throw DomainError("solve_picard: T must be positive");
  if (!u0.is_real()) throw SymmetryError("solve_picard: initial data must be real");
  constexpr int kPanels = 16;
  static constexpr std::array<double, 4> kNodes = {-0.8611363115940526, -0.3399810435848563,
                                                   0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> kWeights = {0.3478548451374538, 0.6521451548625461,
                                                     0.6521451548625461, 0.3478548451374538};

  const auto& grid = u0.grid();
  const int n = grid.n();
  const double h = T / kPanels;

  std::vector<cplx> qk(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) qk[i] = symbol_q(grid.wavenumber(i), grid.L());
  const auto propagate = [&](const CoeffVector& c, double t) {
    CoeffVector out(c);
    for (int i = 0; i < n; ++i) out[i] *= std::exp(-qk[i] * t);
    out[n / 2] = out[n / 2].real();
    return out;
  };

  std::vector<CoeffVector> snaps(kPanels + 1), free(kPanels + 1);
  for (int p = 0; p <= kPanels; ++p) {
    free[p] = propagate(u0.coeffs(), p * h);
    snaps[p] = free[p];
  }

  NonlinearKernel kernel(grid, model);
  PicardResult result{u0, 0, {}, {}};
  std::vector<std::array<CoeffVector, 4>> forcing(kPanels);
  std::vector<std::array<double, 4>> taus(kPanels);

  for (int iter = 1; iter <= max_iter; ++iter) {
    // Forcing at the Gauss nodes from the cubic interpolant of the iterate.
    for (int q = 0; q < kPanels; ++q) {
      const int s = std::clamp(q - 1, 0, kPanels - 3);
      for (int g = 0; g < 4; ++g) {
        const double tau = (q + 0.5 * (1.0 + kNodes[g])) * h;
        taus[q][g] = tau;
        const double x = tau / h - s;  // local coordinate in [0, 3]
        std::array<double, 4> w;
        for (int a = 0; a < 4; ++a) {
          double l = 1.0;
          for (int b = 0; b < 4; ++b) {
            if (b != a) l *= (x - b) / double(a - b);
          }
          w[a] = l;
        }
        CoeffVector uint(static_cast<std::size_t>(n));
        for (int a = 0; a < 4; ++a) {
          for (int i = 0; i < n; ++i) uint[i] += w[a] * snaps[s + a][i];
        }
        symmetrize(grid, uint);
        forcing[q][g].assign(static_cast<std::size_t>(n), cplx{});
        kernel(uint, forcing[q][g]);
      }
    }
    std::vector<CoeffVector> next(kPanels + 1);
    double increment = 0.0;
    for (int p = 0; p <= kPanels; ++p) {
      next[p] = free[p];
      const double tp = p * h;
      for (int q = 0; q < p; ++q) {
        for (int g = 0; g < 4; ++g) {
          const double lag = tp - taus[q][g];
          const double wq = 0.5 * h * kWeights[g];
          for (int i = 0; i < n; ++i) next[p][i] += wq * std::exp(-qk[i] * lag) * forcing[q][g][i];
        }
      }
      next[p][n / 2] = next[p][n / 2].real();
      symmetrize(grid, next[p]);
      CoeffVector diff(next[p]);
      for (int i = 0; i < n; ++i) diff[i] -= snaps[p][i];
      increment = std::max(increment, h3_norm_coeffs(grid, diff));
    }
    snaps = std::move(next);
    result.iterations = iter;
    if (!result.increments.empty() && result.increments.back() > 0.0) {
      result.ratios.push_back(increment / result.increments.back());
    }
    result.increments.push_back(increment);
    if (!std::isfinite(increment)) break;
    if (increment < tol) {
      result.u = SpectralField(grid, snaps[kPanels], true);
      return result;
    }
  }
  const double last = result.ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : result.ratios.back();
  throw NonContractionError(last, "solve_picard: no contraction within " +
                                      std::to_string(max_iter) +
                                      " iterations (last ratio " + std::to_string(last) +
                                      "); reduce T");
}

// ---------------------------------------------------------------------------

ContinuityProbeResult data_map_continuity_probe(const SpectralField& u0,
                                                const ModelFunctions& model, double T,
                                                std::span<const double> deltas, double dt,
                                                const std::optional<SpectralField>& direction,
                                                std::uint64_t seed) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw DomainError("data_map_continuity_probe: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw DomainError("data_map_continuity_probe: deltas must be decreasing");
    }
  }
  SpectralField dir = direction ? *direction
                                : random_band_limited(u0.grid(), std::min(8, u0.n() / 2 - 1),
                                                      4.0, seed);
  if (!(dir.grid() == u0.grid())) throw DimensionError("data_map_continuity_probe: grid mismatch");
  const double norm = sobolev_norm(dir, 3.0);
  if (norm == 0.0) throw DomainError("data_map_continuity_probe: zero direction");
  dir *= 1.0 / norm;

  SolverConfig cfg;
  cfg.dt = std::min(dt, T);
  cfg.t_end = T;
  const EvolutionTrace base = solve(u0, model, cfg);

  ContinuityProbeResult out;
  out.ratios.assign(deltas.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> flags(deltas.size(), 0);
  const int nd = static_cast<int>(deltas.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int i = 0; i < nd; ++i) {
    const EvolutionTrace pert = solve(u0 + deltas[i] * dir, model, cfg);
    if (pert.blew_up || base.blew_up) {
      flags[i] = 1;
      continue;
    }
    double sup = 0.0;
    for (std::size_t j = 0; j < base.fields.size(); ++j) {
      sup = std::max(sup, sobolev_norm(pert.fields[j] - base.fields[j], 3.0));
    }
    out.ratios[i] = sup / deltas[i];
  }
  out.blew_up.assign(flags.begin(), flags.end());
  return out;
}

}  // namespace kdvb
