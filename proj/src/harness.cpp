#include "kdvb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kdvb/error.hpp"

namespace kdvb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Squared H^s distance between u and phi(. + a), with the Nyquist mode
// handled as in translate().
class ShiftedDistance {
 public:
  ShiftedDistance(const SpectralField& u, const SpectralField& phi, double s)
      : u_(u), phi_(phi), w_(static_cast<std::size_t>(u.n())) {
    for (int i = 0; i < u.n(); ++i) {
      const double k = u.grid().wavenumber(i);
      w_[i] = std::pow(1.0 + k * k, s);
    }
  }

  double operator()(double a) const { return eval(a).value; }

  struct Derivs {
    double value, first, second;
  };

  // Distance squared and its first two derivatives in a.
  Derivs eval(double a) const {
    const auto& grid = u_.grid();
    const int n = grid.n();
    const double x = a / grid.L();
    Derivs d{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      cplx sh, d1, d2;
      if (i == n / 2 && phi_.is_real()) {
        const double om = std::numbers::pi * n / grid.L();
        const double p = std::numbers::pi * n * x;
        sh = phi_.coeffs()[i] * std::cos(p);
        d1 = -om * phi_.coeffs()[i] * std::sin(p);
        d2 = -om * om * sh;
      } else {
        const double om = kTwoPi * grid.wavenumber(i) / grid.L();
        const double p = kTwoPi * grid.wavenumber(i) * x;
        sh = phi_.coeffs()[i] * cplx(std::cos(p), std::sin(p));
        d1 = cplx(0.0, om) * sh;
        d2 = -om * om * sh;
      }
      const cplx r = u_.coeffs()[i] - sh;
      d.value += w_[i] * std::norm(r);
      d.first += -2.0 * w_[i] * (std::conj(r) * d1).real();
      d.second += 2.0 * w_[i] * (std::norm(d1) - (std::conj(r) * d2).real());
    }
    d.value *= grid.L();
    d.first *= grid.L();
    d.second *= grid.L();
    return d;
  }

  // Expanded form ||u||^2 + ||phi||^2 - 2 L Re sum w u conj(phi) e^{-2 pi i k a / L}
  // evaluated at the n grid shifts.
  std::vector<double> scan() const {
    const auto& grid = u_.grid();
    const int n = grid.n();
    double nu = 0.0, np = 0.0;
    for (int i = 0; i < n; ++i) {
      nu += w_[i] * std::norm(u_.coeffs()[i]);
      np += w_[i] * std::norm(phi_.coeffs()[i]);
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      double cross = 0.0;
      for (int i = 0; i < n; ++i) {
        const double p = -kTwoPi * grid.wavenumber(i) * j / n;
        cross += w_[i] * (u_.coeffs()[i] * std::conj(phi_.coeffs()[i]) *
                          cplx(std::cos(p), std::sin(p)))
                             .real();
      }
      out[j] = grid.L() * (nu + np - 2.0 * cross);
    }
    return out;
  }

 private:
  const SpectralField& u_;
  const SpectralField& phi_;
  std::vector<double> w_;
};

double positive_mod(double a, double L) {
  double r = std::fmod(a, L);
  if (r < 0) r += L;
  if (r >= L) r -= L;
  return r;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::growth_confirmed:
      return "growth_confirmed";
    case Verdict::blow_up:
      return "blow_up";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

OrbitalDistance orbital_distance(const SpectralField& u, const SpectralField& phi, double s) {
  if (!(u.grid() == phi.grid())) throw DimensionError("orbital_distance: grid mismatch");
  const ShiftedDistance dist(u, phi, s);
  const auto coarse = dist.scan();
  const auto best = static_cast<int>(std::min_element(coarse.begin(), coarse.end()) - coarse.begin());
  const double h = u.grid().spacing();

  // Golden-section search on the bracket around the best grid shift.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = best * h - h, hi = best * h + h;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = dist(x1), f2 = dist(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = dist(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = dist(x2);
    }
  }
  double a = 0.5 * (lo + hi);
  double d2 = dist(a);
  // Newton on the derivative sharpens the shift past the golden-section
  // resolution of a flat minimum.
  for (int it = 0; it < 8; ++it) {
    const auto dv = dist.eval(a);
    if (!(dv.second > 0.0)) break;
    const double step = dv.first / dv.second;
    if (!(std::abs(step) < h)) break;
    const double val = dist(a - step);
    if (!(val <= d2)) break;
    a -= step;
    d2 = val;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(a))) break;
  }
  // The bracket endpoints may still win when the minimum sits on a grid shift.
  for (double cand : {best * h}) {
    const double dc = dist(cand);
    if (dc < d2) {
      d2 = dc;
      a = cand;
    }
  }
  return {std::sqrt(std::max(0.0, d2)), positive_mod(a, u.L())};
}

OrbitalDistance orbital_distance(const SpectralField& u, const WaveProfile& w, double s) {
  return orbital_distance(u, w.phi, s);
}

SpectralField map_S(const WaveProfile& w, const ModelFunctions& model, const SpectralField& phi0,
                    double T, const SolverConfig& solver) {
  if (!(phi0.grid() == w.phi.grid())) throw DimensionError("map_S: phi0 not on the profile grid");
  SolverConfig cfg = solver;
  cfg.t_end = T;
  cfg.dt = std::min(solver.dt, T);
  cfg.record_every = std::numeric_limits<int>::max();
  const auto trace = solve(phi0, model, cfg);
  if (trace.blew_up) {
    throw BlowUpError(trace.blow_up_time, "map_S: evolution blew up (" + trace.message + ")");
  }
  return translate(trace.fields.back(), w.c * T);
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& d, std::size_t lo,
                     std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    const double y = std::log(d[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SpectralField perturbation_direction(const WaveProfile& w, const BlochEigenpair& eig) {
  if (std::abs(eig.psi.L() - w.L()) > 1e-12 * w.L()) {
    throw DimensionError("perturbation_direction: eigenfunction period differs from profile");
  }
  auto re = real_part(eig.psi);
  SpectralField dir(w.phi.grid(), resample(re, w.n()).coeffs(), true);
  const double norm = sobolev_norm(dir, 3.0);
  if (norm == 0.0) throw DomainError("perturbation_direction: Re(psi) vanishes");
  dir *= 1.0 / norm;
  return dir;
}

InstabilityReport perturbation_experiment(const WaveProfile& w, const ModelFunctions& model,
                                          cplx lambda, const SpectralField& direction,
                                          double delta0, double T, const SolverConfig& solver,
                                          const ExperimentOptions& options) {
  if (!(delta0 >= 0.0)) throw DomainError("perturbation_experiment: delta0 must be >= 0");
  InstabilityReport rep{w, lambda, 0.0, {}, {}, std::numeric_limits<double>::quiet_NaN(), {0.0, 0.0}, Verdict::inconclusive, {}, {}};
  const double rate = lambda.real();
  if (options.auto_shrink && rate > 0.0 && delta0 > 0.0) {
    delta0 = std::min(delta0, options.max_final_amplitude * std::exp(-rate * T));
  }
  rep.delta0 = delta0;

  SpectralField u0 = w.phi;
  if (delta0 > 0.0) {
    const double norm = sobolev_norm(direction, 3.0);
    if (norm == 0.0) throw DomainError("perturbation_experiment: zero direction");
    u0 += (delta0 / norm) * direction;
  }

  SolverConfig cfg = solver;
  cfg.t_end = T;
  cfg.dt = std::min(solver.dt, T);
  const auto trace = solve(u0, model, cfg);
  rep.times = trace.times;
  for (const auto& f : trace.fields) rep.orbital_distances.push_back(orbital_distance(f, w).distance);

  const auto& d = rep.orbital_distances;
  const double dmax = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  if (delta0 > 0.0) {
    const double lo_val = options.fit_lo * delta0, hi_val = options.fit_hi * delta0;
    std::size_t lo = 0;
    while (lo < d.size() && d[lo] < lo_val) ++lo;
    std::size_t hi = lo;
    while (hi < d.size() && d[hi] <= hi_val) ++hi;
    if (hi - lo >= 3) {
      rep.fitted_rate = fit_log_slope(rep.times, d, lo, hi);
      rep.fit_window = {rep.times[lo], rep.times[hi - 1]};
    }
    if (trace.blew_up && dmax < hi_val) {
      rep.verdict = Verdict::blow_up;
      rep.message = "blow-up at t=" + std::to_string(trace.blow_up_time) + " before the fit window closed";
      return rep;
    }
    const bool rate_ok = rate > 0.0 && std::isfinite(rep.fitted_rate) &&
                         std::abs(rep.fitted_rate - rate) <= options.rate_tolerance * rate;
    const bool exited = dmax >= options.exit_factor * delta0;
    if (rate_ok && exited) {
      rep.verdict = Verdict::growth_confirmed;
    } else {
      rep.message = !exited ? "orbital distance did not leave the initial ball"
                            : "fitted rate outside tolerance of Re lambda";
    }
  } else {
    rep.message = "delta0 = 0: unperturbed wave";
  }
  return rep;
}

IteratedEscape iterated_escape(const WaveProfile& w, const ModelFunctions& model,
                               const SpectralField& direction, double delta0, int max_iterates,
                               double exit_factor, const SolverConfig& solver) {
  IteratedEscape out;
  out.period = w.L() / std::abs(w.c);
  SpectralField u = w.phi + (delta0 / sobolev_norm(direction, 3.0)) * direction;
  out.distances.push_back(orbital_distance(u, w).distance);
  for (int k = 1; k <= max_iterates; ++k) {
    u = map_S(w, model, u, out.period, solver);
    out.distances.push_back(orbital_distance(u, w).distance);
    if (out.distances.back() >= exit_factor * delta0) {
      out.escaped_at = k;
      break;
    }
  }
  return out;
}

InstabilityReport instability_experiment(const WaveProfile& w, const ModelFunctions& model,
                                         const BlochEigenpair& eig, double delta0, double T,
                                         const SolverConfig& solver,
                                         const ExperimentOptions& options) {
  const auto dir = perturbation_direction(w, eig);
  auto rep = perturbation_experiment(w, model, eig.lambda, dir, delta0, T, solver, options);
  if (rep.delta0 > 0.0) {
    try {
      rep.escape = iterated_escape(w, model, dir, rep.delta0, 5, options.exit_factor, solver);
    } catch (const BlowUpError& e) {
      rep.escape.escaped_at = -1;
      rep.message += std::string(rep.message.empty() ? "" : "; ") + "iterated map: " + e.what();
    }
  }
  return rep;
}

}  // namespace kdvb
