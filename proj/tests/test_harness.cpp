#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "kdvb/error.hpp"
#include "kdvb/harness.hpp"
#include "oracles.hpp"

using namespace kdvb;

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficient vector of a field restricted to modes -N..N (row order of the
// Bloch matrix).
Eigen::VectorXcd bloch_vector(const SpectralField& f, int N) {
  Eigen::VectorXcd v(2 * N + 1);
  for (int i = 0; i <= 2 * N; ++i) v[i] = f.coeff(i - N);
  return v;
}

SpectralField field_from(const Eigen::VectorXcd& v, const PeriodicGrid& g, int N) {
  CoeffVector c(static_cast<std::size_t>(g.n()));
  for (int i = 0; i <= 2 * N; ++i) c[g.index(i - N)] = v[i];
  symmetrize(g, c);
  return SpectralField(g, std::move(c), true);
}

SolverConfig solver(double dt, int record_every) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.record_every = record_every;
  return cfg;
}

}  // namespace

TEST_CASE("orbital distance: orbit members and offsets") {
  const PeriodicGrid g(64, 2 * kPi);
  const auto phi = random_band_limited(g, 10, 2.0, 3);
  for (double frac : {0.0, 0.3, 0.77}) {
    const auto od = orbital_distance(translate(phi, frac * g.L()), phi);
    CHECK(od.distance < 1e-9);
    CHECK(std::abs(od.shift - frac * g.L()) < 1e-8);
  }
  const auto off = orbital_distance(phi + SpectralField::constant(g, 2e-3), phi);
  CHECK(off.distance == doctest::Approx(2e-3 * std::sqrt(g.L())).epsilon(1e-8));

  CHECK(orbital_distance(phi + 1e-3 * SpectralField::single_mode(g, 3, 1.0), phi).distance > 1e-6);
  CHECK_THROWS_AS(orbital_distance(phi, SpectralField::zeros(PeriodicGrid(32, 2 * kPi))),
                  DimensionError);
}

TEST_CASE("orbital distance against brute-force minimization") {
  const PeriodicGrid g(32, 3.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto phi = random_band_limited(g, 6, 3.0, 40 + seed);
    const auto u = translate(phi, 0.9 + seed) + 0.05 * random_band_limited(g, 6, 3.0, 60 + seed);
    const auto od = orbital_distance(u, phi);
    const auto [bd, ba] = oracle::brute_orbital_distance(u, phi, 3.0, 10000);
    CHECK(std::abs(od.distance - bd) < 1e-6 * std::max(1.0, bd));
    CHECK(od.distance <= bd + 1e-12);
    for (double s : {0.0, 1.0}) {
      const auto o2 = orbital_distance(u, phi, s);
      CHECK(std::abs(o2.distance - oracle::brute_orbital_distance(u, phi, s, 10000).first) < 1e-6);
    }
  }
}

TEST_CASE("orbital distance is invariant under translating u") {
  const PeriodicGrid g(64, 2 * kPi);
  const auto phi = random_band_limited(g, 10, 2.0, 8);
  const auto u = phi + 0.01 * random_band_limited(g, 10, 2.0, 9);
  const double d = orbital_distance(u, phi).distance;
  for (double a : {0.4, 2.2, 5.9}) {
    CHECK(std::abs(orbital_distance(translate(u, a), phi).distance - d) < 1e-10);
  }
}

TEST_CASE("map S fixes the wave and zero") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const double T = w.L() / std::abs(w.c);
  const auto s = map_S(w, m, w.phi, T, solver(1e-3, 1 << 30));
  CHECK(sobolev_norm(s - w.phi, 3) < 1e-6);

  const WaveProfile zero{SpectralField::zeros(w.phi.grid()), -1.0, 0.0, 0.0};
  CHECK(map_S(zero, m, zero.phi, 1.0, solver(1e-2, 1)).max_abs_coeff() == 0.0);
  CHECK_THROWS_AS(map_S(w, m, SpectralField::zeros(PeriodicGrid(32, w.L())), 1.0, solver(1e-2, 1)),
                  DimensionError);

  SolverConfig tight = solver(1e-2, 1);
  tight.blowup_ceiling = 1e-3;
  CHECK_THROWS_AS(map_S(w, m, w.phi, 1.0, tight), BlowUpError);
}

TEST_CASE("linearization of S along the unstable eigenfunction") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const auto eig = eigenpair_bloch(assemble_bloch(w, m, 0.0, 31), 0);
  CHECK(std::abs(eig.lambda.imag()) < 1e-10);
  const auto psi = perturbation_direction(w, eig);
  const double T = 1.0, h = 1e-5;
  const auto cfg = solver(1e-3, 1 << 30);
  auto fd = map_S(w, m, w.phi + h * psi, T, cfg) - map_S(w, m, w.phi, T, cfg);
  fd *= 1.0 / h;
  const auto pred = std::exp(eig.lambda.real() * T) * psi;
  CHECK(sobolev_norm(fd - pred, 3) / sobolev_norm(pred, 3) < 1e-2);
}

TEST_CASE("instability experiment along the unstable eigenfunction") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const int N = 31;
  const auto bm = assemble_bloch(w, m, 0.0, N);
  const auto eig = eigenpair_bloch(bm, 0);
  const double rate = eig.lambda.real();
  const double T = std::log(1e3) / rate;
  const auto rep = instability_experiment(w, m, eig, 1e-6, T, solver(1e-3, 20));
  MESSAGE("lambda " << eig.lambda << ", fitted " << rep.fitted_rate << ", window "
                    << rep.fit_window.first << ".." << rep.fit_window.second);
  CHECK(rep.verdict == Verdict::growth_confirmed);
  CHECK(std::isfinite(rep.fitted_rate));
  CHECK(std::abs(rep.fitted_rate - rate) <= 0.25 * rate);
  for (double d : rep.orbital_distances) CHECK(d >= 0.0);
  CHECK(rep.escape.escaped_at >= 1);
  CHECK(rep.escape.escaped_at <= 5);

  // Matrix-exponential prediction of the linear growth on the same window.
  const auto dir = perturbation_direction(w, eig);
  const Eigen::VectorXcd v0 = bloch_vector(dir, N);
  std::vector<double> ts, ls;
  for (double t = rep.fit_window.first; t <= rep.fit_window.second + 1e-12;
       t += (rep.fit_window.second - rep.fit_window.first) / 8) {
    const auto vt = oracle::expm_apply(bm.entries, t, v0);
    ts.push_back(t);
    ls.push_back(std::log(sobolev_norm(field_from(vt, w.phi.grid(), N), 3)));
  }
  const double oracle_rate = oracle::slope(ts, ls);
  CHECK(std::abs(rep.fitted_rate - oracle_rate) <= 0.25 * oracle_rate);
}

TEST_CASE("unperturbed wave stays on its orbit") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const auto eig = eigenpair_bloch(assemble_bloch(w, m, 0.0, 31), 0);
  const auto rep = instability_experiment(w, m, eig, 0.0, 5.0, solver(1e-3, 50));
  CHECK(rep.verdict == Verdict::inconclusive);
  for (double d : rep.orbital_distances) CHECK(d < 1e-6);
}

TEST_CASE("damped direction does not grow") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const int N = 31;
  const auto bm = assemble_bloch(w, m, 0.0, N);
  // Most damped eigenpair whose residual check passes.
  std::optional<BlochEigenpair> eig;
  for (int which = 2 * N; which > 0 && !eig; --which) {
    try {
      eig = eigenpair_bloch(bm, static_cast<std::size_t>(which));
    } catch (const InconsistentEigenpairError&) {
    }
  }
  REQUIRE(eig.has_value());
  CHECK(eig->lambda.real() < -1.0);
  const double T = 1.0;
  const auto rep = instability_experiment(w, m, *eig, 1e-6, T, solver(1e-3, 10));
  CHECK(rep.verdict == Verdict::inconclusive);
  CHECK(rep.orbital_distances[1] < rep.orbital_distances[0]);

  const auto dir = perturbation_direction(w, *eig);
  const Eigen::VectorXcd v0 = bloch_vector(dir, N);
  const auto v1 = oracle::expm_apply(bm.entries, rep.times[1], v0);
  CHECK(v1.norm() < v0.norm());
}

TEST_CASE("translation direction stays neutral") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const auto dphi = differentiate(w.phi, 1);
  const double delta0 = 1e-3;
  ExperimentOptions opts;
  opts.auto_shrink = false;
  const auto rep = perturbation_experiment(w, m, cplx(0.0), dphi, delta0, 1.0, solver(1e-3, 10), opts);
  const double d0 = rep.orbital_distances.front();
  for (double d : rep.orbital_distances) CHECK(d <= 5 * d0);
  CHECK(rep.orbital_distances.back() / delta0 < 1e-2);
  CHECK(rep.verdict == Verdict::inconclusive);
}

TEST_CASE("log-slope fit") {
  std::vector<double> t, d;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.1 * i);
    d.push_back(3e-7 * std::exp(0.83 * 0.1 * i));
  }
  CHECK(fit_log_slope(t, d, 0, t.size()) == doctest::Approx(0.83).epsilon(1e-12));
  CHECK(fit_log_slope(t, d, 5, 9) == doctest::Approx(0.83).epsilon(1e-12));
}
