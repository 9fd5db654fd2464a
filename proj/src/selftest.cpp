#include "kdvb/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "kdvb/error.hpp"
#include "kdvb/evolution.hpp"
#include "kdvb/fourier.hpp"
#include "kdvb/harness.hpp"
#include "kdvb/model.hpp"
#include "kdvb/semigroup.hpp"
#include "kdvb/spectra.hpp"
#include "kdvb/waves.hpp"

namespace kdvb {

namespace {

constexpr double kPi = std::numbers::pi;

class Runner {
 public:
  explicit Runner(std::ostream& out) : out_(out) {}

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    results_.push_back({name, ok, detail});
    out_ << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) out_ << "  (" << detail << ")";
    out_ << "\n";
  }

  // Runs a group; an escaping exception counts as one failed check.
  void group(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(name, false, std::string("exception: ") + e.what());
    }
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::ostream& out_;
  std::vector<CheckResult> results_;
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  }
  return m;
}

SpectralField random_field(const PeriodicGrid& grid, int kmax, std::uint64_t seed) {
  return random_band_limited(grid, kmax, 1.0, seed);
}

WaveProfile flat_wave(const PeriodicGrid& grid, double value, double c) {
  WaveProfile w{SpectralField::constant(grid, value), c, 0.0, 0.0};
  return w;
}

void fourier_checks(Runner& R) {
  R.group("fourier", [&] {
    const PeriodicGrid grid(32, 2 * kPi);
    const auto x = grid.nodes();

    std::vector<double> ones(32, 1.0), cosx(32);
    for (int j = 0; j < 32; ++j) cosx[j] = std::cos(x[j]);
    const auto c1 = forward_transform(ones, grid);
    R.check("forward of constant", std::abs(c1.coeff(0) - 1.0) < 1e-14 && c1.max_abs_coeff() < 1 + 1e-14);
    const auto cc = forward_transform(cosx, grid);
    R.check("forward of cosine",
            std::abs(cc.coeff(1) - 0.5) < 1e-14 && std::abs(cc.coeff(-1) - 0.5) < 1e-14);

    const auto u = random_field(grid, 10, 11);
    const auto back = forward_transform(inverse_transform(u), grid);
    R.check("transform round trip", max_diff(u, back) < 1e-12 * u.max_abs_coeff());

    const auto s = SpectralField::single_mode(grid, 1, 0.0, 1.0);
    const auto d3 = differentiate(s, 3);
    R.check("third derivative of sine", max_diff(d3, SpectralField::single_mode(grid, 1, -1.0)) < 1e-14);
    R.check("derivative composition",
            max_diff(differentiate(differentiate(u, 1), 2), differentiate(u, 3)) < 1e-12);

    R.check("H3 norm of constant",
            std::abs(sobolev_norm(SpectralField::constant(grid, 1.0), 3) - std::sqrt(2 * kPi)) < 1e-14);
    R.check("L2 norm of cosine", std::abs(sobolev_norm(cc, 0) - std::sqrt(kPi)) < 1e-13);

    // Parseval: spectral L2 norm vs trapezoid rule, 100 random fields.
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto f = random_band_limited(grid, 15, 0.5, 1000 + seed);
      const auto v = inverse_transform(f);
      double trap = 0.0;
      for (double t : v) trap += t * t;
      trap *= grid.spacing();
      worst = std::max(worst, std::abs(sobolev_norm(f, 0) * sobolev_norm(f, 0) - trap) / trap);
    }
    R.check("Parseval (100 random fields)", worst < 1e-10, "max rel " + sci(worst));

    worst = 0.0;
    for (double a : {0.1, 0.5, 0.9}) {
      for (double sp : {0.0, 3.0}) {
        const double n0 = sobolev_norm(u, sp);
        worst = std::max(worst, std::abs(sobolev_norm(translate(u, a * grid.L()), sp) - n0) / n0);
      }
    }
    R.check("translation norm invariance", worst < 1e-12, "max rel " + sci(worst));
    R.check("translate by L is identity", max_diff(translate(u, grid.L()), u) < 1e-12);

    // Dealiased product of fields with the top third of modes removed against
    // the direct convolution sum.
    const auto a = random_field(grid, 10, 21), b = random_field(grid, 10, 22);
    const auto prod = multiply_dealiased(a, b);
    std::vector<cplx> conv(32);
    for (int k1 = -16; k1 < 16; ++k1) {
      for (int k2 = -16; k2 < 16; ++k2) {
        const int k = k1 + k2;
        if (k >= -16 && k <= 16) conv[grid.index(k)] += a.coeff(k1) * b.coeff(k2);
      }
    }
    double err = 0.0;
    for (int k = -16; k < 16; ++k) err = std::max(err, std::abs(conv[grid.index(k)] - prod.coeff(k)));
    R.check("dealiased product vs convolution", err < 1e-12, "max " + sci(err));
    R.check("product with one", max_diff(multiply_dealiased(SpectralField::constant(grid, 1.0), a), a) < 1e-14);
  });
}

void semigroup_checks(Runner& R) {
  R.group("semigroup", [&] {
    R.check("Q(0) = 0", symbol_q(0, 2 * kPi) == cplx(0.0));
    R.check("Q(1) = 1 - i", std::abs(symbol_q(1, 2 * kPi) - cplx(1, -1)) < 1e-14);
    R.check("Q(-2) = 4 + 8i", std::abs(symbol_q(-2, 2 * kPi) - cplx(4, 8)) < 1e-13);

    const PeriodicGrid grid(32, 2 * kPi);
    const auto u = random_field(grid, 12, 5);
    R.check("V(0) is identity", max_diff(apply_semigroup(u, 0.0), u) == 0.0);
    const auto m = apply_semigroup(SpectralField::single_mode(grid, 1, 2.0), 1.0);
    R.check("V(1) on mode 1", std::abs(m.coeff(1) - std::exp(cplx(-1, 1))) < 1e-14);

    double worst = 0.0;
    for (double t : {0.1, 0.7}) {
      for (double s : {0.1, 0.7}) {
        const auto lhs = apply_semigroup(apply_semigroup(u, t), s);
        const auto rhs = apply_semigroup(u, t + s);
        worst = std::max(worst, max_diff(lhs, rhs) / rhs.max_abs_coeff());
      }
    }
    R.check("semigroup law", worst < 1e-12, "max rel " + sci(worst));
    R.check("contraction in H3", sobolev_norm(apply_semigroup(u, 0.1), 3) <= sobolev_norm(u, 3) &&
                                     sobolev_norm(apply_semigroup(u, 1.0), 3) <= sobolev_norm(u, 3));
  });
}

void evolution_checks(Runner& R) {
  R.group("evolution", [&] {
    const PeriodicGrid grid(32, 2 * kPi);
    const auto kdvbf = kdvbf_model(1.0, 1.0);
    R.check("F(0) = 0", nonlinearity(SpectralField::zeros(grid), kdvbf).max_abs_coeff() == 0.0);
    R.check("F(1) = 0", nonlinearity(SpectralField::constant(grid, 1.0), kdvbf).max_abs_coeff() < 1e-15);
    const auto F = nonlinearity(SpectralField::single_mode(grid, 1, 1.0), burgers_flux_model(1.0));
    R.check("F(cos) = sin(2x)/2", max_diff(F, SpectralField::single_mode(grid, 2, 0.0, 0.5)) < 1e-15);

    const auto u = random_field(grid, 8, 9);
    const auto lin = step_etdrk4(u, 1e-2, linear_flow_model());
    R.check("linear step equals semigroup", max_diff(lin, apply_semigroup(u, 1e-2)) < 1e-12);
    const auto one = step_etdrk4(SpectralField::constant(grid, 1.0), 1e-2, kdvbf);
    R.check("u = 1 is preserved", max_diff(one, SpectralField::constant(grid, 1.0)) < 1e-12);

    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt = 1e-2;
    const auto ls = solve(SpectralField::single_mode(grid, 1, 1.0), linear_source_model(1.0), cfg);
    double drift = 0.0;
    for (const auto& f : ls.fields) drift = std::max(drift, std::abs(std::abs(f.coeff(1)) - 0.5) / 0.5);
    R.check("linear source keeps |u_hat(1)|", drift < 1e-8, "max rel " + sci(drift));

    const auto zero = solve(SpectralField::zeros(grid), kdvbf, cfg);
    double zmax = 0.0;
    for (const auto& f : zero.fields) zmax = std::max(zmax, f.max_abs_coeff());
    R.check("zero data stays zero", zmax == 0.0);

    // Mean balance: d/dt u_hat(0) = mean g(u), checked by centered differences.
    SolverConfig mb;
    mb.t_end = 0.5;
    mb.dt = 1e-3;
    const auto u0 = 0.3 * random_band_limited(grid, 6, 2.0, 17);
    const auto tr = solve(u0, kdvbf, mb);
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < tr.fields.size(); ++i) {
      const double lhs = (tr.fields[i + 1].mean() - tr.fields[i - 1].mean()) /
                         (tr.times[i + 1] - tr.times[i - 1]);
      err = std::max(err, std::abs(lhs - nonlinearity(tr.fields[i], kdvbf).mean()));
    }
    R.check("mean balance along a trace", err < 1e-5, "max " + sci(err));

    const auto pic = solve_picard(u, linear_flow_model(), 0.05);
    R.check("Picard with F = 0 is V(T)",
            pic.iterations <= 2 && max_diff(pic.u, apply_semigroup(u, 0.05)) < 1e-12);
  });
}

void waves_checks(Runner& R) {
  R.group("waves", [&] {
    const auto kdvbf = kdvbf_model(1.0, 1.0);
    const PeriodicGrid grid(64, 2 * kPi);
    R.check("residual at phi = 0",
            profile_residual(flat_wave(grid, 0.0, -1.0), kdvbf).max_abs_coeff() == 0.0);
    R.check("residual at phi = 1",
            profile_residual(flat_wave(grid, 1.0, 0.3), kdvbf).max_abs_coeff() < 1e-15);

    const auto h = hopf_predictor(1.0, 1.0, 0.01);
    R.check("Hopf seed r = 1", h.c == -1.0 && std::abs(h.L() - 2 * kPi) < 1e-15 &&
                                   std::abs(amplitude_measure(h.phi) - 0.1) < 1e-14);
    R.check("Hopf seed r = 4 has L = pi", std::abs(hopf_predictor(4.0, 1.0, 0.01).L() - kPi) < 1e-15);

    const auto w1 = refine_newton(flat_wave(grid, 1.0, -1.0), kdvbf, Closure::speed, -1.0);
    R.check("Newton keeps an exact solution",
            max_diff(w1.phi, SpectralField::constant(grid, 1.0)) == 0.0 && w1.c == -1.0);
  });
}

void spectra_checks(Runner& R) {
  R.group("spectra", [&] {
    const double r = 1.0;
    const auto kdvbf = kdvbf_model(r, 1.0);
    const PeriodicGrid grid(64, 2 * kPi);
    const auto zero = flat_wave(grid, 0.0, -r);

    const auto lc = linearized_coefficients(zero, kdvbf);
    R.check("a1 = -r, a0 = r at phi = 0",
            std::abs(lc.a1.coeff(0) + r) < 1e-15 && std::abs(lc.a0.coeff(0) - r) < 1e-15);

    const int N = 16;
    double worst = 0.0;
    for (double theta : {0.0, kPi / 2, kPi}) {
      auto eig = eigen_bloch(assemble_bloch(zero, kdvbf, theta, N));
      std::vector<cplx> symbol;
      for (int k = -N; k <= N; ++k) {
        const double kap = (2 * kPi * k + theta) / grid.L();
        symbol.push_back(cplx(0, kap * kap * kap) - kap * kap + cplx(0, -r * kap) + r);
      }
      for (const auto& s : symbol) {
        double best = 1e300;
        for (const auto& e : eig) best = std::min(best, std::abs(e - s));
        worst = std::max(worst, best);
      }
    }
    R.check("constant-coefficient Bloch spectrum", worst < 1e-10, "max " + sci(worst));

    const auto ep = eigenpair_bloch(assemble_bloch(zero, kdvbf, 0.0, N), 0);
    R.check("top eigenpair at phi = 0 is (r, 1)",
            std::abs(ep.lambda - r) < 1e-12 &&
                std::abs(std::abs(ep.psi.coeff(0)) - 1.0 / std::sqrt(grid.L())) < 1e-12);

    // Branch profile for the symmetry and resolvent suites.
    const std::vector<double> eps{0.01, 0.02};
    const auto branch = continue_branch(r, 1.0, eps);
    R.check("branch to eps = 0.02", !branch.truncated && branch.profiles.size() == 2,
            branch.message);
    const auto& w = branch.profiles.back();

    worst = 0.0;
    for (double theta : {0.3, 1.1, 2.5}) {
      auto plus = eigen_bloch(assemble_bloch(w, kdvbf, theta, 24));
      auto minus = eigen_bloch(assemble_bloch(w, kdvbf, -theta, 24));
      for (const auto& l : plus) {
        double best = 1e300;
        for (const auto& m : minus) best = std::min(best, std::abs(l - std::conj(m)));
        worst = std::max(worst, best / std::max(1.0, std::abs(l)));
      }
    }
    R.check("conjugation symmetry theta <-> -theta", worst < 1e-8, "max rel " + sci(worst));

    const auto coeffs = linearized_coefficients(w, kdvbf);
    const double c0 = resolvent_constant(coeffs);
    const std::vector<cplx> probes{c0 + 1.5, cplx(c0 + 5, 3.0), cplx(c0 + 20, -7.0)};
    const auto vals = resolvent_bound_probe(w, kdvbf, probes, 24);
    bool ok = true;
    std::string detail = "C0 " + sci(c0);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double bound = 1.0 / (probes[i].real() - c0) * (1 + 1e-6);
      ok = ok && vals[i] <= bound;
      detail += "; " + sci(vals[i]) + " <= " + sci(bound);
    }
    R.check("resolvent bound at 3 points", ok, detail);

    const std::vector<cplx> flat_probe{3.0};
    R.check("resolvent at phi = 0, lambda = 3",
            resolvent_bound_probe(zero, kdvbf, flat_probe, N)[0] <= 0.5 * (1 + 1e-6));
  });
}

void harness_checks(Runner& R) {
  R.group("harness", [&] {
    const PeriodicGrid grid(64, 2 * kPi);
    const auto phi = random_band_limited(grid, 8, 3.0, 3);
    const auto od = orbital_distance(translate(phi, 0.3 * grid.L()), phi);
    R.check("orbital distance of a translate",
            od.distance < 1e-10 && std::abs(od.shift - 0.3 * grid.L()) < 1e-8,
            "d " + sci(od.distance));
    const auto off = orbital_distance(phi + SpectralField::constant(grid, 1e-3), phi);
    R.check("orbital distance of a constant offset",
            std::abs(off.distance - 1e-3 * std::sqrt(grid.L())) < 1e-10);

    const auto kdvbf = kdvbf_model(1.0, 1.0);
    WaveProfile w{SpectralField::zeros(grid), -1.0, 0.0, 0.0};
    SolverConfig cfg;
    cfg.dt = 1e-2;
    R.check("S(0) = 0", map_S(w, kdvbf, w.phi, 1.0, cfg).max_abs_coeff() == 0.0);
  });
}

}  // namespace

std::vector<CheckResult> run_selftest(std::ostream& out) {
  Runner R(out);
  const auto t0 = std::chrono::steady_clock::now();
  fourier_checks(R);
  semigroup_checks(R);
  evolution_checks(R);
  waves_checks(R);
  spectra_checks(R);
  harness_checks(R);
  auto results = R.take();
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& c) { return !c.passed; });
  out << results.size() - failed << "/" << results.size() << " checks passed in " << secs << " s\n";
  return results;
}

}  // namespace kdvb
