#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "kdvb/error.hpp"
#include "kdvb/spectra.hpp"
#include "oracles.hpp"

using namespace kdvb;

namespace {

constexpr double kPi = std::numbers::pi;

WaveProfile flat(int n, double L, double value, double c) {
  return WaveProfile{SpectralField::constant(PeriodicGrid(n, L), value), c, 0.0, 0.0};
}

cplx symbol(double kappa, double c, double gp) {
  return cplx(0, kappa * kappa * kappa) - kappa * kappa + cplx(0, c * kappa) + gp;
}

}  // namespace

TEST_CASE("linearized coefficients on constant states") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto z = linearized_coefficients(flat(64, 2 * kPi, 0.0, -1.0), m);
  CHECK(std::abs(z.a1.coeff(0) + 1.0) < 1e-15);
  CHECK(std::abs(z.a0.coeff(0) - 1.0) < 1e-15);
  CHECK(z.a1.max_abs_coeff() == doctest::Approx(1.0));

  const auto o = linearized_coefficients(flat(64, 2 * kPi, 1.0, 0.4), kdvbf_model(2.0, 3.0));
  CHECK(std::abs(o.a1.coeff(0) - (0.4 - 3.0)) < 1e-14);
  CHECK(std::abs(o.a0.coeff(0) + 2.0) < 1e-14);
}

TEST_CASE("linearized coefficients near the flat state along the branch") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.04);
  const auto lc = linearized_coefficients(w, m);
  const auto a1_dev = lc.a1 - SpectralField::constant(w.phi.grid(), -1.0);
  const auto a0_dev = lc.a0 - SpectralField::constant(w.phi.grid(), 1.0);
  // Direct evaluation from the profile samples.
  const auto phi = inverse_transform(w.phi);
  const auto phix = inverse_transform(differentiate(w.phi, 1));
  const auto a1 = inverse_transform(lc.a1), a0 = inverse_transform(lc.a0);
  for (int j = 0; j < w.n(); ++j) {
    CHECK(std::abs(a1[j] - (w.c - phi[j])) < 1e-12);
    CHECK(std::abs(a0[j] - (1.0 - 2.0 * phi[j] - phix[j])) < 1e-12);
  }
  const double scale = std::sqrt(0.04) * std::sqrt(w.L());
  CHECK(sobolev_norm(a1_dev, 0) < 3 * scale);
  CHECK(sobolev_norm(a0_dev, 0) < 3 * scale);
}

TEST_CASE("Bloch matrix of the flat state is the symbol") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto z = flat(64, 2 * kPi, 0.0, -1.0);
  const int N = 8;
  const auto b0 = assemble_bloch(z, m, 0.0, N);
  CHECK(b0.entries.rows() == 2 * N + 1);
  for (int i = 0; i <= 2 * N; ++i) {
    const int k = i - N;
    for (int j = 0; j <= 2 * N; ++j) {
      if (i != j) CHECK(std::abs(b0.entries(i, j)) < 1e-15);
    }
    CHECK(std::abs(b0.entries(i, i) - cplx(0, double(k) * k * k) + double(k) * k - 1.0 + cplx(0, k)) <
          1e-12);
  }
  CHECK(std::abs(b0.entries(N, N) - 1.0) < 1e-15);
  CHECK(std::abs(b0.entries(N + 1, N + 1)) < 1e-15);
  CHECK(std::abs(b0.entries(N - 1, N - 1)) < 1e-15);

  const auto bq = assemble_bloch(z, m, kPi / 2, N);
  for (int i = 0; i <= 2 * N; ++i) {
    CHECK(std::abs(bq.entries(i, i) - symbol(i - N + 0.25, -1.0, 1.0)) < 1e-12);
  }

  const auto ev = eigen_bloch(b0);
  std::vector<cplx> diag;
  for (int i = 0; i <= 2 * N; ++i) diag.push_back(b0.entries(i, i));
  CHECK(oracle::multiset_distance(ev, diag) == 0.0);
  CHECK(ev.front() == cplx(1.0));
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].real() <= ev[i - 1].real());
}

TEST_CASE("Bloch matrix preconditions") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto z = flat(64, 2 * kPi, 0.0, -1.0);
  CHECK_THROWS_AS(assemble_bloch(z, m, 0.0, 32), TruncationError);
  CHECK_NOTHROW(assemble_bloch(z, m, 0.0, 31));
  CHECK_THROWS_AS(assemble_bloch(z, m, 4.0, 4), DomainError);
  CHECK_NOTHROW(assemble_bloch(z, m, kPi, 4));
}

TEST_CASE("reflection symmetry of the Bloch matrix") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const int N = 12;
  for (double th : {0.4, 2.0}) {
    const auto p = assemble_bloch(w, m, th, N).entries;
    const auto q = assemble_bloch(w, m, -th, N).entries;
    double worst = 0.0;
    for (int i = 0; i <= 2 * N; ++i) {
      for (int j = 0; j <= 2 * N; ++j) {
        worst = std::max(worst, std::abs(p(i, j) - std::conj(q(2 * N - i, 2 * N - j))));
      }
    }
    CHECK(worst < 1e-12);
    const auto ep = eigen_bloch(assemble_bloch(w, m, th, N));
    auto eq = eigen_bloch(assemble_bloch(w, m, -th, N));
    for (auto& z : eq) z = std::conj(z);
    CHECK(oracle::multiset_distance(ep, eq) < 1e-8 * std::abs(ep.back()));
  }
}

TEST_CASE("eigensolver against characteristic polynomial roots") {
  std::mt19937 rng(42);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const auto z = SpectralField::zeros(PeriodicGrid(8, 1.0));
    BlochMatrix bm{0.0, 2, Eigen::MatrixXcd(5, 5), {z, z}, {}};
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) bm.entries(i, j) = cplx(nd(rng), nd(rng));
    }
    const auto ev = eigen_bloch(bm);
    const auto roots = oracle::poly_roots(oracle::charpoly(bm.entries));
    CHECK(oracle::multiset_distance(ev, roots) < 1e-8);
  }
}

TEST_CASE("eigenpairs") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto z = flat(64, 2 * kPi, 0.0, -1.0);
  const auto ep = eigenpair_bloch(assemble_bloch(z, m, 0.0, 10), 0);
  CHECK(std::abs(ep.lambda - 1.0) < 1e-14);
  CHECK(std::abs(ep.psi.coeff(0) - 1.0 / std::sqrt(2 * kPi)) < 1e-14);
  CHECK(sobolev_norm(ep.psi, 0) == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> le, ll;
  for (double eps : {0.005, 0.01, 0.02}) {
    const auto& w = unit_profile(64, eps);
    const auto e = eigenpair_bloch(assemble_bloch(w, m, 0.0, 24), 0);
    CHECK(e.residual < 1e-8);
    CHECK(e.lambda.real() > 0.0);
    le.push_back(std::log(eps));
    ll.push_back(std::log(std::abs(e.lambda - 1.0)));
    // Phase convention: the largest coefficient is real positive.
    std::size_t big = 0;
    for (std::size_t i = 0; i < e.psi.coeffs().size(); ++i) {
      if (std::abs(e.psi.coeffs()[i]) > std::abs(e.psi.coeffs()[big])) big = i;
    }
    CHECK(std::abs(e.psi.coeffs()[big].imag()) < 1e-14);
    CHECK(e.psi.coeffs()[big].real() > 0);
  }
  const double s = oracle::slope(le, ll);
  MESSAGE("|lambda - r| exponent " << s);
  CHECK(s >= 0.8);

  CHECK_THROWS_AS(eigenpair_bloch(assemble_bloch(z, m, 0.0, 4), 9), DomainError);
}

TEST_CASE("truncation convergence of the top eigenvalue") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(128, 0.04);
  const auto a = eigen_bloch(assemble_bloch(w, m, 0.0, 24)).front();
  const auto b = eigen_bloch(assemble_bloch(w, m, 0.0, 32)).front();
  CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("theta grid") {
  const auto t = theta_grid(65);
  CHECK(t.front() == -kPi);
  CHECK(t.back() == kPi);
  CHECK(t[32] == 0.0);
  for (int j = 0; j < 65; ++j) CHECK(t[j] == -t[64 - j]);
  CHECK_THROWS_AS(theta_grid(1), DomainError);
}

TEST_CASE("Floquet sweep of the flat state") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto z = flat(64, 2 * kPi, 0.0, -1.0);
  const int N = 16;
  const auto s = floquet_sweep(z, m, 33, N);
  CHECK(s.max_real == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.argmax_theta == 0.0);
  CHECK(s.unstable());
  for (std::size_t j = 0; j < s.thetas.size(); ++j) {
    std::vector<cplx> sym;
    for (int k = -N; k <= N; ++k) sym.push_back(symbol((2 * kPi * k + s.thetas[j]) / (2 * kPi), -1.0, 1.0));
    CHECK(oracle::multiset_distance(s.eigenvalues[j], sym) < 1e-10);
  }
}

TEST_CASE("Floquet sweep of a branch profile") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto& w = unit_profile(64, 0.02);
  const int N = 24;
  const auto s = floquet_sweep(w, m, 33, N);
  const auto serial = floquet_sweep_serial(w, m, 33, N);
  CHECK(s.failed.empty());
  CHECK(s.unstable());
  CHECK(std::abs(s.argmax_theta) < 0.2);
  CHECK(std::abs(s.max_real - 1.0) < 0.1);
  const auto top = eigenpair_bloch(assemble_bloch(w, m, 0.0, N), 0).lambda;
  CHECK(s.max_real == doctest::Approx(top.real()).epsilon(1e-10));
  CHECK(s.max_real == serial.max_real);
  for (std::size_t j = 0; j < s.thetas.size(); ++j) CHECK(s.eigenvalues[j] == serial.eigenvalues[j]);

  // Conjugate symmetry between theta and -theta.
  for (std::size_t j = 0; j < s.thetas.size(); ++j) {
    auto mirror = s.eigenvalues[s.thetas.size() - 1 - j];
    for (auto& z : mirror) z = std::conj(z);
    CHECK(oracle::multiset_distance(s.eigenvalues[j], mirror) < 1e-7);
  }

  const auto fine = floquet_sweep(w, m, 65, N);
  CHECK(std::abs(fine.max_real - s.max_real) < 1e-6);
}

TEST_CASE("resolvent bound probe") {
  const auto m = kdvbf_model(1.0, 1.0);
  const auto z = flat(64, 2 * kPi, 0.0, -1.0);
  CHECK(resolvent_constant(linearized_coefficients(z, m)) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<cplx> lam{3.0, 10.0, 20.0, 40.0};
  const int N = 16;
  const auto vals = resolvent_bound_probe(z, m, lam, N);
  CHECK(vals[0] <= 0.5 * (1 + 1e-6));
  for (std::size_t i = 0; i < lam.size(); ++i) {
    double diag = 0.0;
    for (int k = -N; k <= N; ++k) diag = std::max(diag, 1.0 / std::abs(lam[i] - symbol(k, -1.0, 1.0)));
    CHECK(vals[i] == doctest::Approx(diag).epsilon(1e-10));
    CHECK(vals[i] <= 1.0 / (lam[i].real() - 1.0) * (1 + 1e-6));
  }
  CHECK(vals[1] / vals[3] == doctest::Approx(40.0 / 10.0).epsilon(0.1));

  const auto& w = unit_profile(64, 0.02);
  const double c0 = resolvent_constant(linearized_coefficients(w, m));
  const std::vector<cplx> probe{c0 + 5.0};
  CHECK(resolvent_bound_probe(w, m, probe, 24)[0] <= 1.0 / 5.0 * (1 + 1e-6));
  const std::vector<cplx> bad{c0 + 0.5};
  CHECK_THROWS_AS(resolvent_bound_probe(w, m, bad, 24), DomainError);
}
