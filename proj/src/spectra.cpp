#include "kdvb/spectra.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "kdvb/error.hpp"
#include "kdvb/parallel.hpp"

namespace kdvb {

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficient of a real field with the Nyquist entry split evenly over +-n/2.
cplx split_coeff(const SpectralField& f, int k) {
  const int half = f.n() / 2;
  if (k == -half || k == half) return 0.5 * f.coeffs()[static_cast<std::size_t>(half)];
  return f.coeff(k);
}

std::vector<std::size_t> descending_real_order(const Eigen::VectorXcd& vals) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(vals.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (vals[a].real() != vals[b].real()) return vals[a].real() > vals[b].real();
    return vals[a].imag() < vals[b].imag();
  });
  return idx;
}

int next_pow2_at_least(int m) {
  int n = 8;
  while (n < m) n *= 2;
  return n;
}

std::string describe(const WaveProfile& w) {
  std::ostringstream os;
  os.precision(6);
  os << "eps=" << w.eps << ",c=" << w.c << ",L=" << w.L() << ",n=" << w.n();
  return os.str();
}

// Multiplies coefficients by (i (2 pi k + theta) / L)^order.
SpectralField bloch_derivative(const SpectralField& f, double theta, int order) {
  const auto& grid = f.grid();
  CoeffVector c(f.coeffs());
  for (int i = 0; i < grid.n(); ++i) {
    const cplx d(0.0, (2.0 * kPi * grid.wavenumber(i) + theta) / grid.L());
    cplx m = 1.0;
    for (int p = 0; p < order; ++p) m *= d;
    c[i] *= m;
  }
  return SpectralField(grid, std::move(c), false);
}

void sweep_one(const LinearizedCoefficients& coeffs, const std::vector<double>& thetas,
               std::size_t j, int N, BlochSpectrum& out, std::vector<char>& failed) {
  try {
    out.eigenvalues[j] = eigen_bloch(assemble_bloch(coeffs, thetas[j], N));
  } catch (const Error&) {
    failed[j] = 1;
  }
}

void finish_sweep(BlochSpectrum& s, const std::vector<char>& failed) {
  for (std::size_t j = 0; j < s.thetas.size(); ++j) {
    if (failed[j]) {
      s.failed.push_back(j);
      continue;
    }
    for (const auto& lam : s.eigenvalues[j]) {
      if (lam.real() > s.max_real) {
        s.max_real = lam.real();
        s.argmax_theta = s.thetas[j];
      }
    }
  }
}

}  // namespace

LinearizedCoefficients linearized_coefficients(const WaveProfile& w, const ModelFunctions& model) {
  const auto& phi = w.phi;
  auto p = to_padded_samples(phi);
  const auto px = to_padded_samples(differentiate(phi, 1));
  std::vector<double> a1(p.size()), a0(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    a1[j] = w.c - model.df(p[j]);
    a0[j] = model.dg(p[j]) - model.d2f(p[j]) * px[j];
  }
  return {from_padded_samples(a1, phi.grid()), from_padded_samples(a0, phi.grid())};
}

BlochMatrix assemble_bloch(const LinearizedCoefficients& coeffs, double theta, int N) {
  if (!(theta > -kPi - 1e-12 && theta <= kPi + 1e-12)) {
    throw DomainError("assemble_bloch: theta must lie in (-pi, pi]");
  }
  if (N < 0) throw DomainError("assemble_bloch: N must be non-negative");
  const int n = coeffs.a1.n();
  if (2 * N + 1 > n) {
    throw TruncationError("assemble_bloch: 2N+1 = " + std::to_string(2 * N + 1) +
                          " modes exceed the " + std::to_string(n) +
                          "-point profile grid; refine the profile on a larger grid");
  }
  const double L = coeffs.L();
  const int M = 2 * N + 1;
  BlochMatrix m{theta, N, Eigen::MatrixXcd(M, M), coeffs, {}};
  for (int col = 0; col < M; ++col) {
    const int km = col - N;
    const cplx d(0.0, (2.0 * kPi * km + theta) / L);
    for (int row = 0; row < M; ++row) {
      const int k = row - N;
      m.entries(row, col) = split_coeff(coeffs.a1, k - km) * d + split_coeff(coeffs.a0, k - km);
    }
    m.entries(col, col) += -d * d * d + d * d;
  }
  return m;
}

BlochMatrix assemble_bloch(const WaveProfile& w, const ModelFunctions& model, double theta, int N) {
  auto m = assemble_bloch(linearized_coefficients(w, model), theta, N);
  m.profile_id = describe(w);
  return m;
}

std::vector<cplx> eigen_bloch(const BlochMatrix& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.entries, false);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigen_bloch: eigensolver did not converge (theta=" << m.theta << ", N=" << m.N
       << ", ||A||_F=" << m.entries.norm() << ")";
    throw NumericalError(os.str());
  }
  const auto& vals = es.eigenvalues();
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(vals.size()));
  for (std::size_t i : descending_real_order(vals)) out.push_back(vals[static_cast<Eigen::Index>(i)]);
  return out;
}

double bloch_residual(const LinearizedCoefficients& coeffs, double theta, cplx lambda,
                      const SpectralField& psi) {
  const int n = std::max(psi.n(), coeffs.a1.n());
  const auto p = resample(psi, n);
  const auto a1 = resample(coeffs.a1, n);
  const auto a0 = resample(coeffs.a0, n);
  auto res = bloch_derivative(p, theta, 2) - bloch_derivative(p, theta, 3);
  res += multiply_dealiased(a1, bloch_derivative(p, theta, 1));
  res += multiply_dealiased(a0, p);
  CoeffVector c(res.coeffs());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= lambda * p.coeffs()[i];
  const SpectralField r(p.grid(), std::move(c), false);
  return sobolev_norm(r, 0.0) / sobolev_norm(p, 0.0);
}

BlochEigenpair eigenpair_bloch(const BlochMatrix& m, std::size_t which) {
  const auto M = static_cast<std::size_t>(m.entries.rows());
  if (which >= M) throw DomainError("eigenpair_bloch: index out of range");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.entries, true);
  if (es.info() != Eigen::Success) throw NumericalError("eigenpair_bloch: eigensolver failed");
  const auto order = descending_real_order(es.eigenvalues());
  const auto col = static_cast<Eigen::Index>(order[which]);
  const cplx lambda = es.eigenvalues()[col];
  Eigen::VectorXcd v = es.eigenvectors().col(col);

  const PeriodicGrid grid(next_pow2_at_least(2 * m.N + 2), m.L());
  Eigen::Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  const cplx phase = std::conj(v[big]) / std::abs(v[big]);
  CoeffVector c(static_cast<std::size_t>(grid.n()));
  for (int i = 0; i < static_cast<int>(M); ++i) c[grid.index(m.mode(i))] = v[i] * phase;
  SpectralField psi(grid, std::move(c), false);
  psi *= 1.0 / sobolev_norm(psi, 0.0);

  const double residual = bloch_residual(m.coeffs, m.theta, lambda, psi);
  if (!(residual < 1e-8)) {
    throw InconsistentEigenpairError(
        residual, "eigenpair_bloch: residual " + std::to_string(residual) +
                      " above 1e-8; increase the truncation N");
  }
  return {lambda, std::move(psi), residual};
}

std::vector<double> theta_grid(int n_theta) {
  if (n_theta < 2) throw DomainError("theta_grid: n_theta must be >= 2");
  std::vector<double> t(static_cast<std::size_t>(n_theta));
  for (int j = 0; j < n_theta; ++j) {
    const int mirror = n_theta - 1 - j;
    t[j] = j < mirror ? -kPi + 2.0 * kPi * j / (n_theta - 1) : (j == mirror ? 0.0 : -t[mirror]);
  }
  return t;
}

BlochSpectrum floquet_sweep(const WaveProfile& w, const ModelFunctions& model, int n_theta, int N) {
  const auto coeffs = linearized_coefficients(w, model);
  BlochSpectrum s;
  s.thetas = theta_grid(n_theta);
  s.N = N;
  s.eigenvalues.resize(s.thetas.size());
  std::vector<char> failed(s.thetas.size(), 0);
  const int count = static_cast<int>(s.thetas.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int j = 0; j < count; ++j) {
    sweep_one(coeffs, s.thetas, static_cast<std::size_t>(j), N, s, failed);
  }
  finish_sweep(s, failed);
  return s;
}

BlochSpectrum floquet_sweep_serial(const WaveProfile& w, const ModelFunctions& model, int n_theta,
                                   int N) {
  const auto coeffs = linearized_coefficients(w, model);
  BlochSpectrum s;
  s.thetas = theta_grid(n_theta);
  s.N = N;
  s.eigenvalues.resize(s.thetas.size());
  std::vector<char> failed(s.thetas.size(), 0);
  for (std::size_t j = 0; j < s.thetas.size(); ++j) sweep_one(coeffs, s.thetas, j, N, s, failed);
  finish_sweep(s, failed);
  return s;
}

double resolvent_constant(const LinearizedCoefficients& coeffs) {
  const int fine = 8 * coeffs.a1.n();
  const auto a0 = resample(coeffs.a0, fine);
  const auto da1 = resample(differentiate(coeffs.a1, 1), fine);
  const auto q = inverse_transform(a0 - 0.5 * da1);
  double sup = 0.0;
  for (double v : q) sup = std::max(sup, std::abs(v));
  return sup;
}

std::vector<double> resolvent_bound_probe(const WaveProfile& w, const ModelFunctions& model,
                                          std::span<const cplx> lambdas, int N) {
  const auto coeffs = linearized_coefficients(w, model);
  const double c0 = resolvent_constant(coeffs);
  for (const auto& lam : lambdas) {
    if (!(lam.real() > c0 + 1.0)) {
      throw DomainError("resolvent_bound_probe: Re lambda must exceed C0 + 1 = " +
                        std::to_string(c0 + 1.0));
    }
  }
  const auto m = assemble_bloch(coeffs, 0.0, N);
  const auto M = m.entries.rows();
  std::vector<double> out;
  for (const auto& lam : lambdas) {
    const Eigen::MatrixXcd shifted = lam * Eigen::MatrixXcd::Identity(M, M) - m.entries;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    out.push_back(1.0 / svd.singularValues().minCoeff());
  }
  return out;
}

}  // namespace kdvb
