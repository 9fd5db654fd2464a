#include "kdvb/waves.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "kdvb/error.hpp"

namespace kdvb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Spectral differentiation matrix of order m on the unit-rate grid y in [0, 2 pi).
Eigen::MatrixXd diff_matrix(int n, int order) {
  const PeriodicGrid grid(n, kTwoPi);
  Eigen::MatrixXd D(n, n);
  std::vector<double> e(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = inverse_transform(differentiate(forward_transform(e, grid), order));
    for (int i = 0; i < n; ++i) D(i, j) = col[i];
  }
  return D;
}

struct NewtonSystem {
  double residual_norm;
  double phase;
  double closure;
};

}  // namespace

SpectralField profile_residual(const WaveProfile& w, const ModelFunctions& model) {
  const auto& phi = w.phi;
  const auto d1 = differentiate(phi, 1);
  const auto d2 = differentiate(phi, 2);
  const auto d3 = differentiate(phi, 3);
  // f'(phi) phi' - g(phi) on the padded grid
  auto p = to_padded_samples(phi);
  const auto px = to_padded_samples(d1);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = model.df(p[j]) * px[j] - model.g(p[j]);
  SpectralField res = from_padded_samples(p, phi.grid());
  res += d3;
  res -= d2;
  res -= w.c * d1;
  return res;
}

double amplitude_measure(const SpectralField& phi) { return 2.0 * std::abs(phi.coeff(1)); }

WaveProfile hopf_predictor(double r, double alpha, double eps, int n) {
  if (!(r > 0.0) || !(alpha > 0.0)) throw DomainError("hopf_predictor: r and alpha must be positive");
  if (!(eps >= 0.0 && eps <= 0.25)) throw DomainError("hopf_predictor: eps must lie in [0, 0.25]");
  const double L = kTwoPi / std::sqrt(r);
  const PeriodicGrid grid(n, L);
  WaveProfile w{eps > 0.0 ? SpectralField::single_mode(grid, 1, std::sqrt(eps))
                          : SpectralField::zeros(grid),
                -r, eps, 0.0, r, alpha};
  w.residual = sobolev_norm(profile_residual(w, kdvbf_model(r, alpha)), 0.0);
  return w;
}

WaveProfile refine_newton(const WaveProfile& guess, const ModelFunctions& model, Closure fix,
                          double target, const NewtonOptions& options) {
  if (!std::isfinite(guess.residual)) throw DomainError("refine_newton: guess residual not finite");
  const int n = guess.n();
  const Eigen::MatrixXd D1 = diff_matrix(n, 1);
  const Eigen::MatrixXd D2 = diff_matrix(n, 2);
  const Eigen::MatrixXd D3 = diff_matrix(n, 3);

  std::vector<double> y(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) y[j] = kTwoPi * j / n;

  std::vector<double> phi = inverse_transform(guess.phi);
  double c = guess.c;
  double L = guess.L();

  WaveProfile current = guess;
  const auto evaluate = [&]() {
    const PeriodicGrid grid(n, L);
    current.phi = forward_transform(phi, grid);
    current.c = c;
    const auto res = profile_residual(current, model);
    current.residual = sobolev_norm(res, 0.0);
    const cplx h1 = current.phi.coeff(1);
    const double closure = fix == Closure::speed ? c - target : 2.0 * h1.real() - target;
    return std::make_pair(res, NewtonSystem{current.residual, h1.imag(), closure});
  };

  double last = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    auto [res, sys] = evaluate();
    last = std::max({sys.residual_norm, std::abs(sys.phase), std::abs(sys.closure)});
    if (!std::isfinite(last)) break;
    // Under the speed closure a converged constant state has a free period,
    // so its Jacobian is singular without marking a bifurcation.
    if (last < options.tol && fix == Closure::speed) return current;

    const double kappa = kTwoPi / L;
    const Eigen::Map<const Eigen::VectorXd> u(phi.data(), n);
    const Eigen::VectorXd u1 = D1 * u, u2 = D2 * u, u3 = D3 * u;
    Eigen::VectorXd fp(n), fpp(n), gp(n);
    for (int j = 0; j < n; ++j) {
      fp[j] = model.df(phi[j]);
      fpp[j] = model.d2f(phi[j]);
      gp[j] = model.dg(phi[j]);
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 2, n + 2);
    J.topLeftCorner(n, n) = (fp.array() - c).matrix().asDiagonal() * D1 * kappa +
                            std::pow(kappa, 3) * D3 - kappa * kappa * D2;
    J.topLeftCorner(n, n).diagonal() +=
        (fpp.array() * u1.array() * kappa - gp.array()).matrix();
    J.block(0, n, n, 1) = -kappa * u1;
    // dR/dL = dR/dkappa * dkappa/dL with dkappa/dL = -kappa / L
    const Eigen::VectorXd dkappa = ((fp.array() - c) * u1.array()).matrix() +
                                   3.0 * kappa * kappa * u3 - 2.0 * kappa * u2;
    J.block(0, n + 1, n, 1) = dkappa * (-kappa / L);
    for (int j = 0; j < n; ++j) {
      J(n, j) = -std::sin(y[j]) / n;  // Im phi_hat(1)
      if (fix == Closure::amplitude) J(n + 1, j) = 2.0 * std::cos(y[j]) / n;
    }
    if (fix == Closure::speed) J(n + 1, n) = 1.0;

    Eigen::VectorXd F(n + 2);
    const auto rs = inverse_transform(res);
    for (int j = 0; j < n; ++j) F[j] = rs[j];
    F[n] = sys.phase;
    F[n + 1] = sys.closure;

    // A converged point with a singular Jacobian is still a bifurcation point.
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
      throw BifurcationPointError("refine_newton: singular Jacobian (rcond " +
                                  std::to_string(rcond) + ")");
    }
    if (last < options.tol) return current;
    if (iter == options.max_iter) break;
    const Eigen::VectorXd dx = lu.solve(-F);
    for (int j = 0; j < n; ++j) phi[j] += dx[j];
    c += dx[n];
    L += dx[n + 1];
    if (!(L > 0.0)) break;
  }
  throw NoConvergenceError(last, "refine_newton: no convergence (last residual " +
                                     std::to_string(last) + ")");
}

WaveBranch continue_branch(double r, double alpha, std::span<const double> eps_list, int n) {
  WaveBranch branch;
  if (eps_list.empty()) return branch;
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > eps_list[i - 1])) throw DomainError("continue_branch: eps_list must increase");
  }
  if (!(eps_list[0] > 0.0 && eps_list[0] <= 0.01)) {
    throw DomainError("continue_branch: first eps must lie in (0, 0.01]");
  }
  const auto model = kdvbf_model(r, alpha);
  WaveProfile seed = hopf_predictor(r, alpha, eps_list[0], n);
  for (double eps : eps_list) {
    try {
      WaveProfile w = refine_newton(seed, model, Closure::amplitude, std::sqrt(eps));
      w.eps = eps;
      w.r = r;
      w.alpha = alpha;
      branch.profiles.push_back(w);
      seed = w;
    } catch (const Error& e) {
      branch.truncated = true;
      branch.message = "eps=" + std::to_string(eps) + ": " + e.what();
      break;
    }
  }
  return branch;
}

}  // namespace kdvb
