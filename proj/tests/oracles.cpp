#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (k, c_k) pairs of the split-Nyquist interpolant.
std::vector<std::pair<int, cplx>> modes(const kdvb::SpectralField& f) {
  const int n = f.n();
  std::vector<std::pair<int, cplx>> out;
  for (int k = -n / 2 + 1; k < n / 2; ++k) out.emplace_back(k, f.coeff(k));
  const cplx ny = f.coeff(-n / 2);
  if (ny != cplx{}) {
    out.emplace_back(-n / 2, 0.5 * ny);
    out.emplace_back(n / 2, 0.5 * ny);
  }
  return out;
}

}  // namespace

std::vector<cplx> dft(const std::vector<double>& samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<cplx> out(samples.size());
  for (int i = 0; i < n; ++i) {
    const int k = i < n / 2 ? i : i - n;
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += samples[j] * std::polar(1.0, -kTwoPi * k * j / n);
    out[i] = s / double(n);
  }
  return out;
}

std::vector<double> evaluate(const kdvb::SpectralField& f, const std::vector<double>& x) {
  const auto m = modes(f);
  std::vector<double> out;
  for (double xi : x) {
    cplx s = 0.0;
    for (const auto& [k, c] : m) s += c * std::polar(1.0, kTwoPi * k * xi / f.L());
    out.push_back(s.real());
  }
  return out;
}

std::vector<cplx> convolution(const kdvb::SpectralField& a, const kdvb::SpectralField& b) {
  const int n = a.n();
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (int k1 = -n / 2; k1 < n / 2; ++k1) {
    for (int k2 = -n / 2; k2 < n / 2; ++k2) {
      const int k = k1 + k2;
      if (k >= -n / 2 && k <= n / 2) out[a.grid().index(k)] += a.coeff(k1) * b.coeff(k2);
    }
  }
  return out;
}

std::vector<cplx> charpoly(const Eigen::MatrixXcd& A) {
  const auto n = A.rows();
  std::vector<cplx> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    M = A * M + c[k - 1] * I;
    c[k] = -(A * M).trace() / double(k);
  }
  return c;
}

std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  std::vector<cplx> p(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) p[i] = coeffs[i] / coeffs[0];
  double bound = 0.0;
  for (int i = 1; i <= deg; ++i) bound = std::max(bound, std::abs(p[i]));
  bound += 1.0;
  std::vector<cplx> z(static_cast<std::size_t>(deg));
  for (int i = 0; i < deg; ++i) z[i] = std::polar(bound, kTwoPi * (i + 0.25) / deg);
  auto eval = [&](cplx x, cplx& d) {
    cplx v = p[0];
    d = 0.0;
    for (int i = 1; i <= deg; ++i) {
      d = d * x + v;
      v = v * x + p[i];
    }
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    double move = 0.0;
    for (int i = 0; i < deg; ++i) {
      cplx d;
      const cplx v = eval(z[i], d);
      if (v == cplx{}) continue;
      const cplx ratio = v / d;
      cplx sum = 0.0;
      for (int j = 0; j < deg; ++j) {
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      }
      const cplx step = ratio / (1.0 - ratio * sum);
      z[i] -= step;
      move = std::max(move, std::abs(step) / std::max(1.0, std::abs(z[i])));
    }
    if (move < 1e-15) break;
  }
  return z;
}

double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& x : a) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(x - b[j]) < best) {
        best = std::abs(x - b[j]);
        arg = j;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

std::pair<double, double> brute_orbital_distance(const kdvb::SpectralField& u,
                                                 const kdvb::SpectralField& phi, double s,
                                                 int count) {
  const int n = u.n();
  const auto dist = [&](double a) {
    double sum = 0.0;
    for (int k = -n / 2; k < n / 2; ++k) {
      cplx shifted = phi.coeff(k) * std::polar(1.0, kTwoPi * k * a / u.L());
      if (k == -n / 2) shifted = phi.coeff(k) * std::cos(std::numbers::pi * n * a / u.L());
      sum += std::pow(1.0 + double(k) * k, s) * std::norm(u.coeff(k) - shifted);
    }
    return std::sqrt(u.L() * sum);
  };
  // Uniform scan of the period, then a second uniform scan of the two
  // neighbouring cells of the winner.
  double best = 1e300, arg = 0.0;
  const double h = u.L() / count;
  for (int j = 0; j < count; ++j) {
    const double d = dist(h * j);
    if (d < best) {
      best = d;
      arg = h * j;
    }
  }
  const double centre = arg;
  for (int j = 0; j <= count; ++j) {
    const double a = centre - h + 2.0 * h * j / count;
    const double d = dist(a);
    if (d < best) {
      best = d;
      arg = a;
    }
  }
  return {best, arg};
}

Eigen::VectorXcd expm_apply(const Eigen::MatrixXcd& A, double t, const Eigen::VectorXcd& v) {
  const Eigen::MatrixXcd tA = t * A;
  return tA.exp() * v;
}

double smoothed_norm(const kdvb::SpectralField& f, double s, double t) {
  const int n = f.n();
  const double k0 = kTwoPi / f.L();
  double sum = 0.0;
  for (int k = -n / 2; k < n / 2; ++k) {
    const double reQ = k0 * k0 * k * k;
    sum += std::pow(1.0 + double(k) * k, s) * std::exp(-2.0 * reQ * t) * std::norm(f.coeff(k));
  }
  return std::sqrt(f.L() * sum);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double profile_residual_quadrature(const kdvb::SpectralField& phi, double c,
                                   const std::function<double(double)>& df,
                                   const std::function<double(double)>& g, int points) {
  const auto m = modes(phi);
  const double L = phi.L();
  double sum = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = (j + 0.5) * L / points;
    cplx v0 = 0, v1 = 0, v2 = 0, v3 = 0;
    for (const auto& [k, ck] : m) {
      const cplx e = ck * std::polar(1.0, kTwoPi * k * x / L);
      const cplx ik(0.0, kTwoPi * k / L);
      v0 += e;
      v1 += ik * e;
      v2 += ik * ik * e;
      v3 += ik * ik * ik * e;
    }
    const double p = v0.real();
    const double r = -c * v1.real() + df(p) * v1.real() + v3.real() - v2.real() - g(p);
    sum += r * r;
  }
  return std::sqrt(sum * L / points);
}

}  // namespace oracle
