#include "kdvb/semigroup.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "kdvb/error.hpp"

namespace kdvb {

cplx symbol_q(int k, double L) {
  if (!(L > 0.0)) throw DomainError("symbol_q: L must be positive");
  const double k0 = 2.0 * std::numbers::pi / L;
  const double kk = k0 * k;
  return {kk * kk, -kk * kk * kk};
}

SpectralField apply_semigroup(const SpectralField& field, double t) {
  if (!(t >= 0.0)) throw DomainError("apply_semigroup: t must be non-negative");
  const auto& grid = field.grid();
  const int n = grid.n();
  CoeffVector c(field.coeffs());
  // Non-negative k first, negative k as exact conjugates.
  for (int k = 0; k <= n / 2; ++k) {
    const int kk = (k == n / 2) ? -n / 2 : k;
    const cplx m = std::exp(-symbol_q(kk, grid.L()) * t);
    if (k == n / 2) {
      c[grid.index(kk)] *= field.is_real() ? cplx(m.real(), 0.0) : m;
      continue;
    }
    c[grid.index(k)] *= m;
    if (k > 0) c[grid.index(-k)] *= field.is_real() ? std::conj(m) : std::exp(-symbol_q(-k, grid.L()) * t);
  }
  return SpectralField(grid, std::move(c), field.is_real());
}

double smoothing_exponent_probe(const SpectralField& field, double r, double delta,
                                std::span<const double> t_list) {
  if (t_list.empty()) throw DomainError("smoothing_exponent_probe: empty t_list");
  if (!(delta > 0.0)) throw DomainError("smoothing_exponent_probe: delta must be positive");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0 && t_list[i] < 1.0)) {
      throw DomainError("smoothing_exponent_probe: t outside (0,1)");
    }
    if (i > 0 && !(t_list[i] < t_list[i - 1])) {
      throw DomainError("smoothing_exponent_probe: t_list must be strictly decreasing");
    }
  }
  const double base = sobolev_norm(field, r);
  if (base == 0.0) throw DomainError("smoothing_exponent_probe: zero field");
  if (t_list.size() == 1) return 0.0;

  std::vector<double> xs, ys;
  for (double t : t_list) {
    xs.push_back(std::log(1.0 / t));
    ys.push_back(std::log(sobolev_norm(apply_semigroup(field, t), r + delta) / base));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace kdvb
