#include "kdvb/model.hpp"

#include <algorithm>
#include <cmath>

namespace kdvb {

ModelFunctions kdvbf_model(double r, double alpha) {
  ModelFunctions m;
  m.name = "kdvbf";
  m.f = [alpha](double u) { return 0.5 * alpha * u * u; };
  m.df = [alpha](double u) { return alpha * u; };
  m.d2f = [alpha](double) { return alpha; };
  m.g = [r](double u) { return r * u * (1.0 - u); };
  m.dg = [r](double u) { return r * (1.0 - 2.0 * u); };
  m.kdvbf = ModelFunctions::KdvbfParams{r, alpha};
  return m;
}

ModelFunctions burgers_flux_model(double alpha) {
  ModelFunctions m;
  m.name = "burgers_flux";
  m.f = [alpha](double u) { return 0.5 * alpha * u * u; };
  m.df = [alpha](double u) { return alpha * u; };
  m.d2f = [alpha](double) { return alpha; };
  m.g = [](double) { return 0.0; };
  m.dg = [](double) { return 0.0; };
  return m;
}

ModelFunctions linear_source_model(double r) {
  ModelFunctions m;
  m.name = "linear_source";
  m.f = [](double) { return 0.0; };
  m.df = [](double) { return 0.0; };
  m.d2f = [](double) { return 0.0; };
  m.g = [r](double u) { return r * u; };
  m.dg = [r](double) { return r; };
  return m;
}

ModelFunctions linear_flow_model() {
  ModelFunctions m;
  m.name = "linear_flow";
  const auto zero = [](double) { return 0.0; };
  m.f = m.df = m.d2f = m.g = m.dg = zero;
  return m;
}

double derivative_consistency(const ModelFunctions& model) {
  constexpr double h = 1e-5;
  double worst = 0.0;
  const auto check = [&](const ScalarFn& F, const ScalarFn& dF) {
    for (int i = 0; i < 20; ++i) {
      const double u = -2.0 + 4.0 * (i + 0.5) / 20.0;
      const double fd = (F(u + h) - F(u - h)) / (2.0 * h);
      const double exact = dF(u);
      const double err = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
      worst = std::max(worst, err);
    }
  };
  check(model.f, model.df);
  check(model.df, model.d2f);
  check(model.g, model.dg);
  return worst;
}

}  // namespace kdvb
