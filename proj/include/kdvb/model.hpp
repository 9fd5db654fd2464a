#pragma once

#include <functional>
#include <optional>
#include <string>

namespace kdvb {

using ScalarFn = std::function<double(double)>;

/// Nonlinearities of u_t + f(u)_x - u_xx + u_xxx = g(u).
struct ModelFunctions {
  std::string name;
  ScalarFn f, df, d2f;
  ScalarFn g, dg;

  /// Parameters of the KdV-Burgers-Fisher instance, when this is one.
  struct KdvbfParams {
    double r;
    double alpha;
  };
  std::optional<KdvbfParams> kdvbf;
};

/// f(u) = alpha u^2 / 2, g(u) = r u (1 - u).
ModelFunctions kdvbf_model(double r, double alpha);

/// f(u) = alpha u^2 / 2, g = 0.
ModelFunctions burgers_flux_model(double alpha);

/// f = 0, g(u) = r u.
ModelFunctions linear_source_model(double r);

/// f = g = 0: the pure viscous-dispersive flow.
ModelFunctions linear_flow_model();

/// Largest relative mismatch between each supplied derivative and a centered
/// finite difference of its antiderivative at 20 points of [-2, 2]
/// (f' vs f, f'' vs f', g' vs g).
double derivative_consistency(const ModelFunctions& model);

}  // namespace kdvb
