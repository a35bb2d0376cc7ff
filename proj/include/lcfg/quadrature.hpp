#pragma once

#include <functional>

namespace lcfg {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated |K15 - G7| over accepted panels
  int evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 48;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature by recursive bisection.
/// Throws QuadratureError carrying the partial estimate if a panel cannot be resolved.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

}  // namespace lcfg
