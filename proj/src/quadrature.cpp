#include "lcfg/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lcfg/error.hpp"

namespace lcfg {

namespace {

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double gauss;
};

Panel gk15(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const double pair = f(center - dx) + f(center + dx);
    k += kWgk[static_cast<std::size_t>(j)] * pair;
    if (j % 2 == 1) g += kWg[static_cast<std::size_t>(j / 2)] * pair;
  }
  evals += 15;
  return {k * half, g * half};
}

struct Recursion {
  const std::function<double(double)>& f;
  const QuadratureOptions& opt;
  QuadratureResult result;
  bool failed = false;

  void run(double a, double b, Panel whole, double abs_tol, int depth) {
    const double err = std::abs(whole.kronrod - whole.gauss);
    if (err <= std::max(abs_tol, opt.rel_tol * std::abs(whole.kronrod)) || err == 0.0) {
      result.value += whole.kronrod;
      result.error += err;
      return;
    }
    if (depth >= opt.max_depth || !std::isfinite(whole.kronrod)) {
      failed = true;
      result.value += whole.kronrod;
      result.error += err;
      return;
    }
    const double mid = 0.5 * (a + b);
    const Panel left = gk15(f, a, mid, result.evaluations);
    const Panel right = gk15(f, mid, b, result.evaluations);
    run(a, mid, left, 0.5 * abs_tol, depth + 1);
    run(mid, b, right, 0.5 * abs_tol, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate_adaptive: bounds must be finite");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_adaptive(f, b, a, options);
    r.value = -r.value;
    return r;
  }
  Recursion rec{f, options, {}};
  const Panel whole = gk15(f, a, b, rec.result.evaluations);
  rec.run(a, b, whole, options.abs_tol, 0);
  if (rec.failed || !std::isfinite(rec.result.value))
    throw QuadratureError("adaptive quadrature did not converge", rec.result.value, rec.result.error);
  return rec.result;
}

}  // namespace lcfg
