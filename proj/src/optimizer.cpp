// Copyright 2026 the staircase-dp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "staircase/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace staircase {

std::string OptimizationResult::method_name(Method method) {
  switch (method) {
    case Method::kClosedForm:
      return "closed-form";
    case Method::kPolynomialRoot:
      return "polynomial-root";
    case Method::kGoldenSection:
      return "golden-section";
    case Method::kEnumeration:
      return "enumeration";
    case Method::kHeuristic:
      return "heuristic";
  }
  return "unknown";
}

MinimizeResult golden_section_minimize(const std::function<double(double)>& f,
                                       double lo, double hi, double tol,
                                       bool polish) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 300 && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  double x = (a + b) / 2;
  double fx = f(x);
  if (polish) {
    // The argmin of a smooth objective can be localized by comparisons only
    // to ~sqrt(machine eps); one parabolic fit over a wider stencil
    // recovers the remaining digits.
    const double h = 1e-5 * std::max(1.0, hi - lo);
    const double xl = std::max(lo, x - h);
    const double xr = std::min(hi, x + h);
    const double fl = f(xl), fr = f(xr);
    const double denom = (fr - 2 * fx + fl);
    if (denom > 0) {
      const double step = (xr - xl) / 2;
      double vertex = x - step * (fr - fl) / (2 * denom);
      vertex = std::clamp(vertex, lo, hi);
      const double fv = f(vertex);
      if (fv <= fx) {
        x = vertex;
        fx = fv;
      }
    }
  }
  return {x, fx, b - a};
}

OptimizationResult gamma_opt_abs(const PrivacyParams& params) {
  const double gamma = 1.0 / (1.0 + std::exp(params.epsilon / 2));
  const double value =
      params.delta * std::exp(params.epsilon / 2) / std::expm1(params.epsilon);
  const double b = params.b;
  const double omb = params.one_minus_b();
  // Numerator of g'(gamma).
  const double residual = omb * gamma * gamma + 2 * b * gamma - b;
  OptimizationResult result;
  result.parameter = gamma;
  result.cost = {value, ExpectedCost::Method::kClosedForm, 0.0};
  result.method = OptimizationResult::Method::kClosedForm;
  result.residual = std::fabs(residual);
  return result;
}

OptimizationResult gamma_opt_square(const PrivacyParams& params) {
  const double b = params.b;
  const double omb = params.one_minus_b();
  // Algebraically equal to -b/(1-b) + (b - 2b^2 + 2b^4 - b^5)^{1/3} /
  // (2^{1/3} (1-b)^2) via b - 2b^2 + 2b^4 - b^5 = b(1+b)(1-b)^3, but free
  // of the cancellation that form suffers as b -> 1.
  const double gamma = (std::cbrt(b * (1 + b) / 2) - b) / omb;
  const double value = params.delta * params.delta *
                       (std::cbrt(b * b * (1 + b) * (1 + b) / 4) + b) /
                       (omb * omb);
  const double residual = (2.0 / 3.0) * omb * omb * gamma * gamma * gamma +
                          2 * b * omb * gamma * gamma + 2 * b * b * gamma -
                          (2 * b * b + b) / 3.0;
  OptimizationResult result;
  result.parameter = gamma;
  result.cost = {value, ExpectedCost::Method::kClosedForm, 0.0};
  result.method = OptimizationResult::Method::kClosedForm;
  result.residual = std::fabs(residual);
  return result;
}

namespace {

// Coefficients (ascending) of the stationarity polynomial for |x|^m.
std::vector<double> stationarity_polynomial(const PrivacyParams& params,
                                            int m) {
  const int n = m + 1;
  const double b = params.b;
  const double omb = params.one_minus_b();
  const MomentSeries series = moment_series(b, n);
  std::vector<double> coeff(n + 1, 0.0);
  coeff[n] = series.c[0] * (n - 1) * omb * omb;
  for (int i = 1; i <= n - 1; ++i) {
    coeff[i] =
        static_cast<double>(binomial_coefficient(n, i)) * series.c[n - i] *
            (i - 1) * omb * omb +
        static_cast<double>(binomial_coefficient(n, i + 1)) *
            series.c[n - i - 1] * (i + 1) * omb * b;
  }
  double constant = 0;
  for (int i = 2; i <= n; ++i) {
    constant += static_cast<double>(binomial_coefficient(n, i)) *
                series.c[n - i] * b * omb;
  }
  coeff[0] = -constant;
  return coeff;
}

double eval_polynomial(const std::vector<double>& coeff, double x) {
  double acc = 0;
  for (size_t i = coeff.size(); i-- > 0;) acc = acc * x + coeff[i];
  return acc;
}

}  // namespace

OptimizationResult gamma_opt_moment(const PrivacyParams& params, int m) {
  if (m < 1) throw std::invalid_argument("moment order must be >= 1");
  const std::vector<double> coeff = stationarity_polynomial(params, m);
  const auto poly = [&coeff](double x) { return eval_polynomial(coeff, x); };
  const auto cost_at = [&](double g) {
    return staircase_cost_moment(params, g, m).value;
  };

  // Bracket scan in 256 subintervals; rounding at extreme epsilon can
  // produce spurious sign patterns, so every root is kept and the one with
  // the smallest cost wins.
  constexpr int kScan = 256;
  std::vector<double> roots;
  double prev_x = 0.0, prev_f = poly(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double x = static_cast<double>(i) / kScan;
    const double fx = poly(x);
    if (prev_f == 0) roots.push_back(prev_x);
    if ((prev_f < 0 && fx > 0) || (prev_f > 0 && fx < 0)) {
      double lo = prev_x, hi = x, flo = prev_f;
      while (hi - lo > 1e-12) {
        const double mid = (lo + hi) / 2;
        const double fm = poly(mid);
        if ((flo < 0) == (fm < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back((lo + hi) / 2);
    }
    prev_x = x;
    prev_f = fx;
  }

  OptimizationResult result;
  if (roots.empty()) {
    const MinimizeResult min = golden_section_minimize(cost_at, 0.0, 1.0);
    result.parameter = min.x;
    result.cost = staircase_cost_moment(params, min.x, m);
    result.method = OptimizationResult::Method::kGoldenSection;
    result.residual = min.bracket;
    return result;
  }
  double best_root = roots.front();
  double best_cost = cost_at(best_root);
  for (double root : roots) {
    const double c = cost_at(root);
    if (c < best_cost) {
      best_cost = c;
      best_root = root;
    }
  }
  result.parameter = best_root;
  result.cost = staircase_cost_moment(params, best_root, m);
  result.method = OptimizationResult::Method::kPolynomialRoot;
  result.residual = std::fabs(poly(best_root));
  return result;
}

OptimizationResult gamma_opt_generic(const PrivacyParams& params,
                                     const CostFunction& cost) {
  const auto objective = [&](double g) {
    return staircase_cost_quadrature(params, g, cost).value;
  };
  // Flat objectives (e.g. a constant loss) have no preferred gamma.
  double probe_min = objective(0.0), probe_max = probe_min;
  for (double g : {0.25, 0.5, 0.75, 1.0}) {
    const double v = objective(g);
    probe_min = std::min(probe_min, v);
    probe_max = std::max(probe_max, v);
  }
  OptimizationResult result;
  if (probe_max - probe_min <= 1e-12 * std::max(1.0, probe_max)) {
    result.parameter = 0.5;
    result.cost = staircase_cost_quadrature(params, 0.5, cost);
    result.method = OptimizationResult::Method::kGoldenSection;
    result.residual = 0.0;
    result.flat = true;
    return result;
  }
  const MinimizeResult min = golden_section_minimize(objective, 0.0, 1.0, 1e-8);
  result.parameter = min.x;
  result.cost = staircase_cost_quadrature(params, min.x, cost);
  result.method = OptimizationResult::Method::kGoldenSection;
  result.residual = min.bracket;
  return result;
}

OptimizationResult gamma_heuristic(const PrivacyParams& params,
                                   const CostFunction& cost) {
  const double gamma = params.b / 2;
  OptimizationResult result;
  result.parameter = gamma;
  result.cost = staircase_cost(params, gamma, cost);
  result.method = OptimizationResult::Method::kHeuristic;
  result.residual = 0.0;
  return result;
}

double heuristic_small_noise_probability(const PrivacyParams& params) {
  const double b = params.b;
  return (b - b * b) / (3 * b - b * b);
}

OptimizationResult discrete_r_opt(const PrivacyParams& params, int delta,
                                  const CostFunction& cost) {
  const DiscreteWeights weights = discrete_weights(params, delta, cost);
  int best_r = 1;
  double best_cost = discrete_expected_cost(
      StaircaseDiscrete(params, delta, 1), weights);
  for (int r = 2; r <= delta; ++r) {
    const double c = discrete_expected_cost(
        StaircaseDiscrete(params, delta, r), weights);
    if (c < best_cost) {
      best_cost = c;
      best_r = r;
    }
  }
  OptimizationResult result;
  result.parameter = best_r;
  result.cost = {best_cost, ExpectedCost::Method::kSeries,
                 weights.error_bound};
  result.method = OptimizationResult::Method::kEnumeration;
  result.residual = 0.0;
  return result;
}

std::vector<ComparisonRow> compare_mechanisms(
    double delta, const CostFunction& cost,
    const std::vector<double>& eps_grid) {
  std::vector<ComparisonRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const PrivacyParams params(eps, delta);
    const double v_lap = laplace_cost(params, cost).value;
    double v_opt;
    switch (cost.kind()) {
      case CostFunction::Kind::kAbs:
        v_opt = gamma_opt_abs(params).cost.value;
        break;
      case CostFunction::Kind::kSquare:
        v_opt = gamma_opt_square(params).cost.value;
        break;
      case CostFunction::Kind::kMoment:
        v_opt = gamma_opt_moment(params, cost.moment_order()).cost.value;
        break;
      case CostFunction::Kind::kTabulated:
        v_opt = gamma_opt_generic(params, cost).cost.value;
        break;
      default:
        throw std::logic_error("unreachable cost kind");
    }
    rows.push_back({eps, v_lap, v_opt, v_lap / v_opt, v_lap - v_opt});
  }
  return rows;
}

}  // namespace staircase
