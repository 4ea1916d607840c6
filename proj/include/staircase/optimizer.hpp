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

#ifndef STAIRCASE_OPTIMIZER_HPP_
#define STAIRCASE_OPTIMIZER_HPP_

#include <functional>
#include <string>
#include <vector>

#include "staircase/costs.hpp"

namespace staircase {

struct OptimizationResult {
  enum class Method {
    kClosedForm,
    kPolynomialRoot,
    kGoldenSection,
    kEnumeration,
    kHeuristic
  };

  double parameter;   // gamma* in [0,1], or r* in [1, delta] for discrete
  ExpectedCost cost;  // achieved cost at the optimum
  Method method;
  double residual;    // stationarity residual, or final bracket width
  bool flat = false;  // objective was flat to working precision

  static std::string method_name(Method method);
};

// Scalar minimization by golden section with a final parabolic polish;
// assumes a unimodal objective on [lo, hi].
struct MinimizeResult {
  double x;
  double fx;
  double bracket;
};
MinimizeResult golden_section_minimize(
    const std::function<double(double)>& f, double lo, double hi,
    double tol = 1e-10, bool polish = true);

// Optimal gamma for L(x) = |x|: gamma* = 1/(1 + e^{epsilon/2}),
// V = delta e^{epsilon/2} / (e^epsilon - 1).
OptimizationResult gamma_opt_abs(const PrivacyParams& params);

// Optimal gamma for L(x) = x^2, in the cancellation-free form
// gamma* = ((b(1+b)/2)^{1/3} - b) / (1-b);
// V = delta^2 (2^{-2/3} b^{2/3} (1+b)^{2/3} + b) / (1-b)^2.
OptimizationResult gamma_opt_square(const PrivacyParams& params);

// Optimal gamma for L(x) = |x|^m via the degree-(m+1) stationarity
// polynomial, bracketed bisection on [0,1]; among candidate roots the one
// with the smallest cost is kept. Falls back to golden section when no
// sign change is found.
OptimizationResult gamma_opt_moment(const PrivacyParams& params, int m);

// Golden-section minimization of the quadrature cost for an arbitrary
// Property-1/2 loss. Sets `flat` when the objective does not vary.
OptimizationResult gamma_opt_generic(const PrivacyParams& params,
                                     const CostFunction& cost);

// The epsilon-only heuristic gamma = e^{-epsilon}/2, with cost evaluated
// for the requested loss.
OptimizationResult gamma_heuristic(const PrivacyParams& params,
                                   const CostFunction& cost);

// Pr[|X| <= gamma delta] under the heuristic gamma: (b - b^2)/(3b - b^2).
double heuristic_small_noise_probability(const PrivacyParams& params);

// Optimal step break r* for the discrete staircase by enumeration over
// r in [1, delta]; ties resolve to the smallest r.
OptimizationResult discrete_r_opt(const PrivacyParams& params, int delta,
                                  const CostFunction& cost);

// One row of the Laplace-vs-optimal-staircase comparison.
struct ComparisonRow {
  double epsilon;
  double v_lap;
  double v_opt;
  double gain;  // v_lap / v_opt, >= 1
  double gap;   // v_lap - v_opt
};

std::vector<ComparisonRow> compare_mechanisms(
    double delta, const CostFunction& cost,
    const std::vector<double>& eps_grid);

}  // namespace staircase

#endif  // STAIRCASE_OPTIMIZER_HPP_
