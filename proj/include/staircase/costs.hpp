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

#ifndef STAIRCASE_COSTS_HPP_
#define STAIRCASE_COSTS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "staircase/mechanisms.hpp"

namespace staircase {

// Samples of a symmetric increasing loss on x >= 0, with the declared
// growth-ratio bound: sup_{x >= threshold} L(x+1)/L(x) <= growth_bound.
struct TabulatedCost {
  std::vector<double> x;      // strictly increasing, x[0] >= 0
  std::vector<double> value;  // non-negative, non-decreasing
  double threshold;           // T of the growth bound
  double growth_bound;        // B of the growth bound
};

// Symmetric, non-decreasing-on-x>=0 loss L(x). Built-ins |x|, x^2 and
// |x|^m; arbitrary losses come in as monotone tabulated samples with a
// declared growth bound. Evaluation mirrors to |x|; tabulated losses
// interpolate linearly between samples and refuse evaluation beyond the
// last sample (the growth bound is for tail bounding only).
class CostFunction {
 public:
  enum class Kind { kAbs, kSquare, kMoment, kTabulated };

  static CostFunction abs();
  static CostFunction square();
  static CostFunction moment(int m);
  static CostFunction tabulated(TabulatedCost table);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  int moment_order() const { return moment_m_; }
  const TabulatedCost& table() const { return table_; }

  // (T, B) of the growth-ratio bound; for |x|^m, B = 2^m at T = 1.
  double growth_threshold() const;
  double growth_bound() const;
  // Largest x at which the loss is directly evaluable (infinity for
  // built-ins, the last sample for tabulated losses).
  double max_evaluable() const;

 private:
  Kind kind_;
  int moment_m_ = 0;
  TabulatedCost table_;
};

// Parses the two-column tabulated cost format: a header line "T B"
// followed by lines "x L(x)" with strictly increasing x >= 0. The declared
// growth bound is spot-verified on the samples.
CostFunction load_tabulated_cost(std::istream& in);
CostFunction load_tabulated_cost_file(const std::string& path);

// Exact binomial coefficient for n <= 64; larger n is rejected.
uint64_t binomial_coefficient(int n, int k);

// Geometric moment sums c_i = sum_{k>=0} b^k k^i for i = 0..n.
struct MomentSeries {
  double b;
  std::vector<double> c;
};

// Computes c_0..c_n via the recursion
// c_{i+1} = b/(1-b)^2 + b/(1-b) * sum_{j=1}^{i} C(i+1, j) c_j.
MomentSeries moment_series(double b, int n);

// Expected cost V(p) with provenance and a truncation-error bound
// (zero for closed forms).
struct ExpectedCost {
  enum class Method { kClosedForm, kSeries, kQuadrature };
  double value;
  Method method;
  double error_bound;
};

// Closed-form V(p_gamma) for L(x) = |x|:
//   delta * (b/(1-b) + (1/2) (b + (1-b) gamma^2) / (b + (1-b) gamma)).
ExpectedCost staircase_cost_abs(const PrivacyParams& params, double gamma);

// Closed-form V(p_gamma) for L(x) = x^2.
ExpectedCost staircase_cost_square(const PrivacyParams& params, double gamma);

// V(p_gamma) for L(x) = |x|^m via the moment series, n = m + 1:
//   delta^m (1-b)/n * sum_{i=1}^{n} C(n,i) c_{n-i} (gamma^i (1-b) + b)
//                   / (gamma (1-b) + b).
ExpectedCost staircase_cost_moment(const PrivacyParams& params, double gamma,
                                   int m);

// Generic V(p_gamma) by per-piece Gauss-Legendre quadrature with a
// certified geometric tail bound.
ExpectedCost staircase_cost_quadrature(const PrivacyParams& params,
                                       double gamma, const CostFunction& cost);

// Expected cost under the Laplace mechanism: closed forms delta/epsilon
// (|x|) and 2 delta^2/epsilon^2 (x^2); quadrature otherwise.
ExpectedCost laplace_cost(const PrivacyParams& params,
                          const CostFunction& cost);

// Dispatches to the closed form, series or quadrature path for the
// staircase distribution.
ExpectedCost staircase_cost(const PrivacyParams& params, double gamma,
                            const CostFunction& cost);

// Per-residue expected-cost weights for the discrete staircase:
//   w_0 = L(0) + 2 sum_{k>=1} L(k delta) b^k
//   w_i = 2 sum_{k>=0} L(i + k delta) b^k      for 1 <= i <= delta-1.
struct DiscreteWeights {
  std::vector<double> w;
  double error_bound;
};

DiscreteWeights discrete_weights(const PrivacyParams& params, int delta,
                                 const CostFunction& cost);

// V(p_r) = sum_{i=0}^{delta-1} p_r(i) w_i.
double discrete_expected_cost(const StaircaseDiscrete& mech,
                              const DiscreteWeights& weights);

}  // namespace staircase

#endif  // STAIRCASE_COSTS_HPP_
