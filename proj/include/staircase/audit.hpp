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

#ifndef STAIRCASE_AUDIT_HPP_
#define STAIRCASE_AUDIT_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "staircase/mechanisms.hpp"

namespace staircase {

// Result of maximizing f(x) / f(x + d) over |d| <= delta.
struct RatioAudit {
  double max_ratio;
  double slack;       // max_ratio / e^epsilon - 1
  double arg_x;       // witness x of the maximum
  double arg_shift;   // witness d
  size_t pairs_checked;
  bool pass;          // max_ratio <= e^epsilon (1 + 1e-12)
};

// Exact audit of the staircase density: enumerates breakpoint-aligned
// cells of the (x, x+d) pair instead of sampling, so the reported maximum
// is the true supremum (e^epsilon, attained across one full period).
RatioAudit audit_ratio_continuous(const StaircaseContinuous& mech);

// Grid audit of the Laplace density, including offsets around d = +-delta.
RatioAudit audit_ratio_continuous(const LaplaceMechanism& mech,
                                  int x_grid_n, int d_grid_n);

// Grid audit of an arbitrary density; guards malformed custom input
// (zero-density regions yield an infinite ratio and a failed audit).
RatioAudit audit_ratio_grid(const std::function<double(double)>& pdf,
                            double epsilon, double delta, double span,
                            int x_grid_n, int d_grid_n);

// Exhaustive audit of the discrete pmf over i in [-span, span],
// integer d in [-delta, delta].
RatioAudit audit_ratio_discrete(const StaircaseDiscrete& mech, int64_t span);

struct TradeoffPoint {
  double p_fa;
  double p_md;
};

// Optimal (P_FA, P_MD) tradeoff for distinguishing a mechanism's output
// at two query values |t1 - t2| = shift apart.
struct TradeoffCurve {
  std::string mechanism;
  double epsilon;
  double shift;
  std::vector<TradeoffPoint> points;  // non-increasing P_MD in P_FA
};

// Closed-form Laplace tradeoff at shift = delta:
//   P_MD = 1 - e^eps P_FA          on [0, e^-eps / 2)
//        = e^-eps / (4 P_FA)       on [e^-eps / 2, 1/2)
//        = e^-eps (1 - P_FA)       on [1/2, 1].
double laplace_tradeoff_md(const PrivacyParams& params, double p_fa);
TradeoffCurve laplace_tradeoff(const PrivacyParams& params,
                               int n_points = 1001);

// Numeric likelihood-ratio sweep: partitions the support into
// n_thresholds cells aligned to both densities' breakpoints, sorts by
// likelihood ratio and emits the resulting Neyman-Pearson polyline.
// Interior vertices are exact operating points; segment interiors are
// attained by randomized tie-breaking across equal-ratio plateaus.
TradeoffCurve numeric_tradeoff(const StaircaseContinuous& mech, double shift,
                               int n_thresholds);
TradeoffCurve numeric_tradeoff(const LaplaceMechanism& mech, double shift,
                               int n_thresholds);

// P_MD at a query P_FA by linear interpolation along the curve.
double tradeoff_md_at(const TradeoffCurve& curve, double p_fa);

// Goodness-of-fit report for a sampler against its analytic distribution.
struct GofReport {
  bool pass;
  double statistic;
  double critical;
  int n;
  uint64_t seed;
  std::string test;  // "ks" or "chi-square"
};

// One-sample Kolmogorov-Smirnov test of `samples` against `cdf`.
GofReport ks_gof(std::vector<double> samples,
                 const std::function<double(double)>& cdf, double alpha);

GofReport sampler_gof(const StaircaseContinuous& mech, int n, uint64_t seed,
                      double alpha = 1e-3);
GofReport sampler_gof(const LaplaceMechanism& mech, int n, uint64_t seed,
                      double alpha = 1e-3);
// Chi-square over the truncated support, tail bins merged so every
// expected count stays above 5.
GofReport sampler_gof(const StaircaseDiscrete& mech, int n, uint64_t seed,
                      double alpha = 1e-3);

}  // namespace staircase

#endif  // STAIRCASE_AUDIT_HPP_
