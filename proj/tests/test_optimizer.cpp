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

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "staircase/optimizer.hpp"

namespace staircase {
namespace {

TabulatedCost dense_table(const std::function<double(double)>& loss,
                          double x_max, int n, double threshold,
                          double bound) {
  TabulatedCost table;
  for (int i = 0; i <= n; ++i) {
    const double x = x_max * i / n;
    table.x.push_back(x);
    table.value.push_back(loss(x));
  }
  table.threshold = threshold;
  table.growth_bound = bound;
  return table;
}

TEST_CASE("golden section finds a shifted parabola vertex") {
  const MinimizeResult min = golden_section_minimize(
      [](double x) { return (x - 0.3125) * (x - 0.3125) + 2.0; }, 0.0, 1.0);
  CHECK(min.x == doctest::Approx(0.3125).epsilon(1e-9));
  CHECK(min.fx == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("optimal gamma for the absolute loss") {
  const PrivacyParams params(2 * std::log(2.0), 1.0);
  const OptimizationResult result = gamma_opt_abs(params);
  CHECK(result.parameter == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(result.cost.value == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(result.residual < 1e-14);
  CHECK(result.method == OptimizationResult::Method::kClosedForm);

  // Independent oracle: golden-section search over the closed-form cost.
  for (double eps : {0.1, 0.5, 1.0, 3.0, 8.0}) {
    const PrivacyParams p(eps, 1.0);
    const OptimizationResult closed = gamma_opt_abs(p);
    const MinimizeResult searched = golden_section_minimize(
        [&](double g) { return staircase_cost_abs(p, g).value; }, 0.0, 1.0);
    CHECK(closed.parameter == doctest::Approx(searched.x).epsilon(1e-7));
    CHECK(closed.cost.value <= searched.fx * (1 + 1e-12));
  }
}

TEST_CASE("absolute-loss optimum asymptotics") {
  // High privacy: gamma* -> 1/2.
  const OptimizationResult tiny = gamma_opt_abs(PrivacyParams(1e-4, 1.0));
  CHECK(tiny.parameter > 0.49);
  CHECK(tiny.parameter <= 0.5);
  // Low privacy: V ~ e^{-eps/2} -> the worked value at eps = 10.
  const OptimizationResult loose = gamma_opt_abs(PrivacyParams(10.0, 1.0));
  CHECK(loose.cost.value ==
        doctest::Approx(std::exp(5.0) / std::expm1(10.0)).epsilon(1e-13));
  CHECK(loose.cost.value == doctest::Approx(6.7384e-3).epsilon(1e-4));
}

TEST_CASE("optimal gamma for the squared loss") {
  const PrivacyParams params(std::log(2.0), 1.0);
  const OptimizationResult result = gamma_opt_square(params);
  CHECK(result.parameter == doctest::Approx(0.44225).epsilon(2e-5));
  CHECK(result.cost.value == doctest::Approx(4.0801).epsilon(2e-5));
  CHECK(result.residual < 1e-10);

  // Oracle: bisection on the cubic stationarity residual, written out
  // directly here.
  for (double eps : {0.3, 1.0, 2.0, 6.0}) {
    const PrivacyParams p(eps, 1.0);
    const double b = p.b;
    const auto cubic = [&](double g) {
      return (2.0 / 3.0) * (1 - b) * (1 - b) * g * g * g +
             2 * b * (1 - b) * g * g + 2 * b * b * g -
             (2 * b * b + b) / 3.0;
    };
    double lo = 0.0, hi = 1.0;
    REQUIRE(cubic(lo) < 0);
    REQUIRE(cubic(hi) > 0);
    for (int i = 0; i < 200; ++i) {
      const double mid = (lo + hi) / 2;
      (cubic(mid) < 0 ? lo : hi) = mid;
    }
    CHECK(gamma_opt_square(p).parameter ==
          doctest::Approx((lo + hi) / 2).epsilon(1e-10));
  }
}

TEST_CASE("squared-loss optimum stays stable in the high-privacy limit") {
  // As eps -> 0 the naive cube-root form cancels catastrophically; the
  // implementation must still produce gamma* in (0, 1/2] and a finite cost.
  const OptimizationResult result = gamma_opt_square(PrivacyParams(1e-5, 1.0));
  CHECK(result.parameter > 0.49);
  CHECK(result.parameter <= 0.5 + 1e-6);
  CHECK(std::isfinite(result.cost.value));
}

TEST_CASE("moment optimum matches the dedicated closed forms") {
  for (double eps : {0.4, 1.0, 3.0}) {
    const PrivacyParams params(eps, 1.0);
    CHECK(gamma_opt_moment(params, 1).parameter ==
          doctest::Approx(gamma_opt_abs(params).parameter).epsilon(1e-9));
    CHECK(gamma_opt_moment(params, 2).parameter ==
          doctest::Approx(gamma_opt_square(params).parameter).epsilon(1e-6));
    CHECK(gamma_opt_moment(params, 2).cost.value ==
          doctest::Approx(gamma_opt_square(params).cost.value)
              .epsilon(1e-10));
  }
}

TEST_CASE("fourth-moment optimum agrees with direct search") {
  const PrivacyParams params(1.5, 1.0);
  const OptimizationResult poly = gamma_opt_moment(params, 4);
  const MinimizeResult searched = golden_section_minimize(
      [&](double g) { return staircase_cost_moment(params, g, 4).value; },
      0.0, 1.0);
  CHECK(poly.parameter == doctest::Approx(searched.x).epsilon(1e-6));
  CHECK(poly.cost.value <= searched.fx * (1 + 1e-10));
}

TEST_CASE("moment optimum asymptotics") {
  CHECK(gamma_opt_moment(PrivacyParams(1e-4, 1.0), 3).parameter > 0.49);
  CHECK(gamma_opt_moment(PrivacyParams(50.0, 1.0), 3).parameter < 1e-3);
}

TEST_CASE("generic optimizer recovers the abs optimum from a table") {
  const PrivacyParams params(1.0, 1.0);
  const CostFunction abs_table = CostFunction::tabulated(
      dense_table([](double x) { return x; }, 120.0, 12000, 1.0, 2.0));
  const OptimizationResult generic = gamma_opt_generic(params, abs_table);
  const OptimizationResult closed = gamma_opt_abs(params);
  CHECK(generic.parameter == doctest::Approx(closed.parameter).epsilon(1e-4));
  CHECK(generic.cost.value ==
        doctest::Approx(closed.cost.value).epsilon(1e-6));
  CHECK(!generic.flat);
}

TEST_CASE("generic optimizer flags a flat objective") {
  TabulatedCost table;
  table.x = {0.0, 500.0};
  table.value = {2.0, 2.0};
  table.threshold = 1.0;
  table.growth_bound = 1.0;
  const OptimizationResult result =
      gamma_opt_generic(PrivacyParams(1.0, 1.0), CostFunction::tabulated(table));
  CHECK(result.flat);
  CHECK(result.cost.value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("heuristic gamma and its small-noise probability") {
  const PrivacyParams params(std::log(2.0), 1.0);
  const OptimizationResult h = gamma_heuristic(params, CostFunction::abs());
  CHECK(h.parameter == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(h.method == OptimizationResult::Method::kHeuristic);
  // Pr[|X| <= gamma delta] = (b - b^2)/(3b - b^2) = 0.2 at b = 1/2.
  CHECK(heuristic_small_noise_probability(params) ==
        doctest::Approx(0.2).epsilon(1e-14));
  // The probability tends to 1/3 in the low-privacy limit.
  CHECK(heuristic_small_noise_probability(PrivacyParams(25.0, 1.0)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-7));
  // Cross-check against the cdf: Pr[|X| <= gamma delta].
  const StaircaseContinuous mech(params, h.parameter);
  const double prob = staircase_cdf(mech, h.parameter * params.delta) -
                      staircase_cdf(mech, -h.parameter * params.delta);
  CHECK(prob == doctest::Approx(0.2).epsilon(1e-12));
  // Heuristic cost is never below the optimum.
  for (double eps : {0.2, 1.0, 4.0}) {
    const PrivacyParams p(eps, 1.0);
    CHECK(gamma_heuristic(p, CostFunction::abs()).cost.value >=
          gamma_opt_abs(p).cost.value * (1 - 1e-12));
  }
}

TEST_CASE("discrete optimum hits the worked case") {
  const PrivacyParams params(std::log(2.0), 2.0);
  const OptimizationResult result =
      discrete_r_opt(params, 2, CostFunction::abs());
  CHECK(result.parameter == doctest::Approx(1.0));
  CHECK(result.cost.value == doctest::Approx(2.8).epsilon(1e-9));
  CHECK(result.method == OptimizationResult::Method::kEnumeration);
}

TEST_CASE("delta one leaves no choice") {
  const OptimizationResult result =
      discrete_r_opt(PrivacyParams(1.0, 1.0), 1, CostFunction::abs());
  CHECK(result.parameter == doctest::Approx(1.0));
}

TEST_CASE("discrete optimum beats brute force enumeration for x^2") {
  const PrivacyParams params(0.1, 3.0);
  const OptimizationResult result =
      discrete_r_opt(params, 3, CostFunction::square());
  // Brute force: every r, cost by direct summation over |i| <= span.
  int best_r = 0;
  double best = std::numeric_limits<double>::infinity();
  const int64_t span = 3 * tail_periods(params.b, 1e-15);
  for (int r = 1; r <= 3; ++r) {
    const StaircaseDiscrete mech(params, 3, r);
    double cost = 0;
    for (int64_t i = -span; i <= span; ++i) {
      cost += static_cast<double>(i * i) * discrete_pmf(mech, i);
    }
    if (cost < best) {
      best = cost;
      best_r = r;
    }
  }
  CHECK(static_cast<int>(result.parameter) == best_r);
  CHECK(result.cost.value == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("comparison rows reproduce the low-privacy gains") {
  const auto rows =
      compare_mechanisms(1.0, CostFunction::abs(), {10.0});
  REQUIRE(rows.size() == 1);
  // gain = (e^eps - 1) / (eps e^{eps/2}).
  CHECK(rows[0].gain ==
        doctest::Approx(std::expm1(10.0) / (10.0 * std::exp(5.0)))
            .epsilon(1e-12));
  CHECK(rows[0].gain == doctest::Approx(14.84).epsilon(1e-3));

  const auto sq = compare_mechanisms(1.0, CostFunction::square(), {10.0});
  CHECK(sq[0].gain == doctest::Approx(23.6).epsilon(5e-3));
}

TEST_CASE("comparison gap vanishes quadratically in the high-privacy limit") {
  // For |x|: V_Lap - V_opt -> delta eps / 24 as eps -> 0.
  const double eps = 0.01;
  const auto rows = compare_mechanisms(1.0, CostFunction::abs(), {eps});
  CHECK(rows[0].gap == doctest::Approx(eps / 24.0).epsilon(1e-3));
  // For x^2: gap -> delta^2 (1/12 - eps^2/720).
  const auto sq = compare_mechanisms(1.0, CostFunction::square(), {eps});
  CHECK(sq[0].gap ==
        doctest::Approx(1.0 / 12.0 - eps * eps / 720.0).epsilon(1e-4));
}

TEST_CASE("staircase optimum never loses to Laplace") {
  for (double eps : {0.05, 0.3, 1.0, 2.0, 5.0, 12.0}) {
    const auto rows = compare_mechanisms(2.0, CostFunction::abs(), {eps});
    CHECK(rows[0].gain >= 1.0 - 1e-12);
    const auto sq = compare_mechanisms(2.0, CostFunction::square(), {eps});
    CHECK(sq[0].gain >= 1.0 - 1e-12);
  }
}

TEST_CASE("optimizer input validation") {
  const PrivacyParams params(1.0, 1.0);
  CHECK_THROWS_AS(gamma_opt_moment(params, 0), std::invalid_argument);
  CHECK_THROWS_AS(discrete_r_opt(params, 0, CostFunction::abs()),
                  std::invalid_argument);
}

}  // namespace
}  // namespace staircase
