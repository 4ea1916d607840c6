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
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "staircase/costs.hpp"

namespace staircase {
namespace {

// Riemann-sum oracle for E L(X) under the staircase density, independent of
// both the closed forms and the library quadrature.
double riemann_cost(const PrivacyParams& params, double gamma,
                    const std::function<double(double)>& loss) {
  const StaircaseContinuous mech(params, gamma);
  const double span = params.delta * tail_periods(params.b, 1e-13);
  const int n = 800000;
  const double h = span / n;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    sum += 2 * loss(x) * staircase_pdf(mech, x) * h;
  }
  return sum;
}

// Direct-series oracle for c_i = sum_k b^k k^i.
double direct_series(double b, int i, int kmax) {
  double sum = i == 0 ? 1.0 : 0.0;  // k = 0 term (0^0 = 1)
  for (int k = 1; k <= kmax; ++k) {
    sum += std::pow(b, k) * std::pow(static_cast<double>(k), i);
  }
  return sum;
}

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

TEST_CASE("binomial coefficients are exact") {
  CHECK(binomial_coefficient(0, 0) == 1);
  CHECK(binomial_coefficient(5, 2) == 10);
  CHECK(binomial_coefficient(10, 5) == 252);
  CHECK(binomial_coefficient(64, 32) == 1832624140942590534ULL);
  CHECK(binomial_coefficient(6, 7) == 0);
  CHECK(binomial_coefficient(6, -1) == 0);
  CHECK_THROWS_AS(binomial_coefficient(65, 2), std::invalid_argument);
}

TEST_CASE("moment series matches direct summation") {
  for (double b : {0.1, 0.5, 0.9}) {
    const MomentSeries series = moment_series(b, 8);
    const int kmax = b < 0.8 ? 400 : 2000;
    for (int i = 0; i <= 8; ++i) {
      CHECK(series.c[i] ==
            doctest::Approx(direct_series(b, i, kmax)).epsilon(1e-10));
    }
  }
  // Closed forms at b = 1/2: c_0 = 2, c_1 = 2, c_2 = 6.
  const MomentSeries half = moment_series(0.5, 2);
  CHECK(half.c[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(half.c[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(half.c[2] == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("absolute cost closed form hits the worked values") {
  const PrivacyParams params(2 * std::log(2.0), 1.0);
  CHECK(staircase_cost_abs(params, 1.0 / 3.0).value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // gamma = 1: delta (b/(1-b) + 1/2).
  const PrivacyParams ln2(std::log(2.0), 1.0);
  CHECK(staircase_cost_abs(ln2, 1.0).value ==
        doctest::Approx(1.5).epsilon(1e-14));
  // gamma = 0 at eps = 2 ln 2: b/(1-b) + 1/2 * b/b = 1/3 + 1/2 = 5/6.
  CHECK(staircase_cost_abs(params, 0.0).value ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("square cost closed form hits the worked value") {
  const PrivacyParams params(std::log(2.0), 1.0);
  CHECK(staircase_cost_square(params, 0.44225).value ==
        doctest::Approx(4.0801).epsilon(2e-4));
  // gamma in {0, 1} give the same endpoint value: the density is the same
  // pure step-exponential shifted by one period label.
  const double at0 = staircase_cost_square(params, 0.0).value;
  const double at1 = staircase_cost_square(params, 1.0).value;
  // Not equal in general; instead verify both against the Riemann oracle.
  CHECK(at0 == doctest::Approx(riemann_cost(params, 0.0, [](double x) {
          return x * x;
        })).epsilon(1e-6));
  CHECK(at1 == doctest::Approx(riemann_cost(params, 1.0, [](double x) {
          return x * x;
        })).epsilon(1e-6));
}

TEST_CASE("moment cost reduces to the abs and square closed forms") {
  for (double eps : {0.5, 1.0, 3.0}) {
    for (double gamma : {0.1, 0.45, 0.9}) {
      const PrivacyParams params(eps, 1.7);
      CHECK(staircase_cost_moment(params, gamma, 1).value ==
            doctest::Approx(staircase_cost_abs(params, gamma).value)
                .epsilon(1e-12));
      CHECK(staircase_cost_moment(params, gamma, 2).value ==
            doctest::Approx(staircase_cost_square(params, gamma).value)
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("third-moment cost matches the Riemann oracle") {
  const PrivacyParams params(1.0, 1.0);
  for (double gamma : {0.2, 0.6}) {
    CHECK(staircase_cost_moment(params, gamma, 3).value ==
          doctest::Approx(riemann_cost(params, gamma, [](double x) {
            return x * x * x;
          })).epsilon(1e-4));
  }
}

TEST_CASE("closed forms agree with library quadrature across a grid") {
  for (double eps : {0.1, 1.0, 10.0}) {
    for (double gamma : {0.0, 0.3, 0.7, 1.0}) {
      const PrivacyParams params(eps, 1.0);
      const double abs_quad =
          staircase_cost_quadrature(params, gamma, CostFunction::abs()).value;
      const double sq_quad =
          staircase_cost_quadrature(params, gamma, CostFunction::square())
              .value;
      CHECK(abs_quad == doctest::Approx(
                            staircase_cost_abs(params, gamma).value)
                            .epsilon(1e-6));
      CHECK(sq_quad == doctest::Approx(
                           staircase_cost_square(params, gamma).value)
                           .epsilon(1e-6));
    }
  }
}

TEST_CASE("tabulated losses reproduce their analytic source to table accuracy") {
  // Linear interpolation of x^2 on spacing h carries an O(h^2) bias, so the
  // comparison tolerance follows the table, not the quadrature.
  const CostFunction square_table = CostFunction::tabulated(
      dense_table([](double x) { return x * x; }, 80.0, 16000, 1.0, 4.0));
  const PrivacyParams params(1.0, 1.0);
  for (double gamma : {0.3, 0.7}) {
    CHECK(staircase_cost_quadrature(params, gamma, square_table).value ==
          doctest::Approx(staircase_cost_square(params, gamma).value)
              .epsilon(1e-5));
  }
}

TEST_CASE("quadrature of a constant loss returns the loss itself") {
  TabulatedCost table;
  table.x = {0.0, 100.0};
  table.value = {3.0, 3.0};
  table.threshold = 1.0;
  table.growth_bound = 1.0;
  const CostFunction constant = CostFunction::tabulated(table);
  const ExpectedCost v =
      staircase_cost_quadrature(PrivacyParams(1.0, 1.0), 0.4, constant);
  CHECK(v.value == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("laplace cost closed forms") {
  const PrivacyParams params(2.0, 3.0);
  CHECK(laplace_cost(params, CostFunction::abs()).value ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK(laplace_cost(params, CostFunction::square()).value ==
        doctest::Approx(2 * 1.5 * 1.5).epsilon(1e-14));
  // E|X|^3 = 6 lambda^3.
  CHECK(laplace_cost(params, CostFunction::moment(3)).value ==
        doctest::Approx(6 * 1.5 * 1.5 * 1.5).epsilon(1e-14));
}

TEST_CASE("laplace quadrature matches the abs closed form via a table") {
  const CostFunction abs_table = CostFunction::tabulated(
      dense_table([](double x) { return x; }, 80.0, 8000, 1.0, 2.0));
  for (double eps : {0.5, 1.0, 4.0}) {
    const PrivacyParams params(eps, 1.0);
    CHECK(laplace_cost(params, abs_table).value ==
          doctest::Approx(params.delta / params.epsilon).epsilon(1e-6));
  }
}

TEST_CASE("tabulated cost validation") {
  TabulatedCost bad;
  bad.x = {0.0, 1.0, 1.0};
  bad.value = {0.0, 1.0, 2.0};
  bad.threshold = 1.0;
  bad.growth_bound = 2.0;
  CHECK_THROWS_AS(CostFunction::tabulated(bad), std::invalid_argument);

  TabulatedCost decreasing;
  decreasing.x = {0.0, 1.0, 2.0};
  decreasing.value = {1.0, 0.5, 2.0};
  decreasing.threshold = 1.0;
  decreasing.growth_bound = 2.0;
  CHECK_THROWS_AS(CostFunction::tabulated(decreasing), std::invalid_argument);

  TabulatedCost negative;
  negative.x = {0.0, 1.0};
  negative.value = {-1.0, 0.0};
  negative.threshold = 1.0;
  negative.growth_bound = 2.0;
  CHECK_THROWS_AS(CostFunction::tabulated(negative), std::invalid_argument);

  // Violates its own declared growth bound: doubles every 1/4 step.
  TabulatedCost fast;
  for (int i = 0; i <= 40; ++i) {
    fast.x.push_back(i * 0.25);
    fast.value.push_back(std::pow(2.0, i));
  }
  fast.threshold = 1.0;
  fast.growth_bound = 2.0;  // true per-unit growth is 16
  CHECK_THROWS_AS(CostFunction::tabulated(fast), std::invalid_argument);
}

TEST_CASE("tabulated evaluation interpolates and refuses the far tail") {
  TabulatedCost table;
  table.x = {0.0, 1.0, 3.0};
  table.value = {0.0, 2.0, 4.0};
  table.threshold = 1.0;
  table.growth_bound = 4.0;
  const CostFunction cost = CostFunction::tabulated(table);
  CHECK(cost(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cost(-2.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(cost(3.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(cost(3.5), std::domain_error);
}

TEST_CASE("tabulated cost file format round-trips") {
  std::istringstream in(
      "1.0 2.0\n"
      "0 0\n"
      "1 1\n"
      "# comment line\n"
      "2 2\n");
  const CostFunction cost = load_tabulated_cost(in);
  CHECK(cost.kind() == CostFunction::Kind::kTabulated);
  CHECK(cost.growth_threshold() == doctest::Approx(1.0));
  CHECK(cost.growth_bound() == doctest::Approx(2.0));
  CHECK(cost(1.5) == doctest::Approx(1.5).epsilon(1e-14));

  std::istringstream missing_header("0 0\n1 1\n");
  // A data row parses as a header; the remaining single row then fails the
  // two-sample minimum.
  CHECK_THROWS_AS(load_tabulated_cost(missing_header), std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS_AS(load_tabulated_cost(empty), std::invalid_argument);
}

TEST_CASE("discrete weights hit the worked values") {
  const PrivacyParams params(std::log(2.0), 2.0);
  const DiscreteWeights weights =
      discrete_weights(params, 2, CostFunction::abs());
  REQUIRE(weights.w.size() == 2);
  CHECK(weights.w[0] == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(weights.w[1] == doctest::Approx(12.0).epsilon(1e-9));

  const StaircaseDiscrete mech(params, 2, 1);
  CHECK(discrete_expected_cost(mech, weights) ==
        doctest::Approx(2.8).epsilon(1e-9));

  // delta = 1, abs loss: w_0 = 2 sum_k k b^k = 2b/(1-b)^2.
  const PrivacyParams geo(1.0, 1.0);
  const DiscreteWeights w1 = discrete_weights(geo, 1, CostFunction::abs());
  const double b = geo.b;
  CHECK(w1.w[0] == doctest::Approx(2 * b / ((1 - b) * (1 - b))).epsilon(1e-9));
}

TEST_CASE("discrete weights of a constant loss reproduce total mass one") {
  // L = 1 everywhere: V(p_r) = 1 regardless of r.
  TabulatedCost table;
  table.x = {0.0, 1000.0};
  table.value = {1.0, 1.0};
  table.threshold = 1.0;
  table.growth_bound = 1.0;
  const CostFunction constant = CostFunction::tabulated(table);
  const PrivacyParams params(0.8, 3.0);
  const DiscreteWeights weights = discrete_weights(params, 3, constant);
  for (int r = 1; r <= 3; ++r) {
    const StaircaseDiscrete mech(params, 3, r);
    CHECK(discrete_expected_cost(mech, weights) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("discrete weights are increasing in the residue for |i|") {
  for (double eps : {0.4, 1.0, 2.0}) {
    const PrivacyParams params(eps, 5.0);
    const DiscreteWeights weights =
        discrete_weights(params, 5, CostFunction::abs());
    for (size_t i = 0; i + 1 < weights.w.size(); ++i) {
      CHECK(weights.w[i] < weights.w[i + 1]);
    }
  }
}

TEST_CASE("discrete expected cost matches brute force summation") {
  const CostFunction square = CostFunction::square();
  for (int delta : {1, 2, 4}) {
    for (double eps : {0.5, 1.5}) {
      const PrivacyParams params(eps, delta);
      const DiscreteWeights weights = discrete_weights(params, delta, square);
      for (int r = 1; r <= delta; ++r) {
        const StaircaseDiscrete mech(params, delta, r);
        const int64_t span = delta * tail_periods(params.b, 1e-15);
        double brute = 0;
        for (int64_t i = -span; i <= span; ++i) {
          brute += square(static_cast<double>(i)) * discrete_pmf(mech, i);
        }
        CHECK(discrete_expected_cost(mech, weights) ==
              doctest::Approx(brute).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("moment factory bounds") {
  CHECK_THROWS_AS(CostFunction::moment(0), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction::moment(64), std::invalid_argument);
  CHECK(CostFunction::moment(63).moment_order() == 63);
}

}  // namespace
}  // namespace staircase
