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

#include "staircase/costs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace staircase {

constexpr double kRelTailTol = 1e-12;
constexpr int kMaxBinomialN = 64;
constexpr int kGaussNodes = 32;

// C(64,32) still fits uint64.
uint64_t binomial_coefficient(int n, int k) {
  if (n > kMaxBinomialN) {
    throw std::invalid_argument("binomial order above 64 not supported");
  }
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  uint64_t row[kMaxBinomialN + 1] = {1};
  for (int i = 1; i <= n; ++i) {
    for (int j = std::min(i, n / 2 + 1); j >= 1; --j) row[j] += row[j - 1];
  }
  return row[k];
}

namespace {

struct GaussRule {
  std::array<double, kGaussNodes> node;
  std::array<double, kGaussNodes> weight;
};

// 32-point Gauss-Legendre rule on [-1, 1], nodes by Newton on P_32.
const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r;
    const int n = kGaussNodes;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      r.node[i] = x;
      r.weight[i] = 2.0 / ((1 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

// Integral of L over [lo, hi].
double integrate(const CostFunction& cost, double lo, double hi) {
  if (hi <= lo) return 0;
  const GaussRule& rule = gauss_rule();
  const double mid = (lo + hi) / 2;
  const double half = (hi - lo) / 2;
  double sum = 0;
  for (int i = 0; i < kGaussNodes; ++i) {
    sum += rule.weight[i] * cost(mid + half * rule.node[i]);
  }
  return sum * half;
}

void validate_b(double b) {
  if (!(b > 0) || !(b < 1)) {
    throw std::invalid_argument("b must lie in (0, 1)");
  }
}

void validate_gamma(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0 || gamma > 1) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
}

}  // namespace

CostFunction CostFunction::abs() {
  CostFunction c;
  c.kind_ = Kind::kAbs;
  c.moment_m_ = 1;
  return c;
}

CostFunction CostFunction::square() {
  CostFunction c;
  c.kind_ = Kind::kSquare;
  c.moment_m_ = 2;
  return c;
}

CostFunction CostFunction::moment(int m) {
  if (m < 1) throw std::invalid_argument("moment order must be >= 1");
  if (m + 1 > kMaxBinomialN) {
    throw std::invalid_argument("moment order above 63 not supported");
  }
  CostFunction c;
  c.kind_ = Kind::kMoment;
  c.moment_m_ = m;
  return c;
}

CostFunction CostFunction::tabulated(TabulatedCost table) {
  if (table.x.size() != table.value.size() || table.x.size() < 2) {
    throw std::invalid_argument("tabulated cost needs >= 2 (x, L) samples");
  }
  if (table.x.front() < 0) {
    throw std::invalid_argument("tabulated abscissae must be >= 0");
  }
  for (size_t i = 0; i + 1 < table.x.size(); ++i) {
    if (!(table.x[i] < table.x[i + 1])) {
      throw std::invalid_argument("tabulated abscissae must strictly increase");
    }
    if (table.value[i + 1] < table.value[i]) {
      throw std::invalid_argument("tabulated cost must be non-decreasing");
    }
  }
  for (double v : table.value) {
    if (!std::isfinite(v) || v < 0) {
      throw std::invalid_argument("tabulated cost values must be >= 0");
    }
  }
  if (!(table.growth_bound >= 1) || !std::isfinite(table.growth_bound)) {
    throw std::invalid_argument("growth bound B must be finite and >= 1");
  }
  CostFunction c;
  c.kind_ = Kind::kTabulated;
  c.table_ = std::move(table);
  // Spot-verify the declared bound on the samples: L(x+1)/L(x) <= B for
  // sampled x >= T with x+1 still inside the table.
  const auto& t = c.table_;
  for (size_t i = 0; i < t.x.size(); ++i) {
    if (t.x[i] < t.threshold) continue;
    if (t.x[i] + 1 > t.x.back()) break;
    const double num = c(t.x[i] + 1);
    const double den = c(t.x[i]);
    if (den > 0 && num > t.growth_bound * den * (1 + 1e-9)) {
      throw std::invalid_argument(
          "tabulated cost violates the declared growth bound");
    }
  }
  return c;
}

double CostFunction::operator()(double x) const {
  const double ax = std::fabs(x);
  switch (kind_) {
    case Kind::kAbs:
      return ax;
    case Kind::kSquare:
      return ax * ax;
    case Kind::kMoment:
      return std::pow(ax, moment_m_);
    case Kind::kTabulated: {
      if (ax <= table_.x.front()) return table_.value.front();
      if (ax > table_.x.back()) {
        throw std::domain_error(
            "tabulated cost evaluated beyond the last sample");
      }
      const auto it =
          std::lower_bound(table_.x.begin(), table_.x.end(), ax);
      const size_t hi = static_cast<size_t>(it - table_.x.begin());
      const size_t lo = hi - 1;
      const double t =
          (ax - table_.x[lo]) / (table_.x[hi] - table_.x[lo]);
      return table_.value[lo] + t * (table_.value[hi] - table_.value[lo]);
    }
  }
  return 0;
}

double CostFunction::growth_threshold() const {
  if (kind_ == Kind::kTabulated) return table_.threshold;
  return 1.0;
}

double CostFunction::growth_bound() const {
  if (kind_ == Kind::kTabulated) return table_.growth_bound;
  return std::pow(2.0, moment_m_);
}

double CostFunction::max_evaluable() const {
  if (kind_ == Kind::kTabulated) return table_.x.back();
  return std::numeric_limits<double>::infinity();
}

CostFunction load_tabulated_cost(std::istream& in) {
  TabulatedCost table;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty tabulated cost input");
  }
  {
    std::istringstream header(line);
    if (!(header >> table.threshold >> table.growth_bound)) {
      throw std::invalid_argument(
          "tabulated cost header must declare 'T B'");
    }
  }
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double x, v;
    if (!(row >> x >> v)) {
      throw std::invalid_argument("malformed tabulated cost row: " + line);
    }
    table.x.push_back(x);
    table.value.push_back(v);
  }
  return CostFunction::tabulated(std::move(table));
}

CostFunction load_tabulated_cost_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open cost table: " + path);
  return load_tabulated_cost(in);
}

MomentSeries moment_series(double b, int n) {
  validate_b(b);
  if (n < 0) throw std::invalid_argument("moment series order must be >= 0");
  MomentSeries series;
  series.b = b;
  series.c.resize(n + 1);
  series.c[0] = 1.0 / (1.0 - b);
  const double lead = b / ((1.0 - b) * (1.0 - b));
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    for (int j = 1; j <= i; ++j) {
      sum += static_cast<double>(binomial_coefficient(i + 1, j)) * series.c[j];
    }
    series.c[i + 1] = lead + (b / (1.0 - b)) * sum;
  }
  return series;
}

ExpectedCost staircase_cost_abs(const PrivacyParams& params, double gamma) {
  validate_gamma(gamma);
  const double b = params.b;
  const double omb = params.one_minus_b();
  const double g = (b + omb * gamma * gamma) / (b + omb * gamma);
  const double value = params.delta * (b / omb + 0.5 * g);
  return {value, ExpectedCost::Method::kClosedForm, 0.0};
}

ExpectedCost staircase_cost_square(const PrivacyParams& params, double gamma) {
  validate_gamma(gamma);
  const double b = params.b;
  const double omb = params.one_minus_b();
  const double denom = b + omb * gamma;
  const double value =
      params.delta * params.delta *
      ((b * b + b) / (omb * omb) +
       (b + omb * gamma * gamma) / denom * (b / omb) +
       (b + omb * gamma * gamma * gamma) / (3.0 * denom));
  return {value, ExpectedCost::Method::kClosedForm, 0.0};
}

ExpectedCost staircase_cost_moment(const PrivacyParams& params, double gamma,
                                   int m) {
  validate_gamma(gamma);
  if (m < 1) throw std::invalid_argument("moment order must be >= 1");
  const int n = m + 1;
  const double b = params.b;
  const double omb = params.one_minus_b();
  if (m * std::log(params.delta) > 650.0) {
    throw std::overflow_error("delta^m overflows for this moment order");
  }
  const MomentSeries series = moment_series(b, n);
  double sum = 0;
  for (int i = 1; i <= n; ++i) {
    sum += static_cast<double>(binomial_coefficient(n, i)) * series.c[n - i] *
           (std::pow(gamma, i) * omb + b);
  }
  const double value = std::pow(params.delta, m) * omb / n * sum /
                       (gamma * omb + b);
  return {value, ExpectedCost::Method::kSeries, 0.0};
}

namespace {

// Sums weighted per-period contributions 2 * term(k) for k = 0, 1, ...
// until a geometric tail bound certifies relative tail < kRelTailTol.
// `ratio_cap` is the Property-2 per-period growth bound b * B^ceil(delta);
// when it is >= 1 the empirical period-to-period ratio is used once it has
// dropped below 1 (it always does, since polynomially-bounded growth times
// b^k eventually decays).
// The certificate only applies from `min_periods` on: below the loss's
// growth threshold the declared ratio bound says nothing, and a zero early
// term (L(0) = 0) must not be mistaken for a vanished tail.
ExpectedCost sum_periods(const std::function<double(int)>& term,
                         double ratio_cap, int max_periods, int min_periods) {
  double total = 0;
  double prev = -1;
  double tail_bound = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_periods; ++k) {
    const double s = term(k);
    total += s;
    double rho = ratio_cap;
    if (prev > 0 && s > 0) rho = std::min(rho, 1.02 * s / prev);
    if (rho < 1 && s > 0 && k + 1 >= min_periods) {
      tail_bound = s * rho / (1 - rho);
      if (tail_bound <= kRelTailTol * std::max(total, 1e-300)) {
        return {total, ExpectedCost::Method::kQuadrature, tail_bound};
      }
    }
    prev = s;
  }
  return {total, ExpectedCost::Method::kQuadrature, tail_bound};
}

}  // namespace

ExpectedCost staircase_cost_quadrature(const PrivacyParams& params,
                                       double gamma,
                                       const CostFunction& cost) {
  validate_gamma(gamma);
  const StaircaseContinuous mech(params, gamma);
  const double d = params.delta;
  const double b = params.b;
  const double a = mech.a_gamma;
  const double ratio_cap =
      b * std::pow(cost.growth_bound(), std::ceil(d));
  const double x_max = cost.max_evaluable();

  double extra_error = 0;
  const auto term = [&](int k) -> double {
    const double lo = k * d;
    const double split = (k + gamma) * d;
    const double hi = (k + 1) * d;
    const double bk = std::pow(b, k);
    if (hi > x_max) {
      // Beyond the table: bound the remaining mass times the geometric
      // extension of the loss and fold it into the error bound.
      const double l_edge = cost(x_max);
      const double growth = cost.growth_bound();
      double bound = 0;
      double level = l_edge * std::pow(growth, hi - x_max);
      double mass = bk * (1 - b);  // two-sided mass of period k
      const double rho = b * std::pow(growth, d);
      if (rho < 1) {
        bound = level * mass / (1 - rho);
      } else {
        bound = std::numeric_limits<double>::infinity();
      }
      extra_error += bound;
      return 0;
    }
    // Piecewise-constant density: the integrand is L times a constant on
    // each of the two pieces of the period.
    const double high = integrate(cost, lo, split);
    const double low = integrate(cost, split, hi);
    return 2 * a * bk * (high + b * low);
  };

  const int cap = std::max(64, 4 * tail_periods(b, 1e-15));
  const int min_periods =
      1 + static_cast<int>(std::ceil(cost.growth_threshold() / d));
  ExpectedCost result = sum_periods(term, ratio_cap, cap, min_periods);
  result.error_bound += extra_error;
  return result;
}

ExpectedCost laplace_cost(const PrivacyParams& params,
                          const CostFunction& cost) {
  if (cost.kind() == CostFunction::Kind::kAbs) {
    return {params.delta / params.epsilon, ExpectedCost::Method::kClosedForm,
            0.0};
  }
  if (cost.kind() == CostFunction::Kind::kSquare) {
    const double l = params.delta / params.epsilon;
    return {2 * l * l, ExpectedCost::Method::kClosedForm, 0.0};
  }
  if (cost.kind() == CostFunction::Kind::kMoment) {
    // E|X|^m = m! * lambda^m for Laplace noise.
    const int m = cost.moment_order();
    double value = 1;
    const double l = params.delta / params.epsilon;
    for (int i = 1; i <= m; ++i) value *= i * l;
    return {value, ExpectedCost::Method::kClosedForm, 0.0};
  }
  // Quadrature over segments of one scale length.
  const LaplaceMechanism mech(params);
  const double l = mech.lambda;
  const double x_max = cost.max_evaluable();
  const double growth = cost.growth_bound();
  double extra_error = 0;
  const auto term = [&](int k) -> double {
    const double lo = k * l;
    const double hi = (k + 1) * l;
    if (hi > x_max) {
      const double mass = std::exp(-lo / l);
      const double rho = std::exp(-1.0) * std::pow(growth, l);
      const double level = cost(x_max) * std::pow(growth, hi - x_max);
      extra_error += rho < 1
                         ? level * mass / (1 - rho)
                         : std::numeric_limits<double>::infinity();
      return 0;
    }
    const GaussRule& rule = gauss_rule();
    const double mid = (lo + hi) / 2;
    const double half = (hi - lo) / 2;
    double sum = 0;
    for (int i = 0; i < kGaussNodes; ++i) {
      const double x = mid + half * rule.node[i];
      sum += rule.weight[i] * cost(x) * std::exp(-x / l) / (2 * l);
    }
    return 2 * sum * half;
  };
  const double ratio_cap = std::exp(-1.0) * std::pow(growth, std::ceil(l));
  const int min_periods =
      1 + static_cast<int>(std::ceil(cost.growth_threshold() / l));
  return sum_periods(term, ratio_cap, 20000, min_periods);
}

ExpectedCost staircase_cost(const PrivacyParams& params, double gamma,
                            const CostFunction& cost) {
  switch (cost.kind()) {
    case CostFunction::Kind::kAbs:
      return staircase_cost_abs(params, gamma);
    case CostFunction::Kind::kSquare:
      return staircase_cost_square(params, gamma);
    case CostFunction::Kind::kMoment:
      return staircase_cost_moment(params, gamma, cost.moment_order());
    case CostFunction::Kind::kTabulated:
      return staircase_cost_quadrature(params, gamma, cost);
  }
  throw std::logic_error("unreachable cost kind");
}

DiscreteWeights discrete_weights(const PrivacyParams& params, int delta,
                                 const CostFunction& cost) {
  if (delta < 1) {
    throw std::invalid_argument("discrete delta must be an integer >= 1");
  }
  const double b = params.b;
  DiscreteWeights weights;
  weights.w.resize(delta);
  weights.error_bound = 0;
  const double ratio_cap = b * std::pow(cost.growth_bound(), delta);
  for (int i = 0; i < delta; ++i) {
    const auto term = [&](int k) -> double {
      if (i == 0 && k == 0) return cost(0.0);
      return 2 * cost(static_cast<double>(i) + static_cast<double>(k) * delta) *
             std::pow(b, k);
    };
    const int cap = std::max(64, 4 * tail_periods(b, 1e-15));
    const int min_periods =
        1 + static_cast<int>(std::ceil(cost.growth_threshold() / delta));
    const ExpectedCost partial = sum_periods(term, ratio_cap, cap, min_periods);
    weights.w[i] = partial.value;
    weights.error_bound += partial.error_bound;
  }
  return weights;
}

double discrete_expected_cost(const StaircaseDiscrete& mech,
                              const DiscreteWeights& weights) {
  if (static_cast<int>(weights.w.size()) != mech.delta) {
    throw std::invalid_argument("weights do not match mechanism delta");
  }
  double total = 0;
  for (int i = 0; i < mech.delta; ++i) {
    total += discrete_pmf(mech, i) * weights.w[i];
  }
  return total;
}

}  // namespace staircase
