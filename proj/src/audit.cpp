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

#include "staircase/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace staircase {

namespace {

constexpr double kRatioSlackTol = 1e-12;

struct Cell {
  double lo;
  double hi;
  double value;
};

RatioAudit finish_audit(double epsilon, double max_ratio, double arg_x,
                        double arg_d, size_t pairs) {
  RatioAudit audit;
  audit.max_ratio = max_ratio;
  audit.slack = max_ratio / std::exp(epsilon) - 1.0;
  audit.arg_x = arg_x;
  audit.arg_shift = arg_d;
  audit.pairs_checked = pairs;
  audit.pass = max_ratio <= std::exp(epsilon) * (1 + kRatioSlackTol);
  return audit;
}

}  // namespace

RatioAudit audit_ratio_continuous(const StaircaseContinuous& mech) {
  const double d = mech.params.delta;
  const double b = mech.params.b;
  const double gamma = mech.gamma;
  const int periods = tail_periods(b, 1e-12);

  std::vector<Cell> cells;
  cells.reserve(4 * periods + 4);
  for (int k = 0; k <= periods; ++k) {
    const double bk = std::pow(b, k);
    const double lo = k * d;
    const double split = (k + gamma) * d;
    const double hi = (k + 1) * d;
    if (split > lo) {
      cells.push_back({lo, split, mech.a_gamma * bk});
      cells.push_back({-split, -lo, mech.a_gamma * bk});
    }
    if (hi > split) {
      cells.push_back({split, hi, mech.a_gamma * bk * b});
      cells.push_back({-hi, -split, mech.a_gamma * bk * b});
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& c) { return a.lo < c.lo; });

  double max_ratio = 0, arg_x = 0, arg_d = 0;
  size_t pairs = 0;
  for (size_t i = 0; i < cells.size(); ++i) {
    // A pair of cells admits some x in c1, x+d in c2 with |d| <= delta
    // exactly when their (open) gap is below delta. Breakpoints are
    // multiples of gamma*delta and delta, so rounding can place a gap of
    // exactly one period a few ulp under delta; the relative guard keeps
    // such pairs excluded.
    for (size_t j = i; j < cells.size(); ++j) {
      const double gap = cells[j].lo - cells[i].hi;
      if (gap >= d * (1 - 1e-9)) break;
      ++pairs;
      const double r1 = cells[i].value / cells[j].value;
      const double r2 = cells[j].value / cells[i].value;
      if (r1 > max_ratio) {
        max_ratio = r1;
        arg_x = cells[i].lo;
        arg_d = cells[j].lo - cells[i].lo;
      }
      if (r2 > max_ratio) {
        max_ratio = r2;
        arg_x = cells[j].lo;
        arg_d = cells[i].lo - cells[j].lo;
      }
    }
  }
  return finish_audit(mech.params.epsilon, max_ratio, arg_x, arg_d, pairs);
}

RatioAudit audit_ratio_grid(const std::function<double(double)>& pdf,
                            double epsilon, double delta, double span,
                            int x_grid_n, int d_grid_n) {
  if (x_grid_n < 2 || d_grid_n < 2) {
    throw std::invalid_argument("audit grids need at least 2 points");
  }
  double max_ratio = 0, arg_x = 0, arg_d = 0;
  size_t pairs = 0;
  for (int i = 0; i < x_grid_n; ++i) {
    const double x = -span + 2 * span * i / (x_grid_n - 1);
    const double fx = pdf(x);
    for (int j = 0; j < d_grid_n; ++j) {
      const double d = -delta + 2 * delta * j / (d_grid_n - 1);
      const double fy = pdf(x + d);
      ++pairs;
      if (fy <= 0) {
        if (fx > 0) {
          return finish_audit(epsilon,
                              std::numeric_limits<double>::infinity(), x, d,
                              pairs);
        }
        continue;
      }
      const double r = fx / fy;
      if (r > max_ratio) {
        max_ratio = r;
        arg_x = x;
        arg_d = d;
      }
    }
  }
  return finish_audit(epsilon, max_ratio, arg_x, arg_d, pairs);
}

RatioAudit audit_ratio_continuous(const LaplaceMechanism& mech, int x_grid_n,
                                  int d_grid_n) {
  const double span =
      (tail_periods(mech.params.b, 1e-12) + 1) * mech.params.delta;
  return audit_ratio_grid([&](double x) { return laplace_pdf(mech, x); },
                          mech.params.epsilon, mech.params.delta, span,
                          x_grid_n, d_grid_n);
}

RatioAudit audit_ratio_discrete(const StaircaseDiscrete& mech, int64_t span) {
  if (span < mech.delta) {
    throw std::invalid_argument("audit span must cover at least one period");
  }
  double max_ratio = 0, arg_x = 0, arg_d = 0;
  size_t pairs = 0;
  for (int64_t i = -span; i <= span; ++i) {
    const double pi = discrete_pmf(mech, i);
    for (int64_t d = -mech.delta; d <= mech.delta; ++d) {
      const double pj = discrete_pmf(mech, i + d);
      ++pairs;
      const double r = pi / pj;
      if (r > max_ratio) {
        max_ratio = r;
        arg_x = static_cast<double>(i);
        arg_d = static_cast<double>(d);
      }
    }
  }
  return finish_audit(mech.params.epsilon, max_ratio, arg_x, arg_d, pairs);
}

double laplace_tradeoff_md(const PrivacyParams& params, double p_fa) {
  if (p_fa < 0 || p_fa > 1) {
    throw std::invalid_argument("p_fa must lie in [0, 1]");
  }
  const double b = params.b;  // e^-epsilon
  if (p_fa < b / 2) return 1.0 - p_fa / b;
  if (p_fa < 0.5) return b / (4 * p_fa);
  return b * (1.0 - p_fa);
}

TradeoffCurve laplace_tradeoff(const PrivacyParams& params, int n_points) {
  if (n_points < 2) throw std::invalid_argument("need at least 2 points");
  TradeoffCurve curve;
  curve.mechanism = "laplace";
  curve.epsilon = params.epsilon;
  curve.shift = params.delta;
  curve.points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double p_fa = static_cast<double>(i) / (n_points - 1);
    curve.points.push_back({p_fa, laplace_tradeoff_md(params, p_fa)});
  }
  return curve;
}

namespace {

// Neyman-Pearson sweep over cells aligned to both hypotheses' breakpoints.
TradeoffCurve tradeoff_sweep(const std::function<double(double)>& cdf,
                             double shift, double half_width,
                             const std::vector<double>& breakpoints,
                             int n_thresholds, std::string name,
                             double epsilon) {
  if (n_thresholds < 2) {
    throw std::invalid_argument("need at least 2 thresholds");
  }
  const double lo = -half_width + std::min(0.0, shift);
  const double hi = half_width + std::max(0.0, shift);

  std::vector<double> edges;
  edges.reserve(n_thresholds + 2 * breakpoints.size() + 2);
  for (int i = 0; i <= n_thresholds; ++i) {
    edges.push_back(lo + (hi - lo) * i / n_thresholds);
  }
  for (double bp : breakpoints) {
    if (bp > lo && bp < hi) edges.push_back(bp);
    const double shifted = bp + shift;
    if (shifted > lo && shifted < hi) edges.push_back(shifted);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // Cell masses under H0 (density f) and H1 (density f shifted).
  std::vector<double> p0, p1;
  p0.reserve(edges.size() + 1);
  p1.reserve(edges.size() + 1);
  p0.push_back(cdf(edges.front()));
  p1.push_back(cdf(edges.front() - shift));
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    p0.push_back(cdf(edges[i + 1]) - cdf(edges[i]));
    p1.push_back(cdf(edges[i + 1] - shift) - cdf(edges[i] - shift));
  }
  p0.push_back(1.0 - cdf(edges.back()));
  p1.push_back(1.0 - cdf(edges.back() - shift));

  std::vector<size_t> order(p0.size());
  std::iota(order.begin(), order.end(), 0);
  // Descending likelihood ratio p1/p0, compared without division.
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return p1[a] * p0[b] > p1[b] * p0[a];
  });

  TradeoffCurve curve;
  curve.mechanism = std::move(name);
  curve.epsilon = epsilon;
  curve.shift = shift;
  curve.points.reserve(order.size() + 1);
  double fa = 0, detect = 0;
  curve.points.push_back({0.0, 1.0});
  for (size_t idx : order) {
    if (p0[idx] == 0 && p1[idx] == 0) continue;
    fa += p0[idx];
    detect += p1[idx];
    curve.points.push_back({std::min(fa, 1.0),
                            std::max(0.0, 1.0 - detect)});
  }
  return curve;
}

}  // namespace

TradeoffCurve numeric_tradeoff(const StaircaseContinuous& mech, double shift,
                               int n_thresholds) {
  if (std::fabs(shift) > mech.params.delta) {
    throw std::invalid_argument("shift magnitude must be <= delta");
  }
  const double d = mech.params.delta;
  const int periods = tail_periods(mech.params.b, 1e-14);
  std::vector<double> breakpoints;
  breakpoints.reserve(4 * periods);
  for (int k = 0; k <= periods; ++k) {
    breakpoints.push_back(k * d);
    breakpoints.push_back(-(k * d));
    breakpoints.push_back((k + mech.gamma) * d);
    breakpoints.push_back(-((k + mech.gamma) * d));
  }
  return tradeoff_sweep([&](double x) { return staircase_cdf(mech, x); },
                        shift, (periods + 1) * d, breakpoints, n_thresholds,
                        "staircase", mech.params.epsilon);
}

TradeoffCurve numeric_tradeoff(const LaplaceMechanism& mech, double shift,
                               int n_thresholds) {
  if (std::fabs(shift) > mech.params.delta) {
    throw std::invalid_argument("shift magnitude must be <= delta");
  }
  return tradeoff_sweep([&](double x) { return laplace_cdf(mech, x); }, shift,
                        40 * mech.lambda, {0.0}, n_thresholds, "laplace",
                        mech.params.epsilon);
}

double tradeoff_md_at(const TradeoffCurve& curve, double p_fa) {
  const auto& pts = curve.points;
  if (pts.empty()) throw std::invalid_argument("empty tradeoff curve");
  if (p_fa <= pts.front().p_fa) return pts.front().p_md;
  if (p_fa >= pts.back().p_fa) return pts.back().p_md;
  const auto it = std::lower_bound(
      pts.begin(), pts.end(), p_fa,
      [](const TradeoffPoint& p, double v) { return p.p_fa < v; });
  const auto prev = it - 1;
  const double width = it->p_fa - prev->p_fa;
  if (width <= 0) return std::min(prev->p_md, it->p_md);
  const double t = (p_fa - prev->p_fa) / width;
  return prev->p_md + t * (it->p_md - prev->p_md);
}

GofReport ks_gof(std::vector<double> samples,
                 const std::function<double(double)>& cdf, double alpha) {
  const int n = static_cast<int>(samples.size());
  if (n < 1) throw std::invalid_argument("ks test needs samples");
  std::sort(samples.begin(), samples.end());
  double d_stat = 0;
  for (int i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d_stat = std::max(d_stat, std::fabs(f - static_cast<double>(i) / n));
    d_stat = std::max(d_stat, std::fabs(f - static_cast<double>(i + 1) / n));
  }
  const double critical = std::sqrt(-0.5 * std::log(alpha / 2)) /
                          std::sqrt(static_cast<double>(n));
  return {d_stat < critical, d_stat, critical, n, 0, "ks"};
}

GofReport sampler_gof(const StaircaseContinuous& mech, int n, uint64_t seed,
                      double alpha) {
  if (n < 10000) throw std::invalid_argument("gof needs n >= 10^4");
  Xoshiro256ss rng(seed);
  std::vector<double> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    samples.push_back(staircase_sample(mech, rng).value);
  }
  GofReport report = ks_gof(std::move(samples),
                            [&](double x) { return staircase_cdf(mech, x); },
                            alpha);
  report.seed = seed;
  return report;
}

GofReport sampler_gof(const LaplaceMechanism& mech, int n, uint64_t seed,
                      double alpha) {
  if (n < 10000) throw std::invalid_argument("gof needs n >= 10^4");
  Xoshiro256ss rng(seed);
  std::vector<double> samples;
  samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    samples.push_back(laplace_sample(mech, rng).value);
  }
  GofReport report = ks_gof(std::move(samples),
                            [&](double x) { return laplace_cdf(mech, x); },
                            alpha);
  report.seed = seed;
  return report;
}

namespace {

// Upper quantile of chi-square by the Wilson-Hilferty approximation.
double chi_square_critical(int df, double alpha) {
  double z;
  if (alpha <= 1e-3 + 1e-12 && alpha >= 1e-3 - 1e-12) {
    z = 3.0902323061678132;  // Phi^-1(0.999)
  } else {
    // Newton on the complementary error function.
    z = 3.0;
    for (int i = 0; i < 60; ++i) {
      const double tail = 0.5 * std::erfc(z / std::sqrt(2.0));
      const double pdf =
          std::exp(-z * z / 2) / std::sqrt(2 * M_PI);
      z -= (alpha - tail) / pdf;
    }
  }
  const double t = 2.0 / (9.0 * df);
  const double base = 1.0 - t + z * std::sqrt(t);
  return df * base * base * base;
}

}  // namespace

GofReport sampler_gof(const StaircaseDiscrete& mech, int n, uint64_t seed,
                      double alpha) {
  if (n < 10000) throw std::invalid_argument("gof needs n >= 10^4");
  Xoshiro256ss rng(seed);

  // Central bins are single integers with expected count >= 5; everything
  // beyond folds into two tail bins.
  int64_t limit = 0;
  while (limit < 100000 &&
         n * discrete_pmf(mech, limit + 1) >= 5.0) {
    ++limit;
  }
  const int64_t n_central = 2 * limit + 1;
  std::vector<int64_t> counts(n_central, 0);
  int64_t left_tail = 0, right_tail = 0;
  for (int i = 0; i < n; ++i) {
    const int64_t v = discrete_sample(mech, rng).value;
    if (v < -limit) {
      ++left_tail;
    } else if (v > limit) {
      ++right_tail;
    } else {
      ++counts[v + limit];
    }
  }

  const double tail_prob = 1.0 - discrete_cdf(mech, limit);
  double statistic = 0;
  int df = -1;
  for (int64_t i = -limit; i <= limit; ++i) {
    const double expected = n * discrete_pmf(mech, i);
    const double observed = static_cast<double>(counts[i + limit]);
    statistic += (observed - expected) * (observed - expected) / expected;
    ++df;
  }
  for (double observed : {static_cast<double>(left_tail),
                          static_cast<double>(right_tail)}) {
    const double expected = n * tail_prob;
    if (expected > 0) {
      statistic += (observed - expected) * (observed - expected) / expected;
      ++df;
    }
  }
  const double critical = chi_square_critical(std::max(df, 1), alpha);
  return {statistic < critical, statistic, critical, n, seed, "chi-square"};
}

}  // namespace staircase
