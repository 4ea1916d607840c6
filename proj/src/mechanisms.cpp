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

#include "staircase/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace staircase {

namespace {

void check_finite(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("argument must be finite");
  }
}

// Geometric G with Pr[G=i] = (1-b) b^i by inverse transform.
int64_t sample_geometric(double b, double u) {
  const double g = std::floor(std::log1p(-u) / std::log(b));
  return static_cast<int64_t>(g);
}

}  // namespace

PrivacyParams::PrivacyParams(double epsilon_in, double delta_in)
    : epsilon(epsilon_in), delta(delta_in), b(std::exp(-epsilon_in)) {
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    throw std::invalid_argument("epsilon must be finite and positive");
  }
  if (!std::isfinite(delta) || delta <= 0) {
    throw std::invalid_argument("delta must be finite and positive");
  }
}

double PrivacyParams::one_minus_b() const { return -std::expm1(-epsilon); }

StaircaseContinuous::StaircaseContinuous(PrivacyParams params_in,
                                         double gamma_in)
    : params(params_in), gamma(gamma_in) {
  if (!std::isfinite(gamma) || gamma < 0 || gamma > 1) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  a_gamma = params.one_minus_b() /
            (2 * params.delta * (gamma + params.b * (1 - gamma)));
}

LaplaceMechanism::LaplaceMechanism(PrivacyParams params_in)
    : params(params_in), lambda(params_in.delta / params_in.epsilon) {}

StaircaseDiscrete::StaircaseDiscrete(PrivacyParams params_in, int delta_in,
                                     int r_in)
    : params(params_in), delta(delta_in), r(r_in) {
  if (delta < 1) {
    throw std::invalid_argument("discrete delta must be an integer >= 1");
  }
  if (r < 1 || r > delta) {
    throw std::invalid_argument("step break r must lie in [1, delta]");
  }
  const double b = params.b;
  a_r = params.one_minus_b() /
        (2 * r + 2 * b * (delta - r) - params.one_minus_b());
}

double staircase_pdf(const StaircaseContinuous& mech, double x) {
  check_finite(x);
  const double d = mech.params.delta;
  const double ax = std::fabs(x);
  const double k = std::floor(ax / d);
  const double frac = ax - k * d;
  const double decay = std::pow(mech.params.b, k);
  // Half-open pieces: [k d, (k+gamma) d) takes the higher level.
  if (frac < mech.gamma * d) {
    return mech.a_gamma * decay;
  }
  return mech.a_gamma * decay * mech.params.b;
}

double staircase_cdf(const StaircaseContinuous& mech, double x) {
  check_finite(x);
  if (x < 0) return 1.0 - staircase_cdf(mech, -x);
  const double d = mech.params.delta;
  const double b = mech.params.b;
  const double k = std::floor(x / d);
  const double t = x - k * d;
  const double bk = std::pow(b, k);
  // Each full period [j d, (j+1) d) carries mass b^j (1-b)/2.
  const double full = (1.0 - bk) / 2.0;
  const double high = std::min(t, mech.gamma * d);
  const double low = std::max(t - mech.gamma * d, 0.0);
  return 0.5 + full + mech.a_gamma * bk * (high + b * low);
}

double staircase_value_from_trace(const StaircaseContinuous& mech,
                                  const StaircaseTrace& trace) {
  const double d = mech.params.delta;
  const double g = static_cast<double>(trace.period);
  const double inner =
      trace.binary == 0
          ? (g + mech.gamma * trace.uniform) * d
          : (g + mech.gamma + (1 - mech.gamma) * trace.uniform) * d;
  return trace.sign * inner;
}

NoiseSample staircase_sample(const StaircaseContinuous& mech,
                             UniformSource& rng) {
  const double b = mech.params.b;
  StaircaseTrace trace;
  trace.sign = rng.next() < 0.5 ? -1 : 1;
  trace.period = sample_geometric(b, rng.next());
  trace.uniform = rng.next();
  if (mech.gamma == 0) {
    trace.binary = 1;
  } else if (mech.gamma == 1) {
    trace.binary = 0;
  } else {
    const double p0 = mech.gamma / (mech.gamma + (1 - mech.gamma) * b);
    trace.binary = rng.next() < p0 ? 0 : 1;
  }
  return {staircase_value_from_trace(mech, trace), trace};
}

double laplace_pdf(const LaplaceMechanism& mech, double x) {
  check_finite(x);
  return std::exp(-std::fabs(x) / mech.lambda) / (2 * mech.lambda);
}

double laplace_cdf(const LaplaceMechanism& mech, double x) {
  check_finite(x);
  if (x < 0) return 0.5 * std::exp(x / mech.lambda);
  return 1.0 - 0.5 * std::exp(-x / mech.lambda);
}

NoiseSample laplace_sample(const LaplaceMechanism& mech, UniformSource& rng) {
  const double u = rng.next();
  double value;
  if (u < 0.5) {
    value = mech.lambda * std::log(2 * u);
  } else {
    value = -mech.lambda * std::log(2 * (1 - u));
  }
  return {value, std::nullopt};
}

double discrete_pmf(const StaircaseDiscrete& mech, int64_t i) {
  const int64_t ai = i < 0 ? -i : i;
  const int64_t k = ai / mech.delta;
  const int64_t res = ai % mech.delta;
  const double decay = std::pow(mech.params.b, static_cast<double>(k));
  if (res < mech.r) return mech.a_r * decay;
  return mech.a_r * decay * mech.params.b;
}

namespace {

// Pr[X >= m] for m >= 1 via the per-period closed form.
double discrete_upper_tail(const StaircaseDiscrete& mech, int64_t m) {
  const double b = mech.params.b;
  const int delta = mech.delta;
  const int r = mech.r;
  // Decompose m = k*delta + res with res in [0, delta).
  const int64_t k = m / delta;
  const int64_t res = m % delta;
  const double bk = std::pow(b, static_cast<double>(k));
  const double high_steps = static_cast<double>(std::max<int64_t>(0, r - res));
  const double low_steps =
      static_cast<double>(delta - std::max<int64_t>(res, r));
  const double partial = mech.a_r * bk * (high_steps + low_steps * b);
  const double per_period = mech.a_r * (r + (delta - r) * b);
  const double full = per_period * bk * b / mech.params.one_minus_b();
  return partial + full;
}

}  // namespace

double discrete_cdf(const StaircaseDiscrete& mech, int64_t i) {
  if (i < 0) return discrete_upper_tail(mech, -i);
  return 1.0 - discrete_upper_tail(mech, i + 1);
}

int64_t discrete_value_from_trace(const DiscreteTrace& trace, int delta) {
  return trace.sign * (trace.period * delta + trace.index);
}

DiscreteNoiseSample discrete_sample(const StaircaseDiscrete& mech,
                                    UniformSource& rng) {
  const double b = mech.params.b;
  const int delta = mech.delta;
  const int r = mech.r;
  const double total = r + (delta - r) * b;
  DiscreteTrace trace;
  while (true) {
    trace.sign = rng.next() < 0.5 ? -1 : 1;
    trace.period = sample_geometric(b, rng.next());
    const double v = rng.next() * total;
    if (v < r) {
      trace.index = std::min(static_cast<int>(v), r - 1);
    } else {
      trace.index = std::min(r + static_cast<int>((v - r) / b), delta - 1);
    }
    // Zero has two latent representations (S = +1 and S = -1); keeping only
    // the positive one restores the target pmf exactly.
    if (trace.sign == -1 && trace.period == 0 && trace.index == 0) continue;
    break;
  }
  return {discrete_value_from_trace(trace, delta), trace};
}

int tail_periods(double b, double tol) {
  if (b <= 0 || b >= 1 || tol <= 0) {
    throw std::invalid_argument("tail_periods requires b in (0,1), tol > 0");
  }
  const double k = std::ceil(std::log(tol) / std::log(b));
  return std::max(1, static_cast<int>(k) + 1);
}

}  // namespace staircase
