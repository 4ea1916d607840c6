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

#ifndef STAIRCASE_MECHANISMS_HPP_
#define STAIRCASE_MECHANISMS_HPP_

#include <cstdint>
#include <optional>

#include "staircase/random.hpp"

namespace staircase {

// Privacy level epsilon and query sensitivity delta, with the per-period
// decay factor b = exp(-epsilon) cached. Immutable after construction.
struct PrivacyParams {
  double epsilon;
  double delta;
  double b;

  PrivacyParams(double epsilon, double delta);

  // 1 - b computed without cancellation (= -expm1(-epsilon)).
  double one_minus_b() const;
};

// Additive noise with a symmetric density that is piecewise constant on a
// gamma-split period of length delta and decays by factor b per period.
// Density pieces use the half-open convention [k*delta, (k+1)*delta); the
// value at a breakpoint is the value of the interval to its right.
struct StaircaseContinuous {
  PrivacyParams params;
  double gamma;    // fraction of each period at the higher level, in [0,1]
  double a_gamma;  // normalizer (1-b) / (2*delta*(gamma + b*(1-gamma)))

  StaircaseContinuous(PrivacyParams params, double gamma);
};

// Laplace noise with scale lambda = delta / epsilon.
struct LaplaceMechanism {
  PrivacyParams params;
  double lambda;

  explicit LaplaceMechanism(PrivacyParams params);
};

// Integer-valued staircase noise for integer sensitivity delta >= 1, with
// step break index r in [1, delta]. For delta = 1 the pmf equals the
// two-sided geometric pmf (1-b)/(1+b) * b^|i|.
struct StaircaseDiscrete {
  PrivacyParams params;
  int delta;
  int r;
  double a_r;  // (1-b) / (2r + 2b(delta-r) - (1-b))

  StaircaseDiscrete(PrivacyParams params, int delta, int r);
};

// Latent draws of the staircase sampler; the output value recomputes
// exactly from the trace.
struct StaircaseTrace {
  int sign;         // +1 or -1
  int64_t period;   // geometric G, Pr[G=i] = (1-b) b^i
  double uniform;   // U in [0,1)
  int binary;       // B, Pr[B=0] = gamma / (gamma + (1-gamma) b)
};

struct NoiseSample {
  double value;
  std::optional<StaircaseTrace> trace;
};

// Latent draws of the discrete sampler: sign, geometric period, and the
// within-period step index in [0, delta).
struct DiscreteTrace {
  int sign;
  int64_t period;
  int index;
};

struct DiscreteNoiseSample {
  int64_t value;
  std::optional<DiscreteTrace> trace;
};

// Density / cdf of the continuous staircase distribution.
double staircase_pdf(const StaircaseContinuous& mech, double x);
double staircase_cdf(const StaircaseContinuous& mech, double x);

// Exact sampler for the staircase distribution: draws a sign S, a geometric
// period G, a uniform U and a binary step indicator B, and returns
// S * ((1-B)(G + gamma U) + B(G + gamma + (1-gamma) U)) * delta.
// At gamma = 0 the step indicator is deterministically 1, at gamma = 1
// deterministically 0.
NoiseSample staircase_sample(const StaircaseContinuous& mech,
                             UniformSource& rng);

// Recomputes the sample value from its latent trace.
double staircase_value_from_trace(const StaircaseContinuous& mech,
                                  const StaircaseTrace& trace);

double laplace_pdf(const LaplaceMechanism& mech, double x);
double laplace_cdf(const LaplaceMechanism& mech, double x);

// Inverse-cdf sampler for the Laplace distribution.
NoiseSample laplace_sample(const LaplaceMechanism& mech, UniformSource& rng);

double discrete_pmf(const StaircaseDiscrete& mech, int64_t i);
double discrete_cdf(const StaircaseDiscrete& mech, int64_t i);

// Sampler for the discrete staircase pmf. Draws sign, geometric period and
// a categorical within-period index weighted {1 x r steps, b x (delta-r)
// steps}; the latent combination (S=-1, G=0, index=0) is rejected and
// redrawn, which removes the double counting of zero.
DiscreteNoiseSample discrete_sample(const StaircaseDiscrete& mech,
                                    UniformSource& rng);

int64_t discrete_value_from_trace(const DiscreteTrace& trace, int delta);

// Smallest K with b^K < tol; number of periods to keep in truncated
// summation or quadrature.
int tail_periods(double b, double tol);

}  // namespace staircase

#endif  // STAIRCASE_MECHANISMS_HPP_
