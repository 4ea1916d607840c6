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

#ifndef STAIRCASE_ABSTRACT_HPP_
#define STAIRCASE_ABSTRACT_HPP_

#include <string>
#include <vector>

#include "staircase/mechanisms.hpp"

namespace staircase {

// Finite candidate set with per-candidate scores C(D, r) and the score
// sensitivity: the maximum per-candidate score change between neighboring
// inputs.
struct CandidateScoring {
  std::vector<std::string> ids;
  std::vector<double> scores;  // finite, non-negative
  double sensitivity;          // > 0

  void validate() const;
};

// Selection probabilities p(r) proportional to f_gamma(score(r)), where
// f_gamma is the staircase density with delta = scoring sensitivity.
// Guarantees output-probability ratio <= e^{2 epsilon} between scorings
// whose per-candidate scores differ by at most the sensitivity.
std::vector<double> abstract_distribution(const CandidateScoring& scoring,
                                          double epsilon, double gamma);

// Inverse-cdf categorical draw over the candidates in declared order.
size_t abstract_sample(const CandidateScoring& scoring, double epsilon,
                       double gamma, UniformSource& rng);

// Parses "candidate_id,score" CSV rows (optional header) into a scoring.
CandidateScoring load_scoring_csv(const std::string& path,
                                  double sensitivity);

}  // namespace staircase

#endif  // STAIRCASE_ABSTRACT_HPP_
