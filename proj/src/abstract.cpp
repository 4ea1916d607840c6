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

#include "staircase/abstract.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace staircase {

void CandidateScoring::validate() const {
  if (ids.empty() || ids.size() != scores.size()) {
    throw std::invalid_argument("scoring needs at least one candidate");
  }
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0) {
      throw std::invalid_argument("scores must be finite and non-negative");
    }
  }
  if (!std::isfinite(sensitivity) || sensitivity <= 0) {
    throw std::invalid_argument("sensitivity must be positive");
  }
}

std::vector<double> abstract_distribution(const CandidateScoring& scoring,
                                          double epsilon, double gamma) {
  scoring.validate();
  const StaircaseContinuous stair(PrivacyParams(epsilon, scoring.sensitivity),
                                  gamma);
  std::vector<double> probs(scoring.scores.size());
  double total = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    probs[i] = staircase_pdf(stair, scoring.scores[i]);
    total += probs[i];
  }
  if (total <= 0) {
    throw std::domain_error("all candidate weights underflowed to zero");
  }
  for (double& p : probs) p /= total;
  return probs;
}

size_t abstract_sample(const CandidateScoring& scoring, double epsilon,
                       double gamma, UniformSource& rng) {
  const std::vector<double> probs =
      abstract_distribution(scoring, epsilon, gamma);
  const double u = rng.next();
  double cum = 0;
  for (size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.size() - 1;
}

CandidateScoring load_scoring_csv(const std::string& path,
                                  double sensitivity) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scoring csv: " + path);
  CandidateScoring scoring;
  scoring.sensitivity = sensitivity;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("malformed scoring row: " + line);
    }
    const std::string id = line.substr(0, comma);
    const std::string score_text = line.substr(comma + 1);
    try {
      scoring.scores.push_back(std::stod(score_text));
    } catch (const std::exception&) {
      if (first) {
        // Header row.
        first = false;
        continue;
      }
      throw std::invalid_argument("malformed scoring row: " + line);
    }
    scoring.ids.push_back(id);
    first = false;
  }
  scoring.validate();
  return scoring;
}

}  // namespace staircase
