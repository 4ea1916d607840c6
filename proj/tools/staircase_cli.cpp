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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "staircase/abstract.hpp"
#include "staircase/audit.hpp"
#include "staircase/costs.hpp"
#include "staircase/mechanisms.hpp"
#include "staircase/optimizer.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace staircase;

constexpr int kExitValidation = 1;
constexpr int kExitAuditFailure = 2;

// CSV numbers carry 12 significant digits; json values round-trip exactly.
std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output: " + path);
  return file;
}

struct CommonOptions {
  double epsilon = 1.0;
  double delta = 1.0;
  std::string gamma = "auto";
  std::string cost = "abs";
  std::string mech = "staircase";
  std::string table;
  int64_t n = 1;
  uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  int r = 0;  // 0 = optimize
  double shift = 0.0;
  std::string eps_range;
  int n_thresholds = 2001;
};

CostFunction parse_cost(const std::string& spec, const std::string& table) {
  if (spec == "abs") return CostFunction::abs();
  if (spec == "square") return CostFunction::square();
  if (spec.rfind("moment:", 0) == 0) {
    return CostFunction::moment(std::stoi(spec.substr(7)));
  }
  if (spec.rfind("table:", 0) == 0) {
    return load_tabulated_cost_file(spec.substr(6));
  }
  if (spec == "table") {
    if (table.empty()) {
      throw std::invalid_argument("cost 'table' requires --table PATH");
    }
    return load_tabulated_cost_file(table);
  }
  throw std::invalid_argument("unknown cost spec: " + spec);
}

OptimizationResult resolve_gamma_result(const CommonOptions& opt,
                                        const PrivacyParams& params,
                                        const CostFunction& cost) {
  if (opt.gamma == "heuristic") return gamma_heuristic(params, cost);
  if (opt.gamma == "auto") {
    switch (cost.kind()) {
      case CostFunction::Kind::kAbs:
        return gamma_opt_abs(params);
      case CostFunction::Kind::kSquare:
        return gamma_opt_square(params);
      case CostFunction::Kind::kMoment:
        return gamma_opt_moment(params, cost.moment_order());
      case CostFunction::Kind::kTabulated:
        return gamma_opt_generic(params, cost);
    }
  }
  const double g = std::stod(opt.gamma);
  OptimizationResult result;
  result.parameter = g;
  result.cost = staircase_cost(params, g, cost);
  result.method = OptimizationResult::Method::kClosedForm;
  result.residual = 0.0;
  return result;
}

std::vector<double> parse_range(const std::string& text) {
  // "lo:hi:step"
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw std::invalid_argument("range must be lo:hi:step");
  }
  const double lo = std::stod(text.substr(0, c1));
  const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (step <= 0 || hi < lo) throw std::invalid_argument("bad range");
  std::vector<double> values;
  for (double v = lo; v <= hi + step * 1e-9; v += step) values.push_back(v);
  return values;
}

json result_to_json(const OptimizationResult& result) {
  return json{{"gamma", result.parameter},
              {"cost", result.cost.value},
              {"error_bound", result.cost.error_bound},
              {"method", OptimizationResult::method_name(result.method)},
              {"residual", result.residual},
              {"flat", result.flat}};
}

int cmd_sample(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  Xoshiro256ss rng = Xoshiro256ss::for_stream(opt.seed, 0);
  json meta{{"mechanism", opt.mech},
            {"epsilon", opt.epsilon},
            {"delta", opt.delta},
            {"seed", opt.seed},
            {"n", opt.n}};
  std::vector<double> values;
  values.reserve(opt.n);

  if (opt.mech == "staircase") {
    const CostFunction cost = parse_cost(opt.cost, opt.table);
    const OptimizationResult resolved =
        resolve_gamma_result(opt, params, cost);
    meta["gamma"] = resolved.parameter;
    meta["gamma_mode"] = opt.gamma;
    const StaircaseContinuous mech(params, resolved.parameter);
    for (int64_t i = 0; i < opt.n; ++i) {
      values.push_back(staircase_sample(mech, rng).value);
    }
  } else if (opt.mech == "laplace") {
    const LaplaceMechanism mech(params);
    for (int64_t i = 0; i < opt.n; ++i) {
      values.push_back(laplace_sample(mech, rng).value);
    }
  } else if (opt.mech == "staircase-discrete" || opt.mech == "geometric") {
    const int delta_int = static_cast<int>(opt.delta);
    if (static_cast<double>(delta_int) != opt.delta || delta_int < 1) {
      throw std::invalid_argument("discrete mechanisms need integer delta");
    }
    if (opt.mech == "geometric" && delta_int != 1) {
      throw std::invalid_argument("geometric requires delta = 1");
    }
    int r = opt.r;
    if (r == 0) {
      r = opt.mech == "geometric"
              ? 1
              : static_cast<int>(
                    discrete_r_opt(params, delta_int,
                                   parse_cost(opt.cost, opt.table))
                        .parameter);
    }
    meta["r"] = r;
    const StaircaseDiscrete mech(params, delta_int, r);
    for (int64_t i = 0; i < opt.n; ++i) {
      values.push_back(static_cast<double>(discrete_sample(mech, rng).value));
    }
  } else {
    throw std::invalid_argument("unknown mechanism: " + opt.mech);
  }

  if (opt.format == "json") {
    json doc{{"metadata", meta}, {"samples", values}};
    os << doc.dump(2) << "\n";
  } else {
    for (double v : values) os << csv_num(v) << "\n";
  }
  return 0;
}

int cmd_pdf(const CommonOptions& opt, const std::vector<double>& xs) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  std::function<double(double)> pdf;
  if (opt.mech == "staircase") {
    const CostFunction cost = parse_cost(opt.cost, opt.table);
    const double gamma = resolve_gamma_result(opt, params, cost).parameter;
    StaircaseContinuous mech(params, gamma);
    pdf = [mech](double x) { return staircase_pdf(mech, x); };
  } else if (opt.mech == "laplace") {
    LaplaceMechanism mech(params);
    pdf = [mech](double x) { return laplace_pdf(mech, x); };
  } else if (opt.mech == "staircase-discrete" || opt.mech == "geometric") {
    const int delta_int = static_cast<int>(opt.delta);
    if (opt.mech == "geometric" && delta_int != 1) {
      throw std::invalid_argument("geometric requires delta = 1");
    }
    const int r = opt.r == 0 ? 1 : opt.r;
    StaircaseDiscrete mech(params, delta_int, r);
    pdf = [mech](double x) {
      return discrete_pmf(mech, static_cast<int64_t>(std::llround(x)));
    };
  } else {
    throw std::invalid_argument("unknown mechanism: " + opt.mech);
  }
  if (opt.format == "json") {
    json rows = json::array();
    for (double x : xs) rows.push_back(json{{"x", x}, {"pdf", pdf(x)}});
    os << rows.dump(2) << "\n";
  } else {
    os << "x,pdf\n";
    for (double x : xs) {
      os << csv_num(x) << "," << csv_num(pdf(x)) << "\n";
    }
  }
  return 0;
}

int cmd_gamma(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  const CostFunction cost = parse_cost(opt.cost, opt.table);
  const OptimizationResult result = resolve_gamma_result(opt, params, cost);
  if (opt.format == "json") {
    json doc = result_to_json(result);
    doc["epsilon"] = opt.epsilon;
    doc["delta"] = opt.delta;
    doc["cost"] = opt.cost;
    os << doc.dump(2) << "\n";
  } else {
    os << "gamma,cost,method,residual\n"
       << csv_num(result.parameter) << "," << csv_num(result.cost.value)
       << "," << OptimizationResult::method_name(result.method) << ","
       << csv_num(result.residual) << "\n";
  }
  return 0;
}

int cmd_cost(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  const CostFunction cost = parse_cost(opt.cost, opt.table);
  ExpectedCost value{};
  double gamma = 0;
  if (opt.mech == "laplace") {
    value = laplace_cost(params, cost);
  } else if (opt.mech == "staircase") {
    gamma = resolve_gamma_result(opt, params, cost).parameter;
    value = staircase_cost(params, gamma, cost);
  } else {
    throw std::invalid_argument("cost supports staircase or laplace");
  }
  const char* method = value.method == ExpectedCost::Method::kClosedForm
                           ? "closed-form"
                           : value.method == ExpectedCost::Method::kSeries
                                 ? "series"
                                 : "quadrature";
  if (opt.format == "json") {
    json doc{{"mechanism", opt.mech},    {"epsilon", opt.epsilon},
             {"delta", opt.delta},       {"cost", opt.cost},
             {"value", value.value},     {"method", method},
             {"error_bound", value.error_bound}};
    if (opt.mech == "staircase") doc["gamma"] = gamma;
    os << doc.dump(2) << "\n";
  } else {
    os << "value,method,error_bound\n"
       << csv_num(value.value) << "," << method << ","
       << csv_num(value.error_bound) << "\n";
  }
  return 0;
}

int cmd_compare(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const CostFunction cost = parse_cost(opt.cost, opt.table);
  const std::vector<double> grid = parse_range(
      opt.eps_range.empty() ? "1:10:1" : opt.eps_range);
  const auto rows = compare_mechanisms(opt.delta, cost, grid);
  os << "epsilon,v_lap,v_opt,gain,gap\n";
  for (const auto& row : rows) {
    os << csv_num(row.epsilon) << "," << csv_num(row.v_lap) << ","
       << csv_num(row.v_opt) << "," << csv_num(row.gain) << ","
       << csv_num(row.gap) << "\n";
  }
  return 0;
}

// Piecewise-linear density from a two-column (x, f) table, for auditing
// externally supplied densities.
std::function<double(double)> load_density_table(const std::string& path,
                                                 double* span) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open density table: " + path);
  auto xs = std::make_shared<std::vector<double>>();
  auto fs = std::make_shared<std::vector<double>>();
  double x, f;
  while (in >> x >> f) {
    if (!xs->empty() && x <= xs->back()) {
      throw std::invalid_argument("density abscissae must increase");
    }
    xs->push_back(x);
    fs->push_back(f);
  }
  if (xs->size() < 2) {
    throw std::invalid_argument("density table needs >= 2 rows");
  }
  *span = std::min(-xs->front(), xs->back());
  return [xs, fs](double v) -> double {
    if (v <= xs->front() || v >= xs->back()) return 0.0;
    const auto it = std::lower_bound(xs->begin(), xs->end(), v);
    const size_t hi = static_cast<size_t>(it - xs->begin());
    const size_t lo = hi - 1;
    const double t = (v - (*xs)[lo]) / ((*xs)[hi] - (*xs)[lo]);
    return (*fs)[lo] + t * ((*fs)[hi] - (*fs)[lo]);
  };
}

int cmd_audit(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  RatioAudit audit{};
  std::string mech_name = opt.mech;
  if (opt.mech == "staircase") {
    const CostFunction cost = parse_cost(opt.cost, opt.table);
    const double gamma = resolve_gamma_result(opt, params, cost).parameter;
    audit = audit_ratio_continuous(StaircaseContinuous(params, gamma));
  } else if (opt.mech == "laplace") {
    audit = audit_ratio_continuous(LaplaceMechanism(params), 4001, 81);
  } else if (opt.mech == "staircase-discrete" || opt.mech == "geometric") {
    const int delta_int = static_cast<int>(opt.delta);
    const int r = opt.r == 0 ? 1 : opt.r;
    const StaircaseDiscrete mech(params, delta_int, r);
    const int64_t span =
        static_cast<int64_t>(delta_int) * tail_periods(params.b, 1e-12);
    audit = audit_ratio_discrete(mech, span);
  } else if (opt.mech == "table") {
    double span = 0;
    const auto pdf = load_density_table(opt.table, &span);
    audit = audit_ratio_grid(pdf, opt.epsilon, opt.delta, span, 4001, 81);
  } else {
    throw std::invalid_argument("unknown mechanism: " + opt.mech);
  }
  json doc{{"mechanism", mech_name},
           {"epsilon", opt.epsilon},
           {"delta", opt.delta},
           {"max_ratio", audit.max_ratio},
           {"e_epsilon", std::exp(opt.epsilon)},
           {"slack", audit.slack},
           {"arg_x", audit.arg_x},
           {"arg_shift", audit.arg_shift},
           {"pairs_checked", audit.pairs_checked},
           {"pass", audit.pass}};
  os << doc.dump(2) << "\n";
  return audit.pass ? 0 : kExitAuditFailure;
}

int cmd_tradeoff(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  TradeoffCurve curve;
  const double shift = opt.shift == 0.0 && opt.mech == "laplace"
                           ? opt.delta
                           : opt.shift;
  if (opt.mech == "laplace" && shift == opt.delta) {
    curve = laplace_tradeoff(params, opt.n_thresholds);
  } else if (opt.mech == "laplace") {
    curve = numeric_tradeoff(LaplaceMechanism(params), shift,
                             opt.n_thresholds);
  } else if (opt.mech == "staircase") {
    const CostFunction cost = parse_cost(opt.cost, opt.table);
    const double gamma = resolve_gamma_result(opt, params, cost).parameter;
    curve = numeric_tradeoff(StaircaseContinuous(params, gamma), opt.shift,
                             opt.n_thresholds);
  } else {
    throw std::invalid_argument("tradeoff supports staircase or laplace");
  }
  os << "p_fa,p_md,mechanism,epsilon,shift\n";
  for (const auto& p : curve.points) {
    os << csv_num(p.p_fa) << "," << csv_num(p.p_md) << "," << curve.mechanism
       << "," << csv_num(curve.epsilon) << "," << csv_num(curve.shift)
       << "\n";
  }
  return 0;
}

int cmd_discrete_opt(const CommonOptions& opt) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const PrivacyParams params(opt.epsilon, opt.delta);
  const int delta_int = static_cast<int>(opt.delta);
  if (static_cast<double>(delta_int) != opt.delta || delta_int < 1) {
    throw std::invalid_argument("discrete-opt needs integer delta >= 1");
  }
  const CostFunction cost = parse_cost(opt.cost, opt.table);
  const OptimizationResult result = discrete_r_opt(params, delta_int, cost);
  if (opt.format == "json") {
    json doc{{"r", static_cast<int>(result.parameter)},
             {"cost", result.cost.value},
             {"error_bound", result.cost.error_bound},
             {"method", OptimizationResult::method_name(result.method)},
             {"epsilon", opt.epsilon},
             {"delta", delta_int}};
    os << doc.dump(2) << "\n";
  } else {
    os << "r,cost\n"
       << static_cast<int>(result.parameter) << ","
       << csv_num(result.cost.value) << "\n";
  }
  return 0;
}

int cmd_abstract(const CommonOptions& opt, const std::string& scores_path,
                 double sensitivity, double gamma) {
  std::ofstream file;
  std::ostream& os = open_output(opt.out, file);
  const CandidateScoring scoring = load_scoring_csv(scores_path, sensitivity);
  const std::vector<double> probs =
      abstract_distribution(scoring, opt.epsilon, gamma);
  if (opt.n > 1) {
    Xoshiro256ss rng = Xoshiro256ss::for_stream(opt.seed, 0);
    for (int64_t i = 0; i < opt.n; ++i) {
      os << scoring.ids[abstract_sample(scoring, opt.epsilon, gamma, rng)]
         << "\n";
    }
    return 0;
  }
  if (opt.format == "json") {
    json doc = json::array();
    for (size_t i = 0; i < probs.size(); ++i) {
      doc.push_back(json{{"candidate", scoring.ids[i]},
                         {"score", scoring.scores[i]},
                         {"probability", probs[i]}});
    }
    os << doc.dump(2) << "\n";
  } else {
    os << "candidate,score,probability\n";
    for (size_t i = 0; i < probs.size(); ++i) {
      os << scoring.ids[i] << "," << csv_num(scoring.scores[i]) << ","
         << csv_num(probs[i]) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staircase mechanism toolkit: optimal additive noise for "
               "epsilon-differential privacy"};
  app.require_subcommand(1);
  CommonOptions opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--epsilon", opt.epsilon, "privacy parameter epsilon");
    sub->add_option("--delta", opt.delta, "query sensitivity");
    sub->add_option("--gamma", opt.gamma,
                    "staircase gamma: number, 'auto' or 'heuristic'");
    sub->add_option("--cost", opt.cost,
                    "cost: abs | square | moment:m | table:path");
    sub->add_option("--mech", opt.mech,
                    "mechanism: staircase | laplace | staircase-discrete | "
                    "geometric");
    sub->add_option("--table", opt.table, "tabulated cost/density path");
    sub->add_option("-n", opt.n, "sample count");
    sub->add_option("--seed", opt.seed, "64-bit seed");
    sub->add_option("--format", opt.format, "csv | json");
    sub->add_option("--out", opt.out, "output path (default stdout)");
    sub->add_option("--r", opt.r, "discrete step break (0 = optimize)");
    sub->add_option("--shift", opt.shift, "hypothesis shift for tradeoff");
    sub->add_option("--eps-range", opt.eps_range, "epsilon sweep lo:hi:step");
    sub->add_option("--n-thresholds", opt.n_thresholds,
                    "tradeoff sweep resolution");
  };

  CLI::App* sample = app.add_subcommand("sample", "draw noise samples");
  add_common(sample);

  CLI::App* pdf = app.add_subcommand("pdf", "evaluate density/pmf");
  std::vector<double> xs;
  std::string x_grid;
  add_common(pdf);
  pdf->add_option("--x", xs, "evaluation points");
  pdf->add_option("--grid", x_grid, "evaluation grid lo:hi:step");

  CLI::App* gamma_cmd = app.add_subcommand("gamma", "optimal gamma");
  add_common(gamma_cmd);

  CLI::App* cost_cmd = app.add_subcommand("cost", "expected cost");
  add_common(cost_cmd);

  CLI::App* compare = app.add_subcommand("compare", "Laplace vs staircase");
  add_common(compare);

  CLI::App* audit = app.add_subcommand("audit", "epsilon-DP ratio audit");
  add_common(audit);

  CLI::App* tradeoff = app.add_subcommand("tradeoff", "(P_FA, P_MD) curve");
  add_common(tradeoff);

  CLI::App* discrete_opt =
      app.add_subcommand("discrete-opt", "optimal discrete step break");
  add_common(discrete_opt);

  CLI::App* abstract_cmd =
      app.add_subcommand("abstract", "candidate selection probabilities");
  std::string scores_path;
  double sensitivity = 1.0;
  double abstract_gamma = 0.5;
  add_common(abstract_cmd);
  abstract_cmd->add_option("--scores", scores_path, "candidate_id,score csv")
      ->required();
  abstract_cmd->add_option("--sensitivity", sensitivity, "score sensitivity");
  abstract_cmd->add_option("--abstract-gamma", abstract_gamma,
                           "gamma for the staircase weight");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) return cmd_sample(opt);
    if (pdf->parsed()) {
      if (!x_grid.empty()) {
        for (double v : parse_range(x_grid)) xs.push_back(v);
      }
      if (xs.empty()) throw std::invalid_argument("pdf needs --x or --grid");
      return cmd_pdf(opt, xs);
    }
    if (gamma_cmd->parsed()) return cmd_gamma(opt);
    if (cost_cmd->parsed()) return cmd_cost(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (audit->parsed()) return cmd_audit(opt);
    if (tradeoff->parsed()) return cmd_tradeoff(opt);
    if (discrete_opt->parsed()) return cmd_discrete_opt(opt);
    if (abstract_cmd->parsed()) {
      return cmd_abstract(opt, scores_path, sensitivity, abstract_gamma);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
