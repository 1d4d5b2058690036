#include "rkl/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rkl/dini.hpp"
#include "rkl/levelset.hpp"
#include "rkl/limits.hpp"
#include "rkl/operators.hpp"
#include "rkl/rng.hpp"

namespace rkl {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

// "name(a, b)" -> name and numeric args
std::pair<std::string, std::vector<double>> split_call(const std::string& spec, const std::string& path) {
  const auto open = spec.find('(');
  std::string name = trim(spec.substr(0, open));
  std::vector<double> args;
  if (open == std::string::npos) return {name, args};
  const auto close = spec.rfind(')');
  if (close == std::string::npos || close < open || !trim(spec.substr(close + 1)).empty())
    throw SchemaError(path, "unbalanced parentheses in '" + spec + "'");
  std::stringstream ss(spec.substr(open + 1, close - open - 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') throw SchemaError(path, "bad number '" + tok + "' in '" + spec + "'");
    args.push_back(v);
  }
  return {name, args};
}

double num(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError(path + "." + key, "missing");
  if (!j[key].is_number()) throw SchemaError(path + "." + key, "must be a number");
  return j[key].get<double>();
}

void need(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw SchemaError(path, msg);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv(const std::string& comment, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& cols) {
  std::ostringstream os;
  os << "# " << comment << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << fmt(cols[c][r]);
    os << "\n";
  }
  return os.str();
}

}  // namespace

HomogeneousKernel kernel_from_spec(const json& spec, int n) {
  std::string name;
  std::vector<double> args;
  json obj;
  if (spec.is_string()) {
    std::tie(name, args) = split_call(spec.get<std::string>(), "kernel");
  } else if (spec.is_object()) {
    need(spec.contains("name") && spec["name"].is_string(), "kernel.name", "missing kernel name");
    name = spec["name"].get<std::string>();
    obj = spec;
  } else {
    throw SchemaError("kernel", "must be a catalog name or an object");
  }
  auto only2 = [&] { need(n == 2, "kernel", "'" + name + "' is defined for dimension 2 only"); };
  try {
    if (name == "example22") {
      only2();
      need(args.empty(), "kernel", "example22 takes no parameters");
      return example22_kernel();
    }
    if (name == "cosine") {
      need(args.empty(), "kernel", "cosine takes no parameters");
      return cosine_kernel(n);
    }
    if (name == "odd_harmonic") {
      only2();
      double k = obj.is_object() ? num(obj, "k", "kernel") : (args.size() == 1 ? args[0] : NAN);
      need(std::isfinite(k) && k == std::floor(k), "kernel", "odd_harmonic needs an integer order k");
      return odd_harmonic_kernel(static_cast<int>(k));
    }
    if (name == "constant") {
      double c = obj.is_object() ? num(obj, "c", "kernel") : (args.size() == 1 ? args[0] : NAN);
      need(std::isfinite(c), "kernel", "constant needs a value c");
      return constant_kernel(n, c);
    }
    if (name == "table") {
      only2();
      need(obj.is_object() && obj.contains("values") && obj["values"].is_array(), "kernel.values",
           "table needs an array of values");
      std::vector<double> v;
      for (const auto& x : obj["values"]) {
        need(x.is_number(), "kernel.values", "values must be numbers");
        v.push_back(x.get<double>());
      }
      std::string label = obj.contains("label") && obj["label"].is_string() ? obj["label"].get<std::string>() : "table";
      return table_kernel(v, label);
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError("kernel", e.what());
  }
  throw SchemaError("kernel", "unknown kernel '" + name + "'");
}

DensityMeasure measure_from_spec(const json& spec, int n) {
  std::string name;
  std::vector<double> a;
  if (spec.is_string()) {
    std::tie(name, a) = split_call(spec.get<std::string>(), "measure");
  } else if (spec.is_object()) {
    need(spec.contains("name") && spec["name"].is_string(), "measure.name", "missing measure name");
    name = spec["name"].get<std::string>();
    if (name == "disk_bump")
      a = {num(spec, "radius", "measure"), spec.contains("mass") ? num(spec, "mass", "measure") : 1.0};
    else if (name == "gaussian")
      a = {num(spec, "sigma", "measure"), num(spec, "cutoff", "measure")};
    else if (name == "dipole")
      a = {num(spec, "offset", "measure"), num(spec, "radius", "measure"), num(spec, "mass", "measure")};
  } else {
    throw SchemaError("measure", "must be a catalog name or an object");
  }
  try {
    if (name == "disk_bump") {
      need(a.size() == 2, "measure", "disk_bump(radius, mass)");
      return disk_bump(n, a[0], a[1]);
    }
    if (name == "gaussian") {
      need(a.size() == 2, "measure", "gaussian(sigma, cutoff)");
      return gaussian(n, a[0], a[1]);
    }
    if (name == "dipole") {
      need(a.size() == 3, "measure", "dipole(offset, radius, mass)");
      return dipole(n, a[0], a[1], a[2]);
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError("measure", e.what());
  }
  throw SchemaError("measure", "unknown measure '" + name + "'");
}

namespace {

std::vector<double> parse_grid(const json& j, const std::string& path, bool decreasing) {
  std::vector<double> g;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      need(j[i].is_number(), path + "[" + std::to_string(i) + "]", "must be a number");
      g.push_back(j[i].get<double>());
    }
  } else if (j.is_object()) {
    const double lo = num(j, "min", path), hi = num(j, "max", path);
    need(lo > 0.0 && hi > lo, path, "need 0 < min < max");
    if (j.contains("count")) {
      need(j["count"].is_number_integer() && j["count"].get<int>() >= 2, path + ".count", "must be an integer >= 2");
      g = log_grid(lo, hi, j["count"].get<int>());
      if (decreasing) std::reverse(g.begin(), g.end());
    } else {
      need(decreasing, path + ".count", "missing");
      g = default_lambda_grid(hi, lo);
    }
  } else {
    throw SchemaError(path, "must be an array or {min, max, count}");
  }
  need(!g.empty(), path, "grid is empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    need(std::isfinite(g[i]) && g[i] > 0.0, path, "grid values must be positive");
    if (i > 0) need(decreasing ? g[i] < g[i - 1] : g[i] > g[i - 1], path,
                    decreasing ? "grid must be strictly decreasing" : "grid must be strictly increasing");
  }
  return g;
}

const std::set<std::string> kExperiments{"dini", "levelset", "sweep", "identity-checks", "weak-type"};
const std::set<std::string> kKeys{"schema",   "experiment", "kernel",          "dimension",          "alpha",
                                  "measure",  "lambdas",    "deltas",          "budget",             "rotation_budget",
                                  "translation_budget", "pairs", "ratio_window", "seed", "output_dir", "comment"};

int get_int(const json& j, const std::string& key, int lo, int hi) {
  need(j[key].is_number_integer(), key, "must be an integer");
  auto v = j[key].get<long long>();
  need(v >= lo && v <= hi, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  need(j.is_object(), "$", "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) need(kKeys.count(it.key()) > 0, it.key(), "unknown field");
  need(j.contains("schema"), "schema", "missing");
  need(j["schema"].is_number_integer() && j["schema"].get<int>() == kSchemaVersion, "schema",
       "unsupported schema version (expected 1)");
  ExperimentConfig c;
  need(j.contains("experiment") && j["experiment"].is_string(), "experiment", "missing or not a string");
  c.experiment = j["experiment"].get<std::string>();
  need(kExperiments.count(c.experiment) > 0, "experiment",
       "must be one of dini, levelset, sweep, identity-checks, weak-type");
  if (j.contains("dimension")) c.dimension = get_int(j, "dimension", 2, kMaxDim);
  need(j.contains("kernel"), "kernel", "missing");
  c.kernel = j["kernel"];
  kernel_from_spec(c.kernel, c.dimension);
  if (j.contains("alpha")) {
    need(j["alpha"].is_number(), "alpha", "must be a number");
    c.alpha = j["alpha"].get<double>();
  }
  need(c.alpha >= 0.0 && c.alpha < c.dimension, "alpha", "must lie in [0, dimension)");
  const bool uses_measure = c.experiment != "dini";
  if (uses_measure) {
    need(j.contains("measure"), "measure", "missing");
    c.measure = j["measure"];
    measure_from_spec(c.measure, c.dimension);
  }
  const bool uses_lambdas = c.experiment == "levelset" || c.experiment == "sweep" || c.experiment == "weak-type";
  if (uses_lambdas) {
    need(j.contains("lambdas"), "lambdas", "missing");
    c.lambdas = parse_grid(j["lambdas"], "lambdas", true);
  }
  if (c.experiment == "weak-type")
    need(c.lambdas.front() / c.lambdas.back() >= 100.0 * (1 - 1e-12), "lambdas", "must cover at least two decades");
  if (c.experiment == "dini") {
    c.deltas = j.contains("deltas") ? parse_grid(j["deltas"], "deltas", false) : log_grid(1e-4, 1.0, 33);
    need(c.deltas.size() >= 8, "deltas", "need at least 8 grid points");
    need(std::abs(c.deltas.back() - 1.0) <= 1e-12, "deltas", "grid must end at 1");
  }
  if (j.contains("budget")) {
    need(j["budget"].is_number_integer() && j["budget"].get<long long>() >= 1, "budget", "must be a positive integer");
    c.budget = j["budget"].get<long long>();
  }
  if (j.contains("rotation_budget")) c.rotation_budget = get_int(j, "rotation_budget", 1, 100000);
  if (j.contains("translation_budget")) c.translation_budget = get_int(j, "translation_budget", 1, 100000);
  if (j.contains("pairs")) c.pairs = get_int(j, "pairs", 1, 100000);
  if (j.contains("ratio_window")) {
    const json& w = j["ratio_window"];
    need(w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number(), "ratio_window",
         "must be [lo, hi]");
    c.ratio_window = {w[0].get<double>(), w[1].get<double>()};
    need(c.ratio_window[0] > 0 && c.ratio_window[1] > c.ratio_window[0], "ratio_window", "need 0 < lo < hi");
  }
  if (j.contains("seed")) {
    need(j["seed"].is_number_unsigned(), "seed", "must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    need(j["output_dir"].is_string(), "output_dir", "must be a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json ExperimentConfig::to_json() const {
  json j{{"schema", kSchemaVersion}, {"experiment", experiment}, {"kernel", kernel},     {"dimension", dimension},
         {"alpha", alpha},           {"budget", budget},         {"seed", seed},         {"output_dir", output_dir}};
  if (!measure.is_null()) j["measure"] = measure;
  if (!lambdas.empty()) j["lambdas"] = lambdas;
  if (experiment == "dini") {
    j["deltas"] = deltas;
    j["rotation_budget"] = rotation_budget;
    j["translation_budget"] = translation_budget;
    j["ratio_window"] = ratio_window;
  }
  if (experiment == "identity-checks") j["pairs"] = pairs;
  return j;
}

namespace {

json dini_json(const DiniResult& d) {
  return {{"value", d.value}, {"body", d.body}, {"tail", d.tail}, {"beta", d.beta}, {"coeff", d.coeff},
          {"tail_diverging", d.tail_diverging}};
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json run_dini(const ExperimentConfig& c, const HomogeneousKernel& k, std::vector<OutputFile>& files,
              std::ostringstream& sum) {
  const ModulusCurve rot = rotation_curve(k, c.deltas, c.rotation_budget, splitmix64(c.seed));
  const ModulusCurve tr = translation_curve(k, c.deltas, c.translation_budget, splitmix64(c.seed + 1));
  std::vector<double> ratio;
  for (std::size_t i = 0; i < c.deltas.size(); ++i)
    ratio.push_back(rot.values[i] > 0 ? tr.values[i] / rot.values[i] : std::nan(""));
  const EquivalenceReport eq = modulus_equivalence(rot, tr, c.ratio_window[0], c.ratio_window[1]);
  const DiniResult dr = dini_integral(rot, c.alpha, c.deltas.front());
  const DiniResult dt = dini_integral(tr, c.alpha, c.deltas.front());
  json reg_d = json::array(), reg_v = json::array();
  for (double d : c.deltas)
    if (d < 1.0 / k.dim()) {
      reg_d.push_back(d);
      reg_v.push_back(regularity_ratio(k, d, c.translation_budget));
    }
  json res{{"deltas", c.deltas},
           {"omega1", rot.values},
           {"omega1_tilde", tr.values},
           {"ratio", ratio},
           {"dini", {{"alpha", c.alpha}, {"rotation", dini_json(dr)}, {"translation", dini_json(dt)}}},
           {"equivalence",
            {{"window", c.ratio_window},
             {"ratio_min", eq.ratio_min},
             {"ratio_max", eq.ratio_max},
             {"C", eq.c},
             {"rotation_dini_finite", eq.rotation_dini_finite},
             {"translation_dini_finite", eq.translation_dini_finite},
             {"verdicts_agree", eq.verdicts_agree}}},
           {"regularity", {{"deltas", reg_d}, {"ratios", reg_v}}}};
  if (k.label() == "example22") {
    std::vector<double> g;
    double worst = 0.0;
    for (std::size_t i = 0; i < c.deltas.size(); ++i) {
      g.push_back(example22_g(extreme_angle(c.deltas[i])));
      worst = std::max(worst, std::abs(rot.values[i] - g.back()) / g.back());
    }
    res["closed_form"] = g;
    res["closed_form_max_rel_err"] = worst;
    sum << "closed-form modulus: max relative error " << fmt(worst) << "\n";
  }
  files.push_back({"rotation.csv", rot.to_csv()});
  files.push_back({"translation.csv", tr.to_csv()});
  files.push_back({"dini.csv", csv("delta; omega1 = rotation L1 modulus; omega1_tilde = translation modulus; "
                                   "ratio = omega1_tilde / omega1",
                                   {"delta", "omega1", "omega1_tilde", "ratio"}, {c.deltas, rot.values, tr.values, ratio})});
  sum << "rotation Dini integral: " << fmt(dr.value) << (dr.tail_diverging ? " (tail diverges)" : "") << "\n";
  sum << "translation Dini integral: " << fmt(dt.value) << (dt.tail_diverging ? " (tail diverges)" : "") << "\n";
  sum << "modulus ratio on [" << fmt(c.ratio_window[0]) << ", " << fmt(c.ratio_window[1]) << "]: [" << fmt(eq.ratio_min)
      << ", " << fmt(eq.ratio_max) << "], verdicts agree: " << (eq.verdicts_agree ? "yes" : "no") << "\n";
  return res;
}

json run_levelset(const ExperimentConfig& c, const HomogeneousKernel& k, const DensityMeasure& mu,
                  const LevelSetOptions& opt, std::vector<OutputFile>& files, std::ostringstream& sum) {
  json est = json::array(), pure = json::array();
  std::vector<double> mv, se, nf, ff, lo, hi;
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    LevelSetEstimate e = estimate_level_measure(k, c.alpha, mu, c.lambdas[i], c.budget, splitmix64(c.seed + i), opt);
    est.push_back(to_json(e));
    try {
      pure.push_back(pure_kernel_level_measure(k, c.alpha, c.lambdas[i], mu.total_mass()));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::divergence) throw;
      pure.push_back(nullptr);
    }
    mv.push_back(e.measure_value);
    se.push_back(e.stderr_);
    nf.push_back(e.near_field_part);
    ff.push_back(e.far_field_part);
    lo.push_back(e.measure_lower);
    hi.push_back(e.measure_upper);
    sum << "lambda " << fmt(c.lambdas[i]) << ": measure " << fmt(e.measure_value) << " +- " << fmt(e.stderr_) << "\n";
  }
  files.push_back({"levelset.csv", csv("level-set measure estimates; low/high include the far-field sandwich",
                                       {"lambda", "measure", "stderr", "near", "far", "low", "high"},
                                       {c.lambdas, mv, se, nf, ff, lo, hi})});
  return {{"estimates", est}, {"pure_kernel_level_measure", pure}};
}

json run_sweep(const ExperimentConfig& c, const HomogeneousKernel& k, const DensityMeasure& mu,
               const LevelSetOptions& opt, std::vector<OutputFile>& files, std::ostringstream& sum) {
  SweepReport rep = lambda_sweep(k, c.alpha, mu, c.lambdas, c.budget, c.seed, opt);
  files.push_back({"sweep.csv", sweep_csv(rep)});
  json res = to_json(rep);
  res.erase("config");
  res.erase("type");
  sum << "extrapolated limit " << fmt(rep.extrapolated_limit) << " +- " << fmt(rep.extrapolation_stderr)
      << ", target " << fmt(rep.target) << ", relative gap " << fmt(rep.relative_gap)
      << (rep.low_confidence ? " (low confidence)" : "") << "\n";
  return res;
}

json run_weak(const ExperimentConfig& c, const HomogeneousKernel& k, const DensityMeasure& mu,
              const LevelSetOptions& opt, std::vector<OutputFile>& files, std::ostringstream& sum) {
  WeakTypeReport rep = weak_type_constant(k, mu, c.lambdas, c.budget, c.seed, opt);
  files.push_back({"weak_type.csv", csv("lambda * m({|T mu| > lambda}) / |mu|(R^n)", {"lambda", "ratio", "stderr"},
                                        {rep.lambdas, rep.ratios, rep.ratio_stderr})});
  json res = to_json(rep);
  res.erase("type");
  sum << "sup ratio " << fmt(rep.sup) << " at lambda " << fmt(rep.argmax_lambda) << "; reference "
      << fmt(rep.reference) << " (kappa " << fmt(rep.kappa) << ")\n";
  return res;
}

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

json run_identities(const ExperimentConfig& c, const HomogeneousKernel& k, const DensityMeasure& mu,
                    std::vector<OutputFile>& files, std::ostringstream& sum) {
  const int n = c.dimension;
  std::vector<Check> checks;
  Rng rng(c.seed);
  const double sR = mu.support_radius();
  // dilation identities at random (t, x)
  const bool mean_zero = mean_zero_defect(k) <= 1e-6;
  const double frac_alpha = c.alpha > 0.0 ? c.alpha : 1.0;
  double worst0 = 0.0, worst1 = 0.0;
  int failures0 = 0;
  for (int i = 0; i < c.pairs; ++i) {
    const double t = std::exp(std::log(0.3) + rng.uniform() * std::log(3.0 / 0.3));
    const double r = t * sR * (0.1 + 4.9 * rng.uniform());
    const Vec x = rng.unit_vector(n) * r;
    if (mean_zero) {
      try {
        worst0 = std::max(worst0, dilation_residual(k, 0.0, mu, t, x).relative);
      } catch (const NoConvergence&) {
        ++failures0;
      }
    }
    worst1 = std::max(worst1, dilation_residual(k, frac_alpha, mu, t, x).relative);
  }
  if (mean_zero) checks.push_back({"dilation_singular", worst0, 1e-6, worst0 < 1e-6 && failures0 == 0});
  checks.push_back({"dilation_fractional", worst1, 1e-6, worst1 < 1e-6});
  // |mu_t|(E) = |mu|(E / t) on random balls
  double worst_s = 0.0;
  for (double t : {0.3, 1.0, 2.5}) {
    const DensityMeasure mt = scale(mu, t);
    for (int i = 0; i < 5; ++i) {
      const Vec cen = rng.unit_vector(n) * (sR * 1.5 * rng.uniform());
      const double rad = sR * (0.2 + 1.3 * rng.uniform());
      const double a = mt.integrate_ball(Ball{cen * t, rad * t, true}, true);
      const double b = mu.integrate_ball(Ball{cen, rad, true}, true);
      worst_s = std::max(worst_s, std::abs(a - b));
    }
  }
  const double tv = mu.total_variation();
  checks.push_back({"scaled_measure", worst_s, 1e-8 * std::max(tv, 1.0), worst_s <= 1e-8 * std::max(tv, 1.0)});
  // radial distribution inversion
  const double a_half = radius_for_mass(gaussian(2, 1.0, 8.0), 0.5);
  const double err_g = std::abs(a_half - std::sqrt(2.0 * std::log(2.0)));
  checks.push_back({"gaussian_half_mass_radius", err_g, 1e-10, err_g <= 1e-10});
  if (tv > 0.0) {
    const double a = radius_for_mass(mu, 0.5 * tv);
    const double gap = std::abs(mu.radial_cdf(a) - 0.5 * tv);
    checks.push_back({"half_mass_radius", gap, 1e-10 * tv, gap <= 1e-10 * tv});
  }
  // lambda^r m({|Omega| |x|^{-(n-alpha)} > lambda}) is constant in lambda
  try {
    const double r = n / (n - c.alpha);
    double mn = INFINITY, mx = 0.0;
    for (double lam : {1e-3, 1e-2, 1e-1, 1.0}) {
      double v = std::pow(lam, r) * pure_kernel_level_measure(k, c.alpha, lam, 1.0);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double var = mx > 0 ? (mx - mn) / mx : 0.0;
    checks.push_back({"pure_kernel_scaling", var, 1e-10, var < 1e-10});
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::divergence) throw;
  }
  json arr = json::array();
  std::vector<std::string> rows;
  bool all = true;
  for (const Check& ch : checks) {
    arr.push_back({{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"pass", ch.pass}});
    all = all && ch.pass;
    sum << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << fmt(ch.value) << " (tolerance " << fmt(ch.tolerance)
        << ")\n";
  }
  std::ostringstream os;
  os << "# identity checks; value is the worst residual\nname,value,tolerance,pass\n";
  for (const Check& ch : checks) os << ch.name << "," << fmt(ch.value) << "," << fmt(ch.tolerance) << "," << ch.pass << "\n";
  files.push_back({"identities.csv", os.str()});
  return {{"checks", arr}, {"all_passed", all}, {"fractional_alpha", frac_alpha}};
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& c, int threads) {
  RunOutput out;
  const HomogeneousKernel k = kernel_from_spec(c.kernel, c.dimension);
  std::ostringstream sum;
  sum << c.experiment << " | kernel " << k.label() << " | n = " << c.dimension << " | alpha = " << fmt(c.alpha)
      << " | seed " << c.seed << "\n";
  LevelSetOptions opt;
  opt.threads = threads;
  std::vector<OutputFile> files;
  json results;
  if (c.experiment == "dini") {
    results = run_dini(c, k, files, sum);
  } else {
    const DensityMeasure mu = measure_from_spec(c.measure, c.dimension);
    if (c.experiment == "levelset") results = run_levelset(c, k, mu, opt, files, sum);
    if (c.experiment == "sweep") results = run_sweep(c, k, mu, opt, files, sum);
    if (c.experiment == "weak-type") results = run_weak(c, k, mu, opt, files, sum);
    if (c.experiment == "identity-checks") results = run_identities(c, k, mu, files, sum);
  }
  out.report = {{"schema", kSchemaVersion}, {"version", kVersion}, {"type", c.experiment}, {"config", c.to_json()},
                {"seed", c.seed},           {"results", results},  {"timestamp", timestamp()}};
  out.files.push_back({"report.json", out.report.dump(2) + "\n"});
  for (auto& f : files) out.files.push_back(std::move(f));
  out.summary = sum.str();
  return out;
}

namespace {

std::vector<double> column(const json& res, const std::string& key) {
  need(res.contains(key) && res[key].is_array(), "results." + key, "missing array");
  std::vector<double> v;
  for (const auto& x : res[key]) v.push_back(x.is_number() ? x.get<double>() : std::nan(""));
  return v;
}

}  // namespace

std::vector<OutputFile> plot_files(const json& report) {
  need(report.is_object() && !report.empty(), "$", "report is empty");
  need(report.contains("type") && report["type"].is_string(), "type", "missing report type");
  need(report.contains("results") && report["results"].is_object(), "results", "missing results");
  const std::string type = report["type"].get<std::string>();
  const json& res = report["results"];
  if (type == "sweep") {
    auto lam = column(res, "lambdas"), p = column(res, "products"), e = column(res, "product_stderr");
    auto lo = column(res, "product_low"), hi = column(res, "product_high");
    return {{"sweep.csv", csv("lambda; product = lambda^r m({|T mu| > lambda}); err = Monte Carlo standard error; "
                              "low/high = error bar including the far-field sandwich",
                              {"lambda", "product", "err", "low", "high"}, {lam, p, e, lo, hi})}};
  }
  if (type == "dini") {
    auto d = column(res, "deltas"), w = column(res, "omega1"), wt = column(res, "omega1_tilde");
    auto r = column(res, "ratio");
    return {{"dini.csv", csv("delta; omega1 = rotation L1 modulus; omega1_tilde = translation modulus; "
                             "ratio = omega1_tilde / omega1",
                             {"delta", "omega1", "omega1_tilde", "ratio"}, {d, w, wt, r})}};
  }
  if (type == "levelset") {
    need(res.contains("estimates") && res["estimates"].is_array(), "results.estimates", "missing array");
    std::vector<double> lam, m, se;
    for (const auto& e : res["estimates"]) {
      lam.push_back(e.value("lambda", std::nan("")));
      m.push_back(e.value("measure_value", std::nan("")));
      se.push_back(e.value("stderr", std::nan("")));
    }
    return {{"levelset.csv", csv("lambda; measure = estimated m({|T mu| > lambda}); err = standard error",
                                 {"lambda", "measure", "err"}, {lam, m, se})}};
  }
  if (type == "weak-type") {
    auto lam = column(res, "lambdas"), r = column(res, "ratios"), e = column(res, "ratio_stderr");
    return {{"weak_type.csv", csv("lambda; ratio = lambda m({|T mu| > lambda}) / |mu|(R^n); err = standard error",
                                  {"lambda", "ratio", "err"}, {lam, r, e})}};
  }
  if (type == "identity-checks") {
    need(res.contains("checks") && res["checks"].is_array(), "results.checks", "missing array");
    std::ostringstream os;
    os << "# identity checks; value is the worst residual\nname,value,tolerance,pass\n";
    for (const auto& ch : res["checks"])
      os << ch.value("name", std::string("?")) << "," << fmt(ch.value("value", std::nan(""))) << ","
         << fmt(ch.value("tolerance", std::nan(""))) << "," << ch.value("pass", false) << "\n";
    return {{"identities.csv", os.str()}};
  }
  throw SchemaError("type", "unknown report type '" + type + "'");
}

void write_files_atomically(const std::string& dir, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const OutputFile& f : files) {
    const fs::path target = fs::path(dir) / f.name;
    const fs::path tmp = fs::path(dir) / ("." + f.name + ".tmp");
    {
      std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
      if (!o) fail(ErrorKind::invalid_argument, "cannot write '" + tmp.string() + "'");
      o << f.content;
      o.flush();
      if (!o) fail(ErrorKind::invalid_argument, "write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
  }
}

}  // namespace rkl
