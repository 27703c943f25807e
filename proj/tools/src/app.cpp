#include "ellvne/cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "ellvne/cli/io.hpp"
#include "ellvne/cli/verify.hpp"
#include "ellvne/derivation.hpp"
#include "ellvne/errors.hpp"
#include "ellvne/scenarios.hpp"
#include "json.hpp"

namespace ellvne::cli {

namespace {

using nlohmann::json;

// Parameter flags shared by every scenario; each scenario accepts a subset.
const std::vector<std::string> kParameterFlags{"tau", "delta", "kappa", "k",     "alpha", "phi",
                                               "mu",  "lambda", "omega", "b", "nu"};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> scenario;
  std::map<std::string, std::optional<double>> params;
  std::optional<std::string> t;
  std::optional<double> periods;
  std::optional<long long> samples;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<std::string> format;
  std::optional<std::string> output;
  std::optional<std::string> operators;
  std::optional<int> case_number;
  std::optional<std::string> scan_param;
  std::optional<std::string> scan_values;
  std::optional<int> jobs;
};

bool looks_negative_value(const std::string& s) {
  if (s.size() < 2 || s[0] != '-') return false;
  if (!(std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '.')) return false;
  return s.find_first_not_of("0123456789.eE+-:") == std::string::npos;
}

template <typename T>
void fill_from(std::optional<T>& slot, const json& cfg, const char* key) {
  if (slot || !cfg.contains(key)) return;
  try {
    slot = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

void merge_config(Options& o) {
  if (!o.config) return;
  std::ifstream in(*o.config);
  if (!in) throw UsageError("cannot open config file '" + *o.config + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  static const std::vector<std::string> known{"scenario", "t",      "periods",   "samples", "rtol",
                                              "atol",     "format", "output",    "operators", "case",
                                              "param",    "values", "jobs",      "parameters"};
  for (const auto& [key, _] : cfg.items()) {
    const bool ok = std::find(known.begin(), known.end(), key) != known.end() ||
                    std::find(kParameterFlags.begin(), kParameterFlags.end(), key) != kParameterFlags.end();
    if (!ok) throw UsageError("unknown config key '" + key + "'");
  }
  fill_from(o.scenario, cfg, "scenario");
  if (!o.t && cfg.contains("t")) {
    const json& t = cfg["t"];
    if (t.is_array() && t.size() == 2) {
      o.t = format_double(t[0].get<double>()) + ":" + format_double(t[1].get<double>());
    } else if (t.is_string()) {
      o.t = t.get<std::string>();
    } else {
      throw UsageError("config key 't' must be \"start:end\" or [start, end]");
    }
  }
  fill_from(o.periods, cfg, "periods");
  fill_from(o.samples, cfg, "samples");
  fill_from(o.rtol, cfg, "rtol");
  fill_from(o.atol, cfg, "atol");
  fill_from(o.format, cfg, "format");
  fill_from(o.output, cfg, "output");
  fill_from(o.operators, cfg, "operators");
  fill_from(o.case_number, cfg, "case");
  fill_from(o.scan_param, cfg, "param");
  fill_from(o.jobs, cfg, "jobs");
  if (!o.scan_values && cfg.contains("values")) {
    const json& v = cfg["values"];
    if (v.is_array()) {
      std::string joined;
      for (const auto& x : v) joined += (joined.empty() ? "" : ",") + format_double(x.get<double>());
      o.scan_values = joined;
    } else {
      fill_from(o.scan_values, cfg, "values");
    }
  }
  const json* params = cfg.contains("parameters") ? &cfg["parameters"] : nullptr;
  for (const auto& name : kParameterFlags) {
    auto& slot = o.params[name];
    fill_from(slot, cfg, name.c_str());
    if (params != nullptr) fill_from(slot, *params, name.c_str());
  }
}

IntegratorControl integrator_control(const Options& o) {
  IntegratorControl c;
  if (const char* env = std::getenv("ELLIPT_VNE_TOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw UsageError(std::string("ELLIPT_VNE_TOL must be a positive number, got '") + env + "'");
    }
    c.rtol = v;
    c.atol = v * 1e-2;
  }
  if (o.rtol) c.rtol = *o.rtol;
  if (o.atol) c.atol = *o.atol;
  if (!(c.rtol > 0.0) || !(c.atol > 0.0)) throw UsageError("tolerances must be positive");
  return c;
}

ScenarioSpec scenario_spec(const Options& o) {
  if (!o.scenario) throw UsageError("--scenario is required");
  ScenarioKind kind;
  try {
    kind = scenario_kind_from_string(*o.scenario);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto& accepted = scenario_parameter_names(kind);
  std::map<std::string, double> overrides;
  for (const auto& [name, value] : o.params) {
    if (!value) continue;
    if (std::find(accepted.begin(), accepted.end(), name) == accepted.end()) {
      throw UsageError("scenario " + *o.scenario + " does not take --" + name);
    }
    overrides[name] = *value;
  }
  return ScenarioSpec::with_defaults(kind, overrides);
}

std::pair<double, double> resolve_span(const Options& o, const ScenarioInstance& inst) {
  std::pair<double, double> span = inst.default_span();
  if (o.t) {
    try {
      span = parse_time_range(*o.t);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (o.periods) {
    if (!(*o.periods > 0.0)) throw UsageError("--periods must be positive");
    if (inst.k().value() >= 1.0) throw UsageError("--periods needs k < 1 (the k = 1 solutions are aperiodic)");
    if (!o.t) span.first = 0.0;
    span.second = span.first + *o.periods * inst.period();
  }
  if (!std::isfinite(span.first) || !std::isfinite(span.second) || !(span.first < span.second)) {
    throw UsageError("time span must satisfy start < end");
  }
  return span;
}

std::size_t resolve_samples(const Options& o) {
  const long long n = o.samples.value_or(201);
  if (n < 2) throw UsageError("--samples must be at least 2");
  return static_cast<std::size_t>(n);
}

// Writes to --output when given, else to `out`.
template <typename Writer>
void emit(const Options& o, std::ostream& out, Writer&& write) {
  if (o.output) {
    std::ofstream file(*o.output);
    if (!file) throw UsageError("cannot open output file '" + *o.output + "'");
    write(file);
    if (!file) throw std::runtime_error("failed writing '" + *o.output + "'");
  } else {
    write(out);
  }
}

std::map<std::string, std::string> spec_metadata(const ScenarioSpec& spec) {
  std::map<std::string, std::string> meta{{"scenario", to_string(spec.kind)}};
  for (const auto& [k, v] : spec.parameters) meta["param_" + k] = format_double(v);
  return meta;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioInstance inst = make_scenario(scenario_spec(o));
  const auto [lo, hi] = resolve_span(o, inst);
  const std::size_t n = resolve_samples(o);
  const std::string format = o.format.value_or("csv");
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
  const IntegratorControl control = integrator_control(o);

  const std::vector<double> grid = uniform_grid(lo, hi, n);
  const double t0 = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : lo;
  Trajectory traj = integrate(HermitianOperator(inst.path.state(t0), 1e-10), t0, MapRhs{inst.map}, grid, control);
  attach_reference(traj, inst.path.state);
  const TrajectoryTable table = tabulate(traj);
  emit(o, out, [&](std::ostream& os) {
    if (format == "csv") {
      write_csv(os, table);
    } else {
      write_json(os, table, spec_metadata(inst.spec));
    }
  });
  const auto rep = conservation_report(traj);
  err << "run " << to_string(inst.spec.kind) << ": " << n << " samples, max residual "
      << format_double(rep.max_residual.value_or(0.0)) << ", eigenvalue drift " << format_double(rep.max_eigenvalue_drift)
      << '\n';
  return kExitOk;
}

struct FileContext {
  OperatorFile file;
  double omega = 1.0;
  double k = 1.0;
  double nu = 0.0;
  int case_number = 1;
};

FileContext load_file_context(const Options& o) {
  if (!o.operators) throw UsageError("--operators is required");
  FileContext ctx;
  try {
    ctx.file = load_operator_file(*o.operators);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  const auto flag = [&](const char* name) { return o.params.count(name) ? o.params.at(name) : std::nullopt; };
  ctx.omega = flag("omega").value_or(ctx.file.omega.value_or(1.0));
  const auto k = flag("k") ? flag("k") : ctx.file.k;
  if (!k) throw UsageError("the elliptic modulus is required (--k or \"k\" in the operator file)");
  ctx.k = *k;
  ctx.nu = flag("nu").value_or(ctx.file.nu.value_or(0.0));
  ctx.case_number = o.case_number.value_or(infer_case(ctx.file));
  if (ctx.case_number != 1 && ctx.case_number != 2) throw UsageError("--case must be 1 or 2");
  return ctx;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  VerifySettings settings;
  settings.control = integrator_control(o);
  settings.samples = resolve_samples(o);
  VerificationReport report;
  if (o.operators) {
    const FileContext ctx = load_file_context(o);
    report = verify_operator_file(ctx.file, ctx.omega, ctx.k, ctx.nu, ctx.case_number, settings);
  } else {
    const ScenarioInstance inst = make_scenario(scenario_spec(o));
    if (o.t || o.periods) settings.span = resolve_span(o, inst);
    report = verify_scenario(inst, settings);
  }
  emit(o, out, [&](std::ostream& os) { os << to_json(report) << '\n'; });
  for (const auto& c : report.checks) {
    if (!c.passed) err << "FAILED " << c.name << ": " << format_double(c.max_defect) << " > " << format_double(c.tolerance)
                       << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  }
  return report.passed() ? kExitOk : kExitVerificationFailed;
}

json table_json(const CoefficientTable& t) {
  json j = json::object();
  for (std::size_t i = 0; i < t.names.size(); ++i) j[t.names[i]] = t.values[i];
  return j;
}

int cmd_derive(const Options& o, std::ostream& out, std::ostream& err) {
  const FileContext ctx = load_file_context(o);
  const EllipticModulus km(ctx.k);
  const auto& f = ctx.file;
  json j;
  j["case"] = ctx.case_number;
  j["omega"] = ctx.omega;
  j["k"] = ctx.k;
  try {
    if (ctx.case_number == 1) {
      const auto theta = f.has("theta") ? HermitianOperator(f.at("theta")) : HermitianOperator::zero(f.dim);
      const auto der = derive_case1_coefficients(HermitianOperator(f.at("A")), HermitianOperator(f.at("B")),
                                                 HermitianOperator(f.at("X")), theta, ctx.omega, km, ctx.nu);
      j["coefficients"] = table_json(der.coefficients);
      j["nu_direction"] = table_json(der.nu_direction);
      j["forced_zeros"] = table_json(der.forced_zeros);
      j["max_forced_zero"] = der.max_forced_zero();
      j["alpha"] = der.alpha;
      j["beta"] = der.beta;
      j["nu"] = der.nu;
      j["nu_convention"] = "nu = b_B; alpha = omega/(b_B - x_X), beta = omega/(a_A - b_B)";
      j["relative_residual"] = der.relative_residual;
      j["family_dimension"] = der.family_dimension;
    } else {
      const auto theta0 = f.has("theta0") ? HermitianOperator(f.at("theta0")) : HermitianOperator::zero(f.dim);
      const HermitianOperator a(f.at("A"));
      const HermitianOperator c(f.at("C"));
      const HermitianOperator d(f.at("D"));
      std::array<double, 3> t_coeffs{0.0, 0.0, 0.0};
      if (f.has("theta")) {
        const auto sys = Case2System::from_theta(HermitianOperator(f.at("theta")), theta0, a, c, d, ctx.omega, km, ctx.nu);
        t_coeffs = sys.t_coeffs();
      } else {
        const auto fit = fit_case2_constants(a, c, d, km);
        t_coeffs[2] = case2_theta_shift(fit.alpha, fit.delta(), km);
      }
      const auto der = derive_case2_coefficients(a, c, d, theta0, t_coeffs, ctx.omega, km, ctx.nu);
      j["coefficients"] = table_json(der.coefficients);
      j["nu_direction"] = table_json(der.nu_direction);
      j["forced_zeros"] = table_json(der.forced_zeros);
      j["max_forced_zero"] = der.max_forced_zero();
      j["alpha"] = der.alpha;
      j["delta"] = der.delta;
      j["t_D"] = der.t_d;
      j["nu"] = der.nu;
      j["nu_convention"] = "nu = c_C; delta = -2 omega/(c_C - a_A), alpha = omega/(c_C t_D - d_0)";
      j["relative_residual"] = der.relative_residual;
      j["family_dimension"] = der.family_dimension;
    }
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  } catch (const ClosureError& e) {
    j["error"] = e.what();
    j["failed_relation"] = e.relation();
    j["residual"] = e.residual();
  } catch (const DerivationError& e) {
    j["error"] = e.what();
    j["residual"] = e.residual();
  } catch (const DegenerateConstantsError& e) {
    j["error"] = e.what();
  }
  emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (j.contains("error")) {
    err << "derive failed: " << j["error"].get<std::string>() << '\n';
    return kExitVerificationFailed;
  }
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("scan value '" + item + "' is not a number");
    }
    if (used != item.size()) throw UsageError("scan value '" + item + "' is not a number");
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("--values needs at least one number");
  return values;
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.scan_param || !o.scan_values) throw UsageError("scan needs --param and --values");
  const std::vector<double> values = parse_values(*o.scan_values);
  VerifySettings settings;
  settings.control = integrator_control(o);
  settings.samples = resolve_samples(o);

  std::vector<ScenarioInstance> instances;
  for (const double v : values) {
    Options oi = o;
    oi.params[*o.scan_param] = v;
    if (std::find(kParameterFlags.begin(), kParameterFlags.end(), *o.scan_param) == kParameterFlags.end()) {
      throw UsageError("unknown scan parameter '" + *o.scan_param + "'");
    }
    instances.push_back(make_scenario(scenario_spec(oi)));
  }
  std::vector<std::optional<std::pair<double, double>>> spans;
  for (const auto& inst : instances) {
    spans.push_back(o.t || o.periods ? std::optional(resolve_span(o, inst)) : std::nullopt);
  }

  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, o.jobs.value_or(static_cast<int>(hw))));
  std::vector<VerificationReport> reports(instances.size());
  for (std::size_t start = 0; start < instances.size(); start += jobs) {
    std::vector<std::future<VerificationReport>> batch;
    for (std::size_t i = start; i < std::min(instances.size(), start + jobs); ++i) {
      VerifySettings s = settings;
      s.span = spans[i];
      batch.push_back(std::async(std::launch::async, [&inst = instances[i], s] { return verify_scenario(inst, s); }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) reports[start + i] = batch[i].get();
  }

  json j;
  j["scenario"] = *o.scenario;
  j["param"] = *o.scan_param;
  json results = json::array();
  bool all = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    json r = json::parse(to_json(reports[i], -1));
    r["value"] = values[i];
    results.push_back(std::move(r));
    all = all && reports[i].passed();
    err << *o.scan_param << "=" << format_double(values[i]) << ": " << (reports[i].passed() ? "pass" : "fail") << '\n';
  }
  j["results"] = std::move(results);
  j["overall"] = all ? "pass" : "fail";
  emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return all ? kExitOk : kExitVerificationFailed;
}

void add_common(CLI::App* cmd, Options& o, bool scenario_flags) {
  cmd->add_option("--config", o.config, "JSON config mirroring the flags (flags win)");
  cmd->add_option("--output,-o", o.output, "Output file (default: stdout)");
  if (!scenario_flags) return;
  cmd->add_option("--scenario", o.scenario,
                  "maxwell_bloch | phase_modulation | three_level | d3_known | d3_variation");
  cmd->add_option("--t", o.t, "Time range start:end");
  cmd->add_option("--periods", o.periods, "Integrate N periods 4K(k)/omega from the start time");
  cmd->add_option("--samples", o.samples, "Number of output samples (>= 2, default 201)");
  cmd->add_option("--rtol", o.rtol, "Relative integrator tolerance (default 1e-10)");
  cmd->add_option("--atol", o.atol, "Absolute integrator tolerance (default 1e-12)");
}

void add_parameters(CLI::App* cmd, Options& o) {
  for (const auto& name : kParameterFlags) cmd->add_option("--" + name, o.params[name], "Scenario parameter " + name);
}

}  // namespace

std::pair<double, double> parse_time_range(const std::string& text) {
  const auto colon = text.find(':', text.empty() ? 0 : 1);
  if (colon == std::string::npos) throw std::invalid_argument("time range must look like start:end, got '" + text + "'");
  const std::string a = text.substr(0, colon);
  const std::string b = text.substr(colon + 1);
  std::size_t ua = 0;
  std::size_t ub = 0;
  double lo = 0.0;
  double hi = 0.0;
  try {
    lo = std::stod(a, &ua);
    hi = std::stod(b, &ub);
  } catch (const std::exception&) {
    throw std::invalid_argument("time range must look like start:end, got '" + text + "'");
  }
  if (ua != a.size() || ub != b.size()) {
    throw std::invalid_argument("time range must look like start:end, got '" + text + "'");
  }
  return {lo, hi};
}

std::vector<std::string> normalize_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0 && a.size() > 2 && a.find('=') == std::string::npos && i + 1 < args.size() &&
        looks_negative_value(args[i + 1])) {
      out.push_back(a + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

int run_app(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elliptic-function special solutions of the nonlinear von Neumann equation", "ellvne"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Integrate a scenario and write its trajectory");
  add_common(run, o, true);
  add_parameters(run, o);
  run->add_option("--format", o.format, "csv | json (default csv)");

  auto* verify = app.add_subcommand("verify", "Run the invariant suite; exit 1 on any failure");
  add_common(verify, o, true);
  add_parameters(verify, o);
  verify->add_option("--operators", o.operators, "Operator file instead of a scenario");
  verify->add_option("--case", o.case_number, "1 or 2 (inferred from operator roles by default)");

  auto* derive = app.add_subcommand("derive", "Re-derive the Hamiltonian coefficients for an operator file");
  add_common(derive, o, false);
  derive->add_option("--operators", o.operators, "Operator file (JSON)");
  derive->add_option("--case", o.case_number, "1 or 2 (inferred from operator roles by default)");
  for (const char* name : {"omega", "k", "nu"}) derive->add_option(std::string("--") + name, o.params[name]);

  auto* scan = app.add_subcommand("scan", "Verify a scenario over a list of parameter values");
  add_common(scan, o, true);
  add_parameters(scan, o);
  scan->add_option("--param", o.scan_param, "Parameter to vary");
  scan->add_option("--values", o.scan_values, "Comma-separated values");
  scan->add_option("--jobs", o.jobs, "Concurrent verifications (default: hardware threads)");

  const std::vector<std::string> args = normalize_negative_values(raw_args);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    merge_config(o);
    if (run->parsed()) return cmd_run(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (derive->parsed()) return cmd_derive(o, out, err);
    if (scan->parsed()) return cmd_scan(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DivergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ClosureError& e) {
    err << "closure failure (" << e.relation() << "): " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const GaugeError& e) {
    err << "gauge failure: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const Error& e) {
    // Domain, dimension, Hermiticity, dependence and degeneracy errors all
    // stem from the supplied parameters.
    err << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace ellvne::cli
