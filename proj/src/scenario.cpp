#include "warpcap/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "warpcap/capacity.hpp"
#include "warpcap/cutoffs.hpp"
#include "warpcap/errors.hpp"
#include "warpcap/inequalities.hpp"
#include "warpcap/manifold_io.hpp"
#include "warpcap/reports.hpp"
#include "warpcap/scenario.hpp"
#include "warpcap/sobolev.hpp"
#include "warpcap/stokes.hpp"

namespace warpcap {

namespace {

namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> split_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double to_double(const std::string& tok, const std::string& context) {
  std::string_view sv(tok);
  bool negative = false;
  if (!sv.empty() && (sv.front() == '+' || sv.front() == '-')) {
    negative = sv.front() == '-';
    sv.remove_prefix(1);
  }
  if (sv == "inf" || sv == "infinity") return negative ? -kInf : kInf;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(context + ": expected a number, got '" + tok + "'");
  return value;
}

// Access to a scenario's key-value parameters with command-aware diagnostics.
class Params {
 public:
  explicit Params(const Scenario& sc) : sc_(sc) {}

  const std::string& raw(const std::string& key) const {
    auto it = sc_.parameters.find(key);
    if (it == sc_.parameters.end())
      throw ParseError("command '" + sc_.command + "': missing required key '" + key + "'");
    return it->second;
  }

  bool has(const std::string& key) const { return sc_.parameters.count(key) != 0; }

  double number(const std::string& key) const { return to_double(raw(key), "key '" + key + "'"); }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) const {
    const std::string& tok = raw(key);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw ParseError("key '" + key + "': expected an integer, got '" + tok + "'");
    return value;
  }

  int integer_or(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  uint64_t seed(const std::string& key) const {
    const std::string& tok = raw(key);
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw ParseError("key '" + key + "': expected a nonnegative integer seed, got '" + tok +
                       "'");
    return value;
  }

  // Keys outside the declared set are validation errors: they are almost
  // always typos, and silently ignoring them would change results.
  void allow_only(std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) const {
    for (const char* key : required) raw(key);
    for (const auto& [key, value] : sc_.parameters) {
      bool known = false;
      for (const char* k : required) known = known || key == k;
      for (const char* k : optional) known = known || key == k;
      if (!known)
        throw ParseError("command '" + sc_.command + "': unknown key '" + key + "'");
    }
  }

 private:
  const Scenario& sc_;
};

void need_format(const Scenario& sc, std::initializer_list<const char*> formats) {
  for (const char* f : formats)
    if (sc.output_format == f) return;
  std::string wanted;
  for (const char* f : formats) {
    if (!wanted.empty()) wanted += " or ";
    wanted += f;
  }
  throw ParseError("command '" + sc.command + "' emits " + wanted + ", got '" +
                   sc.output_format + "'");
}

ConditionKind parse_condition_kind(const std::string& name) {
  if (name == "annulus_kernel") return ConditionKind::annulus_kernel;
  if (name == "volume_growth") return ConditionKind::volume_growth;
  if (name == "energy_level_set") return ConditionKind::energy_level_set;
  if (name == "mass_average") return ConditionKind::mass_average;
  throw ParseError("key 'kind': unknown condition '" + name +
                   "' (expected annulus_kernel, volume_growth, energy_level_set, or "
                   "mass_average)");
}

std::vector<double> geometric_ladder(const Params& params) {
  const double first = params.number("r_first");
  const double factor = params.number("r_factor");
  const int count = params.integer("r_count");
  if (!(first > 0.0) || !std::isfinite(first))
    throw ParseError("key 'r_first': must be positive and finite");
  if (!(factor > 1.0) || !std::isfinite(factor))
    throw ParseError("key 'r_factor': must exceed 1");
  if (count < 1 || count > 100000) throw ParseError("key 'r_count': need 1 <= count <= 100000");
  std::vector<double> radii(count);
  double r = first;
  for (int i = 0; i < count; ++i, r *= factor) radii[i] = r;
  return radii;
}

struct GapSpec {
  GapFunction gap;  // empty = module default (doubling)
  std::string description = "g(R) = R";
};

GapSpec parse_gap(const Params& params) {
  GapSpec spec;
  if (!params.has("gap")) return spec;
  auto tokens = split_tokens(params.raw("gap"));
  if (tokens.size() == 1 && tokens[0] == "doubling") return spec;
  if (tokens.size() == 2 && tokens[0] == "fixed") {
    const double width = to_double(tokens[1], "key 'gap'");
    if (!(width > 0.0) || !std::isfinite(width))
      throw ParseError("key 'gap': fixed width must be positive and finite");
    spec.gap = [width](double) { return width; };
    spec.description = "g(R) = " + format_double(width);
    return spec;
  }
  throw ParseError("key 'gap': expected 'doubling' or 'fixed <width>'");
}

ConditionThresholds parse_thresholds(const Params& params) {
  ConditionThresholds thresholds;
  if (params.has("support_threshold")) thresholds.support = params.number("support_threshold");
  if (params.has("violation_threshold"))
    thresholds.violation = params.number("violation_threshold");
  return thresholds;
}

// Radial density mini-spec for the condition command:
//   bump <lo> <hi> [scale]    C^1 bump supported on [lo, hi]
//   constant <c>              c everywhere
//   reciprocal_area <scale>   scale / A(t) on [base, inf)
RadialProfile parse_density(const std::string& value, const ModelGeometry& g) {
  auto tokens = split_tokens(value);
  if (tokens.empty()) throw ParseError("key 'density': empty specification");
  const std::string& kind = tokens[0];
  if (kind == "bump") {
    if (tokens.size() != 3 && tokens.size() != 4)
      throw ParseError("key 'density': expected 'bump <lo> <hi> [scale]'");
    const double lo = to_double(tokens[1], "key 'density'");
    const double hi = to_double(tokens[2], "key 'density'");
    const double scale = tokens.size() == 4 ? to_double(tokens[3], "key 'density'") : 1.0;
    if (!(0.0 < lo && lo < hi) || !std::isfinite(hi))
      throw ParseError("key 'density': bump needs 0 < lo < hi < inf");
    // smooth_bump already pads with zero segments to cover (0, inf)
    return smooth_bump(lo, hi).scaled(scale);
  }
  if (kind == "constant") {
    if (tokens.size() != 2) throw ParseError("key 'density': expected 'constant <c>'");
    return RadialProfile({Segment::constant(to_double(tokens[1], "key 'density'"), 0.0, kInf)});
  }
  if (kind == "reciprocal_area") {
    if (tokens.size() != 2)
      throw ParseError("key 'density': expected 'reciprocal_area <scale>'");
    return reciprocal_area_profile(g, g.base_radius(), to_double(tokens[1], "key 'density'"));
  }
  throw ParseError("key 'density': unknown kind '" + kind +
                   "' (expected bump, constant, or reciprocal_area)");
}

// Radial field mini-spec for the stokes command:
//   unit_flux                 x = 1/A: flux 1 through every sphere
//   bump <lo> <hi> [mass]     divergence prescribed as a bump of total mass
RadialField parse_field(const std::string& value, const ModelGeometry& g) {
  auto tokens = split_tokens(value);
  if (tokens.empty()) throw ParseError("key 'field': empty specification");
  const std::string& kind = tokens[0];
  if (kind == "unit_flux") {
    if (tokens.size() != 1) throw ParseError("key 'field': expected 'unit_flux'");
    return unit_flux_field(g);
  }
  if (kind == "bump") {
    if (tokens.size() != 3 && tokens.size() != 4)
      throw ParseError("key 'field': expected 'bump <lo> <hi> [mass]'");
    const double lo = to_double(tokens[1], "key 'field'");
    const double hi = to_double(tokens[2], "key 'field'");
    const double mass = tokens.size() == 4 ? to_double(tokens[3], "key 'field'") : 1.0;
    if (!(0.0 < lo && lo < hi) || !std::isfinite(hi))
      throw ParseError("key 'field': bump needs 0 < lo < hi < inf");
    return field_from_divergence(g, smooth_bump(lo, hi), mass);
  }
  throw ParseError("key 'field': unknown kind '" + kind + "' (expected unit_flux or bump)");
}

struct Outcome {
  std::string text;
  int status = 0;
};

Outcome run_analyze(const Scenario& sc, const ModelGeometry& g) {
  Params params(sc);
  params.allow_only({}, {});
  need_format(sc, {"json"});
  return {json_manifold_summary(g), 0};
}

Outcome run_capacity(const Scenario& sc, const ModelGeometry& g) {
  Params params(sc);
  params.allow_only({"p", "r1", "r2"}, {"constant"});
  need_format(sc, {"csv"});
  VolumeBoundConstant constant = VolumeBoundConstant::two_to_p;
  if (params.has("constant")) {
    const std::string& name = params.raw("constant");
    if (name == "p")
      constant = VolumeBoundConstant::p;
    else if (name != "2^p")
      throw ParseError("key 'constant': expected '2^p' or 'p', got '" + name + "'");
  }
  CapacityRow row{params.number("p"), params.number("r1"), params.number("r2"), {}};
  row.bounds = capacity_bounds(g, Exponent(row.p), row.r1, row.r2, constant);
  return {csv_capacity(std::span(&row, 1)), 0};
}

Outcome run_parabolicity(const Scenario& sc, const ModelGeometry& g) {
  Params params(sc);
  params.allow_only({"p"}, {});
  need_format(sc, {"json"});
  const double p = params.number("p");
  ParabolicityVerdict verdict = classify_parabolicity(g, Exponent(p));
  const int status = verdict.kind == ParabolicityVerdict::Kind::undetermined ? 1 : 0;
  return {json_parabolicity(verdict, p), status};
}

Outcome run_cutoff_sweep(const Scenario& sc, const ModelGeometry& g) {
  Params params(sc);
  params.allow_only({"p", "r_start", "r_end", "count"}, {"epsilon", "factor"});
  need_format(sc, {"csv"});
  const double p = params.number("p");
  const double r_start = params.number("r_start");
  const double r_end = params.number("r_end");
  const int count = params.integer("count");
  const double epsilon = params.number_or("epsilon", 0.1);
  const double factor = params.number_or("factor", 2.0);
  if (!(0.0 < r_start && r_start < r_end) || !std::isfinite(r_end))
    throw ParseError("keys 'r_start'/'r_end': need 0 < r_start < r_end < inf");
  if (count < 2 || count > 100000) throw ParseError("key 'count': need 2 <= count <= 100000");
  std::vector<double> radii(count);
  for (int i = 0; i < count; ++i)
    radii[i] = r_start + (r_end - r_start) * i / (count - 1);
  auto rows = energy_sweep(g, Exponent(p), radii, epsilon, factor);
  return {csv_energy_sweep(rows), 0};
}

Outcome run_condition(const Scenario& sc, const ModelGeometry& g) {
  Params params(sc);
  params.allow_only({"kind", "r_first", "r_factor", "r_count", "density"},
                    {"p", "meaning", "gap", "support_threshold", "violation_threshold"});
  need_format(sc, {"json"});
  const ConditionKind kind = parse_condition_kind(params.raw("kind"));
  if (kind == ConditionKind::mass_average) {
    if (params.has("p"))
      throw ParseError("command 'condition': mass_average does not take 'p'");
  } else if (!params.has("p")) {
    throw ParseError("command 'condition': missing required key 'p'");
  }

  RadialDensity density{parse_density(params.raw("density"), g),
                        RadialDensity::Meaning::abs_field};
  if (params.has("meaning")) {
    const std::string& name = params.raw("meaning");
    if (name == "q_power")
      density.meaning = RadialDensity::Meaning::q_power;
    else if (name != "abs_field")
      throw ParseError("key 'meaning': expected 'abs_field' or 'q_power', got '" + name + "'");
  }

  const std::vector<double> radii = geometric_ladder(params);
  GapSpec gap = parse_gap(params);
  if (!gap.gap) {
    gap.gap = doubling_gap();
    gap.description = "g(R) = R";
  }
  const ConditionThresholds thresholds = parse_thresholds(params);

  ConditionReport report;
  switch (kind) {
    case ConditionKind::annulus_kernel:
      report = check_annulus_kernel(g, Exponent(params.number("p")), density, gap.gap, radii,
                                    thresholds, gap.description);
      break;
    case ConditionKind::volume_growth:
      report = check_volume_growth(g, Exponent(params.number("p")), density, gap.gap, radii,
                                   thresholds, gap.description);
      break;
    case ConditionKind::energy_level_set: {
      EvansPotential f(g, Exponent(params.number("p")));
      report = check_energy_level_set(f, density, gap.gap, radii, thresholds, gap.description);
      break;
    }
    case ConditionKind::mass_average:
      report = check_mass_average(g, density, gap.gap, radii, thresholds, gap.description);
      break;
  }
  const int status = report.verdict == ConditionVerdict::inconclusive ? 1 : 0;
  return {json_condition(report), status};
}

Outcome run_stokes(const Scenario& sc, const ModelGeometry& g) {
  Params params(sc);
  params.allow_only({"p", "kind", "r_first", "r_factor", "r_count", "field"},
                    {"gap", "support_threshold", "violation_threshold", "residual_tol",
                     "vanish_tol"});
  need_format(sc, {"csv", "json"});
  const ConditionKind kind = parse_condition_kind(params.raw("kind"));
  const RadialField field = parse_field(params.raw("field"), g);
  const std::vector<double> radii = geometric_ladder(params);

  HarnessOptions options;
  options.thresholds = parse_thresholds(params);
  GapSpec gap = parse_gap(params);
  if (gap.gap) options.gap = gap.gap;
  options.residual_tol = params.number_or("residual_tol", options.residual_tol);
  options.vanish_tol = params.number_or("vanish_tol", options.vanish_tol);

  StokesReport report =
      theorem_harness(g, Exponent(params.number("p")), field, kind, radii, options);
  const int status =
      (report.conclusion == StokesReport::Conclusion::inconclusive || report.inconsistent) ? 1
                                                                                           : 0;
  if (sc.output_format == "csv") return {csv_stokes(report), status};
  return {json_stokes(report), status};
}

Outcome run_lindqvist(const Scenario& sc) {
  Params params(sc);
  params.allow_only({"p", "n", "samples", "seed"}, {});
  need_format(sc, {"json"});
  CpEstimate estimate = estimate_cp(params.number("p"), params.integer("n"),
                                    params.integer("samples"), params.seed("seed"));
  return {json_cp(estimate), 0};
}

Outcome run_counterexample(const Scenario& sc, const QuadratureConfig& quad) {
  Params params(sc);
  params.allow_only({}, {"m", "q", "beta", "H", "gamma", "smoothing_width", "extent", "r_max"});
  need_format(sc, {"csv", "json"});
  CounterexampleSpec spec;
  spec.m = params.integer_or("m", spec.m);
  spec.q = params.number_or("q", spec.q);
  spec.beta = params.number_or("beta", spec.beta);
  spec.H = params.number_or("H", spec.H);
  spec.gamma = params.number_or("gamma", spec.gamma);
  spec.smoothing_width = params.number_or("smoothing_width", spec.smoothing_width);
  spec.extent = params.number_or("extent", spec.extent);
  const double r_max = params.number_or("r_max", 1000.0);

  ModelGeometry g(build_counterexample(spec), quad);
  CounterexampleReport report = verify_counterexample(g, spec, r_max);
  const int status = report.counterexample_confirmed ? 0 : 1;
  if (sc.output_format == "json") return {json_counterexample(report, spec), status};

  std::vector<SobolevRow> rows;
  for (size_t i = 0; i < report.product_radii.size(); ++i) {
    const double r = report.product_radii[i];
    SobolevRow row{r, g.volume(r) / std::pow(r, spec.m),
                   i < report.products.size() ? report.products[i]
                                              : std::numeric_limits<double>::quiet_NaN()};
    rows.push_back(row);
  }
  return {csv_sobolev(rows), status};
}

bool command_needs_manifold(const std::string& command) {
  return command == "analyze" || command == "capacity" || command == "parabolicity" ||
         command == "cutoff-sweep" || command == "condition" || command == "stokes";
}

bool known_command(const std::string& command) {
  return command_needs_manifold(command) || command == "lindqvist" ||
         command == "sobolev-counterexample";
}

fs::path resolve_output(const Scenario& sc, const fs::path& scenario_dir,
                        const RunOverrides& overrides) {
  fs::path out(sc.output_path);
  if (out.is_absolute()) return out;
  if (overrides.out_dir) return fs::path(*overrides.out_dir) / out;
  if (const char* env = std::getenv("WARPCAP_OUT"); env && *env) return fs::path(env) / out;
  return scenario_dir / out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  bool have_command = false, have_output = false, have_manifold = false;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto tokens = split_tokens(raw);
    if (tokens.empty()) continue;
    const std::string& kw = tokens[0];
    if (kw == "command") {
      if (tokens.size() != 2) throw ParseError("expected 'command <name>'", number);
      if (have_command) throw ParseError("duplicate 'command' line", number);
      sc.command = tokens[1];
      have_command = true;
    } else if (kw == "manifold") {
      if (tokens.size() != 2) throw ParseError("expected 'manifold <path>'", number);
      if (have_manifold) throw ParseError("duplicate 'manifold' line", number);
      sc.manifold_ref = tokens[1];
      have_manifold = true;
    } else if (kw == "output") {
      if (tokens.size() != 3) throw ParseError("expected 'output <path> <csv|json>'", number);
      if (have_output) throw ParseError("duplicate 'output' line", number);
      sc.output_path = tokens[1];
      sc.output_format = tokens[2];
      if (sc.output_format != "csv" && sc.output_format != "json")
        throw ParseError("output format must be 'csv' or 'json', got '" + sc.output_format +
                             "'",
                         number);
      have_output = true;
    } else if (kw == "param") {
      if (tokens.size() < 3) throw ParseError("expected 'param <key> <value...>'", number);
      std::string value = tokens[2];
      for (size_t i = 3; i < tokens.size(); ++i) value += " " + tokens[i];
      if (!sc.parameters.emplace(tokens[1], value).second)
        throw ParseError("duplicate param '" + tokens[1] + "'", number);
    } else {
      throw ParseError("unknown directive '" + kw +
                           "' (expected command, manifold, output, or param)",
                       number);
    }
  }
  if (!have_command) throw ParseError("missing 'command <name>' line");
  if (!have_output) throw ParseError("missing 'output <path> <csv|json>' line");
  if (!known_command(sc.command))
    throw ParseError("unknown command '" + sc.command +
                     "' (expected analyze, capacity, parabolicity, cutoff-sweep, condition, "
                     "stokes, lindqvist, or sobolev-counterexample)");
  return sc;
}

int run_scenario_file(const std::string& path, const RunOverrides& overrides,
                      std::ostream& diag) {
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      diag << "cannot read scenario file: " << path << "\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  Scenario sc;
  try {
    sc = parse_scenario(text);
  } catch (const ParseError& e) {
    diag << path << ": " << e.what() << "\n";
    return 2;
  }

  QuadratureConfig quad{.abs_tol = 1e-12, .rel_tol = 1e-12, .max_subdivisions = 4000};
  if (overrides.tol) {
    if (!(*overrides.tol > 0.0) || !std::isfinite(*overrides.tol)) {
      diag << path << ": --tol must be positive and finite\n";
      return 2;
    }
    quad.abs_tol = quad.rel_tol = *overrides.tol;
  }

  const fs::path scenario_dir = fs::path(path).parent_path();

  std::optional<ModelGeometry> geometry;
  if (command_needs_manifold(sc.command)) {
    if (sc.manifold_ref.empty()) {
      diag << path << ": command '" << sc.command << "' requires a 'manifold <path>' line\n";
      return 2;
    }
    fs::path manifold_path(sc.manifold_ref);
    if (manifold_path.is_relative()) manifold_path = scenario_dir / manifold_path;
    try {
      geometry.emplace(load_manifold(manifold_path.string()), quad);
    } catch (const ParseError& e) {
      diag << manifold_path.string() << ": " << e.what() << "\n";
      return 2;
    }
  } else if (!sc.manifold_ref.empty()) {
    diag << path << ": command '" << sc.command << "' does not read a manifold\n";
    return 2;
  }

  Outcome outcome;
  try {
    if (sc.command == "analyze")
      outcome = run_analyze(sc, *geometry);
    else if (sc.command == "capacity")
      outcome = run_capacity(sc, *geometry);
    else if (sc.command == "parabolicity")
      outcome = run_parabolicity(sc, *geometry);
    else if (sc.command == "cutoff-sweep")
      outcome = run_cutoff_sweep(sc, *geometry);
    else if (sc.command == "condition")
      outcome = run_condition(sc, *geometry);
    else if (sc.command == "stokes")
      outcome = run_stokes(sc, *geometry);
    else if (sc.command == "lindqvist")
      outcome = run_lindqvist(sc);
    else
      outcome = run_counterexample(sc, quad);
  } catch (const ParseError& e) {
    diag << path << ": " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    diag << path << ": command '" << sc.command << "': " << e.what() << "\n";
    return 2;
  } catch (const QuadratureError& e) {
    diag << path << ": command '" << sc.command
         << "': quadrature could not certify the requested tolerance: " << e.what() << "\n";
    return 1;
  }

  const fs::path out_path = resolve_output(sc, scenario_dir, overrides);
  std::error_code ec;
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path(), ec);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    diag << "cannot write output file: " << out_path.string() << "\n";
    return 2;
  }
  out << outcome.text;
  out.close();
  if (!out) {
    diag << "failed writing output file: " << out_path.string() << "\n";
    return 2;
  }
  return outcome.status;
}

}  // namespace warpcap
