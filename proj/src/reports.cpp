#include "warpcap/reports.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "warpcap/manifold_io.hpp"

namespace warpcap {

namespace {

using ordered_json = nlohmann::ordered_json;

// JSON has no literal for non-finite numbers; fall back to their text form so
// the information survives instead of degrading to null.
ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ordered_json num_array(std::span<const double> values) {
  ordered_json arr = ordered_json::array();
  for (double v : values) arr.push_back(num(v));
  return arr;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json tail_object(const TailModel& tail) {
  ordered_json j;
  switch (tail.kind) {
    case TailModel::Kind::power:
      j["kind"] = "power";
      j["exponent"] = num(tail.exponent);
      break;
    case TailModel::Kind::exponential:
      j["kind"] = "exponential";
      j["rate"] = num(tail.rate);
      break;
    case TailModel::Kind::oscillating:
      j["kind"] = "oscillating";
      j["lower"] = {{"coefficient", num(tail.lower.coefficient)},
                    {"exponent", num(tail.lower.exponent)}};
      j["upper"] = {{"coefficient", num(tail.upper.coefficient)},
                    {"exponent", num(tail.upper.exponent)}};
      break;
  }
  j["valid_from"] = num(tail.valid_from);
  return j;
}

ordered_json condition_object(const ConditionReport& report) {
  ordered_json j;
  j["condition"] = to_string(report.condition);
  j["gap"] = report.gap_description;
  j["radii"] = num_array(report.tested_radii);
  j["ratios"] = num_array(report.ratios);
  j["achieved_inf"] = num(report.achieved_inf);
  j["verdict"] = to_string(report.verdict);
  j["thresholds"] = {{"support", num(report.support_threshold)},
                     {"violation", num(report.violation_threshold)}};
  j["trend_slope"] = num(report.trend_slope);
  j["closed_form_gradient"] = report.closed_form_gradient;
  j["note"] = report.note;
  return j;
}

}  // namespace

std::string csv_capacity(std::span<const CapacityRow> rows) {
  std::ostringstream out;
  out << "p,r1,r2,exact,surface_bound,volume_bound,tightness_volume\n";
  for (const CapacityRow& row : rows)
    out << format_double(row.p) << ',' << format_double(row.r1) << ',' << format_double(row.r2)
        << ',' << format_double(row.bounds.exact_model) << ','
        << format_double(row.bounds.surface_bound) << ','
        << format_double(row.bounds.volume_bound) << ','
        << format_double(row.bounds.tightness_volume) << '\n';
  return out.str();
}

std::string csv_energy_sweep(std::span<const EnergySweepRow> rows) {
  std::ostringstream out;
  out << "r,phi_energy,xi_bound,ratio\n";
  for (const EnergySweepRow& row : rows)
    out << format_double(row.r) << ',' << format_double(row.phi_energy) << ','
        << format_double(row.xi_bound) << ',' << format_double(row.ratio) << '\n';
  return out.str();
}

std::string csv_stokes(const StokesReport& report) {
  std::ostringstream out;
  out << "R,ball_integral,flux,condition_ratio\n";
  const auto& cond = report.condition;
  for (size_t i = 0; i < report.radii.size(); ++i) {
    const bool have_ratio = i < cond.ratios.size() && i < cond.tested_radii.size() &&
                            cond.tested_radii[i] == report.radii[i];
    out << format_double(report.radii[i]) << ',' << format_double(report.ball_integrals[i])
        << ',' << format_double(report.fluxes[i]) << ','
        << (have_ratio ? format_double(cond.ratios[i]) : "nan") << '\n';
  }
  return out.str();
}

std::string csv_sobolev(std::span<const SobolevRow> rows) {
  std::ostringstream out;
  out << "r,volume_ratio,lower_area_product\n";
  for (const SobolevRow& row : rows)
    out << format_double(row.r) << ',' << format_double(row.volume_ratio) << ','
        << format_double(row.product) << '\n';
  return out.str();
}

std::string json_condition(const ConditionReport& report) {
  ordered_json j;
  j["schema"] = 1;
  j.update(condition_object(report));
  return dump(j);
}

std::string json_stokes(const StokesReport& report) {
  ordered_json j;
  j["schema"] = 1;
  j["radii"] = num_array(report.radii);
  j["ball_integrals"] = num_array(report.ball_integrals);
  j["fluxes"] = num_array(report.fluxes);
  j["residuals"] = num_array(report.residuals);
  j["residuals_ok"] = report.residuals_ok;
  j["condition"] = condition_object(report.condition);
  if (report.negative_part) {
    j["negative_part"] = {{"finite", report.negative_part->finite},
                          {"value", num(report.negative_part->value)}};
  } else {
    j["negative_part"] = nullptr;
  }
  switch (report.conclusion) {
    case StokesReport::Conclusion::vanishes: j["conclusion"] = "vanishes"; break;
    case StokesReport::Conclusion::nonzero: j["conclusion"] = "nonzero"; break;
    case StokesReport::Conclusion::inconclusive: j["conclusion"] = "inconclusive"; break;
  }
  if (report.limit_value)
    j["limit_value"] = num(*report.limit_value);
  else
    j["limit_value"] = nullptr;
  j["limit_infinite"] = report.limit_infinite;
  j["limit_sign"] = report.limit_sign;
  j["inconsistent"] = report.inconsistent;
  j["note"] = report.note;
  return dump(j);
}

std::string json_cp(const CpEstimate& estimate) {
  ordered_json j;
  j["schema"] = 1;
  j["p"] = num(estimate.p);
  j["n"] = estimate.dimension;
  j["estimated_Cp"] = num(estimate.value);
  j["seed"] = estimate.seed;
  j["sample_count"] = estimate.sample_count;
  return dump(j);
}

std::string json_parabolicity(const ParabolicityVerdict& verdict, double p) {
  ordered_json j;
  j["schema"] = 1;
  j["p"] = num(p);
  switch (verdict.kind) {
    case ParabolicityVerdict::Kind::parabolic: j["verdict"] = "parabolic"; break;
    case ParabolicityVerdict::Kind::non_parabolic: j["verdict"] = "non_parabolic"; break;
    case ParabolicityVerdict::Kind::undetermined: j["verdict"] = "undetermined"; break;
  }
  if (verdict.potential_limit)
    j["potential_limit"] = num(*verdict.potential_limit);
  else
    j["potential_limit"] = nullptr;
  if (verdict.divergent_tail)
    j["divergent_tail"] = tail_object(*verdict.divergent_tail);
  else
    j["divergent_tail"] = nullptr;
  j["description"] = verdict.description;
  return dump(j);
}

std::string json_counterexample(const CounterexampleReport& report,
                                const CounterexampleSpec& spec) {
  ordered_json j;
  j["schema"] = 1;
  j["spec"] = {{"m", spec.m},
               {"q", num(spec.q)},
               {"beta", num(spec.beta)},
               {"H", num(spec.H)},
               {"gamma", num(spec.gamma)},
               {"smoothing_width", num(spec.smoothing_width)},
               {"extent", num(spec.extent)}};
  j["volume_ok"] = report.volume_ok;
  j["min_volume_ratio"] = num(report.min_volume_ratio);
  j["tail_convergent"] = report.tail_convergent;
  if (report.aq_integral)
    j["aq_integral"] = num(*report.aq_integral);
  else
    j["aq_integral"] = nullptr;
  j["products_increasing"] = report.products_increasing;
  j["products_tenfold"] = report.products_tenfold;
  j["product_growth"] = num(report.product_growth);
  j["counterexample_confirmed"] = report.counterexample_confirmed;
  j["radii"] = num_array(report.radii);
  j["volume_ratios"] = num_array(report.volume_ratios);
  j["product_radii"] = num_array(report.product_radii);
  j["products"] = num_array(report.products);
  j["note"] = report.note;
  return dump(j);
}

std::string json_manifold_summary(const ModelGeometry& g) {
  ordered_json j;
  j["schema"] = 1;
  j["dim"] = g.dim();
  j["base_radius"] = num(g.base_radius());
  j["sphere_area"] = num(g.sphere_area());
  const auto& segments = g.warping().piecewise().segments();
  j["segment_count"] = segments.size();
  ordered_json segs = ordered_json::array();
  for (const Segment& s : segments) {
    const char* kind = "";
    switch (s.kind()) {
      case SegmentKind::power: kind = "power"; break;
      case SegmentKind::exponential: kind = "exponential"; break;
      case SegmentKind::linear: kind = "linear"; break;
      case SegmentKind::constant: kind = "constant"; break;
      case SegmentKind::tabulated: kind = "tabulated"; break;
    }
    segs.push_back({{"kind", kind}, {"t_lo", num(s.t_lo())}, {"t_hi", num(s.t_hi())}});
  }
  j["segments"] = segs;
  if (auto tail = g.warping().tail_class())
    j["tail"] = tail_object(*tail);
  else
    j["tail"] = nullptr;
  ordered_json samples = ordered_json::array();
  for (double factor : {1.0, 2.0, 4.0, 8.0}) {
    const double r = g.base_radius() * factor;
    samples.push_back({{"r", num(r)},
                       {"h", num(g.warping()(r))},
                       {"area", num(g.area(r))},
                       {"volume", num(g.volume(r))}});
  }
  j["samples"] = samples;
  return dump(j);
}

}  // namespace warpcap
