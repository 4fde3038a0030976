// JSON views of results. Doubles print with round-trip precision, big
// integers and rationals as decimal strings.

#ifndef HYPDIST_REPORT_HPP_
#define HYPDIST_REPORT_HPP_

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "automaton.hpp"
#include "dimension.hpp"
#include "distortion.hpp"
#include "measure.hpp"
#include "sft.hpp"

namespace hypdist {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "hypdist 0.1.0";

inline std::string to_string(const BigInt& x) { return x.str(); }
inline std::string to_string(const Rational& q) { return q.str(); }

// Non-finite doubles become strings so reports stay valid JSON.
inline Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline Json to_json(const ValidationReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"paths", to_string(row.paths)}, {"bfs", row.bfs}, {"equal", row.equal}});
  Json j{{"rows", rows},
         {"geodesic_checks", r.geodesic_checks},
         {"geodesic_failures", r.geodesic_failures},
         {"injective_checked_to", r.injective_checked_to},
         {"duplicates", r.duplicates},
         {"ok", r.ok()}};
  if (r.first_mismatch) j["first_mismatch"] = *r.first_mismatch;
  return j;
}

inline Json to_json(const GeodesicAutomaton& a) {
  return {{"states", a.num_states()},
          {"transitions", a.num_transitions()},
          {"alphabet", a.alphabet()},
          {"initial", a.initial()},
          {"level_used", a.level_used()},
          {"validated_to", a.validated_to()}};
}

inline Json to_json(const GrowthRate& g) {
  return {{"gr", number(g.gr)},
          {"spectral_radius", number(g.spectral_radius)},
          {"elementary_warning", g.elementary_warning},
          {"num_components", g.num_components}};
}

inline Json to_json(const ComponentDecomposition& d) {
  Json comps = Json::array();
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    const Component& c = d.components[i];
    Json reaches = Json::array();
    for (std::size_t j = 0; j < d.components.size(); ++j)
      if (j != i && d.reaches[i][j]) reaches.push_back(j);
    comps.push_back({{"symbols", c.symbols},
                     {"period", c.period},
                     {"cyclic_class", c.cyclic_class},
                     {"reaches", reaches}});
  }
  return {{"components", comps}};
}

inline Json to_json(const MaximalComponents& m) {
  Json p = Json::array();
  for (double x : m.pressures) p.push_back(number(x));
  return {{"indices", m.indices}, {"semisimple", m.semisimple}, {"pressures", p},
          {"max_pressure", number(m.max_pressure)}};
}

inline Json to_json(const VariationalReport& v) {
  return {{"pressure", number(v.pressure)},   {"parry_value", number(v.parry_value)},
          {"parry_gap", number(v.parry_gap)}, {"trials", v.trials},
          {"max_value", number(v.max_value)}, {"max_violation", number(v.max_violation)},
          {"violations", v.violations},       {"passed", v.passed()}};
}

inline Json to_json(const GibbsRatios& g) {
  return {{"c1", number(g.c1)}, {"c2", number(g.c2)}, {"blocks", g.blocks}};
}

inline Json to_json(const CodingReport& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"n", r.n},
                    {"left_elements", r.left_elements},
                    {"right_elements", r.right_elements},
                    {"pairs", r.pairs},
                    {"exhaustive", r.exhaustive},
                    {"zero_pairs", r.zero_pairs},
                    {"max_ratio", number(r.max_ratio)},
                    {"total_mass", number(r.total_mass)}});
  return {{"R", c.R}, {"v", number(c.v)}, {"rows", rows}, {"spread", number(c.spread)}, {"bounded", c.bounded}};
}

inline Json to_json(const DistortionReport& r) {
  Json exact = Json::array();
  for (const auto& e : r.exact)
    exact.push_back({{"n", e.n},
                     {"sphere_size", to_string(e.sphere_size)},
                     {"expectation", to_string(e.expectation)},
                     {"normalized", number(e.normalized())}});
  Json mc = Json::array();
  for (const auto& m : r.mc)
    mc.push_back({{"n", m.n},
                  {"samples", m.samples},
                  {"mean", number(m.mean)},
                  {"stderr", number(m.stderr_)},
                  {"variance", number(m.variance)},
                  {"min_ratio", number(m.min_ratio)},
                  {"max_ratio", number(m.max_ratio)}});
  return {{"n_values", r.n_values},
          {"exact", exact},
          {"mc", mc},
          {"tau_hat", number(r.tau_hat)},
          {"half_width", number(r.half_width)},
          {"gr_S", number(r.gr_S)},
          {"gr_Sstar", number(r.gr_Sstar)},
          {"inequality_margin", number(r.inequality_margin)},
          {"lipschitz", r.lipschitz}};
}

inline Json to_json(const InequalityVerdict& v) {
  return {{"pass", v.pass}, {"strict", v.strict}, {"margin", number(v.margin)}, {"bound", number(v.bound)}};
}

inline Json to_json(const LlnTable& t) {
  Json cells = Json::array();
  for (const auto& c : t.cells)
    cells.push_back({{"n", c.n},
                     {"eps", c.eps},
                     {"samples", c.samples},
                     {"outliers", c.outliers},
                     {"fraction", number(c.fraction)},
                     {"binomial_sd", number(c.binomial_sd)}});
  Json mono = Json::array();
  for (auto [eps, ok] : t.nonincreasing) mono.push_back({{"eps", eps}, {"nonincreasing", ok}});
  return {{"tau", number(t.tau)}, {"cells", cells}, {"trend", mono}};
}

inline Json to_json(const SimilarityScan& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"r", r.r}, {"max_deviation", number(r.max_deviation)}, {"witness", r.witness}});
  return {{"tau", number(s.tau)},
          {"rows", rows},
          {"last_third_increase", number(s.last_third_increase)},
          {"verdict", s.verdict()}};
}

inline Json to_json(const RayDeviation& r) {
  Json dev = Json::array();
  for (double d : r.deviation) dev.push_back(number(d));
  return {{"lengths", r.lengths}, {"deviation", dev}, {"slope", number(r.slope)}};
}

inline Json to_json(const DriftEstimate& d) {
  return {{"n", d.n}, {"samples", d.samples}, {"mean", number(d.mean)}, {"stderr", number(d.stderr_)}};
}

inline Json to_json(const DimensionEstimate& d) {
  return {{"dim_hat", number(d.dim_hat)},
          {"width", number(d.width)},
          {"gr_S", number(d.gr_S)},
          {"gr_Sstar", number(d.gr_Sstar)},
          {"drift_half", to_json(d.drift_half)},
          {"drift_full", to_json(d.drift_full)},
          {"drift_half_width", number(d.drift_half_width)}};
}

inline Json to_json(const RegularGrowth& g) {
  Json values = Json::array();
  for (double x : g.values) values.push_back(number(x));
  Json j{{"v", number(g.v)},          {"n_min", g.n_min}, {"n_max", g.n_max},
         {"c1", number(g.c1)},        {"c2", number(g.c2)}, {"values", values}};
  if (g.c1_exact) {
    j["c1_exact"] = to_string(*g.c1_exact);
    j["c2_exact"] = to_string(*g.c2_exact);
  }
  return j;
}

}  // namespace hypdist

#endif  // HYPDIST_REPORT_HPP_
