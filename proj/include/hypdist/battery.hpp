// The acceptance battery: twelve numbered checks over the bundled groups,
// shared by the CLI and the acceptance test.

#ifndef HYPDIST_BATTERY_HPP_
#define HYPDIST_BATTERY_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "automaton.hpp"
#include "dimension.hpp"
#include "distortion.hpp"
#include "measure.hpp"
#include "presentation.hpp"
#include "report.hpp"
#include "sft.hpp"

namespace hypdist {

struct BatteryConfig {
  std::filesystem::path group_dir = "data/groups";
  std::uint64_t seed = 7;
  unsigned threads = 1;
  std::size_t mc_samples = 10'000;        // per radius, criteria 7, 9, 10
  std::size_t consistency_samples = 100'000;  // criterion 6
  std::size_t chi_square_samples = 40'000;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  Json detail;
  double seconds = 0;  // wall clock, kept out of the report unless asked for
};

struct BatteryReport {
  std::vector<CriterionResult> criteria;

  bool all_pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return !criteria.empty();
  }
};

inline Json config_json(const BatteryConfig& cfg) {
  return {{"group_dir", cfg.group_dir.generic_string()},
          {"seed", cfg.seed},
          {"rng", Rng::algorithm},
          {"threads", cfg.threads},
          {"mc_samples", cfg.mc_samples},
          {"consistency_samples", cfg.consistency_samples},
          {"chi_square_samples", cfg.chi_square_samples}};
}

inline Json to_json(const BatteryReport& r, const BatteryConfig& cfg, bool timing) {
  Json crit = Json::array();
  for (const auto& c : r.criteria) {
    Json j{{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"summary", c.summary}, {"detail", c.detail}};
    if (timing) j["seconds"] = c.seconds;
    crit.push_back(std::move(j));
  }
  return {{"tool", kToolVersion}, {"config", config_json(cfg)}, {"criteria", crit}, {"all_pass", r.all_pass()}};
}

namespace detail {

inline std::string fmt(double x, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// Everything the battery derives from one (group, generating set).
struct Setup {
  Cayley S;
  GeodesicAutomaton aut;
  Sft sft;
  ComponentDecomposition dec;
  GrowthRate gr;

  Setup(const Presentation& p, const std::string& set)
      : S(p.cayley(set)),
        aut(build_geodesic_automaton(S, 1, 8)),
        sft(sft_from_automaton(aut)),
        dec(components(sft)),
        gr(growth_rate(aut)) {}
};

struct PairRun {
  DistortionReport rep;
  InequalityVerdict verdict;
  SimilarityScan scan;
};

class Runner {
 public:
  explicit Runner(const BatteryConfig& cfg) : cfg_(cfg) { mc_.threads = cfg.threads; }

  std::vector<CriterionResult> run(std::ostream* log) {
    std::vector<CriterionResult> out;
    using Fn = CriterionResult (Runner::*)();
    const Fn steps[] = {&Runner::c1,  &Runner::c2, &Runner::c3, &Runner::c4, &Runner::c5, &Runner::c6,
                        &Runner::c7,  &Runner::c8, &Runner::c9, &Runner::c10, &Runner::c11};
    for (Fn f : steps) {
      const auto t0 = std::chrono::steady_clock::now();
      CriterionResult r;
      try {
        r = (this->*f)();
      } catch (const std::exception& e) {
        r.id = static_cast<int>(out.size()) + 1;
        r.title = "criterion " + std::to_string(r.id);
        r.pass = false;
        r.summary = std::string("error: ") + e.what();
      }
      if (r.seconds == 0)
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (log) *log << "  [" << r.id << "] " << (r.pass ? "PASS" : "FAIL") << " " << fmt(r.seconds, 3) << "s\n";
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  std::filesystem::path file(const char* name) const { return cfg_.group_dir / name; }

  Setup& setup(const std::string& group, const std::string& set) {
    const std::string key = group + "/" + set;
    auto it = setups_.find(key);
    if (it == setups_.end()) it = setups_.emplace(key, Setup(presentation(group), set)).first;
    return it->second;
  }

  // One load per group, so every generating set shares the same group object.
  const Presentation& presentation(const std::string& group) {
    auto it = presentations_.find(group);
    if (it == presentations_.end())
      it = presentations_.emplace(group, load_presentation(file((group + ".grp").c_str()))).first;
    return it->second;
  }

  PairRun& pair(const std::string& group, const std::string& to) {
    const std::string key = group + "/" + to;
    auto it = pairs_.find(key);
    if (it != pairs_.end()) return it->second;
    Setup& s = setup(group, "S");
    Setup& t = setup(group, to);
    ForeignLength fl(s.S, t.S);
    PairRun p;
    p.rep = mean_distortion_mc(s.aut, fl, {10, 20, 40}, cfg_.mc_samples, cfg_.seed, mc_);
    set_growth_rates(p.rep, s.gr.gr, t.gr.gr);
    p.verdict = check_growth_inequality(p.rep);
    p.scan = rough_similarity_scan(fl, p.rep.tau_hat, 8);
    return pairs_.emplace(key, std::move(p)).first->second;
  }

  CriterionResult c1() {
    CriterionResult r{1, "F2 automaton path counts equal BFS sphere sizes for n <= 15 within 5 s"};
    const auto t0 = std::chrono::steady_clock::now();
    Presentation p = load_presentation(file("f2.grp"));
    Cayley S = p.cayley("S");
    GeodesicAutomaton aut = build_geodesic_automaton(S, 1, 10);
    PathCounter counter(aut, 15);
    const double build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::vector<std::uint64_t> bfs = sphere_sizes(S, 15);
    bool equal = bfs.size() == 16;
    Json rows = Json::array();
    for (int n = 0; n <= 15 && equal; ++n) {
      equal = counter.sphere(n) == BigInt(bfs[n]);
      rows.push_back({{"n", n}, {"paths", to_string(counter.sphere(n))}, {"bfs", bfs[n]}});
    }
    r.seconds = build_seconds;
    r.pass = equal && build_seconds < 5.0;
    r.detail = {{"automaton", to_json(aut)}, {"rows", rows}, {"counts_equal", equal}};
    r.summary = std::string(equal ? "counts equal" : "counts differ") + ", |S_15| = " + to_string(counter.sphere(15));
    return r;
  }

  CriterionResult c2() {
    CriterionResult r{2, "gr(F2) = log 3 within 1e-9 and (1/25) log|S_25| within 5e-3"};
    Setup& s = setup("f2", "S");
    const double gr = s.gr.gr;
    PathCounter counter(s.aut, 25);
    // |S_25| is out of BFS reach; the validated automaton counts it.
    const double log25 = std::log(counter.sphere(25).convert_to<double>());
    const double log24 = std::log(counter.sphere(24).convert_to<double>());
    const double root = log25 / 25;
    const double ratio = log25 - log24;
    const bool spectral_ok = std::abs(gr - std::log(3.0)) < 1e-9;
    const bool root_ok = std::abs(gr - root) < 5e-3;
    r.pass = spectral_ok && root_ok;
    r.detail = {{"gr", gr},
                {"log3", std::log(3.0)},
                {"sphere_25", to_string(counter.sphere(25))},
                {"root_estimate", root},
                {"root_gap", std::abs(gr - root)},
                {"ratio_estimate", ratio},
                {"ratio_gap", std::abs(gr - ratio)}};
    r.summary = "gr = " + fmt(gr, 12) + ", (1/25)log|S_25| = " + fmt(root, 8) + " (gap " +
                fmt(std::abs(gr - root), 3) + "), log(|S_25|/|S_24|) = " + fmt(ratio, 12);
    return r;
  }

  CriterionResult c3() {
    CriterionResult r{3, "regular growth: F2 c1 = c2 = 4/3, PSL(2,Z) c2/c1 < 10 for n <= 25"};
    const RegularGrowth f2 = regular_growth_check(setup("f2", "S").aut, 25);
    const RegularGrowth psl = regular_growth_check(setup("psl2z", "S").aut, 25);
    const Rational four_thirds(4, 3);
    const bool f2_ok = f2.c1_exact && *f2.c1_exact == four_thirds && *f2.c2_exact == four_thirds;
    const double psl_ratio = psl.c2 / psl.c1;
    r.pass = f2_ok && psl.c1 > 0 && std::isfinite(psl.c2) && psl_ratio < 10;
    r.detail = {{"f2", to_json(f2)}, {"psl2z", to_json(psl)}, {"psl2z_ratio", psl_ratio}};
    r.summary = "F2 c1 = " + (f2.c1_exact ? to_string(*f2.c1_exact) : fmt(f2.c1)) +
                ", c2 = " + (f2.c2_exact ? to_string(*f2.c2_exact) : fmt(f2.c2)) +
                "; PSL c2/c1 = " + fmt(psl_ratio);
    return r;
  }

  CriterionResult c4() {
    CriterionResult r{4, "variational principle and Gibbs ratios on maximal components"};
    r.pass = true;
    r.detail = Json::object();
    std::string summary;
    for (const char* g : {"f2", "psl2z"}) {
      Setup& s = setup(g, "S");
      const Potential psi = Potential::word_metric(s.gr.gr);
      const MaximalComponents mc = maximal_components(s.sft, s.dec, psi);
      Json comps = Json::array();
      for (int i : mc.indices) {
        const Component& comp = s.dec.components[i];
        const VariationalReport v = check_variational(s.sft, comp, psi, 500, cfg_.seed);
        const MarkovMeasure m = parry_gibbs_measure(s.sft, comp, psi);
        const GibbsRatios gib = gibbs_ratio_scan(m, psi, 10);
        const bool gibbs_ok =
            gib.c1 > 0 && std::isfinite(gib.c1) && std::isfinite(gib.c2) && gib.c2 / gib.c1 < 100;
        r.pass = r.pass && v.passed() && gibbs_ok;
        comps.push_back({{"component", i}, {"variational", to_json(v)}, {"gibbs", to_json(gib)}});
        summary += std::string(summary.empty() ? "" : "; ") + g + " max violation " + fmt(v.max_violation, 3) +
                   ", parry gap " + fmt(v.parry_gap, 3) + ", gibbs c2/c1 " + fmt(gib.c2 / gib.c1, 4);
      }
      r.pass = r.pass && !mc.indices.empty();
      r.detail[g] = {{"maximal", to_json(mc)}, {"components", comps}};
    }
    r.summary = summary;
    return r;
  }

  CriterionResult c5() {
    CriterionResult r{5, "entropy of the Parry measure equals v_S within 1e-9"};
    r.pass = true;
    r.detail = Json::object();
    std::string summary;
    for (const char* g : {"f2", "psl2z"}) {
      Setup& s = setup(g, "S");
      const Potential psi = Potential::word_metric(s.gr.gr);
      const MaximalComponents mc = maximal_components(s.sft, s.dec, psi);
      double worst = 0;
      for (int i : mc.indices)
        worst = std::max(worst, std::abs(entropy(parry_gibbs_measure(s.sft, s.dec.components[i], psi)) - s.gr.gr));
      r.pass = r.pass && !mc.indices.empty() && worst < 1e-9;
      r.detail[g] = {{"v_S", s.gr.gr}, {"max_gap", worst}};
      summary += std::string(summary.empty() ? "" : "; ") + g + " gap " + fmt(worst, 3);
    }
    r.summary = summary;
    return r;
  }

  CriterionResult c6() {
    CriterionResult r{6, "F2 S -> {a,b,ab}: Monte Carlo matches exact at n = 4,6,8 within 4 stderr in < 60 s"};
    const auto t0 = std::chrono::steady_clock::now();
    Setup& s = setup("f2", "S");
    Setup& t = setup("f2", "Sab");
    ForeignLength fl(s.S, t.S);
    const std::vector<ExactRow> exact = mean_distortion_exact(s.aut, fl, 8);
    const DistortionReport mc = mean_distortion_mc(s.aut, fl, {4, 6, 8}, cfg_.consistency_samples, cfg_.seed, mc_);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool agree = true;
    double worst = 0;
    Json rows = Json::array();
    for (const McRow& m : mc.mc) {
      const double e = exact[m.n].normalized();
      const double z = std::abs(m.mean - e) / m.stderr_;
      agree = agree && std::abs(m.mean - e) <= 4 * m.stderr_;
      worst = std::max(worst, z);
      rows.push_back({{"n", m.n}, {"exact", e}, {"exact_rational", to_string(exact[m.n].expectation)},
                      {"mc_mean", m.mean}, {"mc_stderr", m.stderr_}, {"z", z}});
    }
    r.pass = agree && r.seconds < 60;
    r.detail = {{"rows", rows}, {"max_z", worst}};
    r.summary = "max |mc - exact| / stderr = " + fmt(worst, 4);
    return r;
  }

  CriterionResult c7() {
    CriterionResult r{7, "growth inequality over the battery; S -> S is the equality case"};
    r.pass = true;
    r.detail = Json::object();
    std::string summary;
    for (auto [g, to] : {std::pair{"f2", "S"}, {"f2", "Sab"}, {"f2", "Sa2"}, {"psl2z", "Sst"}}) {
      const PairRun& p = pair(g, to);
      const std::string key = std::string(g) + ":S->" + to;
      r.pass = r.pass && p.verdict.pass;
      r.detail[key] = {{"distortion", to_json(p.rep)}, {"verdict", to_json(p.verdict)}};
      summary += std::string(summary.empty() ? "" : "; ") + key + " tau " + fmt(p.rep.tau_hat, 5) + " +- " +
                 fmt(p.rep.half_width, 2) + " >= " + fmt(p.verdict.bound, 5);
    }
    const PairRun& same = pair("f2", "S");
    bool zero = true;
    for (const auto& row : same.scan.rows) zero = zero && row.max_deviation == 0;
    const bool equality = std::abs(same.rep.tau_hat - 1) < 0.01 && same.scan.bounded_looking && zero;
    r.pass = r.pass && equality;
    r.detail["equality_case"] = {{"tau_gap", std::abs(same.rep.tau_hat - 1)}, {"scan", to_json(same.scan)}};
    r.summary = summary + "; S->S scan " + same.scan.verdict();
    return r;
  }

  CriterionResult c8() {
    CriterionResult r{8, "F2 S -> S u {a^2}: strict margin, GROWING scan, ray slope |tau - 1/2| within 10%"};
    const PairRun& p = pair("f2", "Sa2");
    Setup& s = setup("f2", "S");
    ForeignLength fl(s.S, setup("f2", "Sa2").S);
    const RayDeviation ray = ray_deviation(fl, s.S.gens().words.at(0), p.rep.tau_hat, 20);
    const double expected = std::abs(p.rep.tau_hat - 0.5);
    const bool slope_ok = std::abs(ray.slope - expected) <= 0.1 * expected;
    r.pass = p.verdict.strict && !p.scan.bounded_looking && slope_ok;
    r.detail = {{"verdict", to_json(p.verdict)},
                {"half_width", p.rep.half_width},
                {"scan", to_json(p.scan)},
                {"ray", to_json(ray)},
                {"expected_slope", expected}};
    r.summary = "margin " + fmt(p.verdict.margin, 4) + " vs half-width " + fmt(p.rep.half_width, 3) + ", scan " +
                p.scan.verdict() + ", slope " + fmt(ray.slope, 4) + " vs " + fmt(expected, 4);
    return r;
  }

  CriterionResult c9() {
    CriterionResult r{9, "LLN: F2 S -> {a,b,ab} outlier fraction at eps = 0.05 nonincreasing over n = 10,20,40"};
    const PairRun& p = pair("f2", "Sab");
    Setup& s = setup("f2", "S");
    ForeignLength fl(s.S, setup("f2", "Sab").S);
    const LlnTable t = lln_check(s.aut, fl, p.rep.tau_hat, {10, 20, 40}, {0.02, 0.05, 0.1}, cfg_.mc_samples,
                                 cfg_.seed + 1, mc_);
    bool ok = false;
    for (auto [eps, mono] : t.nonincreasing)
      if (std::abs(eps - 0.05) < 1e-12) ok = mono;
    std::string fr;
    for (const auto& c : t.cells)
      if (std::abs(c.eps - 0.05) < 1e-12) fr += (fr.empty() ? "" : ", ") + fmt(c.fraction, 4);
    r.pass = ok;
    r.detail = to_json(t);
    r.summary = "fractions at eps 0.05: " + fr;
    return r;
  }

  CriterionResult c10() {
    CriterionResult r{10, "dimension: self-gauge identity and drift agrees with tau_hat within 4 combined stderr"};
    Setup& s = setup("f2", "S");
    const Potential psi = Potential::word_metric(s.gr.gr);
    const MaximalComponents mc = maximal_components(s.sft, s.dec, psi);
    const MarkovMeasure m = parry_gibbs_measure(s.sft, s.dec.components.at(mc.indices.at(0)), psi);
    RaySampler rays(s.aut, s.sft, m);
    DimensionParams params;
    params.n = 40;
    params.samples = cfg_.mc_samples;
    params.seed = cfg_.seed + 2;
    params.diagnostic_rays = 0;
    params.mc = mc_;

    ForeignLength self(s.S, s.S);
    const DimensionEstimate d_self = ps_dimension_estimate(rays, self, s.gr.gr, s.gr.gr, params);
    const bool self_ok = std::abs(d_self.dim_hat - s.gr.gr) <= d_self.width + 1e-12;

    Setup& t = setup("f2", "Sab");
    ForeignLength fl(s.S, t.S);
    const DimensionEstimate d = ps_dimension_estimate(rays, fl, s.gr.gr, t.gr.gr, params);
    const PairRun& p = pair("f2", "Sab");
    const McRow& last = p.rep.mc.back();
    const double combined = std::hypot(d.drift_full.stderr_, last.stderr_);
    const double gap = std::abs(d.drift_full.mean - p.rep.tau_hat);
    const bool drift_ok = gap <= 4 * combined;
    const bool frostman = d.dim_hat <= t.gr.gr + d.width;
    r.pass = self_ok && drift_ok && frostman;
    r.detail = {{"self", to_json(d_self)},
                {"Sab", to_json(d)},
                {"tau_hat", p.rep.tau_hat},
                {"gr_over_tau", s.gr.gr / p.rep.tau_hat},
                {"drift_gap", gap},
                {"combined_stderr", combined},
                {"dim_le_gr_Sstar", frostman}};
    r.summary = "self dim " + fmt(d_self.dim_hat, 10) + " vs gr " + fmt(s.gr.gr, 10) + "; drift " +
                fmt(d.drift_full.mean, 5) + " vs tau_hat " + fmt(p.rep.tau_hat, 5) + " (gap " + fmt(gap, 3) +
                ", 4 sigma " + fmt(4 * combined, 3) + ")";
    return r;
  }

  CriterionResult c11() {
    CriterionResult r{11, "uniform sphere sampler on F2, n = 4: chi-square at significance 0.001"};
    Setup& s = setup("f2", "S");
    const int n = 4;
    PathCounter counter(s.aut, n);
    std::unordered_map<Element, std::size_t, ElementHash> cells;
    enumerate_sphere(s.aut, s.S, n, [&](const Element& x, const Word&) { cells[x] = 0; });
    Rng rng(cfg_.seed, 11);
    for (std::size_t i = 0; i < cfg_.chi_square_samples; ++i) ++cells.at(s.S.evaluate(sample_uniform_path(counter, n, rng)));
    const double expected = static_cast<double>(cfg_.chi_square_samples) / static_cast<double>(cells.size());
    double chi2 = 0;
    for (const auto& [x, c] : cells) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(cells.size() - 1));
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    r.pass = cells.size() == 108 && p >= 0.001;
    r.detail = {{"cells", cells.size()}, {"samples", cfg_.chi_square_samples}, {"chi2", chi2}, {"p_value", p}};
    r.summary = std::to_string(cells.size()) + " cells, chi2 = " + fmt(chi2, 5) + ", p = " + fmt(p, 4);
    return r;
  }

  BatteryConfig cfg_;
  McOptions mc_;
  std::map<std::string, Presentation> presentations_;
  std::map<std::string, Setup> setups_;
  std::map<std::string, PairRun> pairs_;
};

}  // namespace detail

// Runs criteria 1-11, then repeats them from scratch and compares the two
// reports byte for byte (criterion 12).
inline BatteryReport run_battery(const BatteryConfig& cfg, std::ostream* log = nullptr) {
  BatteryReport first;
  if (log) *log << "battery: first pass\n";
  first.criteria = detail::Runner(cfg).run(log);
  BatteryReport second;
  if (log) *log << "battery: second pass\n";
  second.criteria = detail::Runner(cfg).run(log);
  const std::string a = to_json(first, cfg, false).dump();
  const std::string b = to_json(second, cfg, false).dump();
  CriterionResult r{12, "repeated battery runs with the same seed give byte-identical reports"};
  r.pass = a == b;
  r.detail = {{"report_bytes", a.size()}, {"identical", r.pass}};
  r.summary = r.pass ? "identical (" + std::to_string(a.size()) + " bytes)" : "reports differ";
  first.criteria.push_back(std::move(r));
  return first;
}

}  // namespace hypdist

#endif  // HYPDIST_BATTERY_HPP_
