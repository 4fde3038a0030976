// hypdist: command-line front end.
//
// Exit codes: 0 success, 1 a verdict failed, 2 bad input or usage.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypdist/hypdist.hpp"

namespace {

using namespace hypdist;

struct Common {
  std::string group;
  std::uint64_t seed = 7;
  std::string out;
  bool timing = false;
  unsigned threads = 1;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json config_echo(const Common& c, Json extra) {
  Json j{{"group", c.group}, {"seed", c.seed}, {"rng", Rng::algorithm}, {"threads", c.threads}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

void emit(const Common& c, const std::string& command, Json config, Json result,
          std::chrono::steady_clock::time_point t0) {
  Json report{{"tool", kToolVersion}, {"command", command}, {"config", config_echo(c, std::move(config))}};
  report["result"] = std::move(result);
  if (c.timing)
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw InputError("cannot write " + c.out);
    f << text;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  return f;
}

Presentation load(const Common& c) {
  if (!std::filesystem::exists(c.group)) throw InputError("group file not found: " + c.group);
  return load_presentation(c.group);
}

Cayley cayley_of(const Presentation& p, const std::string& name) {
  if (!p.sets.count(name)) {
    std::string known;
    for (const auto& s : p.set_order) known += (known.empty() ? "" : ", ") + s;
    throw InputError("no generating set '" + name + "' (known: " + known + ")");
  }
  return p.cayley(name);
}

void add_common(CLI::App* app, Common& c, bool needs_group = true) {
  auto* g = app->add_option("--group", c.group, "group presentation file");
  if (needs_group) g->required();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--out", c.out, "report path (default: stdout)");
  app->add_flag("--timing", c.timing, "include wall-clock seconds in the report");
  app->add_option("--threads", c.threads, "Monte Carlo threads")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hypdist: geodesic automata, growth, Gibbs measures, mean distortion and dimension estimates "
      "for word metrics on hyperbolic groups.\nGroup file grammar: see README.md."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  Common c;
  std::string gens = "S", from = "S", to;
  int L = 1, N = 10, n_max = 12, block = 10, trials = 500, exact_max = 8, scan_R = 8, n = 40, rays = 50;
  std::size_t samples = 10'000;
  std::vector<int> n_list{10, 20, 40};
  std::vector<double> eps_list{0.02, 0.05, 0.1};
  std::string save, csv, measure_out, data_dir = "data/groups";

  auto* automaton = app.add_subcommand("automaton", "build and validate a geodesic automaton");
  add_common(automaton, c);
  automaton->add_option("--gens", gens, "generating set name")->capture_default_str();
  automaton->add_option("-L", L, "starting cone level")->capture_default_str()->check(CLI::PositiveNumber);
  automaton->add_option("-N", N, "BFS validation radius (>= 2L)")->capture_default_str();
  automaton->add_option("--save", save, "write the automaton in its text format");

  auto* growth = app.add_subcommand("growth", "growth rate and sphere counts");
  add_common(growth, c);
  growth->add_option("--gens", gens, "generating set name")->capture_default_str();
  growth->add_option("-L", L, "starting cone level")->capture_default_str()->check(CLI::PositiveNumber);
  growth->add_option("-N", N, "BFS validation radius (>= 2L)")->capture_default_str();
  growth->add_option("--n-max", n_max, "largest sphere radius to count")->capture_default_str();

  auto* comps = app.add_subcommand("components", "recurrent components of the automaton's edge shift");
  add_common(comps, c);
  comps->add_option("--gens", gens, "generating set name")->capture_default_str();
  comps->add_option("-L", L, "starting cone level")->capture_default_str()->check(CLI::PositiveNumber);
  comps->add_option("-N", N, "BFS validation radius (>= 2L)")->capture_default_str();
  comps->add_option("--measure-out", measure_out, "write the Parry measure of the first maximal component");

  auto* gibbs = app.add_subcommand("gibbs", "variational principle, entropy and Gibbs ratios for psi_S");
  add_common(gibbs, c);
  gibbs->add_option("--gens", gens, "generating set name")->capture_default_str();
  gibbs->add_option("-L", L, "starting cone level")->capture_default_str()->check(CLI::PositiveNumber);
  gibbs->add_option("-N", N, "BFS validation radius (>= 2L)")->capture_default_str();
  gibbs->add_option("--block", block, "Gibbs scan block length")->capture_default_str();
  gibbs->add_option("--trials", trials, "random Markov measures")->capture_default_str();

  auto* dist = app.add_subcommand("distortion", "mean distortion of --to relative to --from");
  add_common(dist, c);
  dist->add_option("--from", from, "generating set S")->capture_default_str();
  dist->add_option("--to", to, "generating set S*")->required();
  dist->add_option("--n", n_list, "Monte Carlo radii")->capture_default_str()->delimiter(',');
  dist->add_option("--samples", samples, "samples per radius")->capture_default_str();
  dist->add_option("--exact-max", exact_max, "largest radius for exhaustive expectations (0: none)")
      ->capture_default_str();
  dist->add_option("--eps", eps_list, "LLN tolerances")->capture_default_str()->delimiter(',');
  dist->add_option("--scan-radius", scan_R, "rough-similarity scan radius")->capture_default_str();
  dist->add_option("--csv", csv, "per-radius CSV: n,exact,mc_mean,mc_stderr,samples");

  auto* dim = app.add_subcommand("dimension", "dimension of the Patterson-Sullivan measure of --from in --to");
  add_common(dim, c);
  dim->add_option("--from", from, "generating set S")->capture_default_str();
  dim->add_option("--to", to, "generating set S*")->required();
  dim->add_option("-n", n, "ray length")->capture_default_str();
  dim->add_option("--samples", samples, "rays per drift estimate")->capture_default_str();
  dim->add_option("--rays", rays, "rays in the diagnostics CSV")->capture_default_str();
  dim->add_option("--csv", csv, "diagnostics CSV: ray,k,foreign_length,local_dimension");

  auto* validate = app.add_subcommand("validate", "compare automaton path counts with BFS sphere sizes");
  add_common(validate, c);
  validate->add_option("--gens", gens, "generating set name")->capture_default_str();
  validate->add_option("-L", L, "starting cone level")->capture_default_str()->check(CLI::PositiveNumber);
  validate->add_option("-N", N, "validation radius")->capture_default_str();

  auto* battery = app.add_subcommand("battery", "run the twelve acceptance criteria");
  add_common(battery, c, false);
  battery->add_option("--data", data_dir, "directory with f2.grp and psl2z.grp")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*automaton || *growth || *comps || *gibbs || *validate) {
      const Presentation p = load(c);
      const Cayley S = cayley_of(p, gens);
      Json cfg{{"gens", gens}, {"L", L}, {"N_check", N}};

      if (*validate) {
        AutomatonBuildOptions opt;
        opt.L_max = L;
        const GeodesicAutomaton aut = build_cone_automaton_at_level(S, L, opt);
        const ValidationReport v = validate_automaton(aut, S, N, opt.validation, nullptr);
        std::cerr << "n\tpaths\tbfs\tequal\n";
        for (const auto& row : v.rows)
          std::cerr << row.n << "\t" << row.paths << "\t" << row.bfs << "\t" << (row.equal ? "yes" : "NO") << "\n";
        emit(c, "validate", cfg, {{"automaton", to_json(aut)}, {"validation", to_json(v)}}, t0);
        return v.ok() ? 0 : 1;
      }

      const GeodesicAutomaton aut = build_geodesic_automaton(S, L, N);
      if (*automaton) {
        if (!save.empty()) {
          auto f = open_out(save);
          write_automaton(f, aut);
        }
        emit(c, "automaton", cfg, {{"automaton", to_json(aut)}}, t0);
        return 0;
      }
      if (*growth) {
        cfg["n_max"] = n_max;
        PathCounter counter(aut, n_max);
        Json spheres = Json::array();
        for (int k = 0; k <= n_max; ++k) spheres.push_back(to_string(counter.sphere(k)));
        emit(c, "growth", cfg,
             {{"automaton", to_json(aut)},
              {"growth", to_json(growth_rate(aut))},
              {"sphere_sizes", spheres},
              {"regular_growth", to_json(regular_growth_check(aut, std::max(1, n_max)))}},
             t0);
        return 0;
      }
      const Sft sft = sft_from_automaton(aut);
      const ComponentDecomposition dec = components(sft);
      const GrowthRate gr = growth_rate(aut);
      const Potential psi = Potential::word_metric(gr.gr);
      const MaximalComponents mc = maximal_components(sft, dec, psi);
      if (*comps) {
        if (!measure_out.empty()) {
          if (mc.indices.empty()) throw PreconditionError("no maximal component");
          auto f = open_out(measure_out);
          write_measure(f, parry_gibbs_measure(sft, dec.components[mc.indices[0]], psi));
        }
        emit(c, "components", cfg,
             {{"symbols", sft.size()}, {"decomposition", to_json(dec)}, {"maximal", to_json(mc)},
              {"growth", to_json(gr)}},
             t0);
        return 0;
      }
      // gibbs
      cfg["block"] = block;
      cfg["trials"] = trials;
      Json per = Json::array();
      bool ok = !mc.indices.empty();
      for (int i : mc.indices) {
        const Component& comp = dec.components[i];
        const VariationalReport v = check_variational(sft, comp, psi, trials, c.seed);
        const MarkovMeasure m = parry_gibbs_measure(sft, comp, psi);
        const GibbsRatios g = gibbs_ratio_scan(m, psi, block);
        const double h = entropy(m);
        ok = ok && v.passed() && std::abs(h - gr.gr) < 1e-9;
        per.push_back({{"component", i}, {"entropy", h}, {"variational", to_json(v)}, {"gibbs", to_json(g)}});
      }
      emit(c, "gibbs", cfg, {{"growth", to_json(gr)}, {"maximal", to_json(mc)}, {"components", per}}, t0);
      return ok ? 0 : 1;
    }

    if (*dist || *dim) {
      const Presentation p = load(c);
      const Cayley S = cayley_of(p, from);
      const Cayley T = cayley_of(p, to);
      const GeodesicAutomaton aut_S = build_geodesic_automaton(S, 1, 8);
      const GeodesicAutomaton aut_T = build_geodesic_automaton(T, 1, 8);
      const double gr_S = growth_rate(aut_S).gr, gr_T = growth_rate(aut_T).gr;
      const ForeignLength fl(S, T);
      McOptions mc;
      mc.threads = c.threads;

      if (*dist) {
        Json cfg{{"from", from}, {"to", to}, {"n", n_list}, {"samples", samples}, {"exact_max", exact_max},
                 {"eps", eps_list}, {"scan_radius", scan_R}};
        DistortionReport rep = mean_distortion_mc(aut_S, fl, n_list, samples, c.seed, mc);
        if (exact_max > 0) rep.exact = mean_distortion_exact(aut_S, fl, exact_max);
        set_growth_rates(rep, gr_S, gr_T);
        const InequalityVerdict v = check_growth_inequality(rep);
        const LlnTable lln = lln_check(aut_S, fl, rep.tau_hat, n_list, eps_list, samples, c.seed + 1, mc);
        const SimilarityScan scan = rough_similarity_scan(fl, rep.tau_hat, scan_R);
        if (!csv.empty()) {
          auto f = open_out(csv);
          f << "n,exact,mc_mean,mc_stderr,samples\n";
          f.precision(17);
          std::vector<int> all;
          for (const auto& e : rep.exact) all.push_back(e.n);
          for (const auto& m : rep.mc) all.push_back(m.n);
          std::sort(all.begin(), all.end());
          all.erase(std::unique(all.begin(), all.end()), all.end());
          for (int k : all) {
            f << k << ",";
            if (k < static_cast<int>(rep.exact.size()) && k > 0) f << rep.exact[k].normalized();
            f << ",";
            auto it = std::find_if(rep.mc.begin(), rep.mc.end(), [&](const McRow& m) { return m.n == k; });
            if (it != rep.mc.end()) f << it->mean << "," << it->stderr_ << "," << it->samples;
            else f << ",,";
            f << "\n";
          }
        }
        emit(c, "distortion", cfg,
             {{"report", to_json(rep)}, {"verdict", to_json(v)}, {"lln", to_json(lln)}, {"similarity", to_json(scan)}},
             t0);
        return v.pass ? 0 : 1;
      }

      Json cfg{{"from", from}, {"to", to}, {"n", n}, {"samples", samples}, {"rays", rays}};
      const Sft sft = sft_from_automaton(aut_S);
      const ComponentDecomposition dec = components(sft);
      const Potential psi = Potential::word_metric(gr_S);
      const MaximalComponents mcs = maximal_components(sft, dec, psi);
      if (mcs.indices.empty()) throw PreconditionError("no maximal component");
      const MarkovMeasure m = parry_gibbs_measure(sft, dec.components[mcs.indices[0]], psi);
      const RaySampler sampler(aut_S, sft, m);
      DimensionParams params;
      params.n = n;
      params.samples = samples;
      params.diagnostic_rays = static_cast<std::size_t>(rays);
      params.seed = c.seed;
      params.mc = mc;
      const DimensionEstimate d = ps_dimension_estimate(sampler, fl, gr_S, gr_T, params);
      const DistortionReport rep = mean_distortion_mc(aut_S, fl, {n / 2, n}, samples, c.seed, mc);
      if (!csv.empty()) {
        auto f = open_out(csv);
        f << "ray,k,foreign_length,local_dimension\n";
        f.precision(17);
        for (const auto& s : d.local) f << s.ray << "," << s.k << "," << s.foreign_length << "," << s.local_dimension << "\n";
      }
      const bool frostman = d.dim_hat <= gr_T + d.width;
      Json summary{{"dim_hat", number(d.dim_hat)}, {"width", number(d.width)}, {"gr_S", gr_S},
                   {"gr_Sstar", gr_T},            {"tau_hat", rep.tau_hat},    {"dim_le_gr_Sstar", frostman}};
      emit(c, "dimension", cfg, {{"summary", summary}, {"estimate", to_json(d)}}, t0);
      return frostman ? 0 : 1;
    }

    if (*battery) {
      BatteryConfig cfg;
      cfg.group_dir = data_dir;
      cfg.seed = c.seed;
      cfg.threads = c.threads;
      if (!std::filesystem::is_directory(data_dir)) throw InputError("data directory not found: " + data_dir);
      const BatteryReport r = run_battery(cfg, &std::cerr);
      for (const auto& k : r.criteria)
        std::cerr << "criterion " << k.id << ": " << (k.pass ? "PASS" : "FAIL") << "  " << k.summary << "\n";
      const std::string text = to_json(r, cfg, c.timing).dump(2) + "\n";
      if (c.out.empty()) {
        std::cout << text;
      } else {
        auto f = open_out(c.out);
        f << text;
      }
      return r.all_pass() ? 0 : 1;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownLetter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidPresentation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
