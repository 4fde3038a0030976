#include <catch_amalgamated.hpp>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "hypdist/dimension.hpp"
#include "support.hpp"

using namespace hypdist;
using Catch::Matchers::WithinAbs;

namespace {

// Automaton, edge shift and Parry measure on a maximal component.
struct Setup {
  Presentation p;
  Cayley S;
  GeodesicAutomaton aut;
  Sft sft;
  MarkovMeasure m;
  double gr = 0;

  Setup(const std::string& group, const std::string& set)
      : p(testing::load(group)), S(p.cayley(set)), aut(build_geodesic_automaton(S, 1, 8)),
        sft(sft_from_automaton(aut)) {
    gr = growth_rate(aut).gr;
    const auto dec = components(sft);
    const auto mc = maximal_components(sft, dec, Potential::word_metric(gr));
    m = parry_gibbs_measure(sft, dec.components[mc.indices.at(0)], Potential::word_metric(gr));
  }
};

// Brute-force shadow: scan the whole sphere and test the Gromov product.
Rational shadow_oracle(const Cayley& S, const Element& x, int R, int n, HalfInteger delta) {
  const int k = S.length(x);
  const auto sph = sphere(S, n);
  BigInt hits = 0;
  for (const Element& y : sph)
    if (gromov_product(x, y, S).twice >= 2 * (k - R) - 2 * delta.twice) ++hits;
  return Rational(hits, static_cast<long long>(sph.size()));
}

}  // namespace

TEST_CASE("Parry rays in the free group") {
  const Setup f("f2", "S");
  const RaySampler rays(f.aut, f.sft, f.m);
  const Group& g = *f.p.group;
  Rng rng(3);
  std::map<Letter, int> first;
  for (int i = 0; i < 4000; ++i) {
    const RaySample r = rays.sample(f.S, 12, rng);
    REQUIRE(r.letters.size() == 12);
    REQUIRE(r.trail.size() == 13);
    ++first[r.letters[0]];
    for (int k = 0; k + 1 < 12; ++k) CHECK(r.letters[k + 1] != f.S.gens().inverse[r.letters[k]]);
    if (i % 100 == 0) {
      for (int k = 0; k < 12; ++k) {
        CHECK(g.multiply(r.trail[k], f.S.gens().elements[r.letters[k]]) == r.trail[k + 1]);
        CHECK(f.S.length(r.trail[k + 1]) == k + 1);
      }
    }
  }
  REQUIRE(first.size() == 4);
  double chi2 = 0;
  for (auto [a, c] : first) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  CHECK(boost::math::cdf(boost::math::complement(boost::math::chi_squared(3), chi2)) > 0.001);

  const RaySample zero = rays.sample(f.S, 0, rng);
  CHECK(zero.trail.size() == 1);
  CHECK(g.is_identity(zero.trail[0]));
  CHECK(zero.letters.empty());
  CHECK(sample_ray(f.aut, f.sft, f.m, f.S, 20, 9).letters == sample_ray(f.aut, f.sft, f.m, f.S, 20, 9).letters);
  CHECK_THROWS_AS(rays.sample(f.S, -1, rng), PreconditionError);
}

TEST_CASE("rays on other groups are geodesic") {
  for (auto [group, set] : {std::pair{"psl2z", "S"}, {"psl2z", "Sst"}, {"f2", "Sab"}}) {
    CAPTURE(group, set);
    const Setup s(group, set);
    const RaySampler rays(s.aut, s.sft, s.m);
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
      const RaySample r = rays.sample(s.S, 14, rng);
      CHECK(s.S.length(r.trail.back()) == 14);
      for (int k = 0; k < 14; ++k) CHECK(s.S.step(r.trail[k], r.letters[k]) == r.trail[k + 1]);
      const Word w = rays.sample_bilateral(7, rng);
      REQUIRE(w.size() == 14);
      CHECK(s.S.length(s.S.evaluate(w)) == 14);
    }
  }
}

TEST_CASE("a deterministic cycle gives the unique ray") {
  const Presentation p = testing::load("f2");
  const Cayley S = p.cayley("S");
  std::string alphabet;
  for (const auto& l : S.gens().letters) alphabet += " " + l;
  const GeodesicAutomaton aut = automaton_from_string("automaton v1\nalphabet" + alphabet +
                                                      "\nstates 1\ninitial 0\nlevel_used 1\nvalidated_to 3\nt 0 a 0\nend\n");
  const Sft sft = sft_from_automaton(aut);
  const auto dec = components(sft);
  const MarkovMeasure m = parry_gibbs_measure(sft, dec.components[0], Potential::constant_value(0.0));
  const RaySample r = sample_ray(aut, sft, m, S, 9, 1);
  CHECK(r.trail.back() == p.group->normalize(p.group->parse_word("aaaaaaaaa")));
  CHECK(r.prefix_length == 0);
}

TEST_CASE("drift") {
  const Setup f("f2", "S");
  const RaySampler rays(f.aut, f.sft, f.m);

  const DriftEstimate self = drift(rays, ForeignLength(f.S, f.S), 15, 500, 1);
  CHECK(self.mean == 1.0);
  CHECK(self.stderr_ == 0.0);
  CHECK_THROWS_AS(drift(rays, ForeignLength(f.S, f.S), 0, 500, 1), PreconditionError);
  CHECK_THROWS_AS(drift(rays, ForeignLength(f.S, f.S), 5, 1, 1), PreconditionError);

  const ForeignLength fl(f.S, f.p.cayley("Sab"));
  const int n = 20;
  const DriftEstimate d = drift(rays, fl, n, 3000, 2);
  const DriftEstimate half = drift(rays, fl, n / 2, 3000, 2);
  const DistortionReport rep = mean_distortion_mc(f.aut, fl, {n}, 3000, 5);
  CHECK(std::abs(d.mean - rep.tau_hat) <= 4 * std::hypot(d.stderr_, rep.mc[0].stderr_));

  // The two-sided drift has the same limit; allow the finite-n gap seen
  // between n/2 and n.
  const DriftEstimate b = bilateral_drift(rays, fl, n, 3000, 6);
  CHECK(std::abs(b.mean - d.mean) <= 4 * std::hypot(b.stderr_, d.stderr_) + std::abs(d.mean - half.mean));
}

TEST_CASE("shadow masses") {
  SECTION("free group subtrees") {
    const Setup f("f2", "S");
    const Group& g = *f.p.group;
    CHECK(shadow_mass(f.aut, f.S, g.identity(), 0, 6, HalfInteger{0}) == 1);
    for (const char* w : {"a", "ab", "abA", "BBaB", "abababab"}) {
      const Element x = g.normalize(g.parse_word(w));
      const int k = f.S.length(x);
      for (int n = k + 1; n <= k + 4; ++n) {
        CAPTURE(w, n);
        const Rational expected = Rational(3, 4) / boost::multiprecision::pow(BigInt(3), static_cast<unsigned>(k));
        CHECK(shadow_mass(f.aut, f.S, x, 0, n, HalfInteger{0}) == expected);
      }
    }
    CHECK_THROWS_AS(shadow_mass(f.aut, f.S, g.normalize(g.parse_word("ab")), 0, 1, HalfInteger{0}),
                    PreconditionError);
    CHECK_THROWS_AS(shadow_mass(f.aut, f.S, g.identity(), -1, 4, HalfInteger{0}), PreconditionError);
  }

  SECTION("against a brute-force sphere scan") {
    for (auto [group, set] : {std::pair{"f2", "S"}, {"f2", "Sab"}, {"psl2z", "S"}, {"psl2z", "Sst"}}) {
      CAPTURE(group, set);
      const Setup s(group, set);
      const HalfInteger delta = estimate_delta(s.S, 3).delta;
      const RaySampler rays(s.aut, s.sft, s.m);
      Rng rng(8);
      for (int trial = 0; trial < 4; ++trial) {
        const RaySample r = rays.sample(s.S, 4, rng);
        for (int k : {1, 3}) {
          for (int R : {0, 1}) {
            const int n = std::max(k + R, k + 2);
            CHECK(shadow_mass(s.aut, s.S, r.trail[k], R, n, delta) == shadow_oracle(s.S, r.trail[k], R, n, delta));
          }
        }
      }
    }
  }

  SECTION("sandwich and monotonicity") {
    for (auto [group, set] : {std::pair{"f2", "S"}, {"psl2z", "S"}, {"psl2z", "Sst"}}) {
      CAPTURE(group, set);
      const Setup s(group, set);
      const HalfInteger delta = estimate_delta(s.S, 3).delta;
      const RaySampler rays(s.aut, s.sft, s.m);
      Rng rng(10);
      for (int trial = 0; trial < 3; ++trial) {
        const RaySample r = rays.sample(s.S, 8, rng);
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (int gap : {4, 6, 8}) {
          double prev = 2;
          for (int k = 0; k <= 8; ++k) {
            const double mass = static_cast<double>(shadow_mass(s.aut, s.S, r.trail[k], 0, k + gap, delta));
            // Stages differ along this sequence, so it is only nearly monotone.
            CHECK_NOFAIL(mass <= prev);
            prev = mass;
            // At one stage the shadows of a ray's prefixes are nested.
            if (delta.twice == 0 && k >= 1)
              CHECK(shadow_mass(s.aut, s.S, r.trail[k], 0, 8 + gap, delta) <=
                    shadow_mass(s.aut, s.S, r.trail[k - 1], 0, 8 + gap, delta));
            const double scaled = mass * std::exp(s.gr * k);
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
          }
        }
        CHECK(lo > 0);
        CHECK(hi / lo < 10);
      }
    }
  }
}

TEST_CASE("dimension estimates") {
  const Setup f("f2", "S");
  const RaySampler rays(f.aut, f.sft, f.m);
  DimensionParams params;
  params.n = 20;
  params.samples = 1000;
  params.diagnostic_rays = 10;

  const DimensionEstimate self = ps_dimension_estimate(rays, ForeignLength(f.S, f.S), f.gr, f.gr, params);
  CHECK_THAT(self.dim_hat, WithinAbs(std::log(3.0), 1e-12));
  CHECK(self.width == 0.0);
  REQUIRE(self.local.size() == 40);
  for (const auto& l : self.local) CHECK_THAT(l.local_dimension, WithinAbs(std::log(3.0), 1e-12));

  for (const char* set : {"Sab", "Sa2"}) {
    CAPTURE(set);
    const Cayley T = f.p.cayley(set);
    const double gr_T = growth_rate(build_geodesic_automaton(T, 1, 8)).gr;
    const DimensionEstimate d = ps_dimension_estimate(rays, ForeignLength(f.S, T), f.gr, gr_T, params);
    CHECK_THAT(d.dim_hat, WithinAbs(f.gr / d.drift_full.mean, 1e-12));
    CHECK(d.dim_hat <= gr_T + d.width);
    CHECK(d.dim_hat >= f.gr);
    CHECK(d.width > 0);
    for (const auto& l : d.local) {
      CHECK(l.foreign_length <= l.k);
      CHECK_THAT(l.local_dimension, WithinAbs(f.gr * l.k / l.foreign_length, 1e-12));
    }
  }
  params.n = 1;
  CHECK_THROWS_AS(ps_dimension_estimate(rays, ForeignLength(f.S, f.S), f.gr, f.gr, params), PreconditionError);
}

TEST_CASE("regular growth") {
  const Setup f("f2", "S");
  const RegularGrowth rg = regular_growth_check(f.aut, 40);
  REQUIRE(rg.c1_exact.has_value());
  CHECK(*rg.c1_exact == Rational(4, 3));
  CHECK(*rg.c2_exact == Rational(4, 3));
  CHECK_THAT(rg.c1, WithinAbs(4.0 / 3, 1e-9));
  CHECK_THAT(rg.c2, WithinAbs(4.0 / 3, 1e-9));
  const RegularGrowth from0 = regular_growth_check(f.aut, 3, 0);
  CHECK(from0.values[0] == 1.0);
  CHECK(*from0.c1_exact == 1);

  const Setup psl("psl2z", "S");
  const RegularGrowth rp = regular_growth_check(psl.aut, 25);
  CHECK(rp.c1 > 0);
  CHECK(std::isfinite(rp.c2));
  CHECK(rp.c2 / rp.c1 < 10);
  CHECK_FALSE(rp.c1_exact.has_value());
  CHECK_THROWS_AS(regular_growth_check(f.aut, 0), PreconditionError);
}
