#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hypdist/measure.hpp"
#include "support.hpp"

using namespace hypdist;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Shift {
  Sft sft;
  ComponentDecomposition dec;
  MarkovMeasure m;
};

Shift parry(Sft sft, const Potential& psi) {
  Shift s{std::move(sft), {}, {}};
  s.dec = components(s.sft);
  REQUIRE(s.dec.components.size() >= 1);
  s.m = parry_gibbs_measure(s.sft, s.dec.components[0], psi);
  return s;
}

void check_markov_invariants(const MarkovMeasure& m, const Sft& sft, const Component& comp) {
  double total = 0;
  for (int i = 0; i < m.size(); ++i) {
    total += m.pi[i];
    double row = 0;
    for (auto [j, p] : m.P[i]) {
      row += p;
      CHECK(p > 0);
      // Support stays inside the component's adjacency.
      const int e = m.blocks[i].back(), f = m.blocks[j].back();
      CHECK(sft.allowed(e, f));
      CHECK(std::binary_search(comp.symbols.begin(), comp.symbols.end(), f));
    }
    CHECK_THAT(row, WithinAbs(1.0, 1e-12));
    double flow = 0;
    for (int k = 0; k < m.size(); ++k) flow += m.pi[k] * m.prob(k, i);
    CHECK_THAT(flow, WithinAbs(m.pi[i], 1e-12));
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  // Every arc of the component carries positive probability.
  if (m.block_length == 1)
    for (int i = 0; i < m.size(); ++i)
      for (int f : sft.successors(m.blocks[i][0]))
        if (std::binary_search(comp.symbols.begin(), comp.symbols.end(), f)) CHECK(m.prob(i, m.state_of(std::vector<int>{f})) > 0);
}

// Additivity over one-step refinements for every allowed block up to max_len.
void check_premeasure(const MarkovMeasure& m, const Sft& sft, int max_len) {
  std::vector<int> block;
  auto rec = [&](auto&& self) -> void {
    const double mass = cylinder_measure(m, block);
    if (static_cast<int>(block.size()) == max_len) return;
    double sum = 0;
    for (int f = 0; f < sft.size(); ++f) {
      if (!block.empty() && !sft.allowed(block.back(), f)) continue;
      block.push_back(f);
      sum += cylinder_measure(m, block);
      if (cylinder_measure(m, block) > 0) self(self);
      block.pop_back();
    }
    CHECK_THAT(sum, WithinAbs(mass, 1e-12));
  };
  rec(rec);
}

}  // namespace

TEST_CASE("parry measure on the free group") {
  const Presentation p = testing::load("f2");
  const GeodesicAutomaton aut = build_geodesic_automaton(p.cayley("S"), 1, 8);
  const double v = std::log(3.0);
  const Shift s = parry(sft_from_automaton(aut), Potential::word_metric(v));
  REQUIRE(s.m.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK_THAT(s.m.pi[i], WithinAbs(1.0 / 12, 1e-12));
    CHECK(s.m.P[i].size() == 3);
    for (auto [j, q] : s.m.P[i]) CHECK_THAT(q, WithinAbs(1.0 / 3, 1e-12));
  }
  CHECK_THAT(s.m.pressure_at_construction, WithinAbs(0.0, 1e-12));
  CHECK_THAT(entropy(s.m), WithinAbs(v, 1e-9));
  check_markov_invariants(s.m, s.sft, s.dec.components[0]);
  check_premeasure(s.m, s.sft, 8);

  CHECK_THAT(cylinder_measure(s.m, std::vector<int>{0}), WithinAbs(1.0 / 12, 1e-15));
  CHECK(cylinder_measure(s.m, std::vector<int>{}) == 1.0);
  int bad = -1;
  for (int f = 0; f < 12; ++f)
    if (!s.sft.allowed(0, f)) bad = f;
  REQUIRE(bad >= 0);
  CHECK(cylinder_measure(s.m, std::vector<int>{0, bad}) == 0.0);

  const GibbsRatios g = gibbs_ratio_scan(s.m, Potential::word_metric(v), 10);
  CHECK_THAT(g.c1, WithinRel(g.c2, 1e-9));
  CHECK(g.c1 > 0);
  CHECK_THROWS_AS(gibbs_ratio_scan(s.m, Potential::word_metric(v), 0), PreconditionError);
  CHECK_THROWS_AS(gibbs_ratio_scan(s.m, Potential::word_metric(v), 10, 100), ResourceLimit);
}

TEST_CASE("entropy equals growth on maximal components") {
  for (auto [group, set] : {std::pair{"f2", "Sab"}, {"f2", "Sa2"}, {"psl2z", "S"}, {"psl2z", "Sst"}}) {
    CAPTURE(group, set);
    const Presentation p = testing::load(group);
    const GeodesicAutomaton aut = build_geodesic_automaton(p.cayley(set), 1, 8);
    const GrowthRate gr = growth_rate(aut);
    const Sft sft = sft_from_automaton(aut);
    const auto dec = components(sft);
    const Potential psi = Potential::word_metric(gr.gr);
    const auto mc = maximal_components(sft, dec, psi);
    REQUIRE_FALSE(mc.indices.empty());
    for (int i : mc.indices) {
      const MarkovMeasure m = parry_gibbs_measure(sft, dec.components[i], psi);
      CHECK_THAT(entropy(m), WithinAbs(gr.gr, 1e-9));
      CHECK(m.period == dec.components[i].period);
      check_markov_invariants(m, sft, dec.components[i]);
      check_premeasure(m, sft, 6);
      const GibbsRatios g = gibbs_ratio_scan(m, psi, 8);
      CHECK(std::isfinite(g.c1));
      CHECK(g.c1 > 0);
      CHECK(g.c2 < 100);
    }
  }
}

TEST_CASE("measures on small shifts") {
  SECTION("full 2-shift") {
    const Shift s = parry(Sft::from_graph(1, {{0, 0}, {0, 0}}), Potential::constant_value(0.0));
    for (int i = 0; i < 2; ++i) {
      CHECK_THAT(s.m.pi[i], WithinAbs(0.5, 1e-12));
      for (auto [j, q] : s.m.P[i]) CHECK_THAT(q, WithinAbs(0.5, 1e-12));
    }
    CHECK_THAT(entropy(s.m), WithinAbs(std::log(2.0), 1e-12));
    const GibbsRatios g = gibbs_ratio_scan(s.m, Potential::constant_value(0.0), 10);
    CHECK_THAT(g.c1, WithinAbs(1.0, 1e-12));
    CHECK_THAT(g.c2, WithinAbs(1.0, 1e-12));
  }
  SECTION("directed 3-cycle") {
    const Shift s = parry(Sft::from_graph(3, {{0, 1}, {1, 2}, {2, 0}}), Potential::constant_value(0.0));
    CHECK(s.m.period == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK_THAT(s.m.pi[i], WithinAbs(1.0 / 3, 1e-12));
      REQUIRE(s.m.P[i].size() == 1);
      CHECK_THAT(s.m.P[i][0].second, WithinAbs(1.0, 1e-12));
    }
    CHECK_THAT(entropy(s.m), WithinAbs(0.0, 1e-15));
    const GibbsRatios g = gibbs_ratio_scan(s.m, Potential::constant_value(0.0), 9);
    CHECK_THAT(g.c1, WithinAbs(1.0 / 3, 1e-12));
    CHECK_THAT(g.c2, WithinAbs(1.0 / 3, 1e-12));
  }
  SECTION("period two with unequal weights") {
    // 0 -> 1 by two edges, 1 -> 0 by one edge; lambda^2 = 2.
    const Sft sft = Sft::from_graph(2, {{0, 1}, {0, 1}, {1, 0}});
    const Shift s = parry(sft, Potential::constant_value(0.0));
    CHECK(s.m.period == 2);
    CHECK_THAT(s.m.pressure_at_construction, WithinAbs(0.5 * std::log(2.0), 1e-12));
    CHECK_THAT(s.m.pi[2], WithinAbs(0.5, 1e-12));
    check_markov_invariants(s.m, s.sft, s.dec.components[0]);
    check_premeasure(s.m, s.sft, 8);
    CHECK_THAT(entropy(s.m), WithinAbs(s.m.pressure_at_construction, 1e-12));
  }
  SECTION("two-block potential") {
    const Sft sft = Sft::from_graph(1, {{0, 0}, {0, 0}});
    Potential psi;
    psi.block_length = 2;
    psi.values = {{{0, 0}, 0.0}, {{0, 1}, -0.3}, {{1, 0}, 0.2}, {{1, 1}, std::log(2.0)}};
    const Shift s = parry(sft, psi);
    CHECK(s.m.block_length == 2);
    CHECK(s.m.size() == 4);
    check_markov_invariants(s.m, s.sft, s.dec.components[0]);
    check_premeasure(s.m, s.sft, 6);
    CHECK_THAT(variational_value(s.m, psi), WithinAbs(s.m.pressure_at_construction, 1e-9));
    const auto rep = check_variational(s.sft, s.dec.components[0], psi, 200, 3);
    CHECK(rep.passed());
  }
}

TEST_CASE("variational principle") {
  SECTION("free group, 500 trials") {
    const Presentation p = testing::load("f2");
    const GeodesicAutomaton aut = build_geodesic_automaton(p.cayley("S"), 1, 8);
    const Sft sft = sft_from_automaton(aut);
    const auto dec = components(sft);
    const auto rep = check_variational(sft, dec.components[0], Potential::word_metric(std::log(3.0)), 500, 1);
    CHECK(rep.trials == 500);
    CHECK(rep.violations == 0);
    CHECK(rep.parry_gap < 1e-9);
    CHECK(rep.max_violation <= 1e-9);
    CHECK(rep.passed());
    CHECK_THROWS_AS(check_variational(sft, dec.components[0], Potential::word_metric(1.0), 0, 1), PreconditionError);
  }
  SECTION("Bernoulli(0.9) on the 2-shift") {
    const Sft sft = Sft::from_graph(1, {{0, 0}, {0, 0}});
    const auto dec = components(sft);
    const BlockChain bc = block_chain(sft, dec.components[0], Potential::constant_value(0.0));
    std::vector<std::vector<double>> w(2);
    for (int i = 0; i < 2; ++i)
      for (int j : bc.succ[i]) w[i].push_back(j == 0 ? 0.9 : 0.1);
    const MarkovMeasure m = markov_measure_from_weights(bc, w);
    const double h = -(0.9 * std::log(0.9) + 0.1 * std::log(0.1));
    CHECK_THAT(variational_value(m, Potential::constant_value(0.0)), WithinAbs(h, 1e-12));
    CHECK_THAT(h, WithinAbs(0.325, 5e-4));
    CHECK(h < std::log(2.0));
  }
  SECTION("deterministic cycle inside the 2-shift") {
    const Sft sft = Sft::from_graph(1, {{0, 0}, {0, 0}});
    const auto dec = components(sft);
    const BlockChain bc = block_chain(sft, dec.components[0], Potential::constant_value(0.0));
    std::vector<std::vector<double>> w(2);
    // Alternate 0, 1, 0, 1, ...
    for (int i = 0; i < 2; ++i)
      for (int j : bc.succ[i]) w[i].push_back(j != i ? 1.0 : 0.0);
    const MarkovMeasure m = markov_measure_from_weights(bc, w);
    CHECK_THAT(entropy(m), WithinAbs(0.0, 1e-15));
    CHECK(variational_value(m, Potential::constant_value(0.0)) <= std::log(2.0));
  }
}

TEST_CASE("coding check on the free group") {
  const Presentation p = testing::load("f2");
  const Cayley S = p.cayley("S");
  const GeodesicAutomaton aut = build_geodesic_automaton(S, 1, 10);
  const double v = std::log(3.0);
  const Sft sft = sft_from_automaton(aut);
  const auto dec = components(sft);
  const std::vector<MarkovMeasure> ms{parry_gibbs_measure(sft, dec.components[0], Potential::word_metric(v))};
  const CodingReport rep = ps_coding_check(aut, S, sft, ms, v, 0, {1, 4, 6, 8}, 1);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CAPTURE(row.n);
    // Pair counts beyond the budget are sampled.
    CHECK(row.exhaustive == (row.n <= 6));
    CHECK(std::isfinite(row.max_ratio));
    CHECK(row.max_ratio > 0);
    if (row.exhaustive) CHECK_THAT(row.total_mass, WithinAbs(1.0, 1e-9));
    // Some (x, y) pairs are never coded: the bound is one-sided.
    CHECK(row.zero_pairs > 0);
  }
  const CodingReport main = ps_coding_check(aut, S, sft, ms, v, 0, {4, 6, 8}, 1);
  CHECK(main.spread <= 2.0);
  CHECK(main.bounded);
  CHECK_THROWS_AS(ps_coding_check(aut, S, sft, ms, v, 0, {0}, 1), PreconditionError);
}

TEST_CASE("measure text round trip") {
  const Presentation p = testing::load("psl2z");
  const GeodesicAutomaton aut = build_geodesic_automaton(p.cayley("Sst"), 1, 8);
  const GrowthRate gr = growth_rate(aut);
  const Sft sft = sft_from_automaton(aut);
  const auto dec = components(sft);
  const auto mc = maximal_components(sft, dec, Potential::word_metric(gr.gr));
  const MarkovMeasure m = parry_gibbs_measure(sft, dec.components[mc.indices[0]], Potential::word_metric(gr.gr));
  std::ostringstream a;
  write_measure(a, m);
  std::istringstream in(a.str());
  const MarkovMeasure back = read_measure(in);
  std::ostringstream b;
  write_measure(b, back);
  CHECK(a.str() == b.str());
  CHECK(back.pi == m.pi);
  CHECK(back.blocks == m.blocks);
  std::istringstream junk("markov_measure v2\n");
  CHECK_THROWS_AS(read_measure(junk), ParseError);
}
