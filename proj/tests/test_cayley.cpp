#include <catch_amalgamated.hpp>

#include "hypdist/cayley.hpp"
#include "support.hpp"

using namespace hypdist;

namespace {

Element el(const Presentation& p, const std::string& w) { return p.group->normalize(p.group->parse_word(w)); }

}  // namespace

TEST_CASE("spheres and balls") {
  const Presentation p = testing::load("f2");
  const Cayley S = p.cayley("S");
  CHECK(sphere(S, 0).size() == 1);
  CHECK(sphere(S, 1).size() == 4);
  CHECK(sphere(S, 3).size() == 36);
  const auto sizes = sphere_sizes(S, 8);
  Ball ball(S);
  ball.grow_to(8);
  std::uint64_t total = 0;
  for (int n = 0; n <= 8; ++n) {
    total += sizes[n];
    CHECK(sizes[n] == (n == 0 ? 1 : 4 * static_cast<std::uint64_t>(std::pow(3, n - 1))));
    CHECK(ball.layer(n).size() == sizes[n]);
  }
  CHECK(ball.size() == total);

  // Foreign generating set against a naive BFS on reduced words.
  const Cayley T = p.cayley("Sab");
  const auto naive = testing::free_ball(testing::symmetrize({"a", "b", "ab"}), 5);
  std::vector<std::uint64_t> expected(6, 0);
  for (const auto& [w, d] : naive) ++expected[d];
  CHECK(sphere_sizes(T, 5) == expected);

  const Presentation z = testing::load("z6");
  const Cayley Z = z.cayley("S");
  CHECK(sphere(Z, 3).size() == 1);
  CHECK(sphere(Z, 4).empty());
  CHECK_THROWS_AS(sphere(S, -1), PreconditionError);
}

TEST_CASE("surface group spheres follow the growth series") {
  const Presentation p = testing::load("genus2");
  // Cannon: sum |S_n| z^n = (1 + 2z + 2z^2 + 2z^3 + z^4) / (1 - 6z - 6z^2 - 6z^3 + z^4).
  const auto sph = testing::series({1, 2, 2, 2, 1}, {1, -6, -6, -6, 1}, 5);
  const auto sizes = sphere_sizes(p.cayley("S"), 5);
  for (int n = 0; n <= 5; ++n) CHECK(sizes[n] == static_cast<std::uint64_t>(sph[n]));
}

TEST_CASE("word lengths") {
  const Presentation p = testing::load("f2");
  const Cayley S = p.cayley("S");
  const Cayley T = p.cayley("Sab");
  CHECK(word_length(el(p, "abab"), T) == 2);
  CHECK(word_length(el(p, "aab"), S) == 3);
  CHECK(word_length(p.group->identity(), T) == 0);
  CHECK_THROWS_AS(word_length(el(p, "abababab"), T, 3), CapExceeded);

  const auto naive = testing::free_ball(testing::symmetrize({"a", "b", "ab"}), 4);
  for (const auto& [w, d] : naive) {
    CHECK(T.length(p.group->normalize(p.group->parse_word(w))) == d);
    CHECK(word_length(p.group->normalize(p.group->parse_word(w)), T) == d);
  }
  const auto naive2 = testing::free_ball(testing::symmetrize({"a", "b", "aa"}), 4);
  const Cayley T2 = p.cayley("Sa2");
  for (const auto& [w, d] : naive2) CHECK(T2.length(p.group->normalize(p.group->parse_word(w))) == d);
}

TEST_CASE("metric invariants on B(o,6)") {
  for (const char* name : {"f2", "psl2z"}) {
    const Presentation p = testing::load(name);
    const Cayley S = p.cayley("S");
    const Group& g = *p.group;
    Ball ball(S);
    ball.grow_to(6);
    const std::size_t n = ball.size();
    const std::size_t stride = n / 150 + 1;
    for (std::size_t i = 0; i < n; ++i) {
      const Element& x = ball.element(i);
      CHECK(S.length(g.inverse(x)) == ball.length(i));
      if (i % stride) continue;
      for (std::size_t j = 0; j < n; j += stride) {
        const Element& y = ball.element(j);
        const int dxy = S.length(g.multiply(g.inverse(x), y));
        CHECK(dxy <= ball.length(i) + ball.length(j));
        const HalfInteger gp = gromov_product(x, y, S);
        CHECK(gp.twice >= 0);
        CHECK(gp.twice <= 2 * std::min(ball.length(i), ball.length(j)));
      }
    }
  }
}

TEST_CASE("gromov products and busemann values") {
  const Presentation p = testing::load("f2");
  const Cayley S = p.cayley("S");
  CHECK(gromov_product(el(p, "ab"), el(p, "aB"), S) == HalfInteger{2});
  CHECK(gromov_product(el(p, "abba"), el(p, "abba"), S) == HalfInteger{8});
  CHECK(gromov_product(el(p, "a"), el(p, "A"), S) == HalfInteger{0});
  CHECK(busemann_finite(p.group->identity(), el(p, "bab"), S) == 0);
  CHECK(busemann_finite(el(p, "a"), el(p, "aaa"), S) == -1);
  CHECK(busemann_finite(el(p, "a"), el(p, "bbb"), S) == 1);
  const Cayley T = p.cayley("Sab");
  const Element x = el(p, "ab");
  for (const char* z : {"ab", "abab", "bbb", "Aba"}) {
    const int b = busemann_finite(x, el(p, z), T);
    CHECK(std::abs(b) <= T.length(x));
  }
}

TEST_CASE("hyperbolicity constant") {
  const Presentation f2 = testing::load("f2");
  for (int R = 0; R <= 4; ++R) CHECK(estimate_delta(f2.cayley("S"), R).delta == HalfInteger{0});

  const Presentation z = testing::load("z6");
  CHECK(estimate_delta(z.cayley("S"), 3).delta.twice <= 2 * 3);

  // Radii 4 and 6 are beyond desk scale for the exhaustive triple scan; check
  // monotonicity one step lower.
  const Presentation g2 = testing::load("genus2");
  const auto d2 = estimate_delta(g2.cayley("S"), 2);
  const auto d3 = estimate_delta(g2.cayley("S"), 3);
  CHECK(d2.delta <= d3.delta);
  CHECK(d3.radius == 3);

  const Presentation psl = testing::load("psl2z");
  HalfInteger prev{0};
  for (int R = 1; R <= 5; ++R) {
    const auto d = estimate_delta(psl.cayley("S"), R);
    CHECK(prev <= d.delta);
    prev = d.delta;
  }
}
