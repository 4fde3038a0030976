#include <catch_amalgamated.hpp>

#include <random>

#include "hypdist/cayley.hpp"
#include "support.hpp"

using namespace hypdist;

namespace {

Element norm(const Group& g, const std::string& w) { return g.normalize(g.parse_word(w)); }

}  // namespace

TEST_CASE("free group normal forms") {
  const auto p = testing::load("f2");
  const Group& g = *p.group;
  CHECK(norm(g, "aAb") == norm(g, "b"));
  CHECK(g.is_identity(norm(g, "")));
  CHECK(g.format(norm(g, "abBAb")) == "b");
  CHECK_THROWS_AS(g.parse_word("ax"), UnknownLetter);

  std::mt19937_64 rng(1);
  const std::string letters = "aAbB";
  for (int trial = 0; trial < 500; ++trial) {
    std::string w;
    const int len = static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) w += letters[rng() % 4];
    const Element x = norm(g, w);
    CHECK(g.format_word(g.spell(x)) == testing::reduce(w));
    CHECK(g.normalize(g.spell(x)) == x);
    CHECK(g.is_identity(g.multiply(x, g.inverse(x))));
    CHECK(g.base_length(x) == static_cast<int>(testing::reduce(w).size()));
  }
}

TEST_CASE("free product normal forms") {
  const auto p = testing::load("psl2z");
  const Group& g = *p.group;
  CHECK(norm(g, "sst") == norm(g, "t"));
  CHECK(g.is_identity(norm(g, "ttt")));
  CHECK(norm(g, "tt") == norm(g, "T"));
  CHECK(g.base_length(norm(g, "tt")) == 1);
  CHECK(g.base_length(norm(g, "stst")) == 4);
  CHECK(g.base_length(norm(g, "ststs")) == 5);

  std::mt19937_64 rng(2);
  const std::string letters = "stT";
  for (int trial = 0; trial < 300; ++trial) {
    std::string w;
    for (int i = 0, len = static_cast<int>(rng() % 10); i < len; ++i) w += letters[rng() % 3];
    const Element x = norm(g, w);
    CHECK(g.normalize(g.spell(x)) == x);
    CHECK(g.is_identity(g.multiply(g.inverse(x), x)));
    CHECK(static_cast<int>(g.spell(x).size()) == g.base_length(x));
  }
}

TEST_CASE("finite table group") {
  const auto p = testing::load("z6");
  const Group& g = *p.group;
  CHECK(g.is_identity(norm(g, "rrrrrr")));
  CHECK(norm(g, "rrrrr") == norm(g, "R"));
  CHECK(g.base_length(norm(g, "rrr")) == 3);
  CHECK(g.base_length(norm(g, "rrrr")) == 2);

  CHECK_THROWS_AS(FiniteTable::from_rows({{0, 1}, {1, 1}}), InvalidPresentation);
  // Latin square without associativity: not a group.
  CHECK_THROWS_AS(FiniteTable::from_rows({{0, 1, 2, 3, 4},
                                          {1, 0, 3, 4, 2},
                                          {2, 4, 0, 1, 3},
                                          {3, 2, 4, 0, 1},
                                          {4, 3, 1, 2, 0}}),
                  InvalidPresentation);
}

TEST_CASE("surface group word problem") {
  const auto p = testing::load("genus2");
  const Group& g = *p.group;
  const std::string rel = "abABcdCD";
  for (std::size_t k = 0; k < rel.size(); ++k) {
    const std::string conj = rel.substr(k) + rel.substr(0, k);
    CHECK(g.is_identity(norm(g, conj)));
    CHECK(g.is_identity(norm(g, testing::invert(conj))));
  }
  CHECK_FALSE(norm(g, "ab") == norm(g, "ba"));
  CHECK_FALSE(g.is_identity(norm(g, "abAB")));
  // abAB = dcDC by the relator.
  CHECK(norm(g, "abAB") == norm(g, "dcDC"));
  CHECK(norm(g, "abABcd") == norm(g, "dc"));
  CHECK(g.base_length(norm(g, "abABcdC")) == 1);
  CHECK(g.symmetrized_relators().size() == 16);

  std::mt19937_64 rng(3);
  const std::string letters = "aAbBcCdD";
  for (int trial = 0; trial < 200; ++trial) {
    std::string w;
    for (int i = 0, len = static_cast<int>(rng() % 8); i < len; ++i) w += letters[rng() % 8];
    const Element x = norm(g, w);
    CHECK(g.normalize(g.spell(x)) == x);
    CHECK(g.is_identity(g.multiply(x, g.inverse(x))));
    // Inserting a relator anywhere does not change the element.
    const std::size_t at = w.empty() ? 0 : rng() % (w.size() + 1);
    CHECK(norm(g, w.substr(0, at) + rel + w.substr(at)) == x);
  }
}

TEST_CASE("generating sets") {
  const auto p = testing::load("f2");
  const Group& g = *p.group;
  const GeneratingSet& sab = p.set("Sab");
  CHECK(sab.size() == 6);
  for (int i = 0; i < sab.size(); ++i) {
    CHECK(sab.inverse[sab.inverse[i]] == i);
    CHECK(g.is_identity(g.multiply(sab.elements[i], sab.elements[sab.inverse[i]])));
  }
  CHECK(p.set("S").is_base);
  CHECK_FALSE(sab.is_base);
  CHECK_THROWS_AS(make_generating_set(g, "bad", {g.parse_word("aA")}), InvalidPresentation);
  CHECK_THROWS_AS(make_generating_set(g, "dup", {g.parse_word("a"), g.parse_word("bBa")}), InvalidPresentation);
  // Listing an inverse explicitly is not a duplicate.
  CHECK(make_generating_set(g, "ok", {g.parse_word("a"), g.parse_word("A")}).size() == 2);

  const auto z = testing::load("z6");
  CHECK(z.set("Srr").size() == 4);
}
