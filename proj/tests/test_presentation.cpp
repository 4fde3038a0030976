#include <catch_amalgamated.hpp>

#include "hypdist/presentation.hpp"
#include "support.hpp"

using namespace hypdist;

namespace {

int error_line(const std::string& text) {
  try {
    parse_presentation(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("bundled group files load") {
  for (const char* name : {"f2", "psl2z", "genus2", "z6"}) {
    const Presentation p = testing::load(name);
    CHECK(p.sets.count("base") == 1);
    CHECK(p.sets.count("S") == 1);
    CHECK(p.set_order.front() == "base");
  }
  const Presentation f2 = testing::load("f2");
  CHECK(f2.group->family() == Family::free_group);
  CHECK(f2.set("Sa2").size() == 6);
  CHECK(f2.set_order == std::vector<std::string>{"base", "S", "Sab", "Sa2"});
  const Presentation psl = testing::load("psl2z");
  CHECK(psl.set("S").size() == 3);
  CHECK(psl.set("Sst").size() == 5);
  CHECK_THROWS_AS(f2.set("nope"), PreconditionError);
}

TEST_CASE("minimal presentations per family") {
  CHECK(parse_presentation("family = free\nrank = 1\ngenerators = x:X\n").group->num_letters() == 2);
  CHECK(parse_presentation("family = finite\ngenerators = g:g\ntable = 0 1 | 1 0\nelements = g:1\n")
            .group->family() == Family::finite_table);
  CHECK(parse_presentation("family = dehn\ngenerators = a:A b:B\nrelators = abAB\n").group->relators().size() == 1);
}

TEST_CASE("malformed files are rejected with a line number") {
  const std::string ok = "family = free\nrank = 2\ngenerators = a:A b:B\n";
  CHECK(error_line(ok + "colour = red\n") == 4);
  CHECK(error_line(ok + "family = free\n") == 4);
  CHECK(error_line(ok + "table = 0 1 | 1 0\n") == 4);
  CHECK(error_line(ok + "rank = 3\n") == 4);
  CHECK(error_line(ok + "set S = a\nset S = b\n") == 5);
  CHECK(error_line(ok + "set base = a\n") == 4);
  CHECK(error_line(ok + "set S = aA\n") == 4);
  CHECK(error_line(ok + "set S = a aaA\n") == 4);
  CHECK(error_line(ok + "set S = x\n") == 4);
  CHECK(error_line(ok + "just words\n") == 4);
  CHECK(error_line("generators = a:A\n") >= 0);
  CHECK(error_line("family = free\ngenerators = ab\n") == 2);
  CHECK(error_line("family = free\ngenerators = a:A a:A\n") == 2);
  CHECK(error_line("family = galaxy\ngenerators = a:A\n") == 1);
  // Well-formed text describing an invalid group.
  CHECK_THROWS_AS(parse_presentation("family = finite\ngenerators = g:g\ntable = 0 1 | 1 1\nelements = g:1\n"),
                  InvalidPresentation);
  CHECK_THROWS_AS(parse_presentation("family = finite\ngenerators = g:g\ntable = 0 1 | 1 0\nelements = g:0\n"),
                  InvalidPresentation);
  CHECK_THROWS_AS(parse_presentation("family = free_product\ngenerators = s:s t:t\nfactor = 0 1 | 1 0\n"
                                     "factor = 0 1 2 | 1 2 0 | 2 0 1\nelements = s:0.1 t:1.1\n"),
                  InvalidPresentation);
  CHECK_THROWS_AS(load_presentation("/nonexistent/file.grp"), Error);
}

TEST_CASE("comments and blank lines are ignored") {
  const Presentation p = parse_presentation("# header\n\nfamily = free   # trailing\nrank = 1\n  generators = a:A  \n");
  CHECK(p.group->num_letters() == 2);
}
