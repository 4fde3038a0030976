// Group presentation files.
//
// Line-oriented `key = value` text; `#` starts a comment. Grammar:
//
//   name       = <free text>                        optional
//   family     = free | finite | free_product | dehn
//   generators = x:X y:Y s:s ...                    letter:inverse pairs
//   rank       = <n>                                free; must match pairs
//   table      = r0 | r1 | ...                      finite; rows of indices
//   factor     = r0 | r1 | ...                      free_product; repeated
//   elements   = x:3 ...                            finite: letter:index
//              = s:0.1 ...                          free_product: letter:factor.element
//   relators   = w1 w2 ...                          dehn; words in letters
//   set NAME   = w1 w2 ...                          named generating set
//
// Letter names are single characters. Every named set is symmetrized; the
// set `base` (the generators themselves) always exists. Unknown keys, keys
// that do not belong to the family, and repeated keys are rejected.

#ifndef HYPDIST_PRESENTATION_HPP_
#define HYPDIST_PRESENTATION_HPP_

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "generating_set.hpp"
#include "group.hpp"

namespace hypdist {

struct Presentation {
  std::string name;
  std::shared_ptr<const Group> group;
  std::map<std::string, GeneratingSet> sets;
  std::vector<std::string> set_order;  // file order, `base` first

  const GeneratingSet& set(const std::string& set_name) const {
    auto it = sets.find(set_name);
    if (it == sets.end()) throw PreconditionError("no generating set named '" + set_name + "'");
    return it->second;
  }

  Cayley cayley(const std::string& set_name) const { return Cayley(group, set(set_name)); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline int parse_int(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
}

inline std::vector<std::vector<int>> parse_table(const std::string& value, int line) {
  std::vector<std::vector<int>> rows;
  std::string row;
  std::istringstream in(value);
  while (std::getline(in, row, '|')) {
    std::vector<int> r;
    for (const auto& tok : split_ws(row)) r.push_back(parse_int(tok, line));
    if (r.empty()) throw ParseError(line, "empty table row");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

inline Presentation parse_presentation(std::string_view text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> keys;
  std::vector<Entry> factors;
  std::vector<std::pair<std::string, Entry>> set_entries;
  static const std::set<std::string> kKnown = {"name",     "family", "generators", "rank", "table",
                                               "elements", "factor", "relators"};

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = detail::trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.rfind("set", 0) == 0 && key.size() > 3 && std::isspace(static_cast<unsigned char>(key[3]))) {
      const std::string set_name = detail::trim(std::string_view(key).substr(3));
      if (set_name.empty() || set_name.find(' ') != std::string::npos)
        throw ParseError(line, "bad set name");
      for (const auto& [n, e] : set_entries)
        if (n == set_name) throw ParseError(line, "set '" + set_name + "' defined twice");
      if (set_name == "base") throw ParseError(line, "set name 'base' is reserved");
      set_entries.push_back({set_name, {value, line}});
      continue;
    }
    if (!kKnown.count(key)) throw ParseError(line, "unknown key '" + key + "'");
    if (key == "factor") {
      factors.push_back({value, line});
      continue;
    }
    if (keys.count(key)) throw ParseError(line, "key '" + key + "' given twice");
    keys[key] = {value, line};
  }

  auto require = [&](const std::string& key) -> const Entry& {
    auto it = keys.find(key);
    if (it == keys.end()) throw ParseError(line, "missing key '" + key + "'");
    return it->second;
  };
  auto forbid = [&](std::initializer_list<const char*> names, const std::string& family) {
    for (const char* k : names)
      if (keys.count(k))
        throw ParseError(keys[k].line, "key '" + std::string(k) + "' is not valid for family " + family);
  };

  const Entry& fam = require("family");
  const Entry& gens = require("generators");

  std::vector<std::string> names;
  std::vector<std::string> inverse_names;
  for (const auto& tok : detail::split_ws(gens.value)) {
    const auto colon = tok.find(':');
    if (colon != 1 || tok.size() != 3)
      throw ParseError(gens.line, "generator pair must look like x:X, got '" + tok + "'");
    const std::string a = tok.substr(0, 1);
    const std::string b = tok.substr(2, 1);
    names.push_back(a);
    inverse_names.push_back(b);
    if (a != b) {
      names.push_back(b);
      inverse_names.push_back(a);
    }
  }
  std::vector<int> inverse(names.size(), -1);
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == inverse_names[i]) inverse[i] = static_cast<int>(j);
    for (std::size_t j = 0; j < i; ++j)
      if (names[j] == names[i]) throw ParseError(gens.line, "letter '" + names[i] + "' listed twice");
  }
  auto letter_index = [&](const std::string& nm, int at) -> int {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == nm) return static_cast<int>(i);
    throw ParseError(at, "unknown letter '" + nm + "'");
  };

  Presentation p;
  if (keys.count("name")) p.name = keys["name"].value;

  try {
    Group g;
    if (fam.value == "free") {
      forbid({"table", "elements", "relators"}, fam.value);
      if (!factors.empty()) throw ParseError(factors[0].line, "'factor' is not valid for family free");
      const Entry& rank = require("rank");
      const int r = detail::parse_int(rank.value, rank.line);
      if (2 * r != static_cast<int>(names.size()))
        throw ParseError(rank.line, "rank does not match the generator pairs");
      g = Group::free_group(names, inverse);
    } else if (fam.value == "finite") {
      forbid({"rank", "relators"}, fam.value);
      if (!factors.empty()) throw ParseError(factors[0].line, "'factor' is not valid for family finite");
      const Entry& table = require("table");
      const Entry& elements = require("elements");
      std::vector<int> letter_elements(names.size(), -1);
      for (const auto& tok : detail::split_ws(elements.value)) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ParseError(elements.line, "expected letter:index");
        letter_elements[letter_index(tok.substr(0, colon), elements.line)] =
            detail::parse_int(tok.substr(colon + 1), elements.line);
      }
      for (std::size_t i = 0; i < names.size(); ++i)
        if (letter_elements[i] < 0)
          throw ParseError(elements.line, "no table element for letter '" + names[i] + "'");
      g = Group::finite(FiniteTable::from_rows(detail::parse_table(table.value, table.line)), names,
                        inverse, letter_elements);
    } else if (fam.value == "free_product") {
      forbid({"rank", "table", "relators"}, fam.value);
      const Entry& elements = require("elements");
      std::vector<FiniteTable> tables;
      for (const auto& f : factors) tables.push_back(FiniteTable::from_rows(detail::parse_table(f.value, f.line)));
      std::vector<std::pair<int, int>> syl(names.size(), {-1, -1});
      for (const auto& tok : detail::split_ws(elements.value)) {
        const auto colon = tok.find(':');
        const auto dot = tok.find('.');
        if (colon == std::string::npos || dot == std::string::npos || dot < colon)
          throw ParseError(elements.line, "expected letter:factor.element");
        syl[letter_index(tok.substr(0, colon), elements.line)] = {
            detail::parse_int(tok.substr(colon + 1, dot - colon - 1), elements.line),
            detail::parse_int(tok.substr(dot + 1), elements.line)};
      }
      for (std::size_t i = 0; i < names.size(); ++i)
        if (syl[i].first < 0)
          throw ParseError(elements.line, "no factor element for letter '" + names[i] + "'");
      g = Group::free_product(std::move(tables), names, inverse, syl);
    } else if (fam.value == "dehn") {
      forbid({"rank", "table", "elements"}, fam.value);
      if (!factors.empty()) throw ParseError(factors[0].line, "'factor' is not valid for family dehn");
      const Entry& rel = require("relators");
      Group alphabet = Group::free_group(names, inverse);
      std::vector<Word> relators;
      for (const auto& tok : detail::split_ws(rel.value)) relators.push_back(alphabet.parse_word(tok));
      g = Group::dehn(names, inverse, std::move(relators));
    } else {
      throw ParseError(fam.line, "unknown family '" + fam.value + "'");
    }
    p.group = std::make_shared<const Group>(std::move(g));
  } catch (const UnknownLetter& e) {
    throw ParseError(line, e.what());
  }

  p.sets.emplace("base", base_generating_set(*p.group));
  p.set_order.push_back("base");
  for (const auto& [set_name, entry] : set_entries) {
    std::vector<Word> words;
    try {
      for (const auto& tok : detail::split_ws(entry.value)) words.push_back(p.group->parse_word(tok));
    } catch (const UnknownLetter& e) {
      throw ParseError(entry.line, e.what());
    }
    if (words.empty()) throw ParseError(entry.line, "set '" + set_name + "' is empty");
    try {
      p.sets.emplace(set_name, make_generating_set(*p.group, set_name, words));
    } catch (const InvalidPresentation& e) {
      throw ParseError(entry.line, e.what());
    }
    p.set_order.push_back(set_name);
  }
  return p;
}

inline Presentation load_presentation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open group file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_presentation(buf.str());
}

}  // namespace hypdist

#endif  // HYPDIST_PRESENTATION_HPP_
