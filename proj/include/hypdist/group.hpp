// Group presentations with a decidable word problem and canonical normal
// forms.
//
// Four families are supported, each with its own normal form:
//
//   free          freely reduced words over the base letters;
//   finite        an index into a validated multiplication table;
//   free_product  alternating syllables of a free product of finite groups;
//   dehn          shortlex-least geodesic representative, found by Dehn's
//                 algorithm followed by a bounded search over half-relator
//                 exchanges.
//
// Elements are stored as packed byte strings so that hashing and comparison
// are cheap; the packing is an implementation detail and only equality of
// codes is meaningful to callers.

#ifndef HYPDIST_GROUP_HPP_
#define HYPDIST_GROUP_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace hypdist {

using Letter = int;
using Word = std::vector<Letter>;

struct Element {
  std::string code;

  bool operator==(const Element&) const = default;
  auto operator<=>(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    return std::hash<std::string>{}(e.code);
  }
};

enum class Family { free_group, finite_table, free_product, dehn };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::free_group: return "free";
    case Family::finite_table: return "finite";
    case Family::free_product: return "free_product";
    case Family::dehn: return "dehn";
  }
  return "?";
}

// A validated multiplication table of a finite group.
class FiniteTable {
 public:
  FiniteTable() = default;

  // Rows are indexed by the left factor. Throws InvalidPresentation unless the
  // table is a group (closure, associativity, identity, inverses).
  static FiniteTable from_rows(const std::vector<std::vector<int>>& rows) {
    FiniteTable t;
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw InvalidPresentation("empty multiplication table");
    if (n > 65535) throw InvalidPresentation("multiplication table too large");
    t.order_ = n;
    t.product_.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n)
        throw InvalidPresentation("multiplication table is not square");
      for (int v : row) {
        if (v < 0 || v >= n)
          throw InvalidPresentation("table entry out of range");
        t.product_.push_back(v);
      }
    }
    int identity = -1;
    for (int e = 0; e < n && identity < 0; ++e) {
      bool ok = true;
      for (int a = 0; a < n && ok; ++a)
        ok = t.mul(e, a) == a && t.mul(a, e) == a;
      if (ok) identity = e;
    }
    if (identity < 0) throw InvalidPresentation("table has no identity");
    t.identity_ = identity;
    t.inverse_.assign(n, -1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (t.mul(a, b) == identity && t.mul(b, a) == identity) t.inverse_[a] = b;
    if (std::find(t.inverse_.begin(), t.inverse_.end(), -1) != t.inverse_.end())
      throw InvalidPresentation("table has an element without inverse");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (t.mul(t.mul(a, b), c) != t.mul(a, t.mul(b, c)))
            throw InvalidPresentation("table is not associative");
    return t;
  }

  int order() const noexcept { return order_; }
  int identity() const noexcept { return identity_; }
  int mul(int a, int b) const { return product_[static_cast<std::size_t>(a) * order_ + b]; }
  int inverse(int a) const { return inverse_[a]; }

 private:
  int order_ = 0;
  int identity_ = 0;
  std::vector<int> product_;
  std::vector<int> inverse_;
};

namespace detail {

inline void free_reduce(Word& w, const std::vector<int>& inv) {
  std::size_t top = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (top > 0 && w[top - 1] == inv[w[i]]) {
      --top;
    } else {
      w[top++] = w[i];
    }
  }
  w.resize(top);
}

inline Word invert_word(std::span<const Letter> w, const std::vector<int>& inv) {
  Word r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[w.size() - 1 - i] = inv[w[i]];
  return r;
}

inline void cyclic_reduce(Word& w, const std::vector<int>& inv) {
  free_reduce(w, inv);
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == inv[w[hi - 1]]) {
    ++lo;
    --hi;
  }
  w = Word(w.begin() + static_cast<std::ptrdiff_t>(lo),
           w.begin() + static_cast<std::ptrdiff_t>(hi));
}

}  // namespace detail

class Group {
 public:
  // Budget on the half-relator exchange search used by dehn normal forms.
  static constexpr std::size_t kDehnOrbitBudget = 200000;

  Group() = default;

  // Free group on the letters; inverse[i] is the index of letter i's inverse
  // and must differ from i.
  static Group free_group(std::vector<std::string> names, std::vector<int> inverse) {
    Group g;
    g.family_ = Family::free_group;
    g.set_letters(std::move(names), std::move(inverse), /*allow_involutions=*/false);
    return g;
  }

  // Finite group; letter i denotes table element letter_elements[i].
  static Group finite(FiniteTable table, std::vector<std::string> names,
                      std::vector<int> inverse, std::vector<int> letter_elements) {
    Group g;
    g.family_ = Family::finite_table;
    g.set_letters(std::move(names), std::move(inverse), true);
    g.table_ = std::move(table);
    if (letter_elements.size() != g.names_.size())
      throw InvalidPresentation("every generator needs a table element");
    for (std::size_t i = 0; i < letter_elements.size(); ++i) {
      const int e = letter_elements[i];
      if (e < 0 || e >= g.table_.order())
        throw InvalidPresentation("generator element out of range");
      if (e == g.table_.identity())
        throw InvalidPresentation("generator '" + g.names_[i] + "' is the identity");
    }
    for (std::size_t i = 0; i < letter_elements.size(); ++i)
      if (g.table_.inverse(letter_elements[i]) != letter_elements[g.inverse_[i]])
        throw InvalidPresentation("inverse pairing of '" + g.names_[i] +
                                  "' disagrees with the table");
    g.letter_table_ = std::move(letter_elements);
    g.finite_distances();
    return g;
  }

  // Free product of finite factors; letter i denotes the non-identity element
  // letter_syllables[i].second of factor letter_syllables[i].first.
  static Group free_product(std::vector<FiniteTable> factors, std::vector<std::string> names,
                            std::vector<int> inverse,
                            std::vector<std::pair<int, int>> letter_syllables) {
    Group g;
    g.family_ = Family::free_product;
    g.set_letters(std::move(names), std::move(inverse), true);
    if (factors.size() < 2) throw InvalidPresentation("free product needs two factors");
    g.factors_ = std::move(factors);
    g.syllable_id_.resize(g.factors_.size());
    for (std::size_t f = 0; f < g.factors_.size(); ++f) {
      g.syllable_id_[f].assign(g.factors_[f].order(), -1);
      for (int e = 0; e < g.factors_[f].order(); ++e) {
        if (e == g.factors_[f].identity()) continue;
        g.syllable_id_[f][e] = static_cast<int>(g.syllables_.size());
        g.syllables_.push_back({static_cast<int>(f), e});
      }
    }
    if (g.syllables_.size() > 255)
      throw InvalidPresentation("free product factors too large");
    if (letter_syllables.size() != g.names_.size())
      throw InvalidPresentation("every generator needs a factor element");
    for (std::size_t i = 0; i < letter_syllables.size(); ++i) {
      const auto [f, e] = letter_syllables[i];
      if (f < 0 || f >= static_cast<int>(g.factors_.size()) || e < 0 ||
          e >= g.factors_[f].order())
        throw InvalidPresentation("generator factor element out of range");
      if (e == g.factors_[f].identity())
        throw InvalidPresentation("generator '" + g.names_[i] + "' is the identity");
      g.letter_syllable_.push_back(g.syllable_id_[f][e]);
    }
    for (std::size_t i = 0; i < letter_syllables.size(); ++i) {
      const auto [f, e] = letter_syllables[i];
      const auto [fi, ei] = letter_syllables[g.inverse_[i]];
      if (fi != f || g.factors_[f].inverse(e) != ei)
        throw InvalidPresentation("inverse pairing of '" + g.names_[i] +
                                  "' disagrees with the factor table");
    }
    g.syllable_distances();
    return g;
  }

  // Finitely presented group solved by Dehn's algorithm. Relators are
  // cyclically reduced and symmetrized here.
  static Group dehn(std::vector<std::string> names, std::vector<int> inverse,
                    std::vector<Word> relators) {
    Group g;
    g.family_ = Family::dehn;
    g.set_letters(std::move(names), std::move(inverse), false);
    if (relators.empty()) throw InvalidPresentation("dehn family needs relators");
    std::set<Word> sym;
    for (auto r : relators) {
      for (Letter l : r)
        if (l < 0 || l >= g.num_letters()) throw InvalidPresentation("relator letter out of range");
      detail::cyclic_reduce(r, g.inverse_);
      if (r.empty()) throw InvalidPresentation("relator reduces to the empty word");
      g.relators_.push_back(r);
      for (const Word& base : {r, detail::invert_word(r, g.inverse_)}) {
        for (std::size_t k = 0; k < base.size(); ++k) {
          Word c(base.begin() + static_cast<std::ptrdiff_t>(k), base.end());
          c.insert(c.end(), base.begin(), base.begin() + static_cast<std::ptrdiff_t>(k));
          sym.insert(std::move(c));
        }
      }
    }
    g.rels_by_first_.assign(g.num_letters(), {});
    for (const Word& r : sym) {
      g.rels_by_first_[r.front()].push_back(static_cast<int>(g.symmetrized_.size()));
      g.symmetrized_.push_back(r);
    }
    return g;
  }

  Family family() const noexcept { return family_; }
  int num_letters() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& letter_names() const noexcept { return names_; }
  const std::string& letter_name(Letter l) const { return names_.at(l); }
  Letter letter_inverse(Letter l) const { return inverse_.at(l); }
  const std::vector<int>& letter_inverses() const noexcept { return inverse_; }
  const std::vector<Word>& relators() const noexcept { return relators_; }
  const std::vector<Word>& symmetrized_relators() const noexcept { return symmetrized_; }
  const std::vector<FiniteTable>& factors() const noexcept { return factors_; }
  const FiniteTable& table() const noexcept { return table_; }

  // Parse a string of single-character letter names.
  Word parse_word(std::string_view text) const {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
      if (c == ' ' || c == '\t') continue;
      auto it = std::find(names_.begin(), names_.end(), std::string(1, c));
      if (it == names_.end()) throw UnknownLetter(std::string(1, c));
      w.push_back(static_cast<Letter>(it - names_.begin()));
    }
    return w;
  }

  std::string format_word(std::span<const Letter> w) const {
    std::string s;
    for (Letter l : w) s += names_.at(l);
    return s;
  }

  Element identity() const {
    if (family_ == Family::finite_table) return table_code(table_.identity());
    return Element{};
  }

  bool is_identity(const Element& x) const { return x == identity(); }

  Element letter(Letter l) const {
    check_letter(l);
    switch (family_) {
      case Family::free_group:
      case Family::dehn:
        return Element{std::string(1, static_cast<char>(l))};
      case Family::finite_table:
        return table_code(letter_table_[l]);
      case Family::free_product:
        return Element{std::string(1, static_cast<char>(letter_syllable_[l]))};
    }
    return {};
  }

  Element normalize(std::span<const Letter> word) const {
    for (Letter l : word) check_letter(l);
    switch (family_) {
      case Family::free_group: {
        Word w(word.begin(), word.end());
        detail::free_reduce(w, inverse_);
        return pack(w);
      }
      case Family::dehn:
        return pack(dehn_canonical(Word(word.begin(), word.end())));
      case Family::finite_table: {
        int e = table_.identity();
        for (Letter l : word) e = table_.mul(e, letter_table_[l]);
        return table_code(e);
      }
      case Family::free_product: {
        std::string s;
        for (Letter l : word) push_syllable(s, letter_syllable_[l]);
        return Element{std::move(s)};
      }
    }
    return {};
  }

  Element multiply(const Element& x, const Element& y) const {
    switch (family_) {
      case Family::free_group: {
        std::string s = x.code;
        for (char c : y.code) {
          if (!s.empty() && static_cast<unsigned char>(s.back()) ==
                                inverse_[static_cast<unsigned char>(c)])
            s.pop_back();
          else
            s.push_back(c);
        }
        return Element{std::move(s)};
      }
      case Family::dehn: {
        Word w = unpack(x);
        Word v = unpack(y);
        w.insert(w.end(), v.begin(), v.end());
        return pack(dehn_canonical(std::move(w)));
      }
      case Family::finite_table:
        return table_code(table_.mul(table_index(x), table_index(y)));
      case Family::free_product: {
        std::string s = x.code;
        for (char c : y.code) push_syllable(s, static_cast<unsigned char>(c));
        return Element{std::move(s)};
      }
    }
    return {};
  }

  Element multiply_letter(const Element& x, Letter l) const {
    return multiply(x, letter(l));
  }

  Element inverse(const Element& x) const {
    switch (family_) {
      case Family::free_group: {
        std::string s(x.code.rbegin(), x.code.rend());
        for (char& c : s) c = static_cast<char>(inverse_[static_cast<unsigned char>(c)]);
        return Element{std::move(s)};
      }
      case Family::dehn:
        return pack(dehn_canonical(detail::invert_word(unpack(x), inverse_)));
      case Family::finite_table:
        return table_code(table_.inverse(table_index(x)));
      case Family::free_product: {
        std::string s;
        for (auto it = x.code.rbegin(); it != x.code.rend(); ++it) {
          const auto [f, e] = syllables_[static_cast<unsigned char>(*it)];
          s.push_back(static_cast<char>(syllable_id_[f][factors_[f].inverse(e)]));
        }
        return Element{std::move(s)};
      }
    }
    return {};
  }

  // Word length of x with respect to the base letters.
  int base_length(const Element& x) const {
    switch (family_) {
      case Family::free_group:
      case Family::dehn:
        return static_cast<int>(x.code.size());
      case Family::finite_table:
        return finite_dist_[table_index(x)];
      case Family::free_product: {
        int n = 0;
        for (char c : x.code) n += syllable_len_[static_cast<unsigned char>(c)];
        return n;
      }
    }
    return 0;
  }

  // A geodesic word over the base letters representing x.
  Word spell(const Element& x) const {
    switch (family_) {
      case Family::free_group:
      case Family::dehn:
        return unpack(x);
      case Family::finite_table:
        return finite_word_[table_index(x)];
      case Family::free_product: {
        Word w;
        for (char c : x.code) {
          const Word& part = syllable_word_[static_cast<unsigned char>(c)];
          w.insert(w.end(), part.begin(), part.end());
        }
        return w;
      }
    }
    return {};
  }

  std::string format(const Element& x) const {
    const Word w = spell(x);
    return w.empty() ? std::string("1") : format_word(w);
  }

  // Free reduction followed by Dehn's algorithm: repeatedly replace a subword
  // that is more than half of a relator by the inverse of the complement.
  // Reduces every word representing the identity to the empty word when the
  // presentation satisfies Dehn's algorithm.
  Word dehn_reduce(Word w) const {
    detail::free_reduce(w, inverse_);
    while (dehn_pass(w)) {
    }
    return w;
  }

  // Index into the finite table (finite family only).
  int table_index(const Element& x) const {
    return static_cast<unsigned char>(x.code[0]) |
           (static_cast<unsigned char>(x.code[1]) << 8);
  }

 private:
  void set_letters(std::vector<std::string> names, std::vector<int> inverse,
                   bool allow_involutions) {
    if (names.empty()) throw InvalidPresentation("no generators");
    if (names.size() != inverse.size())
      throw InvalidPresentation("inverse pairing has wrong size");
    if (names.size() > 255) throw InvalidPresentation("too many generators");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const int j = inverse[i];
      if (j < 0 || j >= static_cast<int>(names.size()) || inverse[j] != static_cast<int>(i))
        throw InvalidPresentation("inverse pairing is not an involution");
      if (j == static_cast<int>(i) && !allow_involutions)
        throw InvalidPresentation("letter '" + names[i] + "' cannot be its own inverse here");
      for (std::size_t k = 0; k < i; ++k)
        if (names[k] == names[i]) throw InvalidPresentation("duplicate letter '" + names[i] + "'");
    }
    names_ = std::move(names);
    inverse_ = std::move(inverse);
  }

  void check_letter(Letter l) const {
    if (l < 0 || l >= num_letters()) throw UnknownLetter(std::to_string(l));
  }

  static Element pack(const Word& w) {
    std::string s(w.size(), '\0');
    for (std::size_t i = 0; i < w.size(); ++i) s[i] = static_cast<char>(w[i]);
    return Element{std::move(s)};
  }

  static Word unpack(const Element& x) {
    Word w(x.code.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<unsigned char>(x.code[i]);
    return w;
  }

  static Element table_code(int index) {
    std::string s(2, '\0');
    s[0] = static_cast<char>(index & 0xFF);
    s[1] = static_cast<char>((index >> 8) & 0xFF);
    return Element{std::move(s)};
  }

  void push_syllable(std::string& s, int sid) const {
    for (;;) {
      if (s.empty()) {
        s.push_back(static_cast<char>(sid));
        return;
      }
      const auto [f1, e1] = syllables_[static_cast<unsigned char>(s.back())];
      const auto [f2, e2] = syllables_[sid];
      if (f1 != f2) {
        s.push_back(static_cast<char>(sid));
        return;
      }
      s.pop_back();
      const int e = factors_[f1].mul(e1, e2);
      if (e == factors_[f1].identity()) return;
      sid = syllable_id_[f1][e];
    }
  }

  // Shortest words for every table element over the letters mapping into it.
  template <class Mul>
  static void bfs_words(int order, int identity, const std::vector<std::pair<Letter, int>>& gens,
                        Mul mul, std::vector<int>& dist, std::vector<Word>& words) {
    dist.assign(order, -1);
    words.assign(order, {});
    dist[identity] = 0;
    std::queue<int> q;
    q.push(identity);
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const auto& [l, e] : gens) {
        const int b = mul(a, e);
        if (dist[b] < 0) {
          dist[b] = dist[a] + 1;
          words[b] = words[a];
          words[b].push_back(l);
          q.push(b);
        }
      }
    }
  }

  void finite_distances() {
    std::vector<std::pair<Letter, int>> gens;
    for (Letter l = 0; l < num_letters(); ++l) gens.push_back({l, letter_table_[l]});
    bfs_words(table_.order(), table_.identity(), gens,
              [this](int a, int b) { return table_.mul(a, b); }, finite_dist_, finite_word_);
    if (std::find(finite_dist_.begin(), finite_dist_.end(), -1) != finite_dist_.end())
      throw InvalidPresentation("generators do not generate the finite group");
  }

  void syllable_distances() {
    syllable_len_.assign(syllables_.size(), 0);
    syllable_word_.assign(syllables_.size(), {});
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      std::vector<std::pair<Letter, int>> gens;
      for (Letter l = 0; l < num_letters(); ++l) {
        const auto [lf, le] = syllables_[letter_syllable_[l]];
        if (lf == static_cast<int>(f)) gens.push_back({l, le});
      }
      std::vector<int> dist;
      std::vector<Word> words;
      const FiniteTable& t = factors_[f];
      bfs_words(t.order(), t.identity(), gens, [&t](int a, int b) { return t.mul(a, b); },
                dist, words);
      for (int e = 0; e < t.order(); ++e) {
        if (e == t.identity()) continue;
        if (dist[e] < 0)
          throw InvalidPresentation("generators do not generate factor " + std::to_string(f));
        syllable_len_[syllable_id_[f][e]] = dist[e];
        syllable_word_[syllable_id_[f][e]] = words[e];
      }
    }
  }

  std::size_t common_prefix(const Word& w, std::size_t at, const Word& r) const {
    std::size_t k = 0;
    while (at + k < w.size() && k < r.size() && w[at + k] == r[k]) ++k;
    return k;
  }

  bool dehn_pass(Word& w) const {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (int ri : rels_by_first_[w[i]]) {
        const Word& r = symmetrized_[ri];
        const std::size_t k = common_prefix(w, i, r);
        if (2 * k > r.size()) {
          Word repl = detail::invert_word(std::span<const Letter>(r).subspan(k), inverse_);
          Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
          out.insert(out.end(), repl.begin(), repl.end());
          out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(i + k), w.end());
          detail::free_reduce(out, inverse_);
          w = std::move(out);
          return true;
        }
      }
    }
    return false;
  }

  // Dehn reduction, then exhaustive closure under exchanges of a half relator
  // for the complementary half (each followed by Dehn reduction). Returns the
  // shortlex-least word of minimal length in the closure.
  Word dehn_canonical(Word w) const {
    w = dehn_reduce(std::move(w));
    std::set<Word> seen{w};
    std::deque<Word> queue{w};
    std::size_t best = w.size();
    while (!queue.empty()) {
      Word cur = std::move(queue.front());
      queue.pop_front();
      if (cur.size() > best) continue;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        for (int ri : rels_by_first_[cur[i]]) {
          const Word& r = symmetrized_[ri];
          if (r.size() % 2 != 0) continue;
          const std::size_t half = r.size() / 2;
          if (common_prefix(cur, i, r) < half) continue;
          Word repl = detail::invert_word(std::span<const Letter>(r).subspan(half), inverse_);
          Word next(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i));
          next.insert(next.end(), repl.begin(), repl.end());
          next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(i + half), cur.end());
          next = dehn_reduce(std::move(next));
          if (next.size() < best) {
            best = next.size();
            seen.clear();
            queue.clear();
            seen.insert(next);
            queue.push_back(std::move(next));
            goto restart;
          }
          if (seen.insert(next).second) {
            if (seen.size() > kDehnOrbitBudget)
              throw ResourceLimit("dehn normal form search exceeded its budget");
            queue.push_back(std::move(next));
          }
        }
      }
    restart:;
    }
    return *seen.begin();
  }

  Family family_ = Family::free_group;
  std::vector<std::string> names_;
  std::vector<int> inverse_;

  // finite
  FiniteTable table_;
  std::vector<int> letter_table_;
  std::vector<int> finite_dist_;
  std::vector<Word> finite_word_;

  // free product
  std::vector<FiniteTable> factors_;
  std::vector<std::pair<int, int>> syllables_;
  std::vector<std::vector<int>> syllable_id_;
  std::vector<int> letter_syllable_;
  std::vector<int> syllable_len_;
  std::vector<Word> syllable_word_;

  // dehn
  std::vector<Word> relators_;
  std::vector<Word> symmetrized_;
  std::vector<std::vector<int>> rels_by_first_;
};

}  // namespace hypdist

#endif  // HYPDIST_GROUP_HPP_
