// Symmetric generating sets and the Cayley-graph view used by every
// metric computation.

#ifndef HYPDIST_GENERATING_SET_HPP_
#define HYPDIST_GENERATING_SET_HPP_

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "group.hpp"

namespace hypdist {

// A finite symmetric generating set. Letters are indexed 0..size()-1 and each
// is expressed as a word over the base letters of the group.
struct GeneratingSet {
  std::string name;
  std::vector<std::string> letters;
  std::vector<int> inverse;
  std::vector<Word> words;
  std::vector<Element> elements;
  // True when the letters are exactly the base letters, in base order.
  bool is_base = false;

  int size() const noexcept { return static_cast<int>(letters.size()); }
};

inline GeneratingSet base_generating_set(const Group& g, std::string name = "base") {
  GeneratingSet s;
  s.name = std::move(name);
  for (Letter l = 0; l < g.num_letters(); ++l) {
    s.letters.push_back(g.letter_name(l));
    s.inverse.push_back(g.letter_inverse(l));
    s.words.push_back({l});
    s.elements.push_back(g.letter(l));
  }
  s.is_base = true;
  return s;
}

// Builds a generating set from words over the base letters, adding the
// inverse of every word whose inverse is not already listed. Rejects words
// that evaluate to the identity and words that duplicate another letter.
inline GeneratingSet make_generating_set(const Group& g, std::string name,
                                         const std::vector<Word>& words) {
  GeneratingSet s;
  s.name = std::move(name);
  auto index_of = [&s](const Element& e) -> int {
    for (std::size_t i = 0; i < s.elements.size(); ++i)
      if (s.elements[i] == e) return static_cast<int>(i);
    return -1;
  };
  std::vector<Element> given;
  for (const Word& w : words) given.push_back(g.normalize(w));
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Element& e = given[i];
    const std::string label = g.format_word(words[i]);
    if (g.is_identity(e))
      throw InvalidPresentation("generator '" + label + "' of set " + s.name + " is the identity");
    if (index_of(e) >= 0) {
      // Already present as the inverse of an earlier word: only a duplicate if
      // the earlier entry was itself listed explicitly.
      const int j = index_of(e);
      const bool listed = std::find(given.begin(), given.begin() + static_cast<std::ptrdiff_t>(i),
                                    e) != given.begin() + static_cast<std::ptrdiff_t>(i);
      if (listed)
        throw InvalidPresentation("generator '" + label + "' of set " + s.name +
                                  " duplicates '" + s.letters[j] + "'");
      s.letters[j] = label;
      s.words[j] = words[i];
      continue;
    }
    s.letters.push_back(label);
    s.words.push_back(words[i]);
    s.elements.push_back(e);
    s.inverse.push_back(-1);
    const Element inv = g.inverse(e);
    if (inv == e) {
      s.inverse.back() = static_cast<int>(s.elements.size()) - 1;
      continue;
    }
    Word iw = detail::invert_word(words[i], g.letter_inverses());
    s.letters.push_back(g.format_word(iw));
    s.words.push_back(std::move(iw));
    s.elements.push_back(inv);
    s.inverse.push_back(static_cast<int>(s.elements.size()) - 2);
    s.inverse[s.elements.size() - 2] = static_cast<int>(s.elements.size()) - 1;
  }
  for (std::size_t i = 0; i < s.letters.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (s.letters[i] == s.letters[j])
        throw InvalidPresentation("set " + s.name + " has two letters named '" + s.letters[i] + "'");
  bool base = s.size() == g.num_letters();
  for (int i = 0; base && i < s.size(); ++i)
    base = s.words[i].size() == 1 && s.words[i][0] == i;
  s.is_base = base;
  return s;
}

// Default cap on foreign word lengths.
inline constexpr int kDefaultLengthCap = 64;
// Default budget on visited elements for a single length computation.
inline constexpr std::size_t kDefaultSearchBudget = 4'000'000;

// Distance from the identity to x in Cay(g, s) by breadth-first search grown
// alternately from both ends until the frontiers meet.
inline int bidirectional_length(const Group& g, const GeneratingSet& s, const Element& x,
                                int cap, std::size_t budget) {
  using Map = std::unordered_map<Element, int, ElementHash>;
  const Element o = g.identity();
  if (x == o) return 0;
  Map near_o{{o, 0}};
  Map near_x{{x, 0}};
  std::vector<Element> front_o{o};
  std::vector<Element> front_x{x};
  int radius_o = 0;
  int radius_x = 0;
  while (radius_o + radius_x < cap) {
    const bool grow_o = front_o.size() <= front_x.size();
    Map& mine = grow_o ? near_o : near_x;
    const Map& other = grow_o ? near_x : near_o;
    std::vector<Element>& front = grow_o ? front_o : front_x;
    int& radius = grow_o ? radius_o : radius_x;
    std::vector<Element> next;
    bool met = false;
    for (const Element& y : front) {
      for (const Element& t : s.elements) {
        Element z = g.multiply(y, t);
        if (mine.count(z)) continue;
        if (other.count(z)) met = true;
        mine.emplace(z, radius + 1);
        next.push_back(std::move(z));
      }
    }
    ++radius;
    if (met) return radius_o + radius_x;
    if (next.empty()) throw CapExceeded(cap);  // finite group, x unreachable
    if (near_o.size() + near_x.size() > budget)
      throw ResourceLimit("word length search exceeded its budget");
    front = std::move(next);
  }
  throw CapExceeded(cap);
}

// A group together with one of its generating sets.
class Cayley {
 public:
  Cayley(std::shared_ptr<const Group> group, GeneratingSet gens)
      : group_(std::move(group)), gens_(std::move(gens)) {
    if (!group_) throw PreconditionError("Cayley graph needs a group");
  }

  const Group& group() const noexcept { return *group_; }
  const std::shared_ptr<const Group>& group_ptr() const noexcept { return group_; }
  const GeneratingSet& gens() const noexcept { return gens_; }
  int degree() const noexcept { return gens_.size(); }

  Element identity() const { return group_->identity(); }

  Element step(const Element& x, Letter t) const {
    return group_->multiply(x, gens_.elements.at(t));
  }

  Element evaluate(std::span<const Letter> word) const {
    Element x = group_->identity();
    for (Letter t : word) x = step(x, t);
    return x;
  }

  std::string format_word(std::span<const Letter> word) const {
    std::string s;
    for (Letter t : word) {
      if (!s.empty() && gens_.letters[t].size() > 1) s += '.';
      s += gens_.letters.at(t);
    }
    return s.empty() ? std::string("1") : s;
  }

  // |x| in this generating set. Exact; throws CapExceeded above cap.
  int length(const Element& x, int cap = kDefaultLengthCap,
             std::size_t budget = kDefaultSearchBudget) const {
    if (gens_.is_base) {
      const int n = group_->base_length(x);
      if (n > cap) throw CapExceeded(cap);
      return n;
    }
    return bidirectional_length(*group_, gens_, x, cap, budget);
  }

 private:
  std::shared_ptr<const Group> group_;
  GeneratingSet gens_;
};

}  // namespace hypdist

#endif  // HYPDIST_GENERATING_SET_HPP_
