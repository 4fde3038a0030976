// Breadth-first geometry of Cayley graphs: balls, spheres, word lengths,
// Gromov products, the four-point hyperbolicity constant and finite-stage
// Busemann values.

#ifndef HYPDIST_CAYLEY_HPP_
#define HYPDIST_CAYLEY_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "generating_set.hpp"
#include "group.hpp"

namespace hypdist {

inline constexpr std::size_t kDefaultBallBudget = 20'000'000;

// Exact half-integer stored as twice its value.
struct HalfInteger {
  std::int64_t twice = 0;

  double value() const noexcept { return static_cast<double>(twice) / 2.0; }
  bool operator==(const HalfInteger&) const = default;
  auto operator<=>(const HalfInteger&) const = default;
};

// The ball B(o, radius) of a Cayley graph, grown layer by layer.
//
// Elements are numbered in discovery order. Within a layer this is the
// shortlex order of the elements' shortlex-least geodesic words, because each
// layer is expanded in order and letters are tried in index order; the parent
// pointer of an element therefore spells its shortlex-least geodesic.
class Ball {
 public:
  explicit Ball(Cayley cayley, std::size_t budget = kDefaultBallBudget)
      : cayley_(std::move(cayley)), budget_(budget) {
    add(cayley_.identity(), 0, -1, -1);
    layer_start_ = {0, 1};
  }

  const Cayley& cayley() const noexcept { return cayley_; }
  int radius() const noexcept { return static_cast<int>(layer_start_.size()) - 2; }
  std::size_t size() const noexcept { return elements_.size(); }

  void grow_to(int radius) {
    while (this->radius() < radius) grow_one();
  }

  std::span<const Element> layer(int k) const {
    if (k < 0 || k > radius()) return {};
    return std::span<const Element>(elements_).subspan(
        layer_start_[k], layer_start_[k + 1] - layer_start_[k]);
  }
  std::size_t layer_begin(int k) const { return layer_start_.at(k); }
  std::size_t layer_end(int k) const { return layer_start_.at(k + 1); }

  const Element& element(std::size_t i) const { return elements_[i]; }
  int length(std::size_t i) const { return length_[i]; }
  int parent(std::size_t i) const { return parent_[i]; }
  int parent_letter(std::size_t i) const { return parent_letter_[i]; }

  std::optional<std::size_t> find(const Element& x) const {
    auto it = index_.find(x);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Shortlex-least geodesic word of element i.
  Word word(std::size_t i) const {
    Word w;
    for (int j = static_cast<int>(i); parent_[j] >= 0; j = parent_[j]) w.push_back(parent_letter_[j]);
    std::reverse(w.begin(), w.end());
    return w;
  }

 private:
  void add(Element x, int len, int parent, int letter) {
    index_.emplace(x, elements_.size());
    elements_.push_back(std::move(x));
    length_.push_back(len);
    parent_.push_back(parent);
    parent_letter_.push_back(letter);
  }

  void grow_one() {
    const int r = radius();
    const std::size_t begin = layer_start_[r];
    const std::size_t end = layer_start_[r + 1];
    for (std::size_t i = begin; i < end; ++i) {
      for (Letter t = 0; t < cayley_.degree(); ++t) {
        Element y = cayley_.step(elements_[i], t);
        if (index_.count(y)) continue;
        add(std::move(y), r + 1, static_cast<int>(i), t);
        if (elements_.size() > budget_)
          throw ResourceLimit("ball exceeded its element budget of " + std::to_string(budget_));
      }
    }
    layer_start_.push_back(elements_.size());
  }

  Cayley cayley_;
  std::size_t budget_;
  std::vector<Element> elements_;
  std::vector<int> length_;
  std::vector<int> parent_;
  std::vector<int> parent_letter_;
  std::vector<std::size_t> layer_start_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

// S_n = {x : |x| = n}, in shortlex order of geodesic representatives.
inline std::vector<Element> sphere(const Cayley& cayley, int n,
                                   std::size_t budget = kDefaultBallBudget) {
  if (n < 0) throw PreconditionError("sphere radius must be nonnegative");
  Ball ball(cayley, budget);
  ball.grow_to(n);
  auto layer = ball.layer(n);
  return {layer.begin(), layer.end()};
}

// |S_0|, ..., |S_max_n| by breadth-first layering that keeps only three
// layers in memory. Neighbours of layer n lie in layers n-1, n and n+1.
inline std::vector<std::uint64_t> sphere_sizes(const Cayley& cayley, int max_n,
                                               std::size_t budget = kDefaultBallBudget * 2) {
  using Set = std::unordered_set<Element, ElementHash>;
  std::vector<std::uint64_t> sizes{1};
  Set previous;
  Set current{cayley.identity()};
  for (int n = 1; n <= max_n; ++n) {
    Set next;
    next.reserve(current.size() * 3);
    for (const Element& x : current) {
      for (Letter t = 0; t < cayley.degree(); ++t) {
        Element y = cayley.step(x, t);
        if (previous.count(y) || current.count(y)) continue;
        next.insert(std::move(y));
      }
      if (previous.size() + current.size() + next.size() > budget)
        throw ResourceLimit("sphere layering exceeded its budget");
    }
    sizes.push_back(next.size());
    previous = std::move(current);
    current = std::move(next);
  }
  return sizes;
}

// Exact |x|_T, searching from both ends. Throws CapExceeded if |x|_T > cap.
inline int word_length(const Element& x, const Cayley& target, int cap = kDefaultLengthCap,
                       std::size_t budget = kDefaultSearchBudget) {
  if (cap < 0) throw PreconditionError("cap must be nonnegative");
  return bidirectional_length(target.group(), target.gens(), x, cap, budget);
}

// (x|y)_o = (|x| + |y| - |x^-1 y|) / 2.
inline HalfInteger gromov_product(const Element& x, const Element& y, const Cayley& cayley,
                                  int cap = kDefaultLengthCap) {
  const Group& g = cayley.group();
  const int dx = cayley.length(x, cap);
  const int dy = cayley.length(y, cap);
  const int dxy = cayley.length(g.multiply(g.inverse(x), y), cap);
  return HalfInteger{dx + dy - dxy};
}

// d(x, z) - d(o, z).
inline int busemann_finite(const Element& x, const Element& z, const Cayley& cayley,
                           int cap = kDefaultLengthCap) {
  const Group& g = cayley.group();
  return cayley.length(g.multiply(g.inverse(x), z), cap) - cayley.length(z, cap);
}

struct HyperbolicityEstimate {
  HalfInteger delta;
  int radius = 0;
  std::size_t ball_size = 0;
};

// Smallest delta with (x|y)_o >= min((x|z)_o, (z|y)_o) - delta for all
// x, y, z in B(o, R). Exhaustive over triples.
inline HyperbolicityEstimate estimate_delta(const Cayley& cayley, int R,
                                            std::size_t budget = kDefaultBallBudget) {
  if (R < 0) throw PreconditionError("radius must be nonnegative");
  Ball ball(cayley, budget);
  ball.grow_to(R);
  const std::size_t n = ball.size();
  const Group& g = cayley.group();

  // Pairwise distances: base lengths when available, otherwise the ball of
  // radius 2R serves as a lookup table.
  std::optional<Ball> big;
  if (!cayley.gens().is_base) {
    big.emplace(cayley, budget);
    big->grow_to(2 * R);
  }
  std::vector<Element> inverses(n);
  for (std::size_t i = 0; i < n; ++i) inverses[i] = g.inverse(ball.element(i));
  std::vector<int> gp(n * n);  // twice the Gromov product
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Element d = g.multiply(inverses[i], ball.element(j));
      int dij;
      if (big) {
        auto k = big->find(d);
        if (!k) throw PreconditionError("distance lookup outside B(o, 2R)");
        dij = big->length(*k);
      } else {
        dij = g.base_length(d);
      }
      const int v = ball.length(i) + ball.length(j) - dij;
      gp[i * n + j] = v;
      gp[j * n + i] = v;
    }
  }
  std::int64_t worst = 0;
  for (std::size_t z = 0; z < n; ++z) {
    const int* gz = &gp[z * n];
    for (std::size_t x = 0; x < n; ++x) {
      const int* gx = &gp[x * n];
      const int xz = gz[x];
      if (xz <= worst) continue;  // min(xz, zy) - xy <= xz
      for (std::size_t y = x + 1; y < n; ++y) {
        const int v = std::min(xz, gz[y]) - gx[y];
        if (v > worst) worst = v;
      }
    }
  }
  return HyperbolicityEstimate{HalfInteger{worst}, R, n};
}

}  // namespace hypdist

#endif  // HYPDIST_CAYLEY_HPP_
