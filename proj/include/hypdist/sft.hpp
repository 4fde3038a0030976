// Subshifts of finite type on automaton edges, their recurrent components,
// locally constant potentials and pressure.

#ifndef HYPDIST_SFT_HPP_
#define HYPDIST_SFT_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "automaton.hpp"
#include "error.hpp"

namespace hypdist {

// The edge shift of a finite directed multigraph. The alphabet is the edge
// set; A(e, f) = 1 iff terminus(e) = origin(f).
class Sft {
 public:
  struct Symbol {
    int origin = 0;
    int terminus = 0;
    int letter = -1;  // automaton letter, -1 for abstract graphs
  };

  Sft() = default;

  static Sft from_graph(int num_vertices, const std::vector<std::pair<int, int>>& edges) {
    std::vector<Symbol> symbols;
    for (auto [u, v] : edges) symbols.push_back({u, v, -1});
    return Sft(num_vertices, std::move(symbols));
  }

  Sft(int num_vertices, std::vector<Symbol> symbols)
      : num_vertices_(num_vertices), symbols_(std::move(symbols)) {
    std::vector<std::vector<int>> out(num_vertices_);
    for (std::size_t e = 0; e < symbols_.size(); ++e) {
      const Symbol& s = symbols_[e];
      if (s.origin < 0 || s.origin >= num_vertices_ || s.terminus < 0 || s.terminus >= num_vertices_)
        throw PreconditionError("edge endpoint out of range");
      out[s.origin].push_back(static_cast<int>(e));
    }
    succ_.resize(symbols_.size());
    for (std::size_t e = 0; e < symbols_.size(); ++e) succ_[e] = out[symbols_[e].terminus];
  }

  int size() const noexcept { return static_cast<int>(symbols_.size()); }
  int num_vertices() const noexcept { return num_vertices_; }
  const Symbol& symbol(int e) const { return symbols_.at(e); }
  const std::vector<int>& successors(int e) const { return succ_.at(e); }
  bool allowed(int e, int f) const { return symbols_.at(e).terminus == symbols_.at(f).origin; }

 private:
  int num_vertices_ = 0;
  std::vector<Symbol> symbols_;
  std::vector<std::vector<int>> succ_;
};

// The edge shift of a validated automaton. Edges leaving the start state are
// dropped when the start state has no incoming edge, since no bi-infinite
// path can use them; symbols are ordered by (origin, letter).
inline Sft sft_from_automaton(const GeodesicAutomaton& aut) {
  if (aut.validated_to() < 1) throw PreconditionError("automaton has not been validated");
  if (aut.num_transitions() == 0) throw PreconditionError("automaton has no transitions");
  bool start_entered = false;
  for (int s = 0; s < aut.num_states(); ++s)
    for (int a = 0; a < aut.num_letters(); ++a) start_entered |= aut.next(s, a) == aut.initial();
  std::vector<Sft::Symbol> symbols;
  for (int s = 0; s < aut.num_states(); ++s) {
    if (s == aut.initial() && !start_entered) continue;
    for (int a = 0; a < aut.num_letters(); ++a)
      if (aut.next(s, a) >= 0) symbols.push_back({s, aut.next(s, a), a});
  }
  return Sft(aut.num_states(), std::move(symbols));
}

struct Component {
  std::vector<int> symbols;       // ascending
  int period = 1;
  std::vector<int> cyclic_class;  // aligned with symbols; A-arcs go from class j to j+1 mod p
};

struct ComponentDecomposition {
  std::vector<Component> components;  // ordered by smallest symbol
  std::vector<int> component_of;      // per symbol, -1 when in no component
  // reaches[i][j]: some path of symbols leads from component i to component j.
  std::vector<std::vector<bool>> reaches;
};

namespace detail {

// Breadth-first levels inside a strongly connected symbol set; the period is
// the gcd of level[e] + 1 - level[f] over internal arcs e -> f.
template <class Succ>
inline std::pair<int, std::vector<int>> cyclic_structure(int n, Succ&& succ) {
  std::vector<int> level(n, -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const int e = q.front();
    q.pop();
    for (int f : succ(e))
      if (level[f] < 0) {
        level[f] = level[e] + 1;
        q.push(f);
      }
  }
  int p = 0;
  for (int e = 0; e < n; ++e)
    for (int f : succ(e)) p = std::gcd(p, std::abs(level[e] + 1 - level[f]));
  if (p == 0) p = 1;
  std::vector<int> cls(n);
  for (int e = 0; e < n; ++e) cls[e] = level[e] % p;
  return {p, cls};
}

}  // namespace detail

inline ComponentDecomposition components(const Sft& sft) {
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
  const int n = sft.size();
  Graph g(n);
  for (int e = 0; e < n; ++e)
    for (int f : sft.successors(e)) boost::add_edge(e, f, g);
  std::vector<int> scc(n);
  const int num_scc = n == 0 ? 0 : static_cast<int>(boost::strong_components(g, scc.data()));

  std::vector<std::vector<int>> members(num_scc);
  for (int e = 0; e < n; ++e) members[scc[e]].push_back(e);
  // A strongly connected class is recurrent when it carries an arc.
  std::vector<int> order;
  for (int c = 0; c < num_scc; ++c) {
    bool arc = false;
    for (int e : members[c])
      for (int f : sft.successors(e)) arc |= scc[f] == c;
    if (arc) order.push_back(c);
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return members[a].front() < members[b].front(); });

  ComponentDecomposition dec;
  dec.component_of.assign(n, -1);
  for (int c : order) {
    Component comp;
    comp.symbols = members[c];
    const int idx = static_cast<int>(dec.components.size());
    for (int e : comp.symbols) dec.component_of[e] = idx;
    std::map<int, int> local;
    for (std::size_t i = 0; i < comp.symbols.size(); ++i) local[comp.symbols[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> succ(comp.symbols.size());
    for (std::size_t i = 0; i < comp.symbols.size(); ++i)
      for (int f : sft.successors(comp.symbols[i]))
        if (auto it = local.find(f); it != local.end()) succ[i].push_back(it->second);
    auto [p, cls] = detail::cyclic_structure(static_cast<int>(comp.symbols.size()),
                                             [&](int i) -> const std::vector<int>& { return succ[i]; });
    comp.period = p;
    comp.cyclic_class = std::move(cls);
    dec.components.push_back(std::move(comp));
  }

  const std::size_t k = dec.components.size();
  dec.reaches.assign(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    for (int e : dec.components[i].symbols) {
      seen[e] = true;
      q.push(e);
    }
    while (!q.empty()) {
      const int e = q.front();
      q.pop();
      for (int f : sft.successors(e))
        if (!seen[f]) {
          seen[f] = true;
          q.push(f);
          if (dec.component_of[f] >= 0) dec.reaches[i][dec.component_of[f]] = true;
        }
    }
    dec.reaches[i][i] = false;
  }
  return dec;
}

// A locally constant potential: a value per allowed block of block_length
// symbols, or one constant.
struct Potential {
  int block_length = 1;
  std::optional<double> constant;
  std::map<std::vector<int>, double> values;

  static Potential constant_value(double c) {
    Potential p;
    p.constant = c;
    return p;
  }

  // psi_S = -v on every symbol.
  static Potential word_metric(double v) { return constant_value(-v); }

  static Potential one_block(const std::vector<double>& per_symbol) {
    Potential p;
    for (std::size_t e = 0; e < per_symbol.size(); ++e) p.values[{static_cast<int>(e)}] = per_symbol[e];
    return p;
  }

  double value(std::span<const int> block) const {
    if (constant) return *constant;
    if (static_cast<int>(block.size()) != block_length)
      throw PreconditionError("potential evaluated on a block of the wrong length");
    auto it = values.find(std::vector<int>(block.begin(), block.end()));
    if (it == values.end()) throw PreconditionError("potential undefined on an allowed block");
    if (!std::isfinite(it->second)) throw PreconditionError("potential value is not finite");
    return it->second;
  }
};

// A component in k-block presentation: states are the allowed k-blocks of
// the component, b -> b' when b' is b shifted by one symbol, and state b has
// weight exp(psi(b)). For k = 1 the states are the component's symbols.
struct BlockChain {
  int k = 1;
  std::vector<std::vector<int>> blocks;
  std::vector<std::vector<int>> succ;
  std::vector<double> psi;
  int period = 1;
  std::vector<int> cyclic_class;
};

inline constexpr std::size_t kDefaultBlockBudget = 1'000'000;

inline BlockChain block_chain(const Sft& sft, const Component& comp, const Potential& psi,
                              std::size_t budget = kDefaultBlockBudget) {
  const int k = psi.constant ? 1 : psi.block_length;
  if (k < 1) throw PreconditionError("block length must be at least 1");
  std::vector<bool> inside(sft.size(), false);
  for (int e : comp.symbols) inside[e] = true;
  BlockChain bc;
  bc.k = k;
  std::vector<int> cur;
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == k) {
      bc.blocks.push_back(cur);
      if (bc.blocks.size() > budget) throw ResourceLimit("too many blocks in the recoded component");
      return;
    }
    for (int f : sft.successors(cur.back()))
      if (inside[f]) {
        cur.push_back(f);
        self(self);
        cur.pop_back();
      }
  };
  for (int e : comp.symbols) {
    cur = {e};
    extend(extend);
  }
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < bc.blocks.size(); ++i) index[bc.blocks[i]] = static_cast<int>(i);
  bc.succ.resize(bc.blocks.size());
  bc.psi.resize(bc.blocks.size());
  for (std::size_t i = 0; i < bc.blocks.size(); ++i) {
    const auto& b = bc.blocks[i];
    bc.psi[i] = psi.value(b);
    std::vector<int> next(b.begin() + 1, b.end());
    next.push_back(0);
    for (int f : sft.successors(b.back())) {
      if (!inside[f]) continue;
      next.back() = f;
      bc.succ[i].push_back(index.at(next));
    }
  }
  auto [p, cls] = detail::cyclic_structure(static_cast<int>(bc.blocks.size()),
                                           [&](int i) -> const std::vector<int>& { return bc.succ[i]; });
  bc.period = p;
  bc.cyclic_class = std::move(cls);
  return bc;
}

struct PerronSolution {
  double lambda = 0;
  std::vector<double> right;  // W r = lambda r
  std::vector<double> left;   // l W = lambda l
  long iterations = 0;
};

inline constexpr double kPerronTolerance = 1e-12;
inline constexpr long kPerronIterationCap = 1'000'000;

// Perron data of W(b, b') = exp(psi(b)) on b -> b'. Power iteration runs on
// W^p restricted to cyclic class 0, where it is primitive; the vectors are
// then carried to the other classes by one application of W each.
inline PerronSolution perron(const BlockChain& bc, double tol = kPerronTolerance,
                             long cap = kPerronIterationCap) {
  const int n = static_cast<int>(bc.blocks.size());
  const int p = bc.period;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::exp(bc.psi[i]);

  auto apply_right = [&](const std::vector<double>& v) {
    std::vector<double> u(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j : bc.succ[i]) s += v[j];
      u[i] = w[i] * s;
    }
    return u;
  };
  auto apply_left = [&](const std::vector<double>& v) {
    std::vector<double> u(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (v[i] != 0)
        for (int j : bc.succ[i]) u[j] += v[i] * w[i];
    return u;
  };

  PerronSolution sol;
  auto iterate = [&](auto&& apply, std::vector<double>& v) -> double {
    v.assign(n, 0.0);
    int c0 = 0;
    for (int i = 0; i < n; ++i) c0 += bc.cyclic_class[i] == 0;
    for (int i = 0; i < n; ++i)
      if (bc.cyclic_class[i] == 0) v[i] = 1.0 / c0;
    double mu = 0;
    for (long it = 1; it <= cap; ++it) {
      std::vector<double> u = v;
      for (int r = 0; r < p; ++r) u = apply(u);
      const double s = std::accumulate(u.begin(), u.end(), 0.0);
      if (!(s > 0) || !std::isfinite(s)) throw NonConvergence("Perron iteration degenerated; rescale the potential");
      double change = 0;
      for (int i = 0; i < n; ++i) {
        u[i] /= s;
        change = std::max(change, std::abs(u[i] - v[i]));
      }
      const double mu_change = std::abs(s - mu);
      v = std::move(u);
      mu = s;
      sol.iterations = std::max(sol.iterations, it);
      if (change < tol && mu_change <= tol * s) return s;
    }
    throw NonConvergence("Perron iteration did not converge within the iteration cap");
  };

  std::vector<double> r;
  std::vector<double> l;
  const double mu = iterate(apply_right, r);
  iterate(apply_left, l);
  const double lambda = std::pow(mu, 1.0 / p);
  // Classes p-1, ..., 1 of r and 1, ..., p-1 of l.
  for (int c = p - 1; c >= 1; --c) {
    const std::vector<double> u = apply_right(r);
    for (int i = 0; i < n; ++i)
      if (bc.cyclic_class[i] == c) r[i] = u[i] / lambda;
  }
  for (int c = 1; c < p; ++c) {
    const std::vector<double> u = apply_left(l);
    for (int i = 0; i < n; ++i)
      if (bc.cyclic_class[i] == c) l[i] = u[i] / lambda;
  }
  sol.lambda = lambda;
  sol.right = std::move(r);
  sol.left = std::move(l);
  return sol;
}

// Pr_C(psi) = log of the Perron value of the psi-weighted adjacency matrix.
inline double pressure(const Sft& sft, const Component& comp, const Potential& psi) {
  return std::log(perron(block_chain(sft, comp, psi)).lambda);
}

inline constexpr double kMaximalTolerance = 1e-9;

struct MaximalComponents {
  std::vector<int> indices;
  bool semisimple = true;
  std::vector<double> pressures;  // per component
  double max_pressure = 0;
};

inline MaximalComponents maximal_components(const Sft& sft, const ComponentDecomposition& dec,
                                            const Potential& psi) {
  MaximalComponents out;
  if (dec.components.empty()) return out;
  for (const Component& c : dec.components) out.pressures.push_back(pressure(sft, c, psi));
  out.max_pressure = *std::max_element(out.pressures.begin(), out.pressures.end());
  for (std::size_t i = 0; i < out.pressures.size(); ++i)
    if (out.max_pressure - out.pressures[i] <= kMaximalTolerance) out.indices.push_back(static_cast<int>(i));
  for (int i : out.indices)
    for (int j : out.indices)
      if (i != j && dec.reaches[i][j]) out.semisimple = false;
  return out;
}

inline constexpr double kElementaryThreshold = 1e-9;

struct GrowthRate {
  double gr = 0;               // log of the spectral radius, 0 without components
  double spectral_radius = 0;
  bool elementary_warning = false;  // spectral radius <= 1 + 1e-9
  std::size_t num_components = 0;
};

// gr(S) = log of the spectral radius of the automaton's edge shift.
inline GrowthRate growth_rate(const GeodesicAutomaton& aut) {
  const Sft sft = sft_from_automaton(aut);
  const ComponentDecomposition dec = components(sft);
  GrowthRate g;
  g.num_components = dec.components.size();
  if (!dec.components.empty()) {
    const MaximalComponents mc = maximal_components(sft, dec, Potential::constant_value(0.0));
    g.gr = mc.max_pressure;
    g.spectral_radius = std::exp(g.gr);
  }
  g.elementary_warning = g.spectral_radius <= 1.0 + kElementaryThreshold;
  return g;
}

}  // namespace hypdist

#endif  // HYPDIST_SFT_HPP_
