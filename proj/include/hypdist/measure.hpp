// Stationary Markov measures on components: Parry-Gibbs measures of locally
// constant potentials, entropy, cylinder masses, the variational principle,
// Gibbs ratios and the word-metric coding check.

#ifndef HYPDIST_MEASURE_HPP_
#define HYPDIST_MEASURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "automaton.hpp"
#include "error.hpp"
#include "generating_set.hpp"
#include "rng.hpp"
#include "sft.hpp"

namespace hypdist {

// A stationary Markov chain on the k-blocks of one component. For k = 1 the
// states are SFT symbols and the chain is an ordinary Markov measure on the
// edge shift.
struct MarkovMeasure {
  int block_length = 1;
  std::vector<std::vector<int>> blocks;                 // state -> k-block of symbols
  std::vector<std::vector<std::pair<int, double>>> P;   // sparse rows
  std::vector<double> pi;
  double pressure_at_construction = std::numeric_limits<double>::quiet_NaN();
  int period = 1;

  int size() const noexcept { return static_cast<int>(blocks.size()); }

  double prob(int i, int j) const {
    for (auto [k, p] : P[i])
      if (k == j) return p;
    return 0.0;
  }

  // State index of a k-block, or -1.
  int state_of(std::span<const int> block) const {
    if (index_.empty())
      for (std::size_t i = 0; i < blocks.size(); ++i) index_[blocks[i]] = static_cast<int>(i);
    auto it = index_.find(std::vector<int>(block.begin(), block.end()));
    return it == index_.end() ? -1 : it->second;
  }

 private:
  mutable std::map<std::vector<int>, int> index_;
};

namespace detail {

inline MarkovMeasure chain_shell(const BlockChain& bc) {
  MarkovMeasure m;
  m.block_length = bc.k;
  m.blocks = bc.blocks;
  m.period = bc.period;
  m.P.resize(bc.blocks.size());
  return m;
}

inline void normalize_rows(MarkovMeasure& m) {
  for (auto& row : m.P) {
    double s = 0;
    for (auto& [j, p] : row) s += p;
    for (auto& [j, p] : row) p /= s;
  }
}

}  // namespace detail

// Stationary vector of an irreducible stochastic matrix: solves pi (P - I) = 0
// with sum(pi) = 1 by LU factorization.
inline std::vector<double> stationary_vector(const MarkovMeasure& m) {
  const int n = m.size();
  Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (auto [j, p] : m.P[i]) A(j, i) += p;
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  return std::vector<double>(x.data(), x.data() + n);
}

// The Parry-Gibbs measure: P(b, b') = exp(psi(b)) r(b') / (lambda r(b)),
// pi(b) proportional to l(b) r(b).
inline MarkovMeasure parry_gibbs_measure(const Sft& sft, const Component& comp, const Potential& psi) {
  const BlockChain bc = block_chain(sft, comp, psi);
  const PerronSolution sol = perron(bc);
  MarkovMeasure m = detail::chain_shell(bc);
  for (int i = 0; i < m.size(); ++i)
    for (int j : bc.succ[i])
      m.P[i].push_back({j, std::exp(bc.psi[i]) * sol.right[j] / (sol.lambda * sol.right[i])});
  detail::normalize_rows(m);
  m.pi.resize(m.size());
  double s = 0;
  for (int i = 0; i < m.size(); ++i) s += m.pi[i] = sol.left[i] * sol.right[i];
  for (double& x : m.pi) x /= s;
  m.pressure_at_construction = std::log(sol.lambda);
  return m;
}

// A Markov measure on the component's k-block chain from nonnegative weights
// on its arcs (weights[i][t] for the t-th successor of state i).
inline MarkovMeasure markov_measure_from_weights(const BlockChain& bc,
                                                 const std::vector<std::vector<double>>& weights) {
  MarkovMeasure m = detail::chain_shell(bc);
  for (int i = 0; i < m.size(); ++i)
    for (std::size_t t = 0; t < bc.succ[i].size(); ++t)
      if (weights[i][t] > 0) m.P[i].push_back({bc.succ[i][t], weights[i][t]});
  detail::normalize_rows(m);
  m.pi = stationary_vector(m);
  return m;
}

inline double entropy(const MarkovMeasure& m) {
  double h = 0;
  for (int i = 0; i < m.size(); ++i)
    for (auto [j, p] : m.P[i])
      if (p > 0) h -= m.pi[i] * p * std::log(p);
  return h;
}

// h(m) + integral of psi.
inline double variational_value(const MarkovMeasure& m, const Potential& psi) {
  double integral = 0;
  for (int i = 0; i < m.size(); ++i) integral += m.pi[i] * psi.value(m.blocks[i]);
  return entropy(m) + integral;
}

// Mass of the cylinder spelled by a block of SFT symbols.
inline double cylinder_measure(const MarkovMeasure& m, std::span<const int> block) {
  if (block.empty()) return 1.0;
  const int k = m.block_length;
  const int len = static_cast<int>(block.size());
  if (len < k) {
    double s = 0;
    for (int i = 0; i < m.size(); ++i)
      if (std::equal(block.begin(), block.end(), m.blocks[i].begin())) s += m.pi[i];
    return s;
  }
  int state = m.state_of(block.subspan(0, k));
  if (state < 0) return 0.0;
  double mass = m.pi[state];
  for (int i = 1; i + k <= len; ++i) {
    const int next = m.state_of(block.subspan(i, k));
    if (next < 0) return 0.0;
    mass *= m.prob(state, next);
    if (mass == 0) return 0.0;
    state = next;
  }
  return mass;
}

inline constexpr double kVariationalTolerance = 1e-9;

struct VariationalReport {
  double pressure = 0;
  double parry_value = 0;
  double parry_gap = 0;     // |h(parry) + int psi - Pr|
  int trials = 0;
  double max_value = -std::numeric_limits<double>::infinity();
  double max_violation = -std::numeric_limits<double>::infinity();  // max(value - Pr)
  int violations = 0;       // trials with value > Pr + 1e-9

  bool passed() const { return violations == 0 && parry_gap < kVariationalTolerance; }
};

// Random Markov measures supported on the component never beat the pressure,
// and the Parry-Gibbs measure attains it.
inline VariationalReport check_variational(const Sft& sft, const Component& comp, const Potential& psi,
                                           int trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("trials must be at least 1");
  const BlockChain bc = block_chain(sft, comp, psi);
  VariationalReport rep;
  const MarkovMeasure parry = parry_gibbs_measure(sft, comp, psi);
  rep.pressure = parry.pressure_at_construction;
  rep.parry_value = variational_value(parry, psi);
  rep.parry_gap = std::abs(rep.parry_value - rep.pressure);
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    std::vector<std::vector<double>> w(bc.blocks.size());
    for (std::size_t i = 0; i < bc.blocks.size(); ++i)
      for (std::size_t s = 0; s < bc.succ[i].size(); ++s) w[i].push_back(rng.uniform_open_closed());
    const double v = variational_value(markov_measure_from_weights(bc, w), psi);
    rep.max_value = std::max(rep.max_value, v);
    rep.max_violation = std::max(rep.max_violation, v - rep.pressure);
    if (v > rep.pressure + kVariationalTolerance) ++rep.violations;
    ++rep.trials;
  }
  return rep;
}

struct GibbsRatios {
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0;
  std::size_t blocks = 0;
};

inline constexpr std::size_t kDefaultCylinderBudget = 10'000'000;

// min and max over allowed blocks of n <= n_max chain states of
// mu[block] / exp(-n Pr + S_n psi).
inline GibbsRatios gibbs_ratio_scan(const MarkovMeasure& m, const Potential& psi, int n_max,
                                    std::size_t budget = kDefaultCylinderBudget) {
  if (n_max < 1) throw PreconditionError("n_max must be at least 1");
  const double pr = m.pressure_at_construction;
  std::vector<double> psi_state(m.size());
  for (int i = 0; i < m.size(); ++i) psi_state[i] = psi.value(m.blocks[i]);
  GibbsRatios g;
  // Masses and Birkhoff sums along the current block, in log form.
  auto rec = [&](auto&& self, int state, int n, double log_mass, double birkhoff) -> void {
    const double ratio = std::exp(log_mass - (-n * pr + birkhoff));
    g.c1 = std::min(g.c1, ratio);
    g.c2 = std::max(g.c2, ratio);
    if (++g.blocks > budget) throw ResourceLimit("Gibbs ratio scan exceeded its block budget");
    if (n == n_max) return;
    for (auto [j, p] : m.P[state])
      if (p > 0) self(self, j, n + 1, log_mass + std::log(p), birkhoff + psi_state[j]);
  };
  for (int i = 0; i < m.size(); ++i)
    if (m.pi[i] > 0) rec(rec, i, 1, std::log(m.pi[i]), psi_state[i]);
  return g;
}

struct CodingRow {
  int n = 0;
  std::size_t left_elements = 0;   // distinct x with coded left halves
  std::size_t right_elements = 0;  // distinct y with coded right halves
  std::size_t pairs = 0;
  bool exhaustive = true;
  std::size_t zero_pairs = 0;
  double max_ratio = 0;
  double total_mass = 0;  // over the pairs examined
};

struct CodingReport {
  int R = 0;
  double v = 0;
  std::vector<CodingRow> rows;
  double spread = 0;  // max over n of max_ratio divided by min over n
  bool bounded = false;
};

inline constexpr std::size_t kDefaultPairBudget = 4'000'000;

// Finite-stage coding check. For each n the bilateral blocks
// (w_{-n}, ..., w_{n-1}) of the summed measures are grouped by the pair
// (x, y) with x^-1 spelled by the left half and y by the right half; the mass
// of each pair is compared with the product of shadow proxies exp(-v n)^2.
inline CodingReport ps_coding_check(const GeodesicAutomaton& aut, const Cayley& cayley, const Sft& sft,
                                    const std::vector<MarkovMeasure>& measures, double v, int R,
                                    const std::vector<int>& n_list, std::uint64_t seed,
                                    std::size_t pair_budget = kDefaultPairBudget) {
  if (aut.num_letters() != cayley.degree())
    throw PreconditionError("automaton alphabet does not match the generating set");
  for (const auto& m : measures)
    if (m.block_length != 1) throw PreconditionError("coding check needs one-block measures");
  const Group& g = cayley.group();
  const int E = sft.size();
  // Global transition rows and stationary masses over SFT symbols.
  std::vector<std::vector<std::pair<int, double>>> P(E);
  std::vector<double> pi(E, 0.0);
  for (const auto& m : measures)
    for (int i = 0; i < m.size(); ++i) {
      const int e = m.blocks[i][0];
      pi[e] += m.pi[i];
      for (auto [j, p] : m.P[i]) P[e].push_back({m.blocks[j][0], p});
    }

  CodingReport rep;
  rep.R = R;
  rep.v = v;
  for (int n : n_list) {
    if (n < 1) throw PreconditionError("coding check needs n >= 1");
    using Vec = std::map<int, double>;
    std::unordered_map<Element, Vec, ElementHash> left;   // x -> (last symbol -> mass)
    std::unordered_map<Element, Vec, ElementHash> right;  // y -> (first symbol -> conditional mass)
    std::vector<Element> trail;
    auto walk = [&](auto&& self, int e, int depth, double mass, int first, bool is_left) -> void {
      trail.push_back(cayley.step(trail.back(), sft.symbol(e).letter));
      if (depth == n) {
        if (is_left)
          left[g.inverse(trail.back())][e] += mass;
        else
          right[trail.back()][first] += mass;
      } else {
        for (auto [f, p] : P[e])
          if (p > 0) self(self, f, depth + 1, mass * p, first, is_left);
      }
      trail.pop_back();
    };
    for (int e = 0; e < E; ++e) {
      if (pi[e] <= 0) continue;
      trail.assign(1, cayley.identity());
      walk(walk, e, 1, pi[e], e, true);
      trail.assign(1, cayley.identity());
      walk(walk, e, 1, 1.0, e, false);
    }
    std::vector<Element> xs, ys;
    for (auto& [x, vec] : left) xs.push_back(x);
    for (auto& [y, vec] : right) ys.push_back(y);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    // C_x[r] = sum_l A_x[l] P(l, r), dense over symbols.
    std::vector<std::vector<double>> cx(xs.size(), std::vector<double>(E, 0.0));
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (auto [l, a] : left[xs[i]])
        for (auto [r, p] : P[l]) cx[i][r] += a * p;
    std::vector<std::vector<std::pair<int, double>>> by(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j)
      for (auto [r, b] : right[ys[j]]) by[j].push_back({r, b});

    CodingRow row;
    row.n = n;
    row.left_elements = xs.size();
    row.right_elements = ys.size();
    const double proxy = std::exp(-2.0 * v * n);
    auto visit = [&](std::size_t i, std::size_t j) {
      double mass = 0;
      for (auto [r, b] : by[j]) mass += cx[i][r] * b;
      ++row.pairs;
      row.total_mass += mass;
      if (mass <= 0) ++row.zero_pairs;
      row.max_ratio = std::max(row.max_ratio, mass / proxy);
    };
    const double all_pairs = static_cast<double>(xs.size()) * static_cast<double>(ys.size());
    if (all_pairs <= static_cast<double>(pair_budget)) {
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) visit(i, j);
    } else {
      row.exhaustive = false;
      Rng rng(seed, static_cast<std::uint64_t>(n));
      for (std::size_t t = 0; t < pair_budget; ++t)
        visit(rng.below(static_cast<std::uint64_t>(xs.size())), rng.below(static_cast<std::uint64_t>(ys.size())));
    }
    rep.rows.push_back(row);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& r : rep.rows) {
    lo = std::min(lo, r.max_ratio);
    hi = std::max(hi, r.max_ratio);
  }
  rep.spread = rep.rows.empty() || lo <= 0 ? std::numeric_limits<double>::infinity() : hi / lo;
  rep.bounded = std::isfinite(rep.spread) && rep.spread <= 2.0;
  return rep;
}

// Text form with 17 significant digits: one `s` line per state (index,
// block symbols, pi) and one `p` line per positive transition.
inline void write_measure(std::ostream& out, const MarkovMeasure& m) {
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << "markov_measure v1\nblock_length " << m.block_length << "\nperiod " << m.period
      << "\npressure " << num(m.pressure_at_construction) << "\nstates " << m.size() << '\n';
  for (int i = 0; i < m.size(); ++i) {
    out << "s " << i;
    for (int e : m.blocks[i]) out << ' ' << e;
    out << ' ' << num(m.pi[i]) << '\n';
  }
  for (int i = 0; i < m.size(); ++i)
    for (auto [j, p] : m.P[i]) out << "p " << i << ' ' << j << ' ' << num(p) << '\n';
  out << "end\n";
}

inline MarkovMeasure read_measure(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of measure");
    ++lineno;
    return std::istringstream(line);
  };
  MarkovMeasure m;
  if (next(); line != "markov_measure v1") throw ParseError(lineno, "not a markov_measure v1 file");
  std::string key;
  int states = 0;
  {
    auto s = next();
    s >> key >> m.block_length;
  }
  {
    auto s = next();
    s >> key >> m.period;
  }
  {
    auto s = next();
    std::string v;
    s >> key >> v;
    m.pressure_at_construction = std::stod(v);
  }
  {
    auto s = next();
    if (!(s >> key >> states) || key != "states" || states < 0) throw ParseError(lineno, "bad state count");
  }
  m.blocks.resize(states);
  m.pi.resize(states);
  m.P.resize(states);
  for (int i = 0; i < states; ++i) {
    auto s = next();
    int idx = -1;
    s >> key >> idx;
    if (key != "s" || idx != i) throw ParseError(lineno, "expected state line");
    m.blocks[i].resize(m.block_length);
    for (int& e : m.blocks[i]) s >> e;
    std::string v;
    s >> v;
    m.pi[i] = std::stod(v);
  }
  for (;;) {
    auto s = next();
    s >> key;
    if (key == "end") break;
    int i = -1, j = -1;
    std::string v;
    if (key != "p" || !(s >> i >> j >> v) || i < 0 || i >= states || j < 0 || j >= states)
      throw ParseError(lineno, "bad transition line");
    m.P[i].push_back({j, std::stod(v)});
  }
  return m;
}

}  // namespace hypdist

#endif  // HYPDIST_MEASURE_HPP_
