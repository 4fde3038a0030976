// Geodesic automata from truncated cone types.
//
// The automaton accepts, for every group element, exactly its shortlex-least
// geodesic word. States are classes of elements under an L-local signature,
// the L-tail: the length changes |xu| - |x| <= 0 for u in the ball B(L)
// (positive changes are not distinguished), together with which same-sphere
// neighbours xu precede x in shortlex order. For L large enough the tail
// determines the accepted continuations, so the classes
// form a finite automaton; the result is always checked against breadth-first
// sphere sizes and L is raised until the check passes.

#ifndef HYPDIST_AUTOMATON_HPP_
#define HYPDIST_AUTOMATON_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "cayley.hpp"
#include "error.hpp"
#include "generating_set.hpp"
#include "group.hpp"
#include "rng.hpp"

namespace hypdist {

class GeodesicAutomaton {
 public:
  GeodesicAutomaton() = default;
  GeodesicAutomaton(std::vector<std::string> alphabet, int num_states, int initial)
      : alphabet_(std::move(alphabet)),
        initial_(initial),
        delta_(static_cast<std::size_t>(num_states), std::vector<int>(alphabet_.size(), -1)) {}

  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  int num_letters() const noexcept { return static_cast<int>(alphabet_.size()); }
  int num_states() const noexcept { return static_cast<int>(delta_.size()); }
  int initial() const noexcept { return initial_; }
  int level_used() const noexcept { return level_used_; }
  int validated_to() const noexcept { return validated_to_; }

  // Target of (state, letter), or -1.
  int next(int state, int letter) const { return delta_[state][letter]; }

  void set_transition(int state, int letter, int target) { delta_[state][letter] = target; }
  void set_level_used(int L) { level_used_ = L; }
  void set_validated_to(int n) { validated_to_ = n; }

  std::size_t num_transitions() const {
    std::size_t n = 0;
    for (const auto& row : delta_)
      for (int t : row) n += t >= 0;
    return n;
  }

  bool operator==(const GeodesicAutomaton&) const = default;

 private:
  std::vector<std::string> alphabet_;
  int initial_ = 0;
  int level_used_ = 0;
  int validated_to_ = 0;
  std::vector<std::vector<int>> delta_;
};

// counts(k, s) = number of length-k paths starting at state s, for k <= n_max.
class PathCounter {
 public:
  PathCounter(const GeodesicAutomaton& aut, int n_max) : aut_(&aut) {
    if (n_max < 0) throw PreconditionError("path length must be nonnegative");
    const int q = aut.num_states();
    counts_.assign(static_cast<std::size_t>(n_max) + 1, std::vector<BigInt>(q, 0));
    for (int s = 0; s < q; ++s) counts_[0][s] = 1;
    for (int k = 1; k <= n_max; ++k)
      for (int s = 0; s < q; ++s)
        for (int a = 0; a < aut.num_letters(); ++a)
          if (const int t = aut.next(s, a); t >= 0) counts_[k][s] += counts_[k - 1][t];
  }

  int max_length() const noexcept { return static_cast<int>(counts_.size()) - 1; }
  const BigInt& count(int k, int state) const { return counts_.at(k).at(state); }
  const BigInt& sphere(int n) const { return count(n, aut_->initial()); }

  // The path of length n from the initial state with the given rank in
  // lexicographic letter order; 0 <= rank < sphere(n).
  Word unrank(int n, BigInt rank) const {
    Word w;
    int s = aut_->initial();
    for (int m = n; m > 0; --m) {
      for (int a = 0; a < aut_->num_letters(); ++a) {
        const int t = aut_->next(s, a);
        if (t < 0) continue;
        const BigInt& c = counts_[m - 1][t];
        if (rank < c) {
          w.push_back(a);
          s = t;
          break;
        }
        rank -= c;
      }
    }
    return w;
  }

 private:
  const GeodesicAutomaton* aut_;
  std::vector<std::vector<BigInt>> counts_;
};

inline BigInt sphere_count(const GeodesicAutomaton& aut, int n) {
  return PathCounter(aut, n).sphere(n);
}

// Uniform random accepted word of length n.
inline Word sample_uniform_path(const PathCounter& counter, int n, Rng& rng) {
  const BigInt& total = counter.sphere(n);
  if (total == 0) throw EmptySphere(n);
  return counter.unrank(n, rng.below(total));
}

inline Element sample_uniform_sphere(const GeodesicAutomaton& aut, const Cayley& cayley, int n,
                                     std::uint64_t seed) {
  if (n < 0) throw PreconditionError("sphere radius must be nonnegative");
  PathCounter counter(aut, n);
  Rng rng(seed);
  return cayley.evaluate(sample_uniform_path(counter, n, rng));
}

// Calls f(word) for every accepted word of length n, depth first in letter
// order.
inline void for_each_path(const GeodesicAutomaton& aut, const PathCounter& counter, int n,
                          const std::function<void(const Word&)>& f) {
  if (n < 0) throw PreconditionError("path length must be nonnegative");
  if (counter.sphere(n) == 0) return;
  Word w;
  std::function<void(int, int)> rec = [&](int s, int m) {
    if (m == 0) {
      f(w);
      return;
    }
    for (int a = 0; a < aut.num_letters(); ++a) {
      const int t = aut.next(s, a);
      if (t < 0 || counter.count(m - 1, t) == 0) continue;
      w.push_back(a);
      rec(t, m - 1);
      w.pop_back();
    }
  };
  rec(aut.initial(), n);
}

// Calls f(x, word) for every element of S_n through its accepted word.
inline void enumerate_sphere(const GeodesicAutomaton& aut, const Cayley& cayley, int n,
                             const std::function<void(const Element&, const Word&)>& f) {
  PathCounter counter(aut, std::max(n, 0));
  // Elements along the current path are cached per depth.
  std::vector<Element> trail{cayley.identity()};
  Word w;
  std::function<void(int, int)> rec = [&](int s, int m) {
    if (m == 0) {
      f(trail.back(), w);
      return;
    }
    for (int a = 0; a < aut.num_letters(); ++a) {
      const int t = aut.next(s, a);
      if (t < 0 || counter.count(m - 1, t) == 0) continue;
      w.push_back(a);
      trail.push_back(cayley.step(trail.back(), a));
      rec(t, m - 1);
      trail.pop_back();
      w.pop_back();
    }
  };
  if (n < 0) throw PreconditionError("sphere radius must be nonnegative");
  if (counter.sphere(n) == 0) return;
  rec(aut.initial(), n);
}

struct ValidationRow {
  int n = 0;
  BigInt paths;
  std::uint64_t bfs = 0;
  bool equal = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  int geodesic_checks = 0;
  int geodesic_failures = 0;
  int injective_checked_to = -1;  // largest n with exhaustive distinctness check
  std::size_t duplicates = 0;
  std::optional<int> first_mismatch;

  bool ok() const { return !first_mismatch && geodesic_failures == 0 && duplicates == 0; }
};

struct ValidationOptions {
  int geodesic_checks = 200;
  std::size_t enumeration_budget = 2'000'000;
  std::uint64_t seed = 0x5eed;
  std::size_t ball_budget = kDefaultBallBudget * 2;
};

// Compares path counts with breadth-first sphere sizes for n <= N, spot-checks
// that accepted words are geodesic, and checks that accepted words of equal
// length spell distinct elements while the spheres fit the enumeration budget.
inline ValidationReport validate_automaton(const GeodesicAutomaton& aut, const Cayley& cayley, int N,
                                           const ValidationOptions& opt = {},
                                           const std::vector<std::uint64_t>* bfs_sizes = nullptr) {
  if (N < 1) throw PreconditionError("validation horizon must be at least 1");
  if (aut.num_letters() != cayley.degree())
    throw PreconditionError("automaton alphabet does not match the generating set");
  std::vector<std::uint64_t> own;
  if (!bfs_sizes || static_cast<int>(bfs_sizes->size()) <= N) {
    own = sphere_sizes(cayley, N, opt.ball_budget);
    bfs_sizes = &own;
  }
  ValidationReport rep;
  PathCounter counter(aut, N);
  for (int n = 0; n <= N; ++n) {
    ValidationRow row{n, counter.sphere(n), (*bfs_sizes)[n], false};
    row.equal = row.paths == BigInt(row.bfs);
    if (!row.equal && !rep.first_mismatch) rep.first_mismatch = n;
    rep.rows.push_back(std::move(row));
  }

  Rng rng(opt.seed, 1);
  for (int i = 0; i < opt.geodesic_checks; ++i) {
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(N)));
    if (counter.sphere(n) == 0) continue;
    const Word w = sample_uniform_path(counter, n, rng);
    ++rep.geodesic_checks;
    int len;
    try {
      len = cayley.length(cayley.evaluate(w), n);
    } catch (const CapExceeded&) {
      len = n + 1;
    }
    if (len != n) ++rep.geodesic_failures;
  }

  std::size_t spent = 0;
  for (int n = 0; n <= N; ++n) {
    if (counter.sphere(n) > BigInt(opt.enumeration_budget - spent)) break;
    const std::size_t m = static_cast<std::size_t>(counter.sphere(n));
    spent += m;
    std::unordered_set<Element, ElementHash> seen;
    seen.reserve(m);
    enumerate_sphere(aut, cayley, n, [&](const Element& x, const Word&) {
      if (!seen.insert(x).second) ++rep.duplicates;
    });
    rep.injective_checked_to = n;
  }
  return rep;
}

struct AutomatonBuildOptions {
  int L_max = 4;
  int stable_layers = 2;
  int max_depth = 16;
  std::size_t ball_budget = kDefaultBallBudget;
  ValidationOptions validation;
};

namespace detail {

struct ConeBuild {
  GeodesicAutomaton aut;
  bool consistent = true;
  bool stabilized = false;
  int depth = 0;
};

// One construction attempt at a fixed level L. Conflicting observations are
// recorded (first observation wins) rather than thrown.
inline ConeBuild build_cone_types(const Cayley& cayley, int L, const AutomatonBuildOptions& opt) {
  const int deg = cayley.degree();
  Ball local(cayley, opt.ball_budget);
  local.grow_to(L);
  std::vector<Word> probes;
  for (std::size_t i = 1; i < local.size(); ++i) probes.push_back(local.word(i));

  Ball ball(cayley, opt.ball_budget);
  std::map<std::vector<std::int8_t>, int> ids;
  std::vector<int> state_of;  // per ball element, for processed layers
  std::vector<std::vector<int>> delta;
  std::vector<std::int64_t> accepted_mask;  // -1 until first observed
  ConeBuild out;

  auto signature = [&](std::size_t i) {
    std::vector<std::int8_t> sig;
    sig.reserve(probes.size() * 2);
    const int len = ball.length(i);
    const Element& x = ball.element(i);
    std::vector<std::int8_t> past;
    for (const Word& u : probes) {
      Element y = x;
      for (Letter t : u) y = cayley.step(y, t);
      // The ball reaches one layer past x, so a miss means |xu| > |x|.
      const auto j = ball.find(y);
      const int d = j ? std::min(ball.length(*j) - len, 1) : 1;
      sig.push_back(static_cast<std::int8_t>(d));
      if (d == 0) past.push_back(*j < i ? 1 : 0);
    }
    sig.push_back(static_cast<std::int8_t>(-128));
    sig.insert(sig.end(), past.begin(), past.end());
    return sig;
  };

  auto state_for = [&](std::size_t i, bool& fresh) {
    auto sig = signature(i);
    auto [it, inserted] = ids.emplace(std::move(sig), static_cast<int>(delta.size()));
    if (inserted) {
      delta.emplace_back(deg, -1);
      accepted_mask.push_back(-1);
      fresh = true;
    }
    return it->second;
  };

  ball.grow_to(1);
  bool fresh = false;
  state_of.push_back(state_for(0, fresh));
  int quiet = 0;
  for (int k = 1; k <= opt.max_depth; ++k) {
    ball.grow_to(k + 1);
    fresh = false;
    for (std::size_t i = ball.layer_begin(k); i < ball.layer_end(k); ++i)
      state_of.push_back(state_for(i, fresh));
    // Transitions from layer k-1 into layer k.
    std::vector<std::int64_t> masks(ball.layer_end(k - 1) - ball.layer_begin(k - 1), 0);
    for (std::size_t i = ball.layer_begin(k); i < ball.layer_end(k); ++i) {
      const int p = ball.parent(i);
      const int a = ball.parent_letter(i);
      masks[p - ball.layer_begin(k - 1)] |= std::int64_t{1} << a;
      int& slot = delta[state_of[p]][a];
      if (slot < 0)
        slot = state_of[i];
      else if (slot != state_of[i])
        out.consistent = false;
    }
    for (std::size_t i = ball.layer_begin(k - 1); i < ball.layer_end(k - 1); ++i) {
      std::int64_t& m = accepted_mask[state_of[i]];
      const std::int64_t seen = masks[i - ball.layer_begin(k - 1)];
      if (m < 0)
        m = seen;
      else if (m != seen)
        out.consistent = false;
    }
    out.depth = k;
    quiet = fresh ? 0 : quiet + 1;
    if (quiet >= opt.stable_layers) {
      out.stabilized = true;
      break;
    }
    if (ball.layer_begin(k) == ball.layer_end(k)) {
      // Finite group exhausted: every state has been expanded.
      out.stabilized = true;
      break;
    }
  }

  std::vector<std::string> alphabet = cayley.gens().letters;
  out.aut = GeodesicAutomaton(std::move(alphabet), static_cast<int>(delta.size()), state_of[0]);
  for (std::size_t s = 0; s < delta.size(); ++s)
    for (int a = 0; a < deg; ++a)
      if (delta[s][a] >= 0) out.aut.set_transition(static_cast<int>(s), a, delta[s][a]);
  out.aut.set_level_used(L);
  return out;
}

}  // namespace detail

// Truncated cone-type automaton at a fixed level, without validation.
// validated_to is 0; conflicting observations are resolved by first arrival.
inline GeodesicAutomaton build_cone_automaton_at_level(const Cayley& cayley, int L,
                                                       const AutomatonBuildOptions& opt = {}) {
  if (L < 1) throw PreconditionError("L must be at least 1");
  return detail::build_cone_types(cayley, L, opt).aut;
}

// Builds and validates a geodesic automaton, raising L from L up to L_max
// until validation to N_check passes.
inline GeodesicAutomaton build_geodesic_automaton(const Cayley& cayley, int L, int N_check,
                                                  const AutomatonBuildOptions& opt = {}) {
  if (L < 1) throw PreconditionError("L must be at least 1");
  if (N_check < 2 * L) throw PreconditionError("N_check must be at least 2L");
  const std::vector<std::uint64_t> bfs = sphere_sizes(cayley, N_check, opt.validation.ball_budget);
  int first_mismatch = -1;
  std::string last_reason;
  for (int level = L; level <= std::max(L, opt.L_max); ++level) {
    detail::ConeBuild b;
    try {
      b = detail::build_cone_types(cayley, level, opt);
    } catch (const ResourceLimit& e) {
      last_reason = e.what();
      break;
    }
    const ValidationReport rep = validate_automaton(b.aut, cayley, N_check, opt.validation, &bfs);
    if (rep.ok()) {
      b.aut.set_validated_to(N_check);
      return b.aut;
    }
    if (rep.first_mismatch) first_mismatch = *rep.first_mismatch;
    last_reason = !b.consistent ? "inconsistent cone types"
                  : !b.stabilized ? "cone types did not stabilize"
                                  : "validation failed";
  }
  throw StabilizationFailure("no level up to " + std::to_string(std::max(L, opt.L_max)) +
                                 " gave a valid automaton (" + last_reason + ")",
                             first_mismatch);
}

// Flat text form: header, alphabet, state count, initial state, level,
// validation horizon, then one `t <state> <letter> <target>` line per
// transition in (state, letter) order.
inline void write_automaton(std::ostream& out, const GeodesicAutomaton& aut) {
  out << "automaton v1\n";
  out << "alphabet";
  for (const auto& a : aut.alphabet()) out << ' ' << a;
  out << "\nstates " << aut.num_states() << "\ninitial " << aut.initial() << "\nlevel_used "
      << aut.level_used() << "\nvalidated_to " << aut.validated_to() << '\n';
  for (int s = 0; s < aut.num_states(); ++s)
    for (int a = 0; a < aut.num_letters(); ++a)
      if (aut.next(s, a) >= 0) out << "t " << s << ' ' << aut.alphabet()[a] << ' ' << aut.next(s, a) << '\n';
  out << "end\n";
}

inline std::string automaton_to_string(const GeodesicAutomaton& aut) {
  std::ostringstream s;
  write_automaton(s, aut);
  return s.str();
}

inline GeodesicAutomaton read_automaton(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of automaton");
    ++lineno;
    return std::istringstream(line);
  };
  auto expect = [&](std::istringstream& s, const std::string& key) {
    std::string k;
    s >> k;
    if (k != key) throw ParseError(lineno, "expected '" + key + "'");
  };
  {
    auto s = next_line();
    if (line != "automaton v1") throw ParseError(lineno, "not an automaton v1 file");
  }
  std::vector<std::string> alphabet;
  {
    auto s = next_line();
    expect(s, "alphabet");
    std::string a;
    while (s >> a) alphabet.push_back(a);
  }
  int states = 0, initial = 0, level = 0, validated = 0;
  for (auto [key, target] : {std::pair<const char*, int*>{"states", &states}, {"initial", &initial},
                             {"level_used", &level}, {"validated_to", &validated}}) {
    auto s = next_line();
    expect(s, key);
    if (!(s >> *target)) throw ParseError(lineno, std::string("bad value for ") + key);
  }
  if (states < 1 || initial < 0 || initial >= states) throw ParseError(lineno, "bad state count");
  GeodesicAutomaton aut(alphabet, states, initial);
  aut.set_level_used(level);
  aut.set_validated_to(validated);
  for (;;) {
    auto s = next_line();
    std::string tag;
    s >> tag;
    if (tag == "end") break;
    if (tag != "t") throw ParseError(lineno, "expected a transition line");
    int from = -1, to = -1;
    std::string letter;
    if (!(s >> from >> letter >> to)) throw ParseError(lineno, "bad transition");
    auto it = std::find(alphabet.begin(), alphabet.end(), letter);
    if (it == alphabet.end()) throw ParseError(lineno, "unknown letter '" + letter + "'");
    if (from < 0 || from >= states || to < 0 || to >= states)
      throw ParseError(lineno, "state out of range");
    const int a = static_cast<int>(it - alphabet.begin());
    if (aut.next(from, a) >= 0) throw ParseError(lineno, "duplicate transition");
    aut.set_transition(from, a, to);
  }
  return aut;
}

inline GeodesicAutomaton automaton_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_automaton(in);
}

}  // namespace hypdist

#endif  // HYPDIST_AUTOMATON_HPP_
