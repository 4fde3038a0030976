// Mean distortion of one word metric relative to another: exact sphere
// averages, Monte Carlo estimates, the growth inequality, the law of large
// numbers and rough-similarity scans.

#ifndef HYPDIST_DISTORTION_HPP_
#define HYPDIST_DISTORTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "automaton.hpp"
#include "cayley.hpp"
#include "error.hpp"
#include "generating_set.hpp"
#include "rng.hpp"

namespace hypdist {

using Rational = boost::multiprecision::cpp_rational;

struct ForeignLengthOptions {
  int tube_width = 2;      // W: excess |z| + |z^-1 x| - |x| <= 2W inside the tube
  int max_tube_width = 8;  // widening limit before falling back to exact search
  int cap = kDefaultLengthCap;
  std::size_t budget = kDefaultSearchBudget;
};

// |x|_to for elements given by a geodesic word in `from`.
//
// When `to` is the base set the base length is exact and cheap. Otherwise a
// breadth-first search in Cay(G, to) runs inside the tube
//   {z : |z|_from + |z^-1 x|_from <= |x|_from + 2W}
// around the from-geodesics to x. Paths in the tube are paths in the group,
// so the result is an upper bound on |x|_to; it is exact as soon as one
// to-geodesic stays in the tube, which holds for W at least the distance
// at which to-geodesics fellow-travel from-geodesics.
class ForeignLength {
 public:
  ForeignLength(Cayley from, Cayley to, ForeignLengthOptions opt = {})
      : from_(std::move(from)), to_(std::move(to)), opt_(opt) {
    if (from_.group_ptr() != to_.group_ptr())
      throw PreconditionError("generating sets belong to different groups");
    for (const Element& s : from_.gens().elements)
      lip_from_to_ = std::max(lip_from_to_, to_.length(s, opt_.cap, opt_.budget));
    for (const Element& t : to_.gens().elements)
      lip_to_from_ = std::max(lip_to_from_, from_.length(t, opt_.cap, opt_.budget));
  }

  const Cayley& from() const noexcept { return from_; }
  const Cayley& to() const noexcept { return to_; }
  // max over from-letters of |s|_to.
  int lip_from_to() const noexcept { return lip_from_to_; }
  // max over to-letters of |t|_from.
  int lip_to_from() const noexcept { return lip_to_from_; }
  // Bi-Lipschitz constant between the two word metrics.
  int lipschitz() const noexcept { return std::max(lip_from_to_, lip_to_from_); }

  int operator()(const Word& from_geodesic) const {
    const Element x = from_.evaluate(from_geodesic);
    if (to_.gens().is_base) return to_.group().base_length(x);
    const int n = static_cast<int>(from_geodesic.size());
    for (int w = opt_.tube_width; w <= opt_.max_tube_width; w *= 2)
      if (const int d = tube_length(x, n, w); d >= 0) return d;
    return exact(x);
  }

  int exact(const Element& x) const { return to_.length(x, opt_.cap, opt_.budget); }

  // Length of the shortest to-path from o to x inside the tube of width W,
  // or -1 when the tube does not connect them. n = |x|_from.
  int tube_length(const Element& x, int n, int W) const {
    const Group& g = to_.group();
    const Element o = g.identity();
    if (x == o) return 0;
    const Element x_inv = g.inverse(x);
    auto excess = [&](const Element& z) {
      return from_.length(z, opt_.cap) + from_.length(g.multiply(x_inv, z), opt_.cap) - n;
    };
    std::unordered_map<Element, int, ElementHash> seen{{o, 0}};
    std::vector<Element> frontier{o};
    for (int d = 1; !frontier.empty(); ++d) {
      std::vector<Element> next;
      for (const Element& z : frontier) {
        for (const Element& t : to_.gens().elements) {
          Element y = g.multiply(z, t);
          if (seen.count(y)) continue;
          if (y == x) return d;
          const int e = excess(y);
          seen.emplace(y, d);
          if (e <= 2 * W) next.push_back(std::move(y));
        }
      }
      if (seen.size() > opt_.budget) throw ResourceLimit("tube search exceeded its budget");
      frontier = std::move(next);
    }
    return -1;
  }

 private:
  Cayley from_;
  Cayley to_;
  ForeignLengthOptions opt_;
  int lip_from_to_ = 0;
  int lip_to_from_ = 0;
};

struct ExactRow {
  int n = 0;
  BigInt sphere_size;
  Rational expectation;  // E |x_n|_to

  double normalized() const {
    return n == 0 ? 0.0 : static_cast<double>(expectation) / n;
  }
};

// E |x|_to over S_n of `from`, exactly, for n <= n_max: spheres are
// enumerated through the automaton and lengths looked up in a breadth-first
// ball of Cay(G, to) of radius n_max * max|s|_to.
inline std::vector<ExactRow> mean_distortion_exact(const GeodesicAutomaton& aut, const ForeignLength& fl,
                                                   int n_max, std::size_t budget = kDefaultBallBudget) {
  if (n_max < 0) throw PreconditionError("n_max must be nonnegative");
  PathCounter counter(aut, n_max);
  BigInt total = 0;
  for (int n = 0; n <= n_max; ++n) total += counter.sphere(n);
  if (total > BigInt(budget)) throw ResourceLimit("spheres exceed the enumeration budget");
  Ball ball(fl.to(), budget);
  ball.grow_to(n_max * fl.lip_from_to());
  std::vector<ExactRow> rows;
  for (int n = 0; n <= n_max; ++n) {
    BigInt sum = 0;
    enumerate_sphere(aut, fl.from(), n, [&](const Element& x, const Word&) {
      const auto i = ball.find(x);
      if (!i) throw PreconditionError("element outside the foreign ball");
      sum += ball.length(*i);
    });
    const BigInt& size = counter.sphere(n);
    rows.push_back({n, size, size == 0 ? Rational(0) : Rational(sum, size)});
  }
  return rows;
}

struct McRow {
  int n = 0;
  std::size_t samples = 0;
  double mean = 0;       // of |x|_to / n
  double stderr_ = 0;
  double variance = 0;   // of |x|_to / n
  double min_ratio = 0;
  double max_ratio = 0;
};

struct McOptions {
  std::size_t chunk = 1000;  // samples per random stream
  unsigned threads = 1;
};

namespace detail {

inline std::uint64_t stream_id(int n, std::size_t chunk) {
  return (static_cast<std::uint64_t>(n) << 32) ^ static_cast<std::uint64_t>(chunk);
}

// Runs f(chunk) for chunk = 0..chunks-1, on up to `threads` threads. Results
// are collected per chunk, so the merge order never depends on scheduling.
template <class F>
inline auto run_chunks(std::size_t chunks, unsigned threads, F&& f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out(chunks);
  if (threads <= 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) out[c] = f(c);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t c = t; c < chunks; c += threads) out[c] = f(c);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Foreign lengths of `samples` uniform S_n samples, stream by stream.
inline std::vector<int> sample_foreign_lengths(const PathCounter& counter, const ForeignLength& fl, int n,
                                               std::size_t samples, std::uint64_t seed,
                                               const McOptions& opt) {
  const std::size_t chunks = (samples + opt.chunk - 1) / opt.chunk;
  auto parts = run_chunks(chunks, opt.threads, [&](std::size_t c) {
    Rng rng(seed, stream_id(n, c));
    const std::size_t m = std::min(opt.chunk, samples - c * opt.chunk);
    std::vector<int> lens;
    lens.reserve(m);
    for (std::size_t i = 0; i < m; ++i) lens.push_back(fl(sample_uniform_path(counter, n, rng)));
    return lens;
  });
  std::vector<int> all;
  all.reserve(samples);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

}  // namespace detail

struct DistortionReport {
  std::vector<int> n_values;
  std::vector<ExactRow> exact;
  std::vector<McRow> mc;
  double tau_hat = 0;
  double half_width = 0;
  double gr_S = 0;
  double gr_Sstar = 0;
  double inequality_margin = 0;  // tau_hat - gr_S / gr_Sstar
  int lipschitz = 1;
};

// Monte Carlo E |x_n|_to / n over uniform S_n samples. tau_hat is the mean at
// the largest n; the half-width is 3 standard errors there plus the gap to
// the mean at the penultimate n.
inline DistortionReport mean_distortion_mc(const GeodesicAutomaton& aut, const ForeignLength& fl,
                                           std::vector<int> n_list, std::size_t samples, std::uint64_t seed,
                                           const McOptions& opt = {}) {
  if (samples < 100) throw PreconditionError("at least 100 samples per radius are required");
  if (n_list.empty()) throw PreconditionError("empty radius list");
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  if (n_list.front() < 1) throw PreconditionError("radii must be positive");
  DistortionReport rep;
  rep.n_values = n_list;
  rep.lipschitz = fl.lipschitz();
  PathCounter counter(aut, n_list.back());
  for (int n : n_list) {
    const std::vector<int> lens = detail::sample_foreign_lengths(counter, fl, n, samples, seed, opt);
    McRow row;
    row.n = n;
    row.samples = lens.size();
    double s = 0, s2 = 0;
    row.min_ratio = std::numeric_limits<double>::infinity();
    for (int l : lens) {
      const double r = static_cast<double>(l) / n;
      s += r;
      s2 += r * r;
      row.min_ratio = std::min(row.min_ratio, r);
      row.max_ratio = std::max(row.max_ratio, r);
    }
    const double m = static_cast<double>(lens.size());
    row.mean = s / m;
    row.variance = std::max(0.0, (s2 - m * row.mean * row.mean) / (m - 1));
    row.stderr_ = std::sqrt(row.variance / m);
    rep.mc.push_back(row);
  }
  const McRow& last = rep.mc.back();
  rep.tau_hat = last.mean;
  rep.half_width = 3 * last.stderr_;
  if (rep.mc.size() >= 2) rep.half_width += std::abs(last.mean - rep.mc[rep.mc.size() - 2].mean);
  return rep;
}

inline void set_growth_rates(DistortionReport& rep, double gr_S, double gr_Sstar) {
  rep.gr_S = gr_S;
  rep.gr_Sstar = gr_Sstar;
  rep.inequality_margin = rep.tau_hat - gr_S / gr_Sstar;
}

inline constexpr double kInequalityTolerance = 1e-6;

struct InequalityVerdict {
  bool pass = false;
  bool strict = false;  // margin exceeds the half-width
  double margin = 0;
  double bound = 0;     // gr_S / gr_Sstar
};

inline InequalityVerdict check_growth_inequality(const DistortionReport& rep) {
  if (!(rep.gr_Sstar > 0)) throw PreconditionError("growth rate of the foreign set must be positive");
  InequalityVerdict v;
  v.bound = rep.gr_S / rep.gr_Sstar;
  v.margin = rep.tau_hat - v.bound;
  v.pass = rep.tau_hat + rep.half_width >= v.bound - kInequalityTolerance;
  v.strict = v.margin > rep.half_width;
  return v;
}

struct LlnCell {
  int n = 0;
  double eps = 0;
  std::size_t samples = 0;
  std::size_t outliers = 0;
  double fraction = 0;
  double binomial_sd = 0;
};

struct LlnTable {
  double tau = 0;
  std::vector<LlnCell> cells;  // n-major, eps-minor
  // Per eps: the fraction never rises from one n to the next by more than two
  // standard deviations of the difference.
  std::vector<std::pair<double, bool>> nonincreasing;

  bool all_nonincreasing() const {
    return std::all_of(nonincreasing.begin(), nonincreasing.end(), [](auto& p) { return p.second; });
  }
};

inline LlnTable lln_check(const GeodesicAutomaton& aut, const ForeignLength& fl, double tau_hat,
                          std::vector<int> n_list, const std::vector<double>& eps_list, std::size_t samples,
                          std::uint64_t seed, const McOptions& opt = {}) {
  if (samples < 1) throw PreconditionError("samples must be positive");
  std::sort(n_list.begin(), n_list.end());
  if (n_list.empty() || n_list.front() < 1) throw PreconditionError("radii must be positive");
  LlnTable t;
  t.tau = tau_hat;
  PathCounter counter(aut, n_list.back());
  for (int n : n_list) {
    const std::vector<int> lens = detail::sample_foreign_lengths(counter, fl, n, samples, seed, opt);
    for (double eps : eps_list) {
      LlnCell c{n, eps, lens.size(), 0, 0, 0};
      for (int l : lens)
        if (std::abs(l - n * tau_hat) > eps * n) ++c.outliers;
      c.fraction = static_cast<double>(c.outliers) / c.samples;
      c.binomial_sd = std::sqrt(c.fraction * (1 - c.fraction) / c.samples);
      t.cells.push_back(c);
    }
  }
  const std::size_t k = eps_list.size();
  for (std::size_t e = 0; e < k; ++e) {
    bool ok = true;
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
      const LlnCell& a = t.cells[i * k + e];
      const LlnCell& b = t.cells[(i + 1) * k + e];
      ok &= b.fraction <= a.fraction + 2 * std::hypot(a.binomial_sd, b.binomial_sd);
    }
    t.nonincreasing.push_back({eps_list[e], ok});
  }
  return t;
}

inline constexpr double kFlatTolerance = 0.5;

struct SimilarityRow {
  int r = 0;
  double max_deviation = 0;
  std::string witness;  // an element of S_r attaining it
};

struct SimilarityScan {
  double tau = 0;
  std::vector<SimilarityRow> rows;
  double last_third_increase = 0;
  bool bounded_looking = false;

  std::string verdict() const { return bounded_looking ? "BOUNDED-LOOKING" : "GROWING"; }
};

// max over |x|_from = r of ||x|_to - tau r| for r = 1..R. The verdict is
// BOUNDED-LOOKING when the deviation rises by at most 0.5 in total across the
// last third of the radii.
inline SimilarityScan rough_similarity_scan(const ForeignLength& fl, double tau, int R,
                                            std::size_t budget = kDefaultBallBudget) {
  if (R < 1) throw PreconditionError("R must be at least 1");
  Ball from_ball(fl.from(), budget);
  from_ball.grow_to(R);
  Ball to_ball(fl.to(), budget);
  to_ball.grow_to(R * fl.lip_from_to());
  SimilarityScan s;
  s.tau = tau;
  for (int r = 1; r <= R; ++r) {
    SimilarityRow row{r, 0, ""};
    for (std::size_t i = from_ball.layer_begin(r); i < from_ball.layer_end(r); ++i) {
      const auto j = to_ball.find(from_ball.element(i));
      if (!j) throw PreconditionError("element outside the foreign ball");
      const double dev = std::abs(to_ball.length(*j) - tau * r);
      if (row.witness.empty() || dev > row.max_deviation) {
        row.max_deviation = dev;
        row.witness = fl.from().format_word(from_ball.word(i));
      }
    }
    s.rows.push_back(std::move(row));
  }
  const int start = R - std::max(1, R / 3);
  const double base = start >= 1 ? s.rows[start - 1].max_deviation : 0.0;
  s.last_third_increase = s.rows.back().max_deviation - base;
  s.bounded_looking = s.last_third_increase <= kFlatTolerance;
  return s;
}

struct RayDeviation {
  std::vector<int> lengths;       // |u^r|_to, r = 1..R
  std::vector<double> deviation;  // ||u^r|_to - tau r|
  double slope = 0;               // least squares of deviation against r
};

// Deviation along the ray u, u^2, ..., u^R for a from-word u whose powers are
// from-geodesic.
inline RayDeviation ray_deviation(const ForeignLength& fl, const Word& u, double tau, int R) {
  if (u.empty() || R < 2) throw PreconditionError("ray needs a nonempty word and R >= 2");
  RayDeviation out;
  Word w;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int r = 1; r <= R; ++r) {
    w.insert(w.end(), u.begin(), u.end());
    const int len = fl(w);
    const double dev = std::abs(len - tau * r * static_cast<double>(u.size()));
    out.lengths.push_back(len);
    out.deviation.push_back(dev);
    sx += r;
    sy += dev;
    sxx += static_cast<double>(r) * r;
    sxy += r * dev;
  }
  out.slope = (R * sxy - sx * sy) / (R * sxx - sx * sx);
  return out;
}

}  // namespace hypdist

#endif  // HYPDIST_DISTORTION_HPP_
