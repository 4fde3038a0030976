// Typical geodesic rays, drift, shadows of Patterson-Sullivan measures at a
// finite stage, dimension estimates and the regular-growth constants.

#ifndef HYPDIST_DIMENSION_HPP_
#define HYPDIST_DIMENSION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "automaton.hpp"
#include "cayley.hpp"
#include "distortion.hpp"
#include "error.hpp"
#include "measure.hpp"
#include "rng.hpp"
#include "sft.hpp"

namespace hypdist {

struct RaySample {
  Word letters;                // x_k = letters[0] ... letters[k-1]
  std::vector<Element> trail;  // x_0 = o, ..., x_n
  int prefix_length = 0;       // letters spent reaching the measure's support
};

// Draws prefixes of typical rays for a one-block Markov measure on the edge
// shift of an automaton. The first chain edge e0 has law pi restricted to
// edges whose origin is reachable from the start state; the ray is the
// shortest (then lexicographically least) automaton path from the start state
// to origin(e0) followed by the chain.
class RaySampler {
 public:
  RaySampler(const GeodesicAutomaton& aut, const Sft& sft, const MarkovMeasure& m)
      : aut_(&aut), sft_(&sft), m_(&m) {
    if (m.block_length != 1) throw PreconditionError("rays need a one-block measure");
    // Shortest lex-least paths from the start state.
    const int q = aut.num_states();
    route_.assign(q, std::nullopt);
    route_[aut.initial()] = Word{};
    std::queue<int> bfs;
    bfs.push(aut.initial());
    while (!bfs.empty()) {
      const int s = bfs.front();
      bfs.pop();
      for (int a = 0; a < aut.num_letters(); ++a) {
        const int t = aut.next(s, a);
        if (t < 0 || route_[t]) continue;
        Word w = *route_[s];
        w.push_back(a);
        route_[t] = std::move(w);
        bfs.push(t);
      }
    }
    double total = 0;
    for (int i = 0; i < m.size(); ++i) {
      const int e = m.blocks[i][0];
      if (route_[sft.symbol(e).origin] && m.pi[i] > 0) {
        entry_.push_back(i);
        total += m.pi[i];
        entry_cdf_.push_back(total);
      }
    }
    if (entry_.empty()) throw EmptySphere(0);
    for (double& c : entry_cdf_) c /= total;
    // Reversed chain for bilateral samples.
    reverse_.resize(m.size());
    for (int i = 0; i < m.size(); ++i)
      for (auto [j, p] : m.P[i])
        if (p > 0 && m.pi[j] > 0) reverse_[j].push_back({i, m.pi[i] * p / m.pi[j]});
  }

  RaySample sample(const Cayley& cayley, int n, Rng& rng) const {
    if (n < 0) throw PreconditionError("ray length must be nonnegative");
    RaySample r;
    r.trail.push_back(cayley.identity());
    if (n == 0) return r;
    int state = entry_[pick(entry_cdf_, rng)];
    const Word& pre = *route_[sft_->symbol(m_->blocks[state][0]).origin];
    r.letters.assign(pre.begin(), pre.begin() + std::min<std::ptrdiff_t>(pre.size(), n));
    r.prefix_length = static_cast<int>(r.letters.size());
    while (static_cast<int>(r.letters.size()) < n) {
      r.letters.push_back(sft_->symbol(m_->blocks[state][0]).letter);
      state = step(m_->P[state], rng);
    }
    for (Letter a : r.letters) r.trail.push_back(cayley.step(r.trail.back(), a));
    return r;
  }

  // Labels of a bilateral block w_{-n} ... w_{n-1} with w_0 drawn from pi.
  Word sample_bilateral(int n, Rng& rng) const {
    std::vector<double> cdf;
    double total = 0;
    for (int i = 0; i < m_->size(); ++i) cdf.push_back(total += m_->pi[i]);
    for (double& c : cdf) c /= total;
    const int start = static_cast<int>(pick(cdf, rng));
    Word right;
    int s = start;
    for (int k = 0; k < n; ++k) {
      right.push_back(sft_->symbol(m_->blocks[s][0]).letter);
      if (k + 1 < n) s = step(m_->P[s], rng);
    }
    Word left;
    s = start;
    for (int k = 0; k < n; ++k) {
      s = step(reverse_[s], rng);
      left.push_back(sft_->symbol(m_->blocks[s][0]).letter);
    }
    std::reverse(left.begin(), left.end());
    left.insert(left.end(), right.begin(), right.end());
    return left;
  }

 private:
  static std::size_t pick(const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
  }

  static int step(const std::vector<std::pair<int, double>>& row, Rng& rng) {
    const double u = rng.uniform01();
    double c = 0;
    for (auto [j, p] : row) {
      c += p;
      if (u < c) return j;
    }
    return row.back().first;
  }

  const GeodesicAutomaton* aut_;
  const Sft* sft_;
  const MarkovMeasure* m_;
  std::vector<std::optional<Word>> route_;
  std::vector<int> entry_;
  std::vector<double> entry_cdf_;
  std::vector<std::vector<std::pair<int, double>>> reverse_;
};

inline RaySample sample_ray(const GeodesicAutomaton& aut, const Sft& sft, const MarkovMeasure& m,
                            const Cayley& cayley, int n, std::uint64_t seed) {
  Rng rng(seed);
  return RaySampler(aut, sft, m).sample(cayley, n, rng);
}

struct DriftEstimate {
  int n = 0;
  std::size_t samples = 0;
  double mean = 0;
  double stderr_ = 0;
};

namespace detail {

inline DriftEstimate summarize(int n, double scale, const std::vector<int>& lens) {
  DriftEstimate d;
  d.n = n;
  d.samples = lens.size();
  double s = 0, s2 = 0;
  for (int l : lens) {
    const double r = l / scale;
    s += r;
    s2 += r * r;
  }
  const double m = static_cast<double>(lens.size());
  d.mean = s / m;
  d.stderr_ = m > 1 ? std::sqrt(std::max(0.0, (s2 - m * d.mean * d.mean) / (m - 1)) / m) : 0.0;
  return d;
}

}  // namespace detail

// Mean of |x_n|_to / n over typical rays.
inline DriftEstimate drift(const RaySampler& rays, const ForeignLength& fl, int n, std::size_t samples,
                           std::uint64_t seed, const McOptions& opt = {}) {
  if (n < 1 || samples < 2) throw PreconditionError("drift needs n >= 1 and at least 2 samples");
  const std::size_t chunks = (samples + opt.chunk - 1) / opt.chunk;
  auto parts = detail::run_chunks(chunks, opt.threads, [&](std::size_t c) {
    Rng rng(seed, detail::stream_id(n, c) ^ 0xd71f7ULL);
    const std::size_t m = std::min(opt.chunk, samples - c * opt.chunk);
    std::vector<int> lens;
    for (std::size_t i = 0; i < m; ++i) lens.push_back(fl(rays.sample(fl.from(), n, rng).letters));
    return lens;
  });
  std::vector<int> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return detail::summarize(n, n, all);
}

// Mean of d_to(x_{-n}, x_n) / 2n over bilateral typical blocks.
inline DriftEstimate bilateral_drift(const RaySampler& rays, const ForeignLength& fl, int n,
                                     std::size_t samples, std::uint64_t seed, const McOptions& opt = {}) {
  if (n < 1 || samples < 2) throw PreconditionError("drift needs n >= 1 and at least 2 samples");
  const std::size_t chunks = (samples + opt.chunk - 1) / opt.chunk;
  auto parts = detail::run_chunks(chunks, opt.threads, [&](std::size_t c) {
    Rng rng(seed, detail::stream_id(n, c) ^ 0xb11a7ULL);
    const std::size_t m = std::min(opt.chunk, samples - c * opt.chunk);
    std::vector<int> lens;
    for (std::size_t i = 0; i < m; ++i) lens.push_back(fl(rays.sample_bilateral(n, rng)));
    return lens;
  });
  std::vector<int> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return detail::summarize(n, 2.0 * n, all);
}

// Fraction of y in S_n with (x|y)_o >= |x| - R - 2 delta, exactly.
//
// Accepted words are enumerated depth first. Along a geodesic y the product
// (x|y_j)_o never decreases, so a prefix that already qualifies contributes all
// of its extensions at once; and by the four-point condition a prefix with
// j > (x|y_j)_o + delta has (x|y)_o <= (x|y_j)_o + delta for every extension,
// which prunes hopeless branches.
inline Rational shadow_mass(const GeodesicAutomaton& aut, const Cayley& cayley, const Element& x, int R,
                            int n, HalfInteger delta) {
  const Group& g = cayley.group();
  const int k = cayley.length(x);
  if (R < 0) throw PreconditionError("R must be nonnegative");
  if (n < k + R) throw PreconditionError("shadow stage n must be at least |x| + R");
  PathCounter counter(aut, n);
  if (counter.sphere(n) == 0) throw EmptySphere(n);
  const Element x_inv = g.inverse(x);
  // Doubled quantities keep everything integral.
  const std::int64_t threshold2 = 2 * static_cast<std::int64_t>(k - R) - 2 * delta.twice;
  BigInt count = 0;
  auto rec = [&](auto&& self, int state, int j, const Element& y) -> void {
    const std::int64_t gp2 = k + j - cayley.length(g.multiply(x_inv, y), k + j);
    if (gp2 >= threshold2) {
      count += counter.count(n - j, state);
      return;
    }
    if (j == n) return;
    if (2 * j > gp2 + delta.twice && gp2 + delta.twice < threshold2) return;
    for (int a = 0; a < aut.num_letters(); ++a) {
      const int t = aut.next(state, a);
      if (t < 0 || counter.count(n - j - 1, t) == 0) continue;
      self(self, t, j + 1, cayley.step(y, a));
    }
  };
  rec(rec, aut.initial(), 0, cayley.identity());
  return Rational(count, counter.sphere(n));
}

struct LocalDimensionSample {
  std::size_t ray = 0;
  int k = 0;
  int foreign_length = 0;
  double local_dimension = 0;  // gr_S * k / |x_k|_to
};

struct DimensionEstimate {
  double gr_S = 0;
  double gr_Sstar = 0;
  DriftEstimate drift_half;  // at n / 2
  DriftEstimate drift_full;  // at n
  double drift_half_width = 0;
  double dim_hat = 0;
  double width = 0;
  std::vector<LocalDimensionSample> local;
};

struct DimensionParams {
  int n = 40;
  std::size_t samples = 2000;
  std::size_t diagnostic_rays = 50;
  std::uint64_t seed = 1;
  McOptions mc;
};

// dim_hat = gr_S / drift, with the drift half-width (3 standard errors plus
// the n/2-to-n gap) carried through the quotient.
inline DimensionEstimate ps_dimension_estimate(const RaySampler& rays, const ForeignLength& fl, double gr_S,
                                               double gr_Sstar, const DimensionParams& p) {
  if (p.n < 2) throw PreconditionError("dimension estimate needs n >= 2");
  DimensionEstimate d;
  d.gr_S = gr_S;
  d.gr_Sstar = gr_Sstar;
  d.drift_half = drift(rays, fl, p.n / 2, p.samples, p.seed, p.mc);
  d.drift_full = drift(rays, fl, p.n, p.samples, p.seed, p.mc);
  d.drift_half_width = 3 * d.drift_full.stderr_ + std::abs(d.drift_full.mean - d.drift_half.mean);
  d.dim_hat = gr_S / d.drift_full.mean;
  const double lo = d.drift_full.mean - d.drift_half_width;
  d.width = lo > 0 ? gr_S / lo - d.dim_hat : std::numeric_limits<double>::infinity();
  Rng rng(p.seed, 0xd1a9ULL);
  for (std::size_t r = 0; r < p.diagnostic_rays; ++r) {
    const RaySample ray = rays.sample(fl.from(), p.n, rng);
    for (int k : {p.n / 4, p.n / 2, 3 * p.n / 4, p.n}) {
      if (k < 1) continue;
      const int len = fl(Word(ray.letters.begin(), ray.letters.begin() + k));
      d.local.push_back({r, k, len, len > 0 ? gr_S * k / len : 0.0});
    }
  }
  return d;
}

struct RegularGrowth {
  double v = 0;
  double c1 = 0;
  double c2 = 0;
  int n_min = 1;
  int n_max = 0;
  std::vector<double> values;  // |S_n| exp(-v n), n = n_min..n_max
  // Exact values when the spectral radius is an integer.
  std::optional<Rational> c1_exact;
  std::optional<Rational> c2_exact;
};

// min and max over n_min <= n <= n_max of |S_n| exp(-v n), with |S_n| from
// path counts and v from the automaton's spectral radius.
inline RegularGrowth regular_growth_check(const GeodesicAutomaton& aut, int n_max, int n_min = 1) {
  if (n_max < 1 || n_min < 0 || n_min > n_max) throw PreconditionError("need 0 <= n_min <= n_max, n_max >= 1");
  const GrowthRate gr = growth_rate(aut);
  RegularGrowth out;
  out.v = gr.gr;
  out.n_min = n_min;
  out.n_max = n_max;
  PathCounter counter(aut, n_max);
  const double rho = gr.spectral_radius;
  const long long rho_int = std::llround(rho);
  const bool integral = rho_int >= 1 && std::abs(rho - static_cast<double>(rho_int)) < 1e-9;
  for (int n = n_min; n <= n_max; ++n) {
    const double logc = counter.sphere(n) == 0 ? -std::numeric_limits<double>::infinity()
                                               : std::log(static_cast<double>(counter.sphere(n)));
    out.values.push_back(std::exp(logc - out.v * n));
    if (integral) {
      const Rational q(counter.sphere(n), boost::multiprecision::pow(BigInt(rho_int), static_cast<unsigned>(n)));
      if (!out.c1_exact || q < *out.c1_exact) out.c1_exact = q;
      if (!out.c2_exact || q > *out.c2_exact) out.c2_exact = q;
    }
  }
  out.c1 = *std::min_element(out.values.begin(), out.values.end());
  out.c2 = *std::max_element(out.values.begin(), out.values.end());
  return out;
}

}  // namespace hypdist

#endif  // HYPDIST_DIMENSION_HPP_
