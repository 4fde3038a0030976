#ifndef HYPDIST_TESTS_SUPPORT_HPP_
#define HYPDIST_TESTS_SUPPORT_HPP_

#include <cctype>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "hypdist/presentation.hpp"

namespace testing {

inline hypdist::Presentation load(const std::string& name) {
  return hypdist::load_presentation(std::string(HYPDIST_DATA_DIR) + "/" + name + ".grp");
}

// Free reduction on strings where the inverse of a letter is its case swap.
inline std::string reduce(const std::string& w) {
  std::string out;
  for (char c : w) {
    const char inv = std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c))
                                                                  : static_cast<char>(std::tolower(c));
    if (!out.empty() && out.back() == inv) out.pop_back();
    else out.push_back(c);
  }
  return out;
}

inline std::string invert(const std::string& w) {
  std::string out(w.rbegin(), w.rend());
  for (char& c : out)
    c = std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c))
                                                     : static_cast<char>(std::tolower(c));
  return out;
}

// Distances from the identity in the Cayley graph of F2 = <a,b> with respect
// to the given generators (strings over aAbB), by plain BFS on reduced words.
inline std::map<std::string, int> free_ball(const std::vector<std::string>& gens, int radius) {
  std::map<std::string, int> dist{{"", 0}};
  std::queue<std::string> q;
  q.push("");
  while (!q.empty()) {
    const std::string x = q.front();
    q.pop();
    if (dist[x] == radius) continue;
    for (const auto& g : gens) {
      const std::string y = reduce(x + g);
      if (dist.emplace(y, dist[x] + 1).second) q.push(y);
    }
  }
  return dist;
}

inline std::vector<std::string> symmetrize(const std::vector<std::string>& gens) {
  std::vector<std::string> out;
  for (const auto& g : gens) {
    out.push_back(g);
    out.push_back(invert(g));
  }
  return out;
}

// Coefficients of p(z) / q(z) up to z^n (q(0) = 1).
inline std::vector<std::int64_t> series(const std::vector<std::int64_t>& p, const std::vector<std::int64_t>& q,
                                        int n) {
  std::vector<std::int64_t> c(n + 1, 0);
  for (int k = 0; k <= n; ++k) {
    std::int64_t v = k < static_cast<int>(p.size()) ? p[k] : 0;
    for (int j = 1; j <= k && j < static_cast<int>(q.size()); ++j) v -= q[j] * c[k - j];
    c[k] = v;
  }
  return c;
}

}  // namespace testing

#endif  // HYPDIST_TESTS_SUPPORT_HPP_
