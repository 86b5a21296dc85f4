#include "sigfuzz/nwise.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "sigfuzz/rng.hpp"

namespace sigfuzz {

namespace {

using Case = std::vector<double>;
using Suite = std::set<Case>;

struct Builder {
  const std::vector<std::vector<double>>& ports;
  Rng rng;
  std::map<std::pair<int, int>, Suite> memo;
  std::map<std::pair<int, int>, double> reps;

  double rep(int n, int idx) {
    auto key = std::make_pair(n, idx);
    auto it = reps.find(key);
    if (it != reps.end()) return it->second;
    const auto& s = ports[idx];
    double a = s[rng.below(s.size())];
    reps[key] = a;
    return a;
  }

  // n-wise combinations over ports 0..idx
  const Suite& build(int n, int idx) {
    auto key = std::make_pair(n, idx);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    Suite out;
    if (n == 0) {
      // strength zero: any one full assignment; use the representatives
      Case c;
      for (int p = 0; p <= idx; ++p) c.push_back(rep(0, p));
      out.insert(std::move(c));
    } else if (idx + 1 == n) {
      // exactly n ports left: full cross product
      out.insert(Case{});
      for (int p = 0; p <= idx; ++p) {
        Suite next;
        for (const auto& base : out)
          for (double v : ports[p]) {
            Case c = base;
            c.push_back(v);
            next.insert(std::move(c));
          }
        out = std::move(next);
      }
    } else {
      double a = rep(n, idx);
      for (const auto& base : build(n, idx - 1)) {
        Case c = base;
        c.push_back(a);
        out.insert(std::move(c));
      }
      for (const auto& base : build(n - 1, idx - 1)) {
        for (double r : ports[idx]) {
          if (r == a) continue;
          Case c = base;
          c.push_back(r);
          out.insert(std::move(c));
        }
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  }
};

}  // namespace

NWiseSuite fast_nwise(int n, const std::vector<std::vector<double>>& port_candidates,
                      uint64_t seed) {
  int k = static_cast<int>(port_candidates.size());
  if (n < 1) throw std::invalid_argument("n-wise strength must be >= 1");
  if (n > k) throw std::invalid_argument("n-wise strength exceeds port count");
  for (const auto& p : port_candidates)
    if (p.empty()) throw std::invalid_argument("port with empty candidate set");

  Builder b{port_candidates, Rng(seed), {}, {}};
  const Suite& s = b.build(n, k - 1);
  NWiseSuite suite;
  suite.cases.assign(s.begin(), s.end());
  return suite;
}

}  // namespace sigfuzz
