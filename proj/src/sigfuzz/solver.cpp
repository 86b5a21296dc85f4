#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "sigfuzz/unroll.hpp"

namespace sigfuzz {

namespace {

struct Domain {
  double lo = 0, hi = 0;
  bool is_int = true;
  bool pinned() const { return lo == hi; }
};

constexpr int kPropagationRounds = 64;
constexpr int kSearchNodeBudget = 2048;   // shared across all prefixes of one target
constexpr int kPrefixScanCap = 512;       // distinct occurrence prefixes examined

void round_int(Domain& d) {
  if (!d.is_int) return;
  d.lo = std::ceil(d.lo - 1e-9);
  d.hi = std::floor(d.hi + 1e-9);
}

// Tightens domains against one constraint; false when a domain empties.
bool apply_constraint(const Constraint& c, std::vector<Domain>& doms) {
  // normalize strict integer comparisons to closed ones
  double c0 = c.lhs.c0;
  CmpOp op = c.op;
  if (c.is_int) {
    if (op == CmpOp::Lt) {
      op = CmpOp::Le;
      c0 += 1;  // lhs < 0  <=>  lhs + 1 <= 0
    } else if (op == CmpOp::Gt) {
      op = CmpOp::Ge;
      c0 -= 1;
    }
  } else {
    if (op == CmpOp::Lt) op = CmpOp::Le;
    if (op == CmpOp::Gt) op = CmpOp::Ge;
  }

  if (op == CmpOp::Ne) {
    if (c.lhs.terms.empty()) return c0 != 0;
    return true;  // checked exactly at assignment validation
  }

  auto pass = [&](bool upper) -> bool {
    // upper: lhs <= 0, else lhs >= 0
    for (size_t i = 0; i < c.lhs.terms.size(); ++i) {
      auto [si, ci] = c.lhs.terms[i];
      double rest_min = c0, rest_max = c0;
      for (size_t j = 0; j < c.lhs.terms.size(); ++j) {
        if (j == i) continue;
        auto [sj, cj] = c.lhs.terms[j];
        double a = cj * doms[sj].lo, b = cj * doms[sj].hi;
        rest_min += std::min(a, b);
        rest_max += std::max(a, b);
      }
      Domain& d = doms[si];
      if (upper) {
        // ci * xi <= -rest_min
        double bound = -rest_min;
        if (ci > 0)
          d.hi = std::min(d.hi, bound / ci);
        else
          d.lo = std::max(d.lo, bound / ci);
      } else {
        // ci * xi >= -rest_max
        double bound = -rest_max;
        if (ci > 0)
          d.lo = std::max(d.lo, bound / ci);
        else
          d.hi = std::min(d.hi, bound / ci);
      }
      round_int(d);
      if (d.lo > d.hi) return false;
    }
    return true;
  };

  if (op == CmpOp::Le || op == CmpOp::Eq)
    if (!pass(true)) return false;
  if (op == CmpOp::Ge || op == CmpOp::Eq)
    if (!pass(false)) return false;
  return true;
}

bool propagate(const std::vector<Constraint>& cs, std::vector<Domain>& doms) {
  for (int round = 0; round < kPropagationRounds; ++round) {
    bool changed = false;
    for (const auto& c : cs) {
      if (c.lhs.opaque) continue;
      std::vector<double> before;
      before.reserve(c.lhs.terms.size() * 2);
      for (auto [s, k] : c.lhs.terms) {
        before.push_back(doms[s].lo);
        before.push_back(doms[s].hi);
      }
      if (!apply_constraint(c, doms)) return false;
      size_t bi = 0;
      for (auto [s, k] : c.lhs.terms) {
        if (doms[s].lo != before[bi] || doms[s].hi != before[bi + 1]) changed = true;
        bi += 2;
      }
    }
    if (!changed) break;
  }
  return true;
}

bool validate(const std::vector<Constraint>& cs, const std::vector<double>& vals) {
  for (const auto& c : cs) {
    if (c.lhs.opaque) continue;
    double v = c.lhs.c0;
    for (auto [s, k] : c.lhs.terms) v += k * vals[s];
    bool ok;
    switch (c.op) {
      case CmpOp::Eq: ok = c.is_int ? std::llround(v) == 0 : v == 0; break;
      case CmpOp::Ne: ok = c.is_int ? std::llround(v) != 0 : v != 0; break;
      case CmpOp::Lt: ok = v < 0; break;
      case CmpOp::Le: ok = v <= 0; break;
      case CmpOp::Gt: ok = v > 0; break;
      case CmpOp::Ge: ok = v >= 0; break;
      default: ok = false;
    }
    if (!ok) return false;
  }
  return true;
}

std::vector<double> defaults_from(const std::vector<Domain>& doms) {
  std::vector<double> vals(doms.size());
  for (size_t i = 0; i < doms.size(); ++i) {
    double v = 0;
    if (v < doms[i].lo) v = doms[i].lo;
    if (v > doms[i].hi) v = doms[i].hi;
    vals[i] = v;
  }
  return vals;
}

bool search(const std::vector<Constraint>& cs, std::vector<Domain> doms, int& budget,
            std::vector<double>* out) {
  if (--budget < 0) return false;
  if (!propagate(cs, doms)) return false;
  std::vector<double> vals = defaults_from(doms);
  if (validate(cs, vals)) {
    *out = std::move(vals);
    return true;
  }
  // branch on the tightest unpinned symbol that appears in a constraint
  int pick = -1;
  double best_span = 0;
  for (const auto& c : cs) {
    for (auto [s, k] : c.lhs.terms) {
      if (doms[s].pinned()) continue;
      double span = doms[s].hi - doms[s].lo;
      if (pick < 0 || span < best_span) {
        pick = s;
        best_span = span;
      }
    }
  }
  if (pick < 0) return false;  // everything pinned yet invalid

  const Domain& d = doms[pick];
  double mid = d.is_int ? std::floor((d.lo + d.hi) / 2) : (d.lo + d.hi) / 2;
  double candidates[6] = {d.lo, d.hi, mid, 0, d.lo + 1, d.hi - 1};
  double tried[6];
  int n_tried = 0;
  for (double v : candidates) {
    if (v < d.lo || v > d.hi) continue;
    if (d.is_int) v = std::floor(v);
    bool dup = false;
    for (int i = 0; i < n_tried; ++i)
      if (tried[i] == v) dup = true;
    if (dup) continue;
    tried[n_tried++] = v;
    std::vector<Domain> next = doms;
    next[pick].lo = next[pick].hi = v;
    if (search(cs, std::move(next), budget, out)) return true;
    if (budget < 0) return false;
  }
  return false;
}

}  // namespace

SolveOutcome solve_target(const PathConstraintSystem& pcs, int target_index, Executor& executor) {
  SolveOutcome out;
  const Target& target = pcs.targets[target_index];

  auto covers = [&](const ExecutionTrace& trace) {
    const auto& evs = trace.evaluations[target.decision];
    for (const auto& ev : evs) {
      if (target.cond_key == 0) {
        if ((ev.word & 1) == static_cast<uint64_t>(target.outcome)) return true;
      } else {
        if ((ev.mask >> target.cond_key & 1) &&
            (ev.word >> target.cond_key & 1) == static_cast<uint64_t>(target.outcome))
          return true;
      }
    }
    return false;
  };

  auto try_assignment = [&](const std::vector<double>& vals) -> bool {
    TestCase tc;
    tc.bytes.assign(pcs.layout.total_bytes, 0);
    tc.meta.origin = SeedOrigin::Bmc;
    for (size_t s = 0; s < pcs.symbols.size(); ++s) {
      const auto& sym = pcs.symbols[s];
      const auto& entry = pcs.layout.entries[sym.entry];
      size_t off = entry.offset + static_cast<size_t>(sym.step) * entry.bytes_per_elem +
                   static_cast<size_t>(sym.channel) * type_size(sym.type);
      encode_scalar(tc.bytes.data() + off, sym.type, vals[s]);
    }
    const auto& trace = executor.run(tc);
    if (!covers(trace)) return false;
    out.status = TargetStatus::Solved;
    out.assignment = std::move(tc);
    return true;
  };

  std::vector<Domain> base(pcs.symbols.size());
  for (size_t s = 0; s < pcs.symbols.size(); ++s) {
    base[s].lo = pcs.symbols[s].lo;
    base[s].hi = pcs.symbols[s].hi;
    base[s].is_int = pcs.symbols[s].type != ValueType::F64;
    round_int(base[s]);
  }

  bool any_realizing = false;
  bool all_proven_empty = true;
  int search_nodes = kSearchNodeBudget;
  std::set<uint64_t> seen_prefixes;   // sibling paths share occurrence prefixes
  std::set<uint64_t> empty_exact;     // prefixes proven empty by integer math
  std::set<uint64_t> empty_any;       // ... plus float-interval emptiness
  std::vector<uint64_t> cum;          // per-path cumulative constraint hashes

  auto constraint_hash = [](uint64_t h, const Constraint& c) {
    auto mixin = [&h](uint64_t v) { h = (h ^ v) * 0x100000001b3ull; };
    mixin(static_cast<uint64_t>(c.op));
    uint64_t b;
    std::memcpy(&b, &c.lhs.c0, 8);
    mixin(b);
    for (auto [s, co] : c.lhs.terms) {
      mixin(static_cast<uint64_t>(s));
      std::memcpy(&b, &co, 8);
      mixin(b);
    }
    return h;
  };

  for (const auto& path : pcs.paths) {
    bool cum_ready = false;
    for (const auto& r : path.realized) {
      if (r.target != target_index) continue;
      any_realizing = true;

      if (!cum_ready) {
        cum.assign(1, 0xcbf29ce484222325ull);
        for (const auto& c : path.constraints)
          cum.push_back(constraint_hash(cum.back(), c));
        cum_ready = true;
      }
      size_t len = static_cast<size_t>(r.prefix_len);
      uint64_t key = cum[len];

      // an extension of a proven-empty prefix is itself empty
      bool dominated = false, dominated_exact = false;
      for (size_t l = 1; l <= len && !dominated; ++l) {
        if (empty_any.count(cum[l])) {
          dominated = true;
          dominated_exact = empty_exact.count(cum[l]) != 0;
        }
      }
      if (dominated) {
        if (!dominated_exact) all_proven_empty = false;
        continue;
      }

      if (!seen_prefixes.insert(key).second) continue;
      if (seen_prefixes.size() > kPrefixScanCap) {
        all_proven_empty = false;  // unexamined prefixes: no emptiness claim
        break;
      }

      std::vector<Constraint> prefix(path.constraints.begin(),
                                     path.constraints.begin() + r.prefix_len);

      if (r.opaque_before) {
        // an unconstrained branch precedes the occurrence: the prefix is
        // incomplete, but a satisfying assignment may still verify
        all_proven_empty = false;
        if (search_nodes > 0) {
          std::vector<double> vals;
          if (search(prefix, base, search_nodes, &vals) && try_assignment(vals)) return out;
        }
        continue;
      }

      bool prefix_int = true;
      for (const auto& c : prefix)
        if (!c.is_int) prefix_int = false;

      std::vector<Domain> doms = base;
      if (!propagate(prefix, doms)) {
        // emptiness is proof only with exact integer math
        empty_any.insert(key);
        if (prefix_int)
          empty_exact.insert(key);
        else
          all_proven_empty = false;
        continue;
      }
      all_proven_empty = false;
      std::vector<double> vals = defaults_from(doms);
      if (validate(prefix, vals)) {
        if (try_assignment(vals)) return out;
        continue;
      }
      if (search_nodes > 0 &&
          search(prefix, std::move(doms), search_nodes, &vals) && try_assignment(vals))
        return out;
    }
    if (seen_prefixes.size() > kPrefixScanCap) break;
  }

  if (!any_realizing) {
    out.status = pcs.enumeration_complete ? TargetStatus::UnsatWithinBound : TargetStatus::Unknown;
    return out;
  }
  if (pcs.enumeration_complete && all_proven_empty) {
    out.status = TargetStatus::UnsatWithinBound;
    return out;
  }
  out.status = TargetStatus::Unknown;
  return out;
}

}  // namespace sigfuzz
