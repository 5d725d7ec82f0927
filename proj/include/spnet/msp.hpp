#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spnet/extensions.hpp"
#include "spnet/network.hpp"
#include "spnet/slowdown.hpp"
#include "spnet/sp.hpp"

namespace spnet {

inline constexpr int kDefaultBranchAndBoundLimit = 12;

enum class MspMethod { Brute, BranchAndBound, Lc };

inline const char* to_string(MspMethod m) {
  switch (m) {
    case MspMethod::Brute: return "brute";
    case MspMethod::BranchAndBound: return "branch-and-bound";
    case MspMethod::Lc: return "lc";
  }
  return "?";
}

/// An SP extension together with its makespan and how it was found.
struct MspSolution {
  ActivityNetwork extension;
  Rational makespan;
  Rational slowdown;
  MspMethod method = MspMethod::Brute;
  std::size_t nodes_explored = 0;
};

namespace detail {

inline MspSolution make_solution(const ActivityNetwork& g, const Workload& t, ActivityNetwork h, MspMethod m,
                                 std::size_t nodes) {
  MspSolution s{std::move(h), 0, 0, m, nodes};
  s.makespan = makespan(s.extension, t);
  s.slowdown = s.makespan / makespan(g, t);
  if (!is_series_parallel(s.extension) || !is_extension(g, s.extension))
    throw std::logic_error("MSP solution is not an SP extension");
  return s;
}

}  // namespace detail

/// Polynomial-time level-constrained extension.
inline MspSolution msp_lc(const ActivityNetwork& g, const Workload& t) {
  t.require_covers(g.size());
  auto s = detail::make_solution(g, t, lc_extension(g).with_labels(g.explicit_labels()), MspMethod::Lc, 1);
  if (s.slowdown > rho(t))
    throw std::logic_error("LC slowdown " + format_rational(s.slowdown) + " exceeds rho");
  return s;
}

/// Exact optimum by evaluating every minimal SP extension; the optimum is
/// always attained at one of them. Ties go to the first in canonical
/// closure order. `search` must come from minimal_sp_extension_search(g).
inline MspSolution msp_brute(const ActivityNetwork& g, const Workload& t, const ExtensionSearch& search) {
  t.require_covers(g.size());
  if (search.extensions.empty()) throw std::logic_error("no minimal SP extension supplied");
  const ActivityNetwork* best = nullptr;
  Rational best_value;
  for (const auto& h : search.extensions) {
    Rational v = makespan(h, t);
    if (!best || v < best_value) {
      best = &h;
      best_value = v;
    }
  }
  return detail::make_solution(g, t, best->with_labels(g.explicit_labels()), MspMethod::Brute, search.nodes_explored);
}

inline MspSolution msp_brute(const ActivityNetwork& g, const Workload& t, int limit = kDefaultEnumerationLimit) {
  t.require_covers(g.size());
  return msp_brute(g, t, minimal_sp_extension_search(g, limit));
}

/// Depth-first branch and bound. Branches on the six orientations of the
/// incomparable pairs of one N occurrence; the makespan of a partial
/// extension is a lower bound for everything below it. The incumbent
/// starts at the LC extension.
inline MspSolution msp_branch_and_bound(const ActivityNetwork& g, const Workload& t,
                                        int limit = kDefaultBranchAndBoundLimit) {
  detail::check_limit(g, limit);
  t.require_covers(g.size());
  if (is_series_parallel(g)) return detail::make_solution(g, t, g, MspMethod::BranchAndBound, 1);

  ActivityNetwork incumbent = lc_extension(g);
  Rational incumbent_value = makespan(incumbent, t);
  std::size_t nodes = 0;
  std::set<std::vector<std::uint64_t>> seen;

  auto explore = [&](auto&& self, const ActivityNetwork& x) -> void {
    ++nodes;
    Rational bound = makespan(x, t);
    if (bound >= incumbent_value) return;
    auto n = find_n_pattern(x);
    if (!n) {
      incumbent = x;
      incumbent_value = bound;
      return;
    }
    auto [a, b, c, d] = *n;
    for (auto [u, v] : {Edge{a, b}, Edge{b, c}, Edge{c, d}})
      for (auto [p, q] : {Edge{u, v}, Edge{v, u}}) {
        ActivityNetwork child = x.with_constraint(p, q);
        if (seen.insert(detail::closure_key(child)).second) self(self, child);
      }
  };
  seen.insert(detail::closure_key(g));
  explore(explore, g);
  return detail::make_solution(g, t, incumbent.with_labels(g.explicit_labels()), MspMethod::BranchAndBound, nodes);
}

inline MspSolution msp_solve(const ActivityNetwork& g, const Workload& t, MspMethod method, int limit) {
  switch (method) {
    case MspMethod::Brute: return msp_brute(g, t, limit);
    case MspMethod::BranchAndBound: return msp_branch_and_bound(g, t, limit);
    case MspMethod::Lc: return msp_lc(g, t);
  }
  throw std::invalid_argument("unknown MSP method");
}

}  // namespace spnet
