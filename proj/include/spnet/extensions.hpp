#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spnet/network.hpp"
#include "spnet/sp.hpp"

namespace spnet {

inline constexpr int kDefaultEnumerationLimit = 8;

inline int level(const ActivityNetwork& g, Activity a) { return levels(g)[static_cast<std::size_t>(a)]; }

/// Level sets Λ_1..Λ_depth; each is an antichain, sorted by id.
inline std::vector<std::vector<Activity>> level_partition(const ActivityNetwork& g) {
  auto lv = levels(g);
  int d = 0;
  for (int l : lv) d = std::max(d, l);
  std::vector<std::vector<Activity>> out(static_cast<std::size_t>(d));
  for (int a = 0; a < g.size(); ++a) out[lv[a] - 1].push_back(a);
  return out;
}

/// Every lower level precedes every higher level.
inline ActivityNetwork lc_extension(const ActivityNetwork& g) {
  auto lv = levels(g);
  std::vector<Edge> edges;
  for (int a = 0; a < g.size(); ++a)
    for (int b = 0; b < g.size(); ++b)
      if (lv[a] < lv[b]) edges.emplace_back(a, b);
  return ActivityNetwork::from_edges(g.size(), edges, g.explicit_labels());
}

/// Neighbour-synchronisation grid parameters.
struct NsSpec {
  int depth = 1;
  int width = 1;
  int degree = 3;
};

inline Activity ns_activity(const NsSpec& s, int level, int column) {
  return (level - 1) * s.width + (column - 1);
}

/// ns(d,w,Δ): activity a_{i,j} feeds a_{i+1,j+k} for
/// k in [-floor((Δ-1)/2), ceil((Δ-1)/2)], clipped to the grid.
inline ActivityNetwork ns_network(const NsSpec& s) {
  if (s.depth < 1 || s.width < 1 || s.degree < 1)
    throw PreconditionViolation("ns spec needs depth, width and degree >= 1");
  const int lo = -((s.degree - 1) / 2);
  const int hi = s.degree / 2;  // ceil((Δ-1)/2)
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (int i = 1; i <= s.depth; ++i)
    for (int j = 1; j <= s.width; ++j) {
      labels.push_back("a_{" + std::to_string(i) + "," + std::to_string(j) + "}");
      if (i == s.depth) continue;
      for (int k = lo; k <= hi; ++k)
        if (j + k >= 1 && j + k <= s.width) edges.emplace_back(ns_activity(s, i, j), ns_activity(s, i + 1, j + k));
    }
  return ActivityNetwork::from_edges(s.depth * s.width, edges, std::move(labels));
}

/// Unordered incomparable pairs {i<j}.
inline std::vector<Edge> incomparable_pairs(const ActivityNetwork& g) {
  std::vector<Edge> out;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j)
      if (!g.comparable(i, j)) out.emplace_back(i, j);
  return out;
}

namespace detail {

inline std::vector<std::uint64_t> closure_key(const ActivityNetwork& g) {
  std::vector<std::uint64_t> key;
  for (const auto& row : g.closure_rows()) key.insert(key.end(), row.words().begin(), row.words().end());
  return key;
}

inline void check_limit(const ActivityNetwork& g, int limit) {
  if (g.size() > limit)
    throw SizeLimitExceeded(std::to_string(g.size()) + " activities exceeds the enumeration limit of " +
                            std::to_string(limit));
}

/// Keeps the members with no proper sub-closure in the list, deduplicated
/// and in canonical closure order.
inline std::vector<ActivityNetwork> minimal_members(std::vector<ActivityNetwork> found) {
  std::sort(found.begin(), found.end(), closure_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());
  std::vector<ActivityNetwork> out;
  for (const auto& h : found) {
    bool minimal = true;
    for (const auto& m : out)
      if (is_extension(m, h)) {
        minimal = false;
        break;
      }
    // Sorted by closure size, so any proper sub-closure is already in `out`.
    if (minimal) out.push_back(h);
  }
  return out;
}

}  // namespace detail

/// Result of an extension-lattice search.
struct ExtensionSearch {
  std::vector<ActivityNetwork> extensions;
  std::size_t nodes_explored = 0;
};

/// Searches the lattice of closures below which every minimal SP extension
/// lies: at each non-SP closure, branch on the six orientations of the
/// incomparable pairs of one N occurrence (every SP extension must orient
/// one of them).
inline ExtensionSearch minimal_sp_extension_search(const ActivityNetwork& g, int limit = kDefaultEnumerationLimit) {
  detail::check_limit(g, limit);
  ExtensionSearch out;
  std::set<std::vector<std::uint64_t>> seen{detail::closure_key(g)};
  std::deque<ActivityNetwork> frontier{g};
  std::vector<ActivityNetwork> found;
  while (!frontier.empty()) {
    ActivityNetwork x = std::move(frontier.front());
    frontier.pop_front();
    ++out.nodes_explored;
    auto n = find_n_pattern(x);
    if (!n) {
      found.push_back(x);
      continue;
    }
    auto [a, b, c, d] = *n;
    for (auto [u, v] : {Edge{a, b}, Edge{b, c}, Edge{c, d}})
      for (auto [p, q] : {Edge{u, v}, Edge{v, u}}) {
        ActivityNetwork child = x.with_constraint(p, q);
        if (seen.insert(detail::closure_key(child)).second) frontier.push_back(std::move(child));
      }
  }
  out.extensions = detail::minimal_members(std::move(found));
  return out;
}

/// SP extensions of g none of which contains another; {g} if g is SP.
inline std::vector<ActivityNetwork> minimal_sp_extensions(const ActivityNetwork& g, int limit = kDefaultEnumerationLimit) {
  return minimal_sp_extension_search(g, limit).extensions;
}

/// Minimal proper extensions that are not indecomposable; {g} if g itself
/// is decomposable.
inline std::vector<ActivityNetwork> minimal_decomposable_extensions(const ActivityNetwork& g,
                                                                    int limit = kDefaultEnumerationLimit) {
  detail::check_limit(g, limit);
  if (classify(g) != Structure::Indecomposable) return {g};
  std::set<std::vector<std::uint64_t>> seen{detail::closure_key(g)};
  std::deque<ActivityNetwork> frontier{g};
  std::vector<ActivityNetwork> found;
  while (!frontier.empty()) {
    ActivityNetwork x = std::move(frontier.front());
    frontier.pop_front();
    for (auto [u, v] : incomparable_pairs(x))
      for (auto [p, q] : {Edge{u, v}, Edge{v, u}}) {
        ActivityNetwork child = x.with_constraint(p, q);
        if (!seen.insert(detail::closure_key(child)).second) continue;
        if (classify(child) != Structure::Indecomposable)
          found.push_back(std::move(child));
        else
          frontier.push_back(std::move(child));
      }
  }
  return detail::minimal_members(std::move(found));
}

/// Every extension of g (g included), by exhaustive single-pair closure
/// steps. Exponential; used as an oracle.
inline std::vector<ActivityNetwork> all_extensions(const ActivityNetwork& g, int limit = kDefaultEnumerationLimit) {
  detail::check_limit(g, limit);
  std::set<std::vector<std::uint64_t>> seen{detail::closure_key(g)};
  std::vector<ActivityNetwork> out{g};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const ActivityNetwork x = out[i];
    for (auto [u, v] : incomparable_pairs(x))
      for (auto [p, q] : {Edge{u, v}, Edge{v, u}}) {
        ActivityNetwork child = x.with_constraint(p, q);
        if (seen.insert(detail::closure_key(child)).second) out.push_back(std::move(child));
      }
  }
  std::sort(out.begin(), out.end(), closure_less);
  return out;
}

inline std::vector<ActivityNetwork> all_sp_extensions(const ActivityNetwork& g, int limit = kDefaultEnumerationLimit) {
  auto all = all_extensions(g, limit);
  std::vector<ActivityNetwork> out;
  for (auto& h : all)
    if (is_series_parallel(h)) out.push_back(std::move(h));
  return out;
}

/// Orients uniformly chosen incomparable pairs until the closure is SP.
/// Deterministic for a fixed seed.
inline ActivityNetwork random_sp_extension(const ActivityNetwork& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ActivityNetwork x = g;
  while (!is_series_parallel(x)) {
    auto pairs = incomparable_pairs(x);
    auto [u, v] = pairs[rng() % pairs.size()];
    x = (rng() & 1U) ? x.with_constraint(u, v) : x.with_constraint(v, u);
  }
  return x;
}

}  // namespace spnet
