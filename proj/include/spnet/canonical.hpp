#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "spnet/network.hpp"

namespace spnet {

/// Isomorphism-invariant key: the closure matrix under the canonical
/// relabeling, serialized position by position.
struct CanonicalKey {
  int n = 0;
  std::vector<char> bits;
  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
};

namespace detail {

/// Colour refinement on (predecessor colours, successor colours) with
/// colours renamed by sorted signature, so the result is label-free.
inline std::vector<int> refine_colours(const ActivityNetwork& g) {
  const int n = g.size();
  std::vector<int> colour(static_cast<std::size_t>(n), 0);
  using Signature = std::tuple<int, std::vector<int>, std::vector<int>>;
  for (int round = 0; round <= n; ++round) {
    std::vector<Signature> sig(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      std::vector<int> below, above;
      g.predecessors(v).for_each([&](std::size_t u) { below.push_back(colour[u]); });
      g.successors(v).for_each([&](std::size_t u) { above.push_back(colour[u]); });
      std::sort(below.begin(), below.end());
      std::sort(above.begin(), above.end());
      sig[v] = {colour[v], std::move(below), std::move(above)};
    }
    std::map<Signature, int> rank;
    for (const auto& s : sig) rank.emplace(s, 0);
    int next = 0;
    for (auto& [s, r] : rank) r = next++;
    std::vector<int> refined(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) refined[v] = rank[sig[v]];
    const auto classes_before = std::set<int>(colour.begin(), colour.end()).size();
    colour = std::move(refined);
    if (static_cast<int>(rank.size()) == static_cast<int>(classes_before) && round > 0) break;
  }
  return colour;
}

struct CanonicalSearch {
  const ActivityNetwork& g;
  std::vector<int> position_colour;  // colour required at each position
  std::vector<int> colour;
  std::vector<Activity> current;
  std::vector<char> used;
  std::vector<char> bits;
  std::vector<char> best_bits;
  std::vector<Activity> best;
  bool have_best = false;

  void search(int p, bool already_less) {
    const int n = g.size();
    if (p == n) {
      if (!have_best || already_less) {
        best_bits = bits;
        best = current;
        have_best = true;
      }
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v] || colour[v] != position_colour[p]) continue;
      bool less = already_less;
      bool greater = false;
      std::size_t k = static_cast<std::size_t>(p) * static_cast<std::size_t>(p > 0 ? p - 1 : 0);
      for (int q = 0; q < p && !greater; ++q) {
        for (int dir = 0; dir < 2; ++dir, ++k) {
          char b = dir == 0 ? g.precedes(current[q], v) : g.precedes(v, current[q]);
          bits[k] = b;
          if (!less && have_best) {
            if (b < best_bits[k]) less = true;
            else if (b > best_bits[k]) {
              greater = true;
              break;
            }
          }
        }
      }
      if (greater) continue;
      used[v] = 1;
      current[p] = v;
      search(p + 1, less || !have_best);
      used[v] = 0;
    }
  }
};

}  // namespace detail

/// Position -> original activity for the canonical relabeling.
inline std::vector<Activity> canonical_labeling(const ActivityNetwork& g) {
  const int n = g.size();
  detail::CanonicalSearch s{g, {}, detail::refine_colours(g), std::vector<Activity>(n),
                            std::vector<char>(n, 0), std::vector<char>(static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0)),
                            {}, {}, false};
  s.position_colour = s.colour;
  std::sort(s.position_colour.begin(), s.position_colour.end());
  s.search(0, false);
  return s.best;
}

inline CanonicalKey canonical_form(const ActivityNetwork& g) {
  const auto perm = canonical_labeling(g);
  CanonicalKey key{g.size(), {}};
  for (int p = 0; p < g.size(); ++p)
    for (int q = 0; q < p; ++q) {
      key.bits.push_back(g.precedes(perm[q], perm[p]));
      key.bits.push_back(g.precedes(perm[p], perm[q]));
    }
  return key;
}

/// Isomorphic copy of g with activities renumbered canonically.
inline ActivityNetwork canonicalize(const ActivityNetwork& g) {
  const auto perm = canonical_labeling(g);
  std::vector<Edge> edges;
  for (int p = 0; p < g.size(); ++p)
    for (int q = 0; q < g.size(); ++q)
      if (g.precedes(perm[p], perm[q])) edges.emplace_back(p, q);
  return ActivityNetwork::from_edges(g.size(), edges);
}

inline bool isomorphic(const ActivityNetwork& a, const ActivityNetwork& b) {
  return a.size() == b.size() && a.closure_size() == b.closure_size() && canonical_form(a) == canonical_form(b);
}

}  // namespace spnet
