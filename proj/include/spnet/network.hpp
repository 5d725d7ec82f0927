#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spnet/bitset.hpp"
#include "spnet/error.hpp"
#include "spnet/rational.hpp"

namespace spnet {

using Activity = int;
using Edge = std::pair<Activity, Activity>;

/// Default display name for activity `i`: a..z, then v26, v27, ...
inline std::string default_label(Activity i) {
  if (i >= 0 && i < 26) return std::string(1, static_cast<char>('a' + i));
  return "v" + std::to_string(i);
}

/// Activity network stored as the transitive closure of its precedence
/// constraints. Immutable after construction; every constructor path
/// guarantees the closure is irreflexive, transitive and acyclic.
class ActivityNetwork {
 public:
  ActivityNetwork() = default;

  /// Closes `edges` transitively. Throws IdOutOfRange or CycleError.
  static ActivityNetwork from_edges(int n, const std::vector<Edge>& edges,
                                    std::vector<std::string> labels = {}) {
    if (n < 0) throw IdOutOfRange("negative activity count");
    ActivityNetwork g(n, std::move(labels));
    for (auto [a, b] : edges) {
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw IdOutOfRange("edge (" + std::to_string(a) + "," + std::to_string(b) +
                           ") outside 0.." + std::to_string(n - 1));
      if (a == b) throw CycleError("self loop on activity " + std::to_string(a));
      g.succ_[a].set(static_cast<std::size_t>(b));
    }
    // Warshall over bit rows.
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        if (g.succ_[i].test(static_cast<std::size_t>(k))) g.succ_[i] |= g.succ_[k];
    for (int i = 0; i < n; ++i)
      if (g.succ_[i].test(static_cast<std::size_t>(i)))
        throw CycleError("directed cycle through activity " + g.label(i));
    g.rebuild_predecessors();
    return g;
  }

  /// Builds from successor rows that are already transitively closed.
  /// Only acyclicity/irreflexivity is checked.
  static ActivityNetwork from_closure(std::vector<Bitset> succ, std::vector<std::string> labels = {}) {
    ActivityNetwork g(static_cast<int>(succ.size()), std::move(labels));
    g.succ_ = std::move(succ);
    for (int i = 0; i < g.n_; ++i)
      if (g.succ_[i].test(static_cast<std::size_t>(i))) throw CycleError("closure is reflexive");
    g.rebuild_predecessors();
    return g;
  }

  int size() const noexcept { return n_; }

  bool precedes(Activity a, Activity b) const noexcept {
    return succ_[a].test(static_cast<std::size_t>(b));
  }
  bool comparable(Activity a, Activity b) const noexcept { return precedes(a, b) || precedes(b, a); }

  const Bitset& successors(Activity a) const noexcept { return succ_[a]; }
  const Bitset& predecessors(Activity a) const noexcept { return pred_[a]; }
  const std::vector<Bitset>& closure_rows() const noexcept { return succ_; }

  /// Activities incomparable to `a` (excluding `a` itself).
  Bitset incomparable_to(Activity a) const {
    Bitset r(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      if (i != a && !comparable(a, i)) r.set(static_cast<std::size_t>(i));
    return r;
  }

  std::string label(Activity a) const {
    if (static_cast<std::size_t>(a) < labels_.size() && !labels_[a].empty()) return labels_[a];
    return default_label(a);
  }
  const std::vector<std::string>& explicit_labels() const noexcept { return labels_; }
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (int i = 0; i < n_; ++i) out.push_back(label(i));
    return out;
  }
  ActivityNetwork with_labels(std::vector<std::string> labels) const {
    ActivityNetwork g = *this;
    g.labels_ = std::move(labels);
    return g;
  }

  /// Closure pairs in lexicographic order.
  std::vector<Edge> closure_pairs() const {
    std::vector<Edge> out;
    for (int i = 0; i < n_; ++i)
      succ_[i].for_each([&](std::size_t j) { out.emplace_back(i, static_cast<Activity>(j)); });
    return out;
  }
  std::size_t closure_size() const noexcept {
    std::size_t c = 0;
    for (const auto& r : succ_) c += r.count();
    return c;
  }

  /// Closure of this network plus the constraint a -> b.
  ActivityNetwork with_constraint(Activity a, Activity b) const {
    if (a == b || precedes(b, a)) throw CycleError("adding (" + label(a) + "," + label(b) + ") creates a cycle");
    if (precedes(a, b)) return *this;
    ActivityNetwork g = *this;
    Bitset below = pred_[a];
    below.set(static_cast<std::size_t>(a));
    Bitset above = succ_[b];
    above.set(static_cast<std::size_t>(b));
    below.for_each([&](std::size_t x) { g.succ_[x] |= above; });
    above.for_each([&](std::size_t y) { g.pred_[y] |= below; });
    return g;
  }

  /// Activities sorted so that every predecessor comes first (ties by id).
  std::vector<Activity> topological_order() const {
    std::vector<Activity> order(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Activity x, Activity y) { return pred_[x].count() < pred_[y].count(); });
    return order;
  }

  /// Equality on the precedence relation only; labels are display data.
  friend bool operator==(const ActivityNetwork& a, const ActivityNetwork& b) {
    return a.n_ == b.n_ && a.succ_ == b.succ_;
  }

 private:
  ActivityNetwork(int n, std::vector<std::string> labels)
      : n_(n),
        labels_(std::move(labels)),
        succ_(static_cast<std::size_t>(n), Bitset(static_cast<std::size_t>(n))),
        pred_(static_cast<std::size_t>(n), Bitset(static_cast<std::size_t>(n))) {
    if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(n))
      throw IdOutOfRange("label count " + std::to_string(labels_.size()) + " != activity count " +
                         std::to_string(n));
  }

  void rebuild_predecessors() {
    pred_.assign(static_cast<std::size_t>(n_), Bitset(static_cast<std::size_t>(n_)));
    for (int i = 0; i < n_; ++i)
      succ_[i].for_each([&](std::size_t j) { pred_[j].set(static_cast<std::size_t>(i)); });
  }

  int n_ = 0;
  std::vector<std::string> labels_;
  std::vector<Bitset> succ_;
  std::vector<Bitset> pred_;
};

/// Canonical closure order: fewer closure pairs first, then the
/// lexicographically smaller sorted pair list.
inline bool closure_less(const ActivityNetwork& a, const ActivityNetwork& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  auto ca = a.closure_size(), cb = b.closure_size();
  if (ca != cb) return ca < cb;
  return a.closure_pairs() < b.closure_pairs();
}

/// Strictly positive exact durations, one per activity.
class Workload {
 public:
  Workload() = default;
  explicit Workload(std::vector<Rational> durations) : d_(std::move(durations)) {
    for (std::size_t i = 0; i < d_.size(); ++i)
      if (d_[i] <= 0)
        throw InvalidWorkload("duration of activity " + std::to_string(i) + " is " +
                              format_rational(d_[i]) + ", must be > 0");
  }
  static Workload uniform(int n, const Rational& value = 1) {
    return Workload(std::vector<Rational>(static_cast<std::size_t>(n), value));
  }

  std::size_t size() const noexcept { return d_.size(); }
  const Rational& operator[](Activity a) const { return d_[static_cast<std::size_t>(a)]; }
  const std::vector<Rational>& durations() const noexcept { return d_; }

  /// Throws MissingDuration unless every activity of an n-network is covered.
  void require_covers(int n) const {
    if (d_.size() < static_cast<std::size_t>(n))
      throw MissingDuration("workload has " + std::to_string(d_.size()) + " durations for " +
                            std::to_string(n) + " activities");
  }

  Workload scaled(const Rational& factor) const {
    std::vector<Rational> out = d_;
    for (auto& x : out) x *= factor;
    return Workload(std::move(out));
  }

  friend bool operator==(const Workload&, const Workload&) = default;

 private:
  std::vector<Rational> d_;
};

/// A totally ordered activity sequence.
struct Chain {
  std::vector<Activity> activities;
  friend auto operator<=>(const Chain&, const Chain&) = default;
};

/// A pairwise incomparable activity set, sorted by id.
struct Antichain {
  std::vector<Activity> activities;
  friend auto operator<=>(const Antichain&, const Antichain&) = default;
};

inline bool is_chain(const ActivityNetwork& g, const std::vector<Activity>& seq) {
  if (seq.empty()) return false;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (!g.precedes(seq[i], seq[j])) return false;
  return true;
}

inline bool is_antichain(const ActivityNetwork& g, const std::vector<Activity>& set) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j)
      if (set[i] == set[j] || g.comparable(set[i], set[j])) return false;
  return true;
}

inline Rational chain_duration(const Chain& c, const Workload& t) {
  Rational sum = 0;
  for (Activity a : c.activities) sum += t[a];
  return sum;
}

/// Hasse-diagram edges, lexicographically ordered.
inline std::vector<Edge> transitive_reduction(const ActivityNetwork& g) {
  std::vector<Edge> out;
  for (int i = 0; i < g.size(); ++i)
    g.successors(i).for_each([&](std::size_t jj) {
      auto j = static_cast<Activity>(jj);
      if (!g.successors(i).intersects(g.predecessors(j))) out.emplace_back(i, j);
    });
  return out;
}

/// Size of a longest chain ending at each activity (sources are level 1).
inline std::vector<int> levels(const ActivityNetwork& g) {
  std::vector<int> lv(static_cast<std::size_t>(g.size()), 1);
  for (Activity a : g.topological_order())
    g.predecessors(a).for_each([&](std::size_t p) { lv[a] = std::max(lv[a], lv[p] + 1); });
  return lv;
}

inline int depth(const ActivityNetwork& g) {
  int d = 0;
  for (int l : levels(g)) d = std::max(d, l);
  return d;
}

/// Largest antichain size via Dilworth: n minus a maximum matching in the
/// bipartite split of the comparability relation.
inline int width(const ActivityNetwork& g) {
  const int n = g.size();
  std::vector<int> match_right(static_cast<std::size_t>(n), -1);
  std::function<bool(int, std::vector<char>&)> augment = [&](int u, std::vector<char>& seen) {
    for (std::size_t v = g.successors(u).first(); v < static_cast<std::size_t>(n);
         v = g.successors(u).next(v + 1)) {
      if (seen[v]) continue;
      seen[v] = 1;
      if (match_right[v] < 0 || augment(match_right[v], seen)) {
        match_right[v] = u;
        return true;
      }
    }
    return false;
  };
  int matching = 0;
  for (int u = 0; u < n; ++u) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    if (augment(u, seen)) ++matching;
  }
  return n - matching;
}

/// All maximal chains (minimal-to-maximal paths of the Hasse diagram),
/// sorted lexicographically.
inline std::vector<Chain> maximal_chains(const ActivityNetwork& g) {
  const int n = g.size();
  std::vector<std::vector<Activity>> cover(static_cast<std::size_t>(n));
  for (auto [a, b] : transitive_reduction(g)) cover[a].push_back(b);
  std::vector<Chain> out;
  std::vector<Activity> path;
  std::function<void(Activity)> walk = [&](Activity a) {
    path.push_back(a);
    if (cover[a].empty()) out.push_back(Chain{path});
    for (Activity b : cover[a]) walk(b);
    path.pop_back();
  };
  for (int a = 0; a < n; ++a)
    if (g.predecessors(a).none()) walk(a);
  std::sort(out.begin(), out.end());
  return out;
}

/// Completion time of each activity under unlimited processors.
inline std::vector<Rational> finish_times(const ActivityNetwork& g, const Workload& t) {
  t.require_covers(g.size());
  std::vector<Rational> finish(static_cast<std::size_t>(g.size()));
  for (Activity a : g.topological_order()) {
    Rational start = 0;
    g.predecessors(a).for_each([&](std::size_t p) {
      if (finish[p] > start) start = finish[p];
    });
    finish[a] = start + t[a];
  }
  return finish;
}

/// Heaviest chain weight, by longest-path dynamic programming.
inline Rational makespan(const ActivityNetwork& g, const Workload& t) {
  Rational best = 0;
  for (const auto& f : finish_times(g, t))
    if (f > best) best = f;
  return best;
}

/// A chain attaining the makespan; the lexicographically smallest such
/// maximal chain.
inline Chain critical_chain(const ActivityNetwork& g, const Workload& t) {
  Rational best = makespan(g, t);
  for (const auto& c : maximal_chains(g))
    if (chain_duration(c, t) == best) return c;
  return {};
}

inline bool is_extension(const ActivityNetwork& g, const ActivityNetwork& h) {
  if (g.size() != h.size()) return false;
  for (int i = 0; i < g.size(); ++i)
    if (!g.successors(i).is_subset_of(h.successors(i))) return false;
  return true;
}

/// True when h is an extension of g with strictly more constraints.
inline bool is_proper_extension(const ActivityNetwork& g, const ActivityNetwork& h) {
  return is_extension(g, h) && !(g == h);
}

inline Rational slowdown(const ActivityNetwork& g, const ActivityNetwork& h, const Workload& t) {
  if (!is_extension(g, h)) throw NotAnExtension("second network does not contain the first");
  return makespan(h, t) / makespan(g, t);
}

/// Same activities, every precedence reversed.
inline ActivityNetwork dual(const ActivityNetwork& g) {
  std::vector<Bitset> rows;
  for (int i = 0; i < g.size(); ++i) rows.push_back(g.predecessors(i));
  return ActivityNetwork::from_closure(std::move(rows), g.explicit_labels());
}

/// Network induced on `members` (in the given order; ids are renumbered).
inline ActivityNetwork restrict_to(const ActivityNetwork& g, const std::vector<Activity>& members) {
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < members.size(); ++i) {
    labels.push_back(g.label(members[i]));
    for (std::size_t j = 0; j < members.size(); ++j)
      if (g.precedes(members[i], members[j]))
        edges.emplace_back(static_cast<Activity>(i), static_cast<Activity>(j));
  }
  return ActivityNetwork::from_edges(static_cast<int>(members.size()), edges, labels);
}

inline ActivityNetwork chain_network(int k) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < k; ++i) e.emplace_back(i, i + 1);
  return ActivityNetwork::from_edges(k, e);
}

inline ActivityNetwork antichain_network(int k) { return ActivityNetwork::from_edges(k, {}); }

/// The four-activity N: a->c, a->d, b->d.
inline ActivityNetwork n_network() { return ActivityNetwork::from_edges(4, {{0, 2}, {0, 3}, {1, 3}}); }

}  // namespace spnet
