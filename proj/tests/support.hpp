#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "spnet/network.hpp"
#include "spnet/rational.hpp"

// Oracles here avoid the library's algorithms on purpose: they work on
// plain boolean relation matrices and recompute everything from scratch.
namespace oracle {

using spnet::Activity;
using spnet::Rational;
using Relation = std::vector<std::vector<bool>>;

inline Relation relation(const spnet::ActivityNetwork& g) {
  const int n = g.size();
  Relation r(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) r[a][b] = g.precedes(a, b);
  return r;
}

inline Relation warshall(Relation r) {
  const std::size_t n = r.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

// Heaviest path by relaxing every precedence pair n times.
inline Rational makespan(const Relation& r, const std::vector<Rational>& t) {
  const std::size_t n = r.size();
  std::vector<Rational> finish(t);
  for (std::size_t round = 0; round < n; ++round)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (r[a][b] && finish[a] + t[b] > finish[b]) finish[b] = finish[a] + t[b];
  Rational best = 0;
  for (const auto& f : finish) best = std::max(best, f);
  return best;
}

inline bool incomparable(const Relation& r, int a, int b) { return a != b && !r[a][b] && !r[b][a]; }

// Induced N: a<c, a<d, b<d with every other pair of the four incomparable.
inline bool has_n(const Relation& r) {
  const int n = static_cast<int>(r.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (!(r[a][c] && r[a][d] && r[b][d])) continue;
          if (incomparable(r, a, b) && incomparable(r, b, c) && incomparable(r, c, d)) return true;
        }
  return false;
}

inline std::vector<bool> key_under(const Relation& r, const std::vector<int>& perm) {
  const std::size_t n = r.size();
  std::vector<bool> k(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k[i * n + j] = r[perm[i]][perm[j]];
  return k;
}

inline std::vector<bool> canonical_key(const Relation& r) {
  std::vector<int> perm(r.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> best = key_under(r, perm);
  while (std::next_permutation(perm.begin(), perm.end())) best = std::min(best, key_under(r, perm));
  return best;
}

// Every strict order on n labelled points, grouped up to isomorphism.
inline std::set<std::vector<bool>> poset_classes(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::set<std::vector<bool>> out;
  const std::size_t m = pairs.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    Relation r(n, std::vector<bool>(n, false));
    std::uint64_t c = code;
    for (auto [i, j] : pairs) {
      if (c % 3 == 1) r[i][j] = true;
      if (c % 3 == 2) r[j][i] = true;
      c /= 3;
    }
    if (warshall(r) != r) continue;
    bool cyclic = false;
    for (int i = 0; i < n; ++i) cyclic = cyclic || r[i][i];
    if (!cyclic) out.insert(canonical_key(r));
  }
  return out;
}

inline Relation from_key(const std::vector<bool>& k, int n) {
  Relation r(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i][j] = k[i * n + j];
  return r;
}

}  // namespace oracle

namespace testutil {

inline std::vector<spnet::Rational> random_durations(std::mt19937_64& rng, int n, int max_num = 20, int max_den = 6) {
  std::uniform_int_distribution<int> num(1, max_num), den(1, max_den);
  std::vector<spnet::Rational> d;
  for (int i = 0; i < n; ++i) d.emplace_back(num(rng), den(rng));
  return d;
}

inline spnet::Workload random_workload(std::mt19937_64& rng, int n, int max_num = 20, int max_den = 6) {
  return spnet::Workload(random_durations(rng, n, max_num, max_den));
}

}  // namespace testutil
