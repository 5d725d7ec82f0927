#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spnet/network.hpp"

namespace spnet {

/// Integer combination of duration variables.
struct LinearForm {
  std::vector<std::int64_t> coefficients;

  explicit LinearForm(std::size_t variables = 0) : coefficients(variables, 0) {}

  LinearForm& add(const Chain& c, std::int64_t scale) {
    for (Activity a : c.activities) coefficients[static_cast<std::size_t>(a)] += scale;
    return *this;
  }
  Rational evaluate(const std::vector<Rational>& point) const {
    Rational sum = 0;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
      if (coefficients[i]) sum += Rational(coefficients[i]) * point[i];
    return sum;
  }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

/// form > 0 when strict, form >= 0 otherwise.
struct Inequality {
  LinearForm form;
  bool strict = true;

  bool satisfied_by(const std::vector<Rational>& point) const {
    Rational v = form.evaluate(point);
    return strict ? v > 0 : v >= 0;
  }
};

/// Homogeneous system over `variables` durations.
struct InequalitySystem {
  std::size_t variables = 0;
  std::vector<Inequality> inequalities;
  std::vector<std::string> provenance;  // parallel to inequalities

  void add(Inequality ineq, std::string tag = {}) {
    inequalities.push_back(std::move(ineq));
    provenance.push_back(std::move(tag));
  }
  void append(const InequalitySystem& other) {
    for (std::size_t i = 0; i < other.inequalities.size(); ++i) add(other.inequalities[i], other.provenance[i]);
  }
  bool satisfied_by(const std::vector<Rational>& point) const {
    return std::all_of(inequalities.begin(), inequalities.end(), [&](const auto& q) { return q.satisfied_by(point); });
  }
};

/// x_i > 0 for every variable.
inline InequalitySystem positivity(std::size_t variables) {
  InequalitySystem s;
  s.variables = variables;
  for (std::size_t i = 0; i < variables; ++i) {
    LinearForm f(variables);
    f.coefficients[i] = 1;
    s.add({f, true}, "positive(" + std::to_string(i) + ")");
  }
  return s;
}

struct FmStats {
  std::size_t rows_generated = 0;
  std::size_t rows_discarded = 0;  // duplicates and Chernikov-redundant
  std::size_t peak_rows = 0;
};

struct FmResult {
  bool feasible = false;
  std::optional<Workload> witness;
  /// Non-negative multipliers over the input inequalities (positivity rows
  /// appended after them) summing to the zero form with a strict member.
  std::vector<std::pair<std::size_t, std::int64_t>> refutation;
  FmStats stats;
};

namespace detail {

using Wide = __int128;

inline Wide checked_mul(Wide a, Wide b) {
  Wide r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Fourier-Motzkin coefficient overflow");
  return r;
}
inline Wide checked_add(Wide a, Wide b) {
  Wide r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Fourier-Motzkin coefficient overflow");
  return r;
}
inline Integer to_integer(Wide a) {
  const bool negative = a < 0;
  unsigned __int128 m = negative ? static_cast<unsigned __int128>(-(a + 1)) + 1 : static_cast<unsigned __int128>(a);
  Integer hi(static_cast<unsigned long long>(m >> 64));
  Integer out = (hi << 64) + Integer(static_cast<unsigned long long>(m));
  return negative ? Integer(-out) : out;
}

inline Wide wide_abs(Wide a) { return a < 0 ? -a : a; }
inline Wide wide_gcd(Wide a, Wide b) {
  a = wide_abs(a);
  b = wide_abs(b);
  while (b) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

struct FmRow {
  std::vector<Wide> coef;
  bool strict = false;
  // Sparse multipliers over the original rows, sorted by index, with
  // Σ origin_i * input_i == scale * coef.
  std::vector<std::pair<std::size_t, Wide>> origin;
  Wide scale = 1;
  // Rows of the current base system this row combines, sorted; the base
  // is re-seeded whenever implied rows are pruned.
  std::vector<std::uint32_t> history;
};

inline void normalize(FmRow& r) {
  Wide g = 0;
  for (Wide c : r.coef) g = wide_gcd(g, c);
  if (g > 1) {
    for (Wide& c : r.coef) c /= g;
    r.scale = checked_mul(r.scale, g);
  }
  Wide h = r.scale;
  for (auto& [i, m] : r.origin) h = wide_gcd(h, m);
  if (h > 1) {
    for (auto& [i, m] : r.origin) m /= h;
    r.scale /= h;
  }
}

inline bool is_zero(const FmRow& r) {
  return std::all_of(r.coef.begin(), r.coef.end(), [](Wide c) { return c == 0; });
}

inline std::vector<std::pair<std::size_t, Wide>> combine_origin(const std::vector<std::pair<std::size_t, Wide>>& p, Wide a,
                                                               const std::vector<std::pair<std::size_t, Wide>>& q, Wide b) {
  std::vector<std::pair<std::size_t, Wide>> out;
  std::size_t i = 0, j = 0;
  while (i < p.size() || j < q.size()) {
    if (j == q.size() || (i < p.size() && p[i].first < q[j].first)) {
      out.emplace_back(p[i].first, checked_mul(a, p[i].second));
      ++i;
    } else if (i == p.size() || q[j].first < p[i].first) {
      out.emplace_back(q[j].first, checked_mul(b, q[j].second));
      ++j;
    } else {
      out.emplace_back(p[i].first, checked_add(checked_mul(a, p[i].second), checked_mul(b, q[j].second)));
      ++i;
      ++j;
    }
  }
  return out;
}

inline bool support_subset(const FmRow& a, const FmRow& b) {
  return std::includes(b.history.begin(), b.history.end(), a.history.begin(), a.history.end());
}

inline std::vector<std::uint32_t> merge_history(const FmRow& p, const FmRow& q) {
  std::vector<std::uint32_t> out;
  out.reserve(p.history.size() + q.history.size());
  std::set_union(p.history.begin(), p.history.end(), q.history.begin(), q.history.end(), std::back_inserter(out));
  return out;
}

inline bool is_positivity(const FmRow& r) {
  if (!r.strict) return false;
  std::size_t nonzero = 0;
  for (Wide c : r.coef) {
    if (c < 0) return false;
    nonzero += c != 0;
  }
  return nonzero == 1;
}

/// r follows from `by` and positivity of the variables: r - λ·by has no
/// negative coefficient for some λ > 0.
inline bool implied_by(const FmRow& r, const FmRow& by) {
  if (r.strict && !by.strict) return false;
  Wide lo_num = 0, lo_den = 1;  // λ >= lo (only binding when positive)
  Wide hi_num = -1, hi_den = 0;  // λ <= hi; hi_den == 0 means unbounded
  for (std::size_t v = 0; v < r.coef.size(); ++v) {
    const Wide a = r.coef[v], b = by.coef[v];
    if (b == 0) {
      if (a < 0) return false;
    } else if (b > 0) {
      if (a <= 0) return false;
      if (hi_den == 0 || checked_mul(a, hi_den) < checked_mul(hi_num, b)) {
        hi_num = a;
        hi_den = b;
      }
    } else {
      // λ >= a / b = (-a) / (-b)
      if (checked_mul(-a, lo_den) > checked_mul(lo_num, -b)) {
        lo_num = -a;
        lo_den = -b;
      }
    }
  }
  if (hi_den == 0) return false;
  return checked_mul(lo_num, hi_den) <= checked_mul(hi_num, lo_den);
}

/// Removes rows implied by another surviving row; positivity rows are kept
/// so every implication stays grounded. Returns whether anything went.
inline bool prune_implied(std::vector<FmRow>& rows, FmStats& stats) {
  std::vector<bool> alive(rows.size(), true);
  bool removed = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (is_positivity(rows[i])) continue;
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (j != i && alive[j] && implied_by(rows[i], rows[j])) {
        alive[i] = false;
        removed = true;
        ++stats.rows_discarded;
        break;
      }
  }
  if (!removed) return false;
  std::vector<FmRow> kept;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (alive[i]) kept.push_back(std::move(rows[i]));
  rows = std::move(kept);
  return true;
}

inline void reseed_history(std::vector<FmRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].history = {static_cast<std::uint32_t>(i)};
}

/// a makes b redundant: same coefficients, at least as strict, and a
/// support contained in b's (keeps the support bound sound).
inline bool dominates(const FmRow& a, const FmRow& b) { return (a.strict || !b.strict) && support_subset(a, b); }

/// Drops dominated duplicates and detects 0 > 0. Returns the index of a
/// contradictory row, if any.
inline std::optional<std::size_t> tidy(std::vector<FmRow>& rows, FmStats& stats) {
  std::map<std::vector<Wide>, std::vector<std::size_t>> index;
  std::vector<FmRow> kept;
  std::vector<bool> alive;
  for (auto& r : rows) {
    normalize(r);
    if (is_zero(r)) {
      if (r.strict) {
        kept.push_back(std::move(r));
        rows = std::move(kept);
        return rows.size() - 1;
      }
      ++stats.rows_discarded;
      continue;
    }
    auto& same = index[r.coef];
    bool redundant = false;
    for (std::size_t k : same)
      if (alive[k] && dominates(kept[k], r)) {
        redundant = true;
        break;
      }
    if (redundant) {
      ++stats.rows_discarded;
      continue;
    }
    for (std::size_t k : same)
      if (alive[k] && dominates(r, kept[k])) {
        alive[k] = false;
        ++stats.rows_discarded;
      }
    same.push_back(kept.size());
    kept.push_back(std::move(r));
    alive.push_back(true);
  }
  rows.clear();
  for (std::size_t k = 0; k < kept.size(); ++k)
    if (alive[k]) rows.push_back(std::move(kept[k]));
  stats.peak_rows = std::max(stats.peak_rows, rows.size());
  return std::nullopt;
}

}  // namespace detail

/// Exact Fourier-Motzkin feasibility for a homogeneous system in positive
/// variables (x_i > 0 is always added). Strict combined with anything is
/// strict. Chernikov's rule discards combinations built from more than
/// k+1 input rows after k eliminations. Witnesses are recovered by
/// back-substitution and refutations carry verified multipliers; both are
/// checked against the input before returning.
inline FmResult fm_feasible(const InequalitySystem& input) {
  using detail::FmRow;
  using detail::Wide;
  const std::size_t nvars = input.variables;
  InequalitySystem sys = input;
  sys.append(positivity(nvars));

  std::vector<FmRow> rows;
  for (std::size_t i = 0; i < sys.inequalities.size(); ++i) {
    const auto& q = sys.inequalities[i];
    if (q.form.coefficients.size() != nvars) throw std::invalid_argument("inequality arity mismatch");
    FmRow r;
    r.coef.assign(q.form.coefficients.begin(), q.form.coefficients.end());
    r.strict = q.strict;
    r.origin = {{i, 1}};
    rows.push_back(std::move(r));
  }

  FmResult result;
  auto refute = [&](const FmRow& r) {
    // Certificate check: Σ m_i q_i == 0 with some strict q_i, m_i > 0.
    std::vector<Wide> total(nvars, 0);
    bool strict = false;
    for (auto [i, m] : r.origin) {
      if (m <= 0) throw std::logic_error("refutation multiplier not positive");
      strict = strict || sys.inequalities[i].strict;
      for (std::size_t v = 0; v < nvars; ++v)
        total[v] = detail::checked_add(total[v], detail::checked_mul(m, sys.inequalities[i].form.coefficients[v]));
    }
    if (!strict || std::any_of(total.begin(), total.end(), [](Wide c) { return c != 0; }))
      throw std::logic_error("Fourier-Motzkin refutation failed verification");
    result.feasible = false;
    for (auto [i, m] : r.origin) {
      if (m > INT64_MAX) throw std::overflow_error("refutation multiplier too large");
      result.refutation.emplace_back(i, static_cast<std::int64_t>(m));
    }
    return result;
  };

  if (auto bad = detail::tidy(rows, result.stats)) return refute(rows[*bad]);
  detail::prune_implied(rows, result.stats);
  detail::reseed_history(rows);
  std::size_t since_reseed = 0;

  struct Stage {
    std::size_t variable;
    std::vector<FmRow> rows;
  };
  std::vector<Stage> stages;
  std::vector<bool> eliminated(nvars, false);

  for (std::size_t step = 0; step < nvars; ++step) {
    // Fewest occurrences first; ties by id.
    std::size_t var = nvars, best = SIZE_MAX;
    for (std::size_t v = 0; v < nvars; ++v) {
      if (eliminated[v]) continue;
      std::size_t occ = 0;
      for (const auto& r : rows) occ += r.coef[v] != 0;
      if (occ < best) {
        best = occ;
        var = v;
      }
    }
    eliminated[var] = true;
    stages.push_back({var, rows});

    std::vector<FmRow> pos, neg, next;
    for (auto& r : rows) {
      if (r.coef[var] > 0) pos.push_back(std::move(r));
      else if (r.coef[var] < 0) neg.push_back(std::move(r));
      else next.push_back(std::move(r));
    }
    // Chernikov: after k eliminations a row built from more than k+1 base
    // rows is redundant.
    const std::size_t max_support = since_reseed + 2;
    for (const auto& p : pos)
      for (const auto& q : neg) {
        Wide a = -q.coef[var], b = p.coef[var];
        auto history = detail::merge_history(p, q);
        if (history.size() > max_support) {
          ++result.stats.rows_discarded;
          continue;
        }
        auto origin = detail::combine_origin(p.origin, detail::checked_mul(a, q.scale), q.origin,
                                             detail::checked_mul(b, p.scale));
        FmRow r;
        r.coef.resize(nvars);
        for (std::size_t v = 0; v < nvars; ++v)
          r.coef[v] = detail::checked_add(detail::checked_mul(a, p.coef[v]), detail::checked_mul(b, q.coef[v]));
        r.coef[var] = 0;
        r.strict = p.strict || q.strict;
        r.origin = std::move(origin);
        r.history = std::move(history);
        r.scale = detail::checked_mul(p.scale, q.scale);
        ++result.stats.rows_generated;
        next.push_back(std::move(r));
      }
    rows = std::move(next);
    if (auto bad = detail::tidy(rows, result.stats)) return refute(rows[*bad]);
    ++since_reseed;
    if (detail::prune_implied(rows, result.stats)) {
      detail::reseed_history(rows);
      since_reseed = 0;
    }
  }

  // Back-substitution in reverse elimination order.
  std::vector<Rational> point(nvars, Rational(1));
  std::vector<bool> assigned(nvars, false);
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    const std::size_t v = it->variable;
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& r : it->rows) {
      if (r.coef[v] == 0) continue;
      Rational rest = 0;
      for (std::size_t u = 0; u < nvars; ++u)
        if (u != v && r.coef[u] != 0) {
          if (!assigned[u]) throw std::logic_error("back-substitution order broken");
          rest += Rational(detail::to_integer(r.coef[u])) * point[u];
        }
      // coef*x + rest (>|>=) 0
      Rational bound = -rest / Rational(detail::to_integer(r.coef[v]));
      if (r.coef[v] > 0) {
        if (!lo || bound > *lo || (bound == *lo && r.strict)) {
          lo_strict = (lo && bound == *lo) ? (lo_strict || r.strict) : r.strict;
          lo = bound;
        }
      } else {
        if (!hi || bound < *hi || (bound == *hi && r.strict)) {
          hi_strict = (hi && bound == *hi) ? (hi_strict || r.strict) : r.strict;
          hi = bound;
        }
      }
    }
    Rational value = 1;
    if (lo && hi) {
      if (*lo == *hi && !lo_strict && !hi_strict) value = *lo;
      else value = (*lo + *hi) / 2;
    } else if (lo) {
      value = *lo + 1;
    } else if (hi) {
      value = *hi - 1;
    }
    point[v] = value;
    assigned[v] = true;
  }
  if (!sys.satisfied_by(point)) throw std::logic_error("Fourier-Motzkin witness failed verification");
  result.feasible = true;
  result.witness = Workload(point);
  return result;
}

/// Same verdict as fm_feasible on the whole system, but FM only ever sees
/// a working subset: it starts from `seed` (indices into `input`), and
/// every witness of the subset that violates some row pulls the violated
/// rows in. A refutation of a subset refutes the whole system; a witness
/// satisfying every row proves feasibility. Indices in the result refer
/// to `input`; statistics accumulate over the rounds.
inline FmResult fm_feasible_lazy(const InequalitySystem& input, std::vector<std::size_t> seed = {}) {
  std::vector<bool> active(input.inequalities.size(), false);
  std::vector<std::size_t> rows;
  auto take = [&](std::size_t i) {
    if (i >= active.size()) throw std::out_of_range("seed row out of range");
    if (!active[i]) {
      active[i] = true;
      rows.push_back(i);
    }
  };
  for (std::size_t i : seed) take(i);
  FmStats total;
  while (true) {
    InequalitySystem sub;
    sub.variables = input.variables;
    for (std::size_t i : rows) sub.add(input.inequalities[i]);
    FmResult r = fm_feasible(sub);
    total.rows_generated += r.stats.rows_generated;
    total.rows_discarded += r.stats.rows_discarded;
    total.peak_rows = std::max(total.peak_rows, r.stats.peak_rows);
    if (!r.feasible) {
      // Positivity rows sit after the subset in fm_feasible's numbering.
      FmResult out;
      out.stats = total;
      for (auto [i, m] : r.refutation)
        out.refutation.emplace_back(i < rows.size() ? rows[i] : input.inequalities.size() + (i - rows.size()), m);
      return out;
    }
    const auto& point = r.witness->durations();
    bool violated = false;
    for (std::size_t i = 0; i < input.inequalities.size(); ++i)
      if (!active[i] && !input.inequalities[i].satisfied_by(point)) {
        take(i);
        violated = true;
      }
    if (!violated) {
      r.stats = total;
      return r;
    }
  }
}

}  // namespace spnet
