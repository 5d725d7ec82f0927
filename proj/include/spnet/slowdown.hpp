#pragma once

#include <array>
#include <optional>
#include <stdexcept>

#include "spnet/extensions.hpp"
#include "spnet/network.hpp"
#include "spnet/sp.hpp"

namespace spnet {

/// Largest over smallest duration.
inline Rational rho(const Workload& t) {
  if (t.size() == 0) throw InvalidWorkload("empty workload");
  Rational lo = t.durations().front(), hi = lo;
  for (const auto& d : t.durations()) {
    if (d < lo) lo = d;
    if (d > hi) hi = d;
  }
  return hi / lo;
}

struct SlowdownReport {
  Rational base_makespan;
  Rational extension_makespan;
  Rational slowdown;
  Rational rho;
  Chain witness;  // critical chain of the extension
};

inline SlowdownReport slowdown_report(const ActivityNetwork& g, const ActivityNetwork& h, const Workload& t) {
  if (!is_extension(g, h)) throw NotAnExtension("second network does not contain the first");
  SlowdownReport r;
  r.base_makespan = makespan(g, t);
  r.extension_makespan = makespan(h, t);
  r.slowdown = r.extension_makespan / r.base_makespan;
  r.rho = rho(t);
  r.witness = critical_chain(h, t);
  return r;
}

/// Report for the LC extension. The slowdown never exceeds rho; a
/// violation is a logic error, not an input error.
inline SlowdownReport lc_slowdown_report(const ActivityNetwork& g, const Workload& t) {
  auto r = slowdown_report(g, lc_extension(g), t);
  if (r.slowdown > r.rho)
    throw std::logic_error("LC slowdown " + format_rational(r.slowdown) + " exceeds rho " + format_rational(r.rho));
  return r;
}

/// Unit durations except C at a_{τ,2τ-1} on every level τ.
inline Workload heavy_ns_workload(const NsSpec& s, const Rational& heavy) {
  if (heavy <= 1) throw InvalidWorkload("heavy duration must exceed 1");
  if (2 * s.depth - 1 > s.width)
    throw SpecTooNarrow("heavy column 2d-1 = " + std::to_string(2 * s.depth - 1) + " exceeds width " +
                        std::to_string(s.width));
  std::vector<Rational> d(static_cast<std::size_t>(s.depth * s.width), Rational(1));
  for (int level = 1; level <= s.depth; ++level) d[ns_activity(s, level, 2 * level - 1)] = heavy;
  return Workload(std::move(d));
}

using Triple = std::array<Activity, 3>;

/// First 3-subset (by id) that is an antichain in g and a chain in h.
inline std::optional<Triple> find_forced_chain_triple(const ActivityNetwork& g, const ActivityNetwork& h) {
  if (!is_extension(g, h)) throw NotAnExtension("second network does not contain the first");
  const int n = g.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (g.comparable(a, b) || !h.comparable(a, b)) continue;
      for (int c = b + 1; c < n; ++c)
        if (!g.comparable(a, c) && !g.comparable(b, c) && h.comparable(a, c) && h.comparable(b, c))
          return Triple{a, b, c};
    }
  return std::nullopt;
}

/// Unit durations on the triple, epsilon elsewhere.
inline Workload adversarial_workload(const ActivityNetwork& g, const Triple& triple, const Rational& epsilon) {
  if (epsilon <= 0) throw InvalidWorkload("epsilon must be positive");
  for (Activity a : triple)
    if (a < 0 || a >= g.size()) throw IdOutOfRange("triple member " + std::to_string(a));
  if (!is_antichain(g, {triple.begin(), triple.end()})) throw NotAntichain("triple is not an antichain of the base network");
  std::vector<Rational> d(static_cast<std::size_t>(g.size()), epsilon);
  for (Activity a : triple) d[a] = 1;
  return Workload(std::move(d));
}

/// Guaranteed slowdown 3/(1+(depth-1)ε) once the triple is a chain: each
/// base chain holds at most one triple member.
inline Rational adversarial_bound(const ActivityNetwork& g, const Rational& epsilon) {
  return Rational(3) / (1 + (depth(g) - 1) * epsilon);
}

struct AdversaryReport {
  Triple triple{};
  Rational epsilon;
  Rational bound;
  Workload workload;
  SlowdownReport report;
};

/// Builds the adversarial workload for an SP extension h of g and measures
/// the slowdown it forces.
inline AdversaryReport run_adversary(const ActivityNetwork& g, const ActivityNetwork& h,
                                     const Rational& epsilon = Rational(1, 10)) {
  if (!is_extension(g, h)) throw NotAnExtension("extension does not contain the base network");
  if (!is_series_parallel(h)) throw PreconditionViolation("extension is not series-parallel");
  auto triple = find_forced_chain_triple(g, h);
  if (!triple)
    throw TripleNotFound("no antichain-in-base / chain-in-extension triple; this contradicts the factor-two disproof");
  AdversaryReport out;
  out.triple = *triple;
  out.epsilon = epsilon;
  out.bound = adversarial_bound(g, epsilon);
  out.workload = adversarial_workload(g, *triple, epsilon);
  out.report = slowdown_report(g, h, out.workload);
  if (out.report.slowdown < out.bound)
    throw std::logic_error("measured slowdown " + format_rational(out.report.slowdown) + " below guaranteed " +
                           format_rational(out.bound));
  return out;
}

/// The ns(3,8,3) instance: any SP extension admits a workload with
/// slowdown >= 5/2 at ε = 1/10.
inline AdversaryReport disprove_factor_two(const ActivityNetwork& h, const Rational& epsilon = Rational(1, 10)) {
  return run_adversary(ns_network({3, 8, 3}), h, epsilon);
}

}  // namespace spnet
