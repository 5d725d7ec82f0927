#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spnet/canonical.hpp"
#include "spnet/extensions.hpp"
#include "spnet/fm.hpp"
#include "spnet/io.hpp"
#include "spnet/network.hpp"
#include "spnet/sp.hpp"

namespace spnet {

inline constexpr int kMaxPosetSize = 7;

namespace detail {

inline void check_poset_size(int n) {
  if (n < 0) throw PreconditionViolation("negative activity count");
  if (n > kMaxPosetSize)
    throw SizeLimitExceeded("poset enumeration supports at most " + std::to_string(kMaxPosetSize) + " activities");
}

}  // namespace detail

/// One representative per isomorphism class of posets on n activities,
/// canonically labelled and sorted by canonical key. Every poset arises
/// from one on n-1 activities by adding a maximal element above a down-set.
inline std::vector<ActivityNetwork> enumerate_posets(int n) {
  detail::check_poset_size(n);
  std::vector<ActivityNetwork> layer{ActivityNetwork::from_edges(0, {})};
  for (int m = 1; m <= n; ++m) {
    std::map<CanonicalKey, ActivityNetwork> next;
    for (const auto& p : layer) {
      const int k = m - 1;
      for (unsigned mask = 0; mask < (1U << k); ++mask) {
        bool down_closed = true;
        for (int x = 0; x < k && down_closed; ++x)
          if (mask >> x & 1U)
            p.predecessors(x).for_each([&](std::size_t y) {
              if (!(mask >> y & 1U)) down_closed = false;
            });
        if (!down_closed) continue;
        auto edges = p.closure_pairs();
        for (int x = 0; x < k; ++x)
          if (mask >> x & 1U) edges.emplace_back(x, k);
        auto g = canonicalize(ActivityNetwork::from_edges(m, edges));
        next.emplace(canonical_form(g), std::move(g));
      }
    }
    layer.clear();
    for (auto& [key, g] : next) layer.push_back(std::move(g));
  }
  return layer;
}

/// Non-SP posets whose decomposition has no series or parallel node, one
/// per dual pair (the member with the smaller canonical key).
inline std::vector<ActivityNetwork> candidate_networks(int n) {
  std::vector<ActivityNetwork> out;
  for (auto& g : enumerate_posets(n)) {
    if (is_series_parallel(g)) continue;
    if (modular_decomposition(g).has_series_or_parallel()) continue;
    if (canonical_form(dual(g)) < canonical_form(g)) continue;
    out.push_back(std::move(g));
  }
  return out;
}

/// An extension taking part in the inequality systems, with its maximal
/// chains (the critical-chain choices).
struct ExtensionRole {
  ActivityNetwork network;
  bool series_parallel = false;
  std::vector<Chain> chains;
};

/// Everything needed to generate the systems for one candidate.
struct SystemPlan {
  ActivityNetwork base;
  std::vector<Chain> base_chains;
  std::vector<ExtensionRole> extensions;
  Rational bound;
  std::size_t sp_extensions = 0;
  std::size_t decomposable_extensions = 0;  // not already counted as SP
};

/// Minimal SP extensions demand slowdown > bound; minimal decomposable
/// extensions that are not SP demand slowdown > 1.
inline SystemPlan plan_systems(const ActivityNetwork& g, const Rational& bound = Rational(4, 3),
                               int limit = kDefaultEnumerationLimit) {
  SystemPlan plan{g, maximal_chains(g), {}, bound, 0, 0};
  for (auto& h : minimal_sp_extensions(g, limit)) {
    auto chains = maximal_chains(h);
    plan.extensions.push_back({std::move(h), true, std::move(chains)});
    ++plan.sp_extensions;
  }
  for (auto& h : minimal_decomposable_extensions(g, limit)) {
    bool dup = std::any_of(plan.extensions.begin(), plan.extensions.end(),
                           [&](const ExtensionRole& r) { return r.network == h; });
    if (dup) continue;
    const bool sp = is_series_parallel(h);
    auto chains = maximal_chains(h);
    plan.extensions.push_back({std::move(h), sp, std::move(chains)});
    ++plan.decomposable_extensions;
  }
  return plan;
}

namespace detail {

inline std::string chain_text(const ActivityNetwork& g, const Chain& c) {
  std::string s;
  for (Activity a : c.activities) s += g.label(a);
  return s;
}

}  // namespace detail

/// Constraints contributed by choosing chain `choice` of extension `ext`
/// as its critical path.
inline InequalitySystem extension_constraints(const SystemPlan& plan, std::size_t ext, std::size_t choice) {
  const auto& role = plan.extensions[ext];
  const auto& crit = role.chains[choice];
  const std::size_t n = static_cast<std::size_t>(plan.base.size());
  InequalitySystem sys;
  sys.variables = n;
  const auto p = static_cast<std::int64_t>(boost::multiprecision::numerator(plan.bound));
  const auto q = static_cast<std::int64_t>(boost::multiprecision::denominator(plan.bound));
  const std::string tag = "H" + std::to_string(ext) + "/C=" + detail::chain_text(plan.base, crit);
  for (const auto& b : plan.base_chains) {
    LinearForm f(n);
    if (role.series_parallel) {
      // q*T(C) - p*T(B) > 0
      f.add(crit, q).add(b, -p);
      sys.add({f, true}, tag + ": " + std::to_string(p) + "T(" + detail::chain_text(plan.base, b) + ") < " +
                             std::to_string(q) + "T(C)");
    } else {
      f.add(crit, 1).add(b, -1);
      sys.add({f, true}, tag + ": T(" + detail::chain_text(plan.base, b) + ") < T(C)");
    }
  }
  for (std::size_t d = 0; d < role.chains.size(); ++d) {
    if (d == choice) continue;
    LinearForm f(n);
    f.add(crit, 1).add(role.chains[d], -1);
    sys.add({f, false}, tag + ": T(C) >= T(" + detail::chain_text(plan.base, role.chains[d]) + ")");
  }
  return sys;
}

/// Size of the critical-chain cross product.
inline Integer system_count(const SystemPlan& plan) {
  Integer c = 1;
  for (const auto& r : plan.extensions) c *= static_cast<unsigned long long>(r.chains.size());
  return c;
}

/// Materializes every system of the cross product (positivity included).
/// Only sensible for small candidates.
inline std::vector<InequalitySystem> build_systems(const SystemPlan& plan) {
  std::vector<InequalitySystem> out;
  std::vector<std::size_t> pick(plan.extensions.size(), 0);
  while (true) {
    InequalitySystem s = positivity(static_cast<std::size_t>(plan.base.size()));
    for (std::size_t e = 0; e < pick.size(); ++e) s.append(extension_constraints(plan, e, pick[e]));
    out.push_back(std::move(s));
    std::size_t e = 0;
    while (e < pick.size() && ++pick[e] == plan.extensions[e].chains.size()) pick[e++] = 0;
    if (e == pick.size()) break;
  }
  return out;
}

inline std::vector<InequalitySystem> build_systems(const ActivityNetwork& g, const Rational& bound = Rational(4, 3)) {
  return build_systems(plan_systems(g, bound));
}

/// Independent oracle: the minimum slowdown over every SP extension
/// (exhaustively enumerated) exceeds `bound`.
inline bool verify_counterexample(const ActivityNetwork& g, const Workload& t, const Rational& bound,
                                  int limit = kDefaultEnumerationLimit) {
  t.require_covers(g.size());
  const Rational base = makespan(g, t);
  for (const auto& h : all_sp_extensions(g, limit))
    if (makespan(h, t) / base <= bound) return false;
  return true;
}

/// Verdict for one candidate network.
struct CandidateResult {
  ActivityNetwork network;
  std::size_t sp_extensions = 0;
  std::size_t decomposable_extensions = 0;
  std::size_t base_chains = 0;
  Integer systems = 0;
  std::size_t search_nodes = 0;  // (partial) systems decided by FM
  std::size_t nogoods = 0;       // learned infeasible choice sets
  bool counterexample = false;
  std::optional<Workload> witness;
  double elapsed_ms = 0;
};

namespace detail {

/// Search over critical-chain selections. A node fixes the chain of some
/// extensions; FM decides the conjunction of their constraints. Every
/// refutation names the choices it used, which are recorded as a nogood;
/// nogoods prune the remaining domains and let the search jump back past
/// choices that played no part in a conflict. A full selection is refuted
/// exactly when some nogood lies inside it, so the search is complete.
class SelectionSearch {
 public:
  explicit SelectionSearch(const SystemPlan& plan) : plan_(plan), vars_(static_cast<std::size_t>(plan.base.size())) {
    for (std::size_t e = 0; e < plan.extensions.size(); ++e) {
      std::vector<std::size_t> ids;
      for (std::size_t c = 0; c < plan.extensions[e].chains.size(); ++c) {
        ids.push_back(owner_.size());
        owner_.push_back(e);
        systems_.push_back(extension_constraints(plan, e, c));
      }
      by_ext_.push_back(std::move(ids));
    }
    assigned_ = Bitset(owner_.size());
    pick_.assign(by_ext_.size(), kNone);
  }

  std::optional<Workload> run() {
    std::optional<Workload> found;
    auto conflict = solve(found);
    (void)conflict;
    return found;
  }

  std::size_t nodes() const { return nodes_; }
  std::size_t nogood_count() const { return nogoods_.size(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  // Decides the assigned choices plus `extra`. A stored witness that
  // already satisfies every constraint settles feasibility without FM; on
  // failure the refuted choices become a nogood, also stored in `refuted`.
  FmResult decide(std::size_t extra, Bitset* refuted = nullptr) {
    InequalitySystem sys;
    sys.variables = vars_;
    std::vector<std::size_t> who;
    auto take = [&](std::size_t id) {
      sys.append(systems_[id]);
      who.insert(who.end(), systems_[id].inequalities.size(), id);
    };
    assigned_.for_each(take);
    if (extra != kNone) take(extra);
    ++nodes_;
    for (auto it = witnesses_.rbegin(); it != witnesses_.rend(); ++it)
      if (sys.satisfied_by(*it)) {
        FmResult r;
        r.feasible = true;
        r.witness = Workload(*it);
        return r;
      }
    std::vector<std::size_t> seed;
    if (extra != kNone)
      for (std::size_t i = who.size() - systems_[extra].inequalities.size(); i < who.size(); ++i) seed.push_back(i);
    FmResult r = fm_feasible_lazy(sys, std::move(seed));
    if (r.feasible) {
      witnesses_.push_back(r.witness->durations());
    } else {
      Bitset ng(owner_.size());
      for (auto [i, m] : r.refutation)
        if (i < who.size()) ng.set(who[i]);
      if (refuted) *refuted = ng;
      learn(std::move(ng));
    }
    return r;
  }

  void learn(Bitset ng) {
    for (const auto& old : nogoods_)
      if (old.is_subset_of(ng)) return;
    nogoods_.push_back(std::move(ng));
  }

  // First nogood ruling out `id` given the current assignment.
  const Bitset* blocker(std::size_t id) const {
    for (const auto& ng : nogoods_) {
      if (!ng.test(id)) continue;
      Bitset rest = ng;
      rest.reset(id);
      if (rest.is_subset_of(assigned_)) return &ng;
    }
    return nullptr;
  }

  // Returns the assigned choices responsible for failure (empty set: the
  // whole problem is infeasible). Sets `found` on success.
  Bitset solve(std::optional<Workload>& found) {
    const std::size_t total = owner_.size();
    std::size_t best_ext = kNone;
    std::vector<std::size_t> best_domain;
    Bitset best_reasons(total);
    for (std::size_t e = 0; e < by_ext_.size(); ++e) {
      if (pick_[e] != kNone) continue;
      std::vector<std::size_t> domain;
      Bitset reasons(total);
      for (std::size_t id : by_ext_[e]) {
        if (const Bitset* ng = blocker(id)) {
          Bitset r = *ng;
          r.reset(id);
          reasons |= r;
        } else {
          domain.push_back(id);
        }
      }
      if (best_ext == kNone || domain.size() < best_domain.size()) {
        best_ext = e;
        best_domain = std::move(domain);
        best_reasons = std::move(reasons);
        if (best_domain.empty()) break;
      }
    }
    if (best_ext == kNone) {
      auto r = decide(kNone);
      if (!r.feasible) throw std::logic_error("complete selection lost feasibility");
      found = r.witness;
      return Bitset(total);
    }
    if (best_domain.empty()) {
      learn(best_reasons);
      return best_reasons;
    }

    Bitset conflict = best_reasons;
    for (std::size_t id : best_domain) {
      // An earlier sibling may have taught a nogood covering this choice.
      if (const Bitset* ng = blocker(id)) {
        Bitset r = *ng;
        r.reset(id);
        conflict |= r;
        continue;
      }
      Bitset ng;
      auto r = decide(id, &ng);
      if (!r.feasible) {
        ng.reset(id);
        conflict |= ng;
        continue;
      }
      assigned_.set(id);
      pick_[best_ext] = id;
      Bitset sub = solve(found);
      assigned_.reset(id);
      pick_[best_ext] = kNone;
      if (found) return sub;
      if (!sub.test(id)) return sub;  // this extension played no part
      sub.reset(id);
      conflict |= sub;
    }
    learn(conflict);
    return conflict;
  }

  const SystemPlan& plan_;
  std::size_t vars_;
  std::vector<std::size_t> owner_;
  std::vector<InequalitySystem> systems_;
  std::vector<std::vector<std::size_t>> by_ext_;
  std::vector<Bitset> nogoods_;
  Bitset assigned_;
  std::vector<std::size_t> pick_;
  std::vector<std::vector<Rational>> witnesses_;
  std::size_t nodes_ = 0;
};

}  // namespace detail

/// Decides whether any critical-chain selection admits a workload. A
/// feasible selection yields a witness, which must also pass the
/// brute-force check.
inline CandidateResult check_candidate(const ActivityNetwork& g, const Rational& bound = Rational(4, 3),
                                       int limit = kDefaultEnumerationLimit) {
  const auto start = std::chrono::steady_clock::now();
  const SystemPlan plan = plan_systems(g, bound, limit);
  CandidateResult res;
  res.network = g;
  res.sp_extensions = plan.sp_extensions;
  res.decomposable_extensions = plan.decomposable_extensions;
  res.base_chains = plan.base_chains.size();
  res.systems = system_count(plan);

  detail::SelectionSearch search(plan);
  res.witness = search.run();
  res.search_nodes = search.nodes();
  res.nogoods = search.nogood_count();

  if (res.witness) {
    res.counterexample = true;
    if (!verify_counterexample(g, *res.witness, bound, std::max(limit, g.size())))
      throw std::logic_error("feasible system witness is not a counterexample under brute force");
  }
  res.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

// ---------------------------------------------------------------------------
// Reports and checkpoints

inline Json candidate_to_json(const CandidateResult& r, bool with_timing = false) {
  Json j;
  j["network"] = network_to_json(r.network);
  j["sp_extensions"] = r.sp_extensions;
  j["decomposable_extensions"] = r.decomposable_extensions;
  j["base_chains"] = r.base_chains;
  j["systems"] = r.systems.str();
  j["search_nodes"] = r.search_nodes;
  j["verdict"] = r.counterexample ? "counterexample" : "infeasible";
  if (r.witness) j["witness"] = workload_to_json(*r.witness);
  if (with_timing) j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

inline CandidateResult candidate_from_json(const Json& j) {
  CandidateResult r;
  r.network = network_from_json(j.at("network")).network;
  r.sp_extensions = j.at("sp_extensions").get<std::size_t>();
  r.decomposable_extensions = j.at("decomposable_extensions").get<std::size_t>();
  r.base_chains = j.at("base_chains").get<std::size_t>();
  r.systems = Integer(j.at("systems").get<std::string>());
  r.search_nodes = j.at("search_nodes").get<std::size_t>();
  r.counterexample = j.at("verdict").get<std::string>() == "counterexample";
  if (j.contains("witness")) r.witness = workload_from_json(j.at("witness"));
  if (j.contains("elapsed_ms")) r.elapsed_ms = j.at("elapsed_ms").get<double>();
  return r;
}

struct CheckOptions {
  Rational bound = Rational(4, 3);
  int jobs = 1;
  int limit = kDefaultEnumerationLimit;
  std::string checkpoint;  // JSON-lines file; empty disables
  std::function<void(std::size_t index, std::size_t total, const CandidateResult&, bool resumed)> progress;
};

struct CheckReport {
  int n = 0;
  Rational bound;
  std::size_t posets = 0;
  std::size_t non_sp = 0;
  std::size_t non_sp_dual_classes = 0;  // non-SP posets up to duality
  std::vector<CandidateResult> candidates;
  std::size_t resumed = 0;
  double elapsed_ms = 0;

  std::size_t counterexamples() const {
    return static_cast<std::size_t>(
        std::count_if(candidates.begin(), candidates.end(), [](const auto& c) { return c.counterexample; }));
  }
};

namespace detail {

inline std::map<std::size_t, CandidateResult> load_checkpoint(const std::string& path, int n, const Rational& bound,
                                                              const std::vector<ActivityNetwork>& candidates) {
  std::map<std::size_t, CandidateResult> done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      continue;  // torn final line from an interrupted run
    }
    if (j.value("n", -1) != n || j.value("bound", std::string()) != format_rational(bound)) continue;
    auto index = j.at("index").get<std::size_t>();
    if (index >= candidates.size()) continue;
    auto r = candidate_from_json(j.at("result"));
    if (!(r.network == candidates[index])) continue;
    done.emplace(index, std::move(r));
  }
  return done;
}

}  // namespace detail

/// Exhaustive check over candidate_networks(n). Candidates run on `jobs`
/// workers; results are merged in candidate order. With a checkpoint file,
/// every finished candidate is appended as one JSON line and skipped when
/// the run is resumed.
inline CheckReport check_conjecture(int n, const CheckOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  CheckReport report;
  report.n = n;
  report.bound = opt.bound;
  if (opt.bound <= 0) throw PreconditionViolation("bound must be positive");
  auto posets = enumerate_posets(n);
  report.posets = posets.size();
  report.non_sp = static_cast<std::size_t>(
      std::count_if(posets.begin(), posets.end(), [](const auto& g) { return !is_series_parallel(g); }));
  for (const auto& g : posets)
    if (!is_series_parallel(g) && !(canonical_form(dual(g)) < canonical_form(g))) ++report.non_sp_dual_classes;
  const auto candidates = candidate_networks(n);

  std::vector<std::optional<CandidateResult>> results(candidates.size());
  if (!opt.checkpoint.empty()) {
    for (auto& [i, r] : detail::load_checkpoint(opt.checkpoint, n, opt.bound, candidates)) {
      if (opt.progress) opt.progress(i, candidates.size(), r, true);
      results[i] = std::move(r);
      ++report.resumed;
    }
  }
  std::ofstream checkpoint;
  if (!opt.checkpoint.empty()) checkpoint.open(opt.checkpoint, std::ios::app);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      std::size_t i = next++;
      if (i >= candidates.size()) return;
      if (results[i]) continue;
      try {
        auto r = check_candidate(candidates[i], opt.bound, opt.limit);
        std::lock_guard lock(mu);
        if (checkpoint.is_open()) {
          Json line;
          line["n"] = n;
          line["bound"] = format_rational(opt.bound);
          line["index"] = i;
          line["result"] = candidate_to_json(r, true);
          checkpoint << line.dump() << '\n' << std::flush;
        }
        if (opt.progress) opt.progress(i, candidates.size(), r, false);
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = candidates.size();
        return;
      }
    }
  };
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& r : results) report.candidates.push_back(std::move(*r));
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Deterministic report document (no timing unless asked).
inline Json check_report_to_json(const CheckReport& r, bool with_timing = false) {
  Json j;
  j["n"] = r.n;
  j["bound"] = format_rational(r.bound);
  j["posets"] = r.posets;
  j["non_sp_posets"] = r.non_sp;
  j["non_sp_up_to_duality"] = r.non_sp_dual_classes;
  j["candidates_examined"] = r.candidates.size();
  j["counterexamples"] = r.counterexamples();
  j["verdict"] = r.counterexamples() ? "counterexample found" : "no counterexample";
  Json arr = Json::array();
  for (const auto& c : r.candidates) arr.push_back(candidate_to_json(c, with_timing));
  j["candidates"] = std::move(arr);
  if (with_timing) {
    j["elapsed_ms"] = r.elapsed_ms;
    j["resumed_candidates"] = r.resumed;
  }
  return j;
}

}  // namespace spnet
