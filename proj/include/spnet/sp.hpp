#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spnet/network.hpp"

namespace spnet {

// ---------------------------------------------------------------------------
// Composition

namespace detail {

inline void require_disjoint_labels(const ActivityNetwork& a, const ActivityNetwork& b) {
  std::set<std::string> seen;
  for (const auto& l : a.labels()) seen.insert(l);
  for (const auto& l : b.labels())
    if (seen.count(l)) throw OverlappingActivities("activity '" + l + "' appears in both networks");
}

inline ActivityNetwork compose(const ActivityNetwork& a, const ActivityNetwork& b, bool series) {
  require_disjoint_labels(a, b);
  const int na = a.size(), nb = b.size();
  std::vector<Edge> edges;
  for (auto [x, y] : a.closure_pairs()) edges.emplace_back(x, y);
  for (auto [x, y] : b.closure_pairs()) edges.emplace_back(x + na, y + na);
  if (series)
    for (int x = 0; x < na; ++x)
      for (int y = 0; y < nb; ++y) edges.emplace_back(x, y + na);
  auto labels = a.labels();
  for (const auto& l : b.labels()) labels.push_back(l);
  return ActivityNetwork::from_edges(na + nb, edges, std::move(labels));
}

}  // namespace detail

/// G1 then G2: every activity of G1 precedes every activity of G2. The
/// activities of G2 are renumbered after those of G1; labels identify
/// activities and must be disjoint.
inline ActivityNetwork series_compose(const ActivityNetwork& g1, const ActivityNetwork& g2) {
  return detail::compose(g1, g2, true);
}

inline ActivityNetwork parallel_compose(const ActivityNetwork& g1, const ActivityNetwork& g2) {
  return detail::compose(g1, g2, false);
}

// ---------------------------------------------------------------------------
// SP expressions

/// Immutable series/parallel expression tree over activity atoms.
class SpExpr {
 public:
  enum class Kind { Atom, Series, Parallel };

  static SpExpr atom(Activity a) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Atom;
    node->activity = a;
    node->atoms = {a};
    return SpExpr(std::move(node));
  }
  static SpExpr series(const SpExpr& l, const SpExpr& r) { return binary(Kind::Series, l, r); }
  static SpExpr parallel(const SpExpr& l, const SpExpr& r) { return binary(Kind::Parallel, l, r); }

  Kind kind() const noexcept { return node_->kind; }
  Activity activity() const noexcept { return node_->activity; }
  SpExpr left() const { return SpExpr(node_->left); }
  SpExpr right() const { return SpExpr(node_->right); }
  /// Sorted atom ids.
  const std::vector<Activity>& atoms() const noexcept { return node_->atoms; }
  Activity min_atom() const noexcept { return node_->atoms.front(); }

  friend bool operator==(const SpExpr& a, const SpExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    if (a.kind() == Kind::Atom) return a.activity() == b.activity();
    return a.left() == b.left() && a.right() == b.right();
  }

 private:
  struct Node {
    Kind kind = Kind::Atom;
    Activity activity = -1;
    std::shared_ptr<const Node> left, right;
    std::vector<Activity> atoms;
  };

  explicit SpExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static SpExpr binary(Kind k, const SpExpr& l, const SpExpr& r) {
    auto node = std::make_shared<Node>();
    node->kind = k;
    node->left = l.node_;
    node->right = r.node_;
    std::vector<Activity> merged;
    std::set_union(l.atoms().begin(), l.atoms().end(), r.atoms().begin(), r.atoms().end(),
                   std::back_inserter(merged));
    if (merged.size() != l.atoms().size() + r.atoms().size())
      throw DuplicateActivity("an activity appears on both sides of a composition");
    node->atoms = std::move(merged);
    return SpExpr(std::move(node));
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline void flatten(const SpExpr& e, SpExpr::Kind k, std::vector<SpExpr>& out) {
  if (e.kind() == k) {
    flatten(e.left(), k, out);
    flatten(e.right(), k, out);
  } else {
    out.push_back(e);
  }
}

inline SpExpr fold_left(SpExpr::Kind k, const std::vector<SpExpr>& parts) {
  SpExpr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i)
    acc = k == SpExpr::Kind::Series ? SpExpr::series(acc, parts[i]) : SpExpr::parallel(acc, parts[i]);
  return acc;
}

}  // namespace detail

/// Flattens associativity, brackets to the left and sorts parallel operands
/// by their smallest atom.
inline SpExpr canonical_expr(const SpExpr& e) {
  if (e.kind() == SpExpr::Kind::Atom) return e;
  std::vector<SpExpr> parts;
  detail::flatten(e, e.kind(), parts);
  for (auto& p : parts) p = canonical_expr(p);
  if (e.kind() == SpExpr::Kind::Parallel)
    std::sort(parts.begin(), parts.end(),
              [](const SpExpr& a, const SpExpr& b) { return a.min_atom() < b.min_atom(); });
  return detail::fold_left(e.kind(), parts);
}

/// Builds the network of an expression whose atoms are exactly 0..k-1.
inline ActivityNetwork expr_to_network(const SpExpr& e, std::vector<std::string> labels = {}) {
  const auto& atoms = e.atoms();
  const int n = static_cast<int>(atoms.size());
  for (int i = 0; i < n; ++i)
    if (atoms[i] != i) throw IdOutOfRange("expression atoms must be exactly 0.." + std::to_string(n - 1));
  std::vector<Edge> edges;
  auto walk = [&](auto&& self, const SpExpr& x) -> void {
    if (x.kind() == SpExpr::Kind::Atom) return;
    self(self, x.left());
    self(self, x.right());
    if (x.kind() == SpExpr::Kind::Series)
      for (Activity a : x.left().atoms())
        for (Activity b : x.right().atoms()) edges.emplace_back(a, b);
  };
  walk(walk, e);
  return ActivityNetwork::from_edges(n, edges, std::move(labels));
}

/// Max-plus evaluation: parallel is max, series is +.
inline Rational network_makespan_via_expr(const SpExpr& e, const Workload& t) {
  switch (e.kind()) {
    case SpExpr::Kind::Atom:
      if (static_cast<std::size_t>(e.activity()) >= t.size())
        throw MissingDuration("no duration for activity " + std::to_string(e.activity()));
      return t[e.activity()];
    case SpExpr::Kind::Series:
      return network_makespan_via_expr(e.left(), t) + network_makespan_via_expr(e.right(), t);
    case SpExpr::Kind::Parallel: {
      Rational l = network_makespan_via_expr(e.left(), t);
      Rational r = network_makespan_via_expr(e.right(), t);
      return l > r ? l : r;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Text syntax
//
//   expr   := series ('+' series)*
//   series := factor (('.' | '·')? factor)*
//   factor := atom | '(' expr ')'
//   atom   := letter (digits | '_' digits | '_{' ... '}')?
//
// '⊕' is accepted for '+'.

struct ParsedExpr {
  SpExpr expr;
  std::vector<std::string> labels;  // id -> atom name
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, const std::vector<std::string>* table) : text_(text), table_(table) {}

  ParsedExpr run() {
    skip_space();
    if (at_end()) throw SyntaxError("empty expression");
    SpExpr e = parse_expr();
    skip_space();
    if (!at_end()) fail("unexpected character");
    std::vector<std::string> labels;
    if (table_) {
      labels = *table_;
    } else {
      labels.resize(ids_.size());
      for (const auto& [name, id] : ids_) labels[id] = name;
    }
    return {e, labels};
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw SyntaxError(why + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }
  bool at_end() const { return pos_ >= text_.size(); }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  bool eat_plus() { return eat("+") || eat("\xE2\x8A\x95"); }
  bool eat_dot() { return eat(".") || eat("\xC2\xB7"); }
  bool factor_starts() {
    skip_space();
    return !at_end() && (text_[pos_] == '(' || std::isalpha(static_cast<unsigned char>(text_[pos_])));
  }

  SpExpr parse_expr() {
    SpExpr acc = parse_series();
    while (eat_plus()) acc = SpExpr::parallel(acc, parse_series());
    return acc;
  }

  SpExpr parse_series() {
    SpExpr acc = parse_factor();
    while (true) {
      if (eat_dot()) {
        acc = SpExpr::series(acc, parse_factor());
      } else if (factor_starts()) {
        acc = SpExpr::series(acc, parse_factor());
      } else {
        return acc;
      }
    }
  }

  SpExpr parse_factor() {
    skip_space();
    if (at_end()) fail("expected activity or '('");
    if (text_[pos_] == '(') {
      ++pos_;
      SpExpr e = parse_expr();
      if (!eat(")")) fail("expected ')'");
      return e;
    }
    if (!std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected activity or '('");
    std::size_t start = pos_++;
    if (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    } else if (!at_end() && text_[pos_] == '_') {
      ++pos_;
      if (!at_end() && text_[pos_] == '{') {
        auto close = text_.find('}', pos_);
        if (close == std::string_view::npos) fail("unterminated subscript");
        pos_ = close + 1;
      } else {
        std::size_t digits = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits) fail("expected subscript");
      }
    }
    return SpExpr::atom(id_for(std::string(text_.substr(start, pos_ - start))));
  }

  Activity id_for(const std::string& name) {
    if (table_) {
      auto it = std::find(table_->begin(), table_->end(), name);
      if (it == table_->end()) fail("unknown activity '" + name + "'");
      auto id = static_cast<Activity>(it - table_->begin());
      if (!used_.insert(id).second) throw DuplicateActivity("activity '" + name + "' appears twice");
      return id;
    }
    if (ids_.count(name)) throw DuplicateActivity("activity '" + name + "' appears twice");
    auto id = static_cast<Activity>(ids_.size());
    ids_.emplace(name, id);
    return id;
  }

  std::string_view text_;
  const std::vector<std::string>* table_;
  std::size_t pos_ = 0;
  std::map<std::string, Activity> ids_;
  std::set<Activity> used_;
};

/// True if `name` lexes as exactly one atom, so juxtaposition is unambiguous.
inline bool is_atom_token(const std::string& name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  if (name.size() == 1) return true;
  std::string_view rest(name);
  rest.remove_prefix(1);
  auto all_digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (all_digits(rest)) return true;
  if (rest[0] != '_') return false;
  rest.remove_prefix(1);
  if (all_digits(rest)) return true;
  return rest.size() >= 2 && rest.front() == '{' && rest.back() == '}' &&
         rest.substr(1, rest.size() - 2).find('}') == std::string_view::npos;
}

}  // namespace detail

/// Parses the text syntax; activity ids are assigned in order of first
/// appearance, or looked up in `labels` when given.
inline ParsedExpr parse_sp_expr(std::string_view text, const std::vector<std::string>* labels = nullptr) {
  return detail::ExprParser(text, labels).run();
}

/// Canonical rendering: juxtaposition for series when every label is a
/// single atom token ('.' otherwise), parenthesised '+' for parallel.
inline std::string render_sp_expr(const SpExpr& e, const std::vector<std::string>& labels = {}) {
  auto name = [&](Activity a) {
    return static_cast<std::size_t>(a) < labels.size() ? labels[a] : default_label(a);
  };
  bool juxtapose = true;
  for (Activity a : e.atoms()) juxtapose = juxtapose && detail::is_atom_token(name(a));
  auto render = [&](auto&& self, const SpExpr& x) -> std::string {
    if (x.kind() == SpExpr::Kind::Atom) return name(x.activity());
    std::vector<SpExpr> parts;
    detail::flatten(x, x.kind(), parts);
    std::string out;
    if (x.kind() == SpExpr::Kind::Parallel) {
      out = "(";
      for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + self(self, parts[i]);
      return out + ")";
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i && !juxtapose) out += ".";
      out += self(self, parts[i]);
    }
    return out;
  };
  return render(render, canonical_expr(e));
}

// ---------------------------------------------------------------------------
// Recognition

/// First (a,b,c,d) in lexicographic order inducing the N pattern:
/// a<c, a<d, b<d and no other comparability among the four.
inline std::optional<std::array<Activity, 4>> find_n_pattern(const ActivityNetwork& g) {
  const int n = g.size();
  std::vector<Bitset> incomparable;
  for (int i = 0; i < n; ++i) incomparable.push_back(g.incomparable_to(i));
  for (int a = 0; a < n; ++a)
    for (auto b = incomparable[a].first(); b < static_cast<std::size_t>(n); b = incomparable[a].next(b + 1)) {
      Bitset cs = g.successors(a) & incomparable[b];
      Bitset ds_base = g.successors(a) & g.successors(static_cast<Activity>(b));
      if (ds_base.none()) continue;
      for (auto c = cs.first(); c < static_cast<std::size_t>(n); c = cs.next(c + 1)) {
        Bitset ds = ds_base & incomparable[c];
        if (auto d = ds.first(); d < static_cast<std::size_t>(n))
          return std::array<Activity, 4>{a, static_cast<Activity>(b), static_cast<Activity>(c),
                                         static_cast<Activity>(d)};
      }
    }
  return std::nullopt;
}

/// N-free test by exhaustive search over 4-subsets.
inline bool is_series_parallel(const ActivityNetwork& g) { return !find_n_pattern(g).has_value(); }

// ---------------------------------------------------------------------------
// Decomposition

namespace detail {

/// Connected components of the comparability (or incomparability) graph
/// restricted to `members`; each component sorted, components ordered by
/// smallest id.
inline std::vector<std::vector<Activity>> components(const ActivityNetwork& g, const std::vector<Activity>& members,
                                                     bool comparability) {
  std::vector<std::vector<Activity>> out;
  std::set<Activity> unvisited(members.begin(), members.end());
  while (!unvisited.empty()) {
    std::vector<Activity> comp{*unvisited.begin()}, stack{*unvisited.begin()};
    unvisited.erase(unvisited.begin());
    while (!stack.empty()) {
      Activity u = stack.back();
      stack.pop_back();
      for (auto it = unvisited.begin(); it != unvisited.end();) {
        if (g.comparable(u, *it) == comparability) {
          comp.push_back(*it);
          stack.push_back(*it);
          it = unvisited.erase(it);
        } else {
          ++it;
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Orders series co-components so that earlier ones precede later ones.
inline void order_series_parts(const ActivityNetwork& g, std::vector<std::vector<Activity>>& parts) {
  std::sort(parts.begin(), parts.end(), [&](const auto& x, const auto& y) { return g.precedes(x.front(), y.front()); });
}

// 0 incomparable, 1 x before u, 2 x after u.
inline int relation(const ActivityNetwork& g, Activity x, Activity u) {
  if (g.precedes(x, u)) return 1;
  if (g.precedes(u, x)) return 2;
  return 0;
}

/// Smallest module of g|members containing `seed`: keep adding
/// distinguishers until none remain.
inline std::vector<Activity> module_closure(const ActivityNetwork& g, const std::vector<Activity>& members,
                                            std::vector<Activity> seed) {
  std::set<Activity> in(seed.begin(), seed.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (Activity x : members) {
      if (in.count(x)) continue;
      int r = relation(g, x, *in.begin());
      for (Activity u : in)
        if (relation(g, x, u) != r) {
          in.insert(x);
          grew = true;
          break;
        }
    }
  }
  return {in.begin(), in.end()};
}

}  // namespace detail

inline SpExpr sp_decompose_members(const ActivityNetwork& g, const std::vector<Activity>& members) {
  if (members.size() == 1) return SpExpr::atom(members.front());
  auto parts = detail::components(g, members, true);
  if (parts.size() > 1) {
    std::vector<SpExpr> sub;
    for (const auto& p : parts) sub.push_back(sp_decompose_members(g, p));
    return detail::fold_left(SpExpr::Kind::Parallel, sub);
  }
  parts = detail::components(g, members, false);
  if (parts.size() > 1) {
    detail::order_series_parts(g, parts);
    std::vector<SpExpr> sub;
    for (const auto& p : parts) sub.push_back(sp_decompose_members(g, p));
    return detail::fold_left(SpExpr::Kind::Series, sub);
  }
  throw NotSeriesParallel("activities {" + [&] {
    std::string s;
    for (Activity a : members) s += (s.empty() ? "" : ",") + g.label(a);
    return s;
  }() + "} form an indecomposable block");
}

/// Canonical SP expression whose network equals g. Throws NotSeriesParallel.
inline SpExpr sp_decompose(const ActivityNetwork& g) {
  if (g.size() == 0) throw NotSeriesParallel("empty network");
  std::vector<Activity> all(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) all[i] = i;
  return canonical_expr(sp_decompose_members(g, all));
}

/// Modular decomposition tree with maximal strong modules as children.
struct DecompositionTree {
  enum class Kind { Leaf, Series, Parallel, Indecomposable };
  Kind kind = Kind::Leaf;
  Activity activity = -1;                 // Leaf only
  std::vector<DecompositionTree> children;  // Series: in order; others: by smallest activity
  std::optional<ActivityNetwork> quotient;  // Indecomposable only; vertex i is children[i]
  std::vector<Activity> activities;         // sorted leaves below this node

  bool has_indecomposable() const {
    if (kind == Kind::Indecomposable) return true;
    return std::any_of(children.begin(), children.end(), [](const auto& c) { return c.has_indecomposable(); });
  }
  bool has_series_or_parallel() const {
    if (kind == Kind::Series || kind == Kind::Parallel) return true;
    return std::any_of(children.begin(), children.end(), [](const auto& c) { return c.has_series_or_parallel(); });
  }
};

inline DecompositionTree modular_decomposition_members(const ActivityNetwork& g, const std::vector<Activity>& members) {
  DecompositionTree t;
  t.activities = members;
  if (members.size() == 1) {
    t.kind = DecompositionTree::Kind::Leaf;
    t.activity = members.front();
    return t;
  }
  auto parts = detail::components(g, members, true);
  if (parts.size() > 1) {
    t.kind = DecompositionTree::Kind::Parallel;
  } else {
    parts = detail::components(g, members, false);
    if (parts.size() > 1) {
      t.kind = DecompositionTree::Kind::Series;
      detail::order_series_parts(g, parts);
    } else {
      // Prime: u and v share a maximal module iff their module closure is proper.
      t.kind = DecompositionTree::Kind::Indecomposable;
      parts.clear();
      std::set<Activity> assigned;
      for (Activity u : members) {
        if (assigned.count(u)) continue;
        std::vector<Activity> cls{u};
        for (Activity v : members)
          if (v != u && !assigned.count(v) &&
              detail::module_closure(g, members, {u, v}).size() < members.size())
            cls.push_back(v);
        std::sort(cls.begin(), cls.end());
        for (Activity v : cls) assigned.insert(v);
        parts.push_back(std::move(cls));
      }
      std::vector<Activity> reps;
      for (const auto& p : parts) reps.push_back(p.front());
      t.quotient = restrict_to(g, reps);
    }
  }
  for (const auto& p : parts) t.children.push_back(modular_decomposition_members(g, p));
  return t;
}

inline DecompositionTree modular_decomposition(const ActivityNetwork& g) {
  std::vector<Activity> all(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) all[i] = i;
  return modular_decomposition_members(g, all);
}

enum class Structure { SP, DecomposableNonSP, Indecomposable };

inline const char* to_string(Structure s) {
  switch (s) {
    case Structure::SP: return "sp";
    case Structure::DecomposableNonSP: return "decomposable";
    case Structure::Indecomposable: return "indecomposable";
  }
  return "?";
}

inline Structure classify(const DecompositionTree& t) {
  if (!t.has_indecomposable()) return Structure::SP;
  if (t.kind == DecompositionTree::Kind::Indecomposable &&
      std::all_of(t.children.begin(), t.children.end(),
                  [](const auto& c) { return c.kind == DecompositionTree::Kind::Leaf; }))
    return Structure::Indecomposable;
  return Structure::DecomposableNonSP;
}

inline Structure classify(const ActivityNetwork& g) { return classify(modular_decomposition(g)); }

}  // namespace spnet
