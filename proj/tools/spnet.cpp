#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spnet/conjecture.hpp"
#include "spnet/extensions.hpp"
#include "spnet/io.hpp"
#include "spnet/msp.hpp"
#include "spnet/slowdown.hpp"
#include "spnet/sp.hpp"

namespace {

using namespace spnet;

constexpr int kExitInput = 1;
constexpr int kExitSemantic = 2;
constexpr int kExitLimit = 3;
constexpr int kExitCounterexample = 4;

/// Enumeration cap: --limit, else SPNET_SIZE_LIMIT, else the module default.
int size_limit(int flag, int fallback) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SPNET_SIZE_LIMIT")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(std::string("SPNET_SIZE_LIMIT is not a positive integer: '") + env + "'");
  }
  return fallback;
}

NsSpec parse_ns_spec(const std::string& text) {
  NsSpec s;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> s.depth >> c1 >> s.width >> c2 >> s.degree) || c1 != ',' || c2 != ',' || !in.eof())
    throw ParseError("expected ns:d,w,k but got 'ns:" + text + "'");
  return s;
}

/// A file path, "-" for stdin, or an inline "ns:d,w,k".
NetworkDocument load_network(const std::string& source) {
  if (source.rfind("ns:", 0) == 0) return {ns_network(parse_ns_spec(source.substr(3))), std::nullopt};
  return network_from_json(read_json_file(source));
}

/// A file holding {"workload": [...]} or a bare array, or an inline
/// comma-separated list such as "1,2,2,1".
Workload load_workload(const std::string& source) {
  if (source == "-" || std::filesystem::exists(source)) {
    Json j = read_json_file(source);
    return workload_from_json(j.is_object() && j.contains("workload") ? j["workload"] : j);
  }
  std::vector<Rational> d;
  std::stringstream in(source);
  std::string item;
  while (std::getline(in, item, ',')) d.push_back(parse_rational(item));
  return Workload(std::move(d));
}

Workload resolve_workload(const NetworkDocument& doc, const std::string& flag) {
  Workload t;
  if (!flag.empty()) t = load_workload(flag);
  else if (doc.workload) t = *doc.workload;
  else throw MissingDuration("no workload: add one to the document or pass --workload");
  t.require_covers(doc.network.size());
  return t;
}

Json labels_of(const ActivityNetwork& g, const std::vector<Activity>& ids) {
  Json out = Json::array();
  for (Activity a : ids) out.push_back(g.label(a));
  return out;
}

Json chain_to_json(const ActivityNetwork& g, const Chain& c) { return labels_of(g, c.activities); }

Json tree_to_json(const ActivityNetwork& g, const DecompositionTree& t) {
  Json j;
  switch (t.kind) {
    case DecompositionTree::Kind::Leaf:
      j["kind"] = "leaf";
      j["activity"] = g.label(t.activity);
      return j;
    case DecompositionTree::Kind::Series: j["kind"] = "series"; break;
    case DecompositionTree::Kind::Parallel: j["kind"] = "parallel"; break;
    case DecompositionTree::Kind::Indecomposable: j["kind"] = "indecomposable"; break;
  }
  Json kids = Json::array();
  for (const auto& c : t.children) kids.push_back(tree_to_json(g, c));
  j["children"] = std::move(kids);
  if (t.quotient) {
    Json q = Json::array();
    for (auto [a, b] : transitive_reduction(*t.quotient)) q.push_back({a, b});
    j["quotient_edges"] = std::move(q);
  }
  return j;
}

Json report_to_json(const ActivityNetwork& h, const SlowdownReport& r) {
  Json j;
  j["base_makespan"] = format_rational(r.base_makespan);
  j["extension_makespan"] = format_rational(r.extension_makespan);
  j["slowdown"] = format_rational(r.slowdown);
  j["rho"] = format_rational(r.rho);
  j["critical_chain"] = chain_to_json(h, r.witness);
  return j;
}

Json adversary_to_json(const ActivityNetwork& g, const ActivityNetwork& h, const AdversaryReport& a) {
  Json j;
  j["triple"] = labels_of(g, {a.triple.begin(), a.triple.end()});
  j["epsilon"] = format_rational(a.epsilon);
  j["guaranteed_slowdown"] = format_rational(a.bound);
  j["report"] = report_to_json(h, a.report);
  j["workload"] = workload_to_json(a.workload);
  return j;
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activity-network analysis: makespans, series-parallel structure and slowdown bounds"};
  app.require_subcommand(1);

  // net
  auto* net = app.add_subcommand("net", "Inspect network documents");
  net->require_subcommand(1);
  std::string net_file;
  auto* net_validate = net->add_subcommand("validate", "Check a network document and print its summary");
  net_validate->add_option("file", net_file, "network file, '-' or ns:d,w,k")->required();
  bool show_dot = false;
  auto* net_show = net->add_subcommand("show", "Print the normalised document (transitive reduction)");
  net_show->add_option("file", net_file, "network file, '-' or ns:d,w,k")->required();
  net_show->add_flag("--dot", show_dot, "Graphviz output instead of JSON");

  // makespan
  std::string ms_file, ms_workload;
  bool ms_critical = false;
  auto* makespan_cmd = app.add_subcommand("makespan", "Critical-path makespan");
  makespan_cmd->add_option("file", ms_file, "network file")->required();
  makespan_cmd->add_option("--workload", ms_workload, "workload file or inline list 1,2,2,1");
  makespan_cmd->add_flag("--critical", ms_critical, "also print a critical chain");

  // sp
  auto* sp = app.add_subcommand("sp", "Series-parallel structure");
  sp->require_subcommand(1);
  std::string sp_file;
  auto* sp_check = sp->add_subcommand("check", "Series-parallel test with an N witness");
  sp_check->add_option("file", sp_file, "network file")->required();
  bool sp_modules = false;
  auto* sp_decompose_cmd = sp->add_subcommand("decompose", "SP expression, or the modular decomposition with --modules");
  sp_decompose_cmd->add_option("file", sp_file, "network file")->required();
  sp_decompose_cmd->add_flag("--modules", sp_modules, "print the modular decomposition tree");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate networks");
  gen->require_subcommand(1);
  NsSpec ns_spec;
  std::string heavy;
  auto* gen_ns = gen->add_subcommand("ns", "Neighbour-synchronisation network ns(d,w,k)");
  gen_ns->add_option("--depth", ns_spec.depth, "levels")->required();
  gen_ns->add_option("--width", ns_spec.width, "columns")->required();
  gen_ns->add_option("--degree", ns_spec.degree, "successors per activity")->default_val(3);
  gen_ns->add_option("--heavy", heavy, "attach the heavy workload with this duration C");

  // extend
  auto* extend = app.add_subcommand("extend", "Build extensions");
  extend->require_subcommand(1);
  std::string ext_file;
  auto* extend_lc = extend->add_subcommand("lc", "Level-constrained extension");
  extend_lc->add_option("file", ext_file, "network file")->required();

  // extensions
  auto* extensions = app.add_subcommand("extensions", "Enumerate minimal extensions");
  extensions->require_subcommand(1);
  int ext_limit = 0;
  auto* ext_msp = extensions->add_subcommand("minimal-sp", "Minimal series-parallel extensions");
  ext_msp->add_option("file", ext_file, "network file")->required();
  ext_msp->add_option("--limit", ext_limit, "activity cap");
  auto* ext_mdec = extensions->add_subcommand("minimal-decomposable", "Minimal decomposable extensions");
  ext_mdec->add_option("file", ext_file, "network file")->required();
  ext_mdec->add_option("--limit", ext_limit, "activity cap");

  // slowdown
  std::string sd_base, sd_ext, sd_workload;
  auto* slowdown_cmd = app.add_subcommand("slowdown", "Slowdown of an extension (LC extension when omitted)");
  slowdown_cmd->add_option("base", sd_base, "base network")->required();
  slowdown_cmd->add_option("extension", sd_ext, "extension network");
  slowdown_cmd->add_option("--workload", sd_workload, "workload file or inline list");

  // adversary
  std::string adv_base = "ns:3,8,3", adv_ext, adv_eps = "1/10";
  bool adv_lc = false;
  std::vector<std::uint64_t> adv_seeds;
  int adv_samples = 0;
  auto* adversary = app.add_subcommand("adversary", "Forced-chain adversarial workload for an SP extension");
  adversary->add_option("--base", adv_base, "base network")->capture_default_str();
  adversary->add_option("--extension", adv_ext, "SP extension of the base");
  adversary->add_flag("--lc", adv_lc, "use the LC extension of the base");
  adversary->add_option("--seed", adv_seeds, "random SP extension seed(s)");
  adversary->add_option("--samples", adv_samples, "random SP extensions with seeds 0..K-1");
  adversary->add_option("--epsilon", adv_eps, "light duration")->capture_default_str();

  // conjecture
  auto* conjecture = app.add_subcommand("conjecture", "Exhaustive slowdown-bound check");
  conjecture->require_subcommand(1);
  int cj_n = 4, cj_jobs = 1, cj_limit = 0;
  std::string cj_bound = "4/3", cj_report, cj_checkpoint;
  auto* cj_check = conjecture->add_subcommand("check", "Check every candidate network on n activities");
  cj_check->add_option("--n", cj_n, "activity count")->required();
  cj_check->add_option("--bound", cj_bound, "slowdown bound p/q")->capture_default_str();
  cj_check->add_option("--jobs", cj_jobs, "worker threads")->capture_default_str();
  cj_check->add_option("--report", cj_report, "write the full report (with timing) here");
  cj_check->add_option("--checkpoint", cj_checkpoint, "JSON-lines checkpoint; resumes when present");
  cj_check->add_option("--limit", cj_limit, "activity cap");

  // msp
  auto* msp = app.add_subcommand("msp", "Minimum series-parallelisation");
  msp->require_subcommand(1);
  std::string msp_file, msp_method = "brute", msp_workload;
  int msp_limit = 0;
  auto* msp_solve_cmd = msp->add_subcommand("solve", "Best SP extension for a workload");
  msp_solve_cmd->add_option("file", msp_file, "network file")->required();
  msp_solve_cmd->add_option("--method", msp_method, "brute|bnb|lc")
      ->check(CLI::IsMember({"brute", "bnb", "branch-and-bound", "lc"}))
      ->capture_default_str();
  msp_solve_cmd->add_option("--limit", msp_limit, "activity cap");
  msp_solve_cmd->add_option("--workload", msp_workload, "workload file or inline list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*net_validate) {
      auto doc = load_network(net_file);
      const auto& g = doc.network;
      Json j;
      j["valid"] = true;
      j["n"] = g.size();
      j["closure_pairs"] = g.closure_size();
      j["reduction_edges"] = transitive_reduction(g).size();
      j["depth"] = depth(g);
      j["width"] = width(g);
      j["series_parallel"] = is_series_parallel(g);
      j["structure"] = to_string(classify(g));
      j["has_workload"] = doc.workload.has_value();
      emit(j);
    } else if (*net_show) {
      auto doc = load_network(net_file);
      if (show_dot) std::cout << to_dot(doc.network, doc.workload);
      else emit(network_to_json(doc.network, doc.workload));
    } else if (*makespan_cmd) {
      auto doc = load_network(ms_file);
      Workload t = resolve_workload(doc, ms_workload);
      if (ms_critical) {
        Json j;
        j["makespan"] = format_rational(makespan(doc.network, t));
        j["critical_chain"] = chain_to_json(doc.network, critical_chain(doc.network, t));
        emit(j);
      } else {
        emit(format_rational(makespan(doc.network, t)));
      }
    } else if (*sp_check) {
      auto doc = load_network(sp_file);
      Json j;
      auto n = find_n_pattern(doc.network);
      j["sp"] = !n.has_value();
      if (n) j["witness"] = labels_of(doc.network, {n->begin(), n->end()});
      emit(j);
    } else if (*sp_decompose_cmd) {
      auto doc = load_network(sp_file);
      const auto& g = doc.network;
      if (sp_modules) {
        Json j;
        auto tree = modular_decomposition(g);
        j["structure"] = to_string(classify(tree));
        j["tree"] = tree_to_json(g, tree);
        emit(j);
      } else {
        Json j;
        j["expression"] = render_sp_expr(sp_decompose(g), g.labels());
        emit(j);
      }
    } else if (*gen_ns) {
      auto g = ns_network(ns_spec);
      std::optional<Workload> t;
      if (!heavy.empty()) t = heavy_ns_workload(ns_spec, parse_rational(heavy));
      emit(network_to_json(g, t));
    } else if (*extend_lc) {
      auto doc = load_network(ext_file);
      emit(network_to_json(lc_extension(doc.network), doc.workload));
    } else if (*ext_msp || *ext_mdec) {
      auto doc = load_network(ext_file);
      const int limit = size_limit(ext_limit, kDefaultEnumerationLimit);
      auto found = *ext_msp ? minimal_sp_extensions(doc.network, limit)
                            : minimal_decomposable_extensions(doc.network, limit);
      Json arr = Json::array();
      for (const auto& h : found) arr.push_back(network_to_json(h.with_labels(doc.network.explicit_labels())));
      emit(arr);
    } else if (*slowdown_cmd) {
      auto base = load_network(sd_base);
      Workload t = resolve_workload(base, sd_workload);
      if (sd_ext.empty()) {
        auto h = lc_extension(base.network);
        emit(report_to_json(h, lc_slowdown_report(base.network, t)));
      } else {
        auto ext = load_network(sd_ext);
        emit(report_to_json(ext.network, slowdown_report(base.network, ext.network, t)));
      }
    } else if (*adversary) {
      auto base = load_network(adv_base).network;
      const Rational eps = parse_rational(adv_eps);
      std::vector<std::pair<std::string, ActivityNetwork>> targets;
      if (!adv_ext.empty()) targets.emplace_back(adv_ext, load_network(adv_ext).network);
      if (adv_lc) targets.emplace_back("lc", lc_extension(base));
      for (auto s : adv_seeds) targets.emplace_back("seed:" + std::to_string(s), random_sp_extension(base, s));
      for (int s = 0; s < adv_samples; ++s)
        targets.emplace_back("seed:" + std::to_string(s), random_sp_extension(base, static_cast<std::uint64_t>(s)));
      if (targets.empty()) throw ParseError("give --extension, --lc, --seed or --samples");
      Json out = Json::array();
      for (const auto& [name, h] : targets) {
        Json j = adversary_to_json(base, h, run_adversary(base, h, eps));
        j["extension"] = name;
        out.push_back(std::move(j));
      }
      emit(out.size() == 1 ? out[0] : out);
    } else if (*cj_check) {
      CheckOptions opt;
      opt.bound = parse_rational(cj_bound);
      opt.jobs = cj_jobs;
      opt.limit = size_limit(cj_limit, kDefaultEnumerationLimit);
      opt.checkpoint = cj_checkpoint;
      opt.progress = [](std::size_t i, std::size_t total, const CandidateResult& r, bool resumed) {
        std::cerr << "candidate " << (i + 1) << "/" << total << (resumed ? " (checkpoint)" : "") << ": "
                  << (r.counterexample ? "COUNTEREXAMPLE" : "infeasible") << ", " << r.search_nodes
                  << " nodes\n";
      };
      if (cj_n > opt.limit) throw SizeLimitExceeded(std::to_string(cj_n) + " activities exceeds the limit of " +
                                                    std::to_string(opt.limit));
      auto report = check_conjecture(cj_n, opt);
      if (!cj_report.empty()) {
        std::ofstream out(cj_report);
        if (!out) throw ParseError("cannot write '" + cj_report + "'");
        out << check_report_to_json(report, true).dump(2) << '\n';
      }
      emit(check_report_to_json(report));
      std::cerr << report.candidates.size() << " candidates, " << report.counterexamples()
                << " counterexample(s), " << report.elapsed_ms / 1000.0 << " s\n";
      if (report.counterexamples() > 0) return kExitCounterexample;
    } else if (*msp_solve_cmd) {
      auto doc = load_network(msp_file);
      Workload t = resolve_workload(doc, msp_workload);
      MspMethod method = msp_method == "lc"      ? MspMethod::Lc
                         : msp_method == "brute" ? MspMethod::Brute
                                                 : MspMethod::BranchAndBound;
      const int fallback = method == MspMethod::BranchAndBound ? kDefaultBranchAndBoundLimit : kDefaultEnumerationLimit;
      auto s = msp_solve(doc.network, t, method, size_limit(msp_limit, fallback));
      const auto& h = s.extension;
      Json j;
      j["method"] = to_string(s.method);
      j["makespan"] = format_rational(s.makespan);
      j["base_makespan"] = format_rational(makespan(doc.network, t));
      j["slowdown"] = format_rational(s.slowdown);
      j["nodes_explored"] = s.nodes_explored;
      j["expression"] = render_sp_expr(sp_decompose(h), h.labels());
      j["extension"] = network_to_json(h);
      emit(j);
    }
  } catch (const SizeLimitExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitLimit;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SemanticError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSemantic;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed document: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
