#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pafas/casestudy.hpp"
#include "pafas/errors.hpp"
#include "pafas/io.hpp"
#include "pafas/parser.hpp"
#include "pafas/perf.hpp"
#include "pafas/report.hpp"
#include "pafas/semantics.hpp"

namespace {

using namespace pafas;

size_t env_cap_or(size_t fallback) {
  const char* e = std::getenv("PAFAS_NODE_CAP");
  if (!e || !*e) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(e, &end, 10);
  if (!end || *end != '\0' || v == 0)
    throw WellFormedError("PAFAS_NODE_CAP must be a positive integer");
  return static_cast<size_t>(v);
}

struct Input {
  std::string desc;
  ProgramEnv env;
};

Input load_input(TermTable& tt, const std::string& file, const std::string& builtin) {
  if (!builtin.empty()) {
    auto env = builtin_program(tt, builtin);
    if (!env)
      throw WellFormedError("unknown builtin: " + builtin +
                            " (expected fifo:N, pipe:N, buff:N or user:N)");
    return {builtin, std::move(*env)};
  }
  if (file.empty()) throw WellFormedError("no input: give a file or --builtin");
  return {file, parse_program(tt, read_file(file), file)};
}

std::pair<int64_t, int64_t> parse_rp_range(const std::string& spec) {
  auto to_n = [&](const std::string& s) -> int64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw WellFormedError("bad --rp range: " + spec);
    int64_t v = std::stoll(s);
    if (v < 1) throw WellFormedError("--rp values start at 1");
    return v;
  };
  size_t dots = spec.find("..");
  if (dots == std::string::npos) {
    int64_t n = to_n(spec);
    return {n, n};
  }
  int64_t a = to_n(spec.substr(0, dots));
  int64_t b = to_n(spec.substr(dots + 2));
  if (a > b) throw WellFormedError("bad --rp range: " + spec);
  return {a, b};
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) std::cout << content;
  else write_file(out_path, content);
}

std::vector<std::string> extra_visible_warnings(const Rts& g) {
  ActionSet extra;
  for (const RtsNode& n : g.nodes)
    for (const auto& [a, to] : n.acts) {
      (void)to;
      if (a != kTau && a != actions().in && a != actions().out) aset_insert(extra, a);
    }
  if (extra.empty()) return {};
  return {"visible actions beyond {in, out}: " + aset_str(extra) +
          "; the n-critical search requires fully refusable time steps before "
          "the last request, which may be stricter than necessary for them"};
}

double ms_between(std::chrono::steady_clock::time_point a,
                  std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

int run_parse(const std::string& file) {
  TermTable tt;
  ProgramEnv env = parse_program(tt, read_file(file), file);
  std::cout << file << ": ok (" << env.defs.size() << " definitions)\n";
  return kExitOk;
}

int run_analyze(const std::string& file, const std::string& builtin,
                const std::string& rp_spec, const std::string& method,
                const std::string& format, size_t cap,
                const std::string& out_path, const std::string& witness_dot) {
  TermTable tt;
  Input in = load_input(tt, file, builtin);
  Semantics sem(tt, in.env);
  BuildOpts opts;
  opts.cap = cap;
  opts.fold_inert_urgency = true;
  Rts rts = sem.build_rts(in.env.main, opts);

  PerfReport report;
  report.input = in.desc;
  report.warnings = extra_visible_warnings(rts);
  report.rts_nodes = rts.nodes.size();
  report.rts_action_edges = rts.action_edge_count();
  report.rts_time_edges = rts.time_edge_count();

  ResponseResult resp = check_response(rts);
  if (!resp.ok)
    throw NotAResponseProcess("not a response process: out overtakes in along: " +
                              path_str(resp.witness));

  Rts rr = reduce_rts(rts);
  report.rrts_nodes = rr.nodes.size();
  report.rrts_action_edges = rr.action_edge_count();
  report.rrts_time_edges = rr.time_edge_count();

  report.catastrophic = find_catastrophic(rr);
  bool zero_throughput = false;
  if (!report.catastrophic) {
    std::vector<std::pair<std::string, Method>> methods;
    if (method == "baseline" || method == "both")
      methods.emplace_back("baseline", Method::kBaseline);
    if (method == "improved" || method == "both")
      methods.emplace_back("improved", Method::kImproved);
    for (const auto& [name, m] : methods)
      report.asym.push_back({name, asymptotic_performance(rr, m)});
    if (report.asym.size() == 2) {
      const AsymResult& a = report.asym[0].result;
      const AsymResult& b = report.asym[1].result;
      if (a.status != b.status ||
          (a.status != AsymStatus::kNoCycle && a.mean != b.mean))
        throw InternalError("baseline and improved methods disagree");
    }
    for (const AsymEntry& e : report.asym)
      if (e.result.status == AsymStatus::kZeroThroughput) zero_throughput = true;
    if (!rp_spec.empty()) {
      auto [lo, hi] = parse_rp_range(rp_spec);
      for (int64_t n = lo; n <= hi; ++n) {
        RpResult r = response_performance(rr, n);
        report.rp.push_back({n, r.value, std::move(r.witness)});
      }
    }
  }

  if (!witness_dot.empty()) {
    const Path* hl = nullptr;
    if (report.catastrophic) hl = &report.catastrophic->cycle;
    else if (!report.asym.empty() && report.asym[0].result.status != AsymStatus::kNoCycle)
      hl = &report.asym[0].result.witness;
    else if (!report.rp.empty()) hl = &report.rp[0].witness;
    write_file(witness_dot, rts_to_dot(rr, hl));
  }

  emit(out_path, format == "json" ? report_to_json(report) : report_to_text(report, rr));
  if (report.catastrophic) return kExitCatastrophic;
  if (zero_throughput) {
    std::cerr << "error: zero-throughput cycle in a response process\n";
    return kExitInternal;
  }
  return kExitOk;
}

int run_export(const std::string& file, const std::string& builtin,
               const std::string& format, bool reduced, size_t cap,
               const std::string& out_path) {
  TermTable tt;
  Input in = load_input(tt, file, builtin);
  Semantics sem(tt, in.env);
  BuildOpts opts;
  opts.cap = cap;
  opts.fold_inert_urgency = true;
  Rts g = sem.build_rts(in.env.main, opts);
  if (reduced) g = reduce_rts(g);
  emit(out_path, format == "dot" ? rts_to_dot(g) : rts_to_xml(g));
  return kExitOk;
}

int run_bench(const std::string& family, int min_n, int max_n,
              const std::string& format, size_t cap) {
  std::vector<std::string> families;
  if (family == "all") families = {"fifo", "pipe", "buff"};
  else families = {family};
  bool csv = format == "csv";
  bool all_agree = true;
  std::vector<double> pipe_speedups;

  if (csv)
    std::printf(
        "family,N,cells,rts_nodes,rts_edges,rrts_nodes,rrts_edges,g_nodes,g_edges,"
        "gprime_nodes,gprime_edges,cat_ms,baseline_ms,improved_ms,speedup,agree\n");
  else
    std::printf(
        "%-5s %2s %5s %9s %9s %9s %9s %8s %8s %8s %9s %8s %11s %11s %8s %5s\n",
        "fam", "N", "cells", "rts_n", "rts_e", "rrts_n", "rrts_e", "g_n", "g_e",
        "gp_n", "gp_e", "cat_ms", "baseline_ms", "improved_ms", "speedup", "agree");

  for (const std::string& fam : families) {
    for (int n = min_n; n <= max_n; ++n) {
      TermTable tt;
      std::string spec = fam + ":" + std::to_string(n);
      try {
        Input in = load_input(tt, "", spec);
        Semantics sem(tt, in.env);
        BuildOpts opts;
        opts.cap = cap;
        opts.fold_inert_urgency = true;
        Rts rts = sem.build_rts(in.env.main, opts);
        Rts rr = reduce_rts(rts);
        auto t0 = std::chrono::steady_clock::now();
        auto cat = find_catastrophic(rr);
        auto t1 = std::chrono::steady_clock::now();
        double cat_ms = ms_between(t0, t1);
        if (cat) {
          all_agree = false;
          if (csv)
            std::printf("%s,%d,%d,%zu,%zu,%zu,%zu,,,,,%.2f,,,,catastrophic\n",
                        fam.c_str(), n, n + 2, rts.nodes.size(), rts.edge_count(),
                        rr.nodes.size(), rr.edge_count(), cat_ms);
          else
            std::printf("%-5s %2d %5d: catastrophic cycle found (%.2f ms)\n",
                        fam.c_str(), n, n + 2, cat_ms);
          continue;
        }
        t0 = std::chrono::steady_clock::now();
        AsymResult base = asymptotic_performance(rr, Method::kBaseline);
        t1 = std::chrono::steady_clock::now();
        double base_ms = ms_between(t0, t1);
        t0 = std::chrono::steady_clock::now();
        AsymResult impr = asymptotic_performance(rr, Method::kImproved);
        t1 = std::chrono::steady_clock::now();
        double impr_ms = ms_between(t0, t1);
        bool agree = base.status == impr.status &&
                     (base.status == AsymStatus::kNoCycle || base.mean == impr.mean);
        all_agree = all_agree && agree;
        double speedup = impr_ms > 0 ? base_ms / impr_ms : 0.0;
        if (fam == "pipe") pipe_speedups.push_back(speedup);
        if (csv)
          std::printf("%s,%d,%d,%zu,%zu,%zu,%zu,%zu,%zu,%zu,%zu,%.2f,%.2f,%.2f,%.2f,%s\n",
                      fam.c_str(), n, n + 2, rts.nodes.size(), rts.edge_count(),
                      rr.nodes.size(), rr.edge_count(), base.sizes.g_nodes,
                      base.sizes.g_action_edges + base.sizes.g_full_steps,
                      base.sizes.gp_nodes, base.sizes.gp_edges, cat_ms, base_ms,
                      impr_ms, speedup, agree ? "yes" : "no");
        else
          std::printf(
              "%-5s %2d %5d %9zu %9zu %9zu %9zu %8zu %8zu %8zu %9zu %8.2f %11.2f "
              "%11.2f %8.2f %5s\n",
              fam.c_str(), n, n + 2, rts.nodes.size(), rts.edge_count(),
              rr.nodes.size(), rr.edge_count(), base.sizes.g_nodes,
              base.sizes.g_action_edges + base.sizes.g_full_steps,
              base.sizes.gp_nodes, base.sizes.gp_edges, cat_ms, base_ms, impr_ms,
              speedup, agree ? "yes" : "no");
      } catch (const StateCapExceeded&) {
        if (csv)
          std::printf("%s,%d,%d,,,,,,,,,,,,,cap-exceeded\n", fam.c_str(), n, n + 2);
        else
          std::printf("%-5s %2d %5d: state cap exceeded (skipped)\n", fam.c_str(), n,
                      n + 2);
      }
    }
  }
  if (!csv && pipe_speedups.size() > 1) {
    std::printf("pipe speedup trend:");
    for (double s : pipe_speedups) std::printf(" %.2f", s);
    std::printf("\n");
  }
  if (!all_agree) {
    std::cerr << "error: methods disagree or unexpected catastrophic verdict\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAFAS refusal-semantics worst-case performance analyzer"};
  app.require_subcommand(1);

  std::string file, builtin, rp_spec, out_path, witness_dot;
  std::string method = "both", format = "text";
  size_t cap = 0;

  CLI::App* parse_cmd = app.add_subcommand("parse", "parse and check a program");
  std::string parse_file;
  parse_cmd->add_option("file", parse_file, "input .pafas file")->required();

  CLI::App* analyze = app.add_subcommand(
      "analyze", "build the RTS, reduce it and run the performance analyses");
  analyze->add_option("file", file, "input .pafas file");
  analyze->add_option("--builtin", builtin, "builtin program (fifo:N, pipe:N, buff:N, user:N)");
  analyze->add_option("--rp", rp_spec, "response performance range, e.g. 3 or 1..4");
  analyze->add_option("--method", method, "asymptotic method: baseline|improved|both")
      ->check(CLI::IsMember({"baseline", "improved", "both"}));
  analyze->add_option("--format", format, "output format: text|json")
      ->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--cap", cap, "node cap (default 1000000, or PAFAS_NODE_CAP)");
  analyze->add_option("-o,--out", out_path, "write the report to a file");
  analyze->add_option("--witness-dot", witness_dot,
                      "write the reduced graph as DOT with the main witness highlighted");

  std::string exp_format = "xml";
  bool exp_reduced = false;
  CLI::App* exp = app.add_subcommand("export", "write the graph as XML or DOT");
  exp->add_option("file", file, "input .pafas file");
  exp->add_option("--builtin", builtin, "builtin program");
  exp->add_option("--format", exp_format, "xml|dot")->check(CLI::IsMember({"xml", "dot"}));
  exp->add_flag("--reduced", exp_reduced, "export the reduced graph");
  exp->add_option("--cap", cap, "node cap");
  exp->add_option("-o,--out", out_path, "output file (default stdout)");

  std::string bench_family = "all";
  int bench_min = 1, bench_max = 4;
  std::string bench_format = "text";
  CLI::App* bench = app.add_subcommand("bench", "compare methods across instance sizes");
  bench->add_option("--family", bench_family, "fifo|pipe|buff|all")
      ->check(CLI::IsMember({"fifo", "pipe", "buff", "all"}));
  bench->add_option("--min", bench_min, "smallest N (default 1)");
  bench->add_option("--max", bench_max, "largest N (default 4)");
  bench->add_option("--format", bench_format, "text|csv")
      ->check(CLI::IsMember({"text", "csv"}));
  bench->add_option("--cap", cap, "node cap");

  try {
    app.parse(argc, argv);
    size_t effective_cap = cap > 0 ? cap : env_cap_or(1000000);
    if (parse_cmd->parsed()) return run_parse(parse_file);
    if (analyze->parsed())
      return run_analyze(file, builtin, rp_spec, method, format, effective_cap,
                         out_path, witness_dot);
    if (exp->parsed())
      return run_export(file, builtin, exp_format, exp_reduced, effective_cap, out_path);
    if (bench->parsed())
      return run_bench(bench_family, bench_min, bench_max, bench_format, effective_cap);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  } catch (const pafas::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
