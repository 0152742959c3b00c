#include "doctest.h"

#include "helpers.hpp"
#include "pafas/casestudy.hpp"
#include "pafas/io.hpp"
#include "pafas/perf.hpp"
#include "pafas/report.hpp"
#include "pafas/semantics.hpp"

#include "nlohmann/json.hpp"

using namespace pafas;
using namespace pafas::testutil;

namespace {

Rts fifo1_rts(TermTable& tt) {
  ProgramEnv env = gen_fifo(tt, 1);
  Semantics sem(tt, env);
  BuildOpts opts;
  opts.fold_inert_urgency = true;
  return sem.build_rts(env.main, opts);
}

}  // namespace

TEST_CASE("xml round-trips the fifo graph") {
  TermTable tt;
  Rts g = fifo1_rts(tt);
  Rts back = rts_from_xml(rts_to_xml(g));
  std::string why;
  CHECK_MESSAGE(same_by_labels(g, back, &why), why);
}

TEST_CASE("xml round-trips conditional time edges and awkward labels") {
  ActionTable& at = actions();
  GraphBuilder b;
  b.node("a<b> & \"c'\"");
  b.node("plain");
  b.act(0, at.intern("tau"), 1);
  b.act(0, at.in, 1);
  b.time(0, 1, {at.in, at.intern("weird<&>")});
  b.time(1, 0);

  Rts back = rts_from_xml(rts_to_xml(b.g));
  std::string why;
  CHECK_MESSAGE(same_by_labels(b.g, back, &why), why);
  CHECK(back.nodes[0].label == "a<b> & \"c'\"");
  REQUIRE(back.nodes[0].time.has_value());
  CHECK(back.nodes[0].time->forbid == aset({at.in, at.intern("weird<&>")}));
  CHECK(back.nodes[0].acts.front().first == kTau);
  REQUIRE(back.nodes[1].time.has_value());
  CHECK(back.nodes[1].time->full());
}

TEST_CASE("xml import rejects malformed documents") {
  const char* bad[] = {
      // Wrong top-level element.
      "<graph root=\"0\"><node id=\"0\"/></graph>",
      // No root attribute.
      "<rts><node id=\"0\"/></rts>",
      // Root points nowhere.
      "<rts root=\"7\"><node id=\"0\"/></rts>",
      // Duplicate ids.
      "<rts root=\"0\"><node id=\"0\"/><node id=\"0\"/></rts>",
      // Dangling action target.
      "<rts root=\"0\"><node id=\"0\"/><act from=\"0\" to=\"3\" label=\"a\"/></rts>",
      // Second time edge from one node.
      "<rts root=\"0\"><node id=\"0\"/>"
      "<time from=\"0\" to=\"0\" full=\"true\"/>"
      "<time from=\"0\" to=\"0\" full=\"true\"/></rts>",
      // Stray element inside <time>.
      "<rts root=\"0\"><node id=\"0\"/>"
      "<time from=\"0\" to=\"0\" full=\"false\"><x a=\"b\"/></time></rts>",
      // Stray element inside <rts>.
      "<rts root=\"0\"><node id=\"0\"/><frob/></rts>",
      // tau can never be refused.
      "<rts root=\"0\"><node id=\"0\"/>"
      "<time from=\"0\" to=\"0\" full=\"false\"><forbid a=\"tau\"/></time></rts>",
      // full is not a boolean.
      "<rts root=\"0\"><node id=\"0\"/><time from=\"0\" to=\"0\" full=\"maybe\"/></rts>",
      // full flag contradicts the forbid list, both ways.
      "<rts root=\"0\"><node id=\"0\"/>"
      "<time from=\"0\" to=\"0\" full=\"true\"><forbid a=\"a\"/></time></rts>",
      "<rts root=\"0\"><node id=\"0\"/><time from=\"0\" to=\"0\" full=\"false\"/></rts>",
      // Unusable ids.
      "<rts root=\"zero\"><node id=\"0\"/></rts>",
      "<rts root=\"0\"><node id=\"99999999999999999999\"/></rts>",
      // Truncated document.
      "<rts root=\"0\"><node id=\"0\"/>",
  };
  for (const char* doc : bad) {
    CAPTURE(doc);
    CHECK_THROWS_AS(rts_from_xml(doc), WellFormedError);
  }
}

TEST_CASE("dot output marks full steps, conditional steps, and the root") {
  ActionTable& at = actions();
  GraphBuilder b;
  b.node("r");
  b.node("s \"quoted\"");
  b.act(0, at.in, 1);
  b.time(0, 1, {at.in});
  b.time(1, 0);

  std::string dot = rts_to_dot(b.g);
  CHECK(dot.find("digraph rts {") == 0);
  CHECK(dot.find("peripheries=2") != std::string::npos);
  CHECK(dot.find("style=bold") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("time{in}") != std::string::npos);
  CHECK(dot.find("s \\\"quoted\\\"") != std::string::npos);
  CHECK(dot.find("color=red") == std::string::npos);

  Path p;
  Step s;
  s.is_time = false;
  s.act = at.in;
  s.from = 0;
  s.to = 1;
  p.push_back(s);
  std::string hi = rts_to_dot(b.g, &p);
  size_t first = hi.find("color=red, penwidth=2");
  CHECK(first != std::string::npos);
  CHECK(hi.find("color=red", first + 1) == std::string::npos);
}

TEST_CASE("json report round-trips the analysis of fifo:1") {
  TermTable tt;
  ProgramEnv env = gen_fifo(tt, 1);
  Semantics sem(tt, env);
  BuildOpts opts;
  opts.fold_inert_urgency = true;
  Rts g = sem.build_rts(env.main, opts);
  Rts rr = reduce_rts(g);

  PerfReport r;
  r.input = "fifo:1";
  r.rts_nodes = g.nodes.size();
  r.rts_action_edges = g.action_edge_count();
  r.rts_time_edges = g.time_edge_count();
  r.rrts_nodes = rr.nodes.size();
  r.rrts_action_edges = rr.action_edge_count();
  r.rrts_time_edges = rr.time_edge_count();
  r.catastrophic = find_catastrophic(rr);
  for (Method m : {Method::kBaseline, Method::kImproved})
    r.asym.push_back({m == Method::kBaseline ? "baseline" : "improved",
                      asymptotic_performance(rr, m)});
  for (int n = 1; n <= 2; ++n) {
    RpResult rp = response_performance(rr, n);
    r.rp.push_back({n, rp.value, rp.witness});
  }

  std::string js = report_to_json(r);
  auto j = nlohmann::json::parse(js);
  CHECK(j["schema_version"] == 1);
  CHECK(j["input"] == "fifo:1");
  CHECK(j["warnings"].empty());
  CHECK(j["rts"]["nodes"] == 8);
  CHECK(j["rts"]["action_edges"] == 12);
  CHECK(j["rts"]["time_edges"] == 8);
  CHECK(j["rrts"]["time_edges"] == 4);
  CHECK(j["catastrophic"].is_null());
  for (const char* m : {"baseline", "improved"}) {
    CHECK(j["asymptotic"][m]["status"] == "ok");
    CHECK(j["asymptotic"][m]["performance"] == "2");
    CHECK(j["asymptotic"][m]["mean"] == "1/2");
    CHECK(j["asymptotic"][m]["witness"].is_array());
    CHECK(j["asymptotic"][m]["gprime_nodes"] ==
          j["asymptotic"][m]["g_nodes"]);
  }
  REQUIRE(j["rp"].size() == 2);
  CHECK(j["rp"][0]["n"] == 1);
  CHECK(j["rp"][0]["value"] == 2);
  CHECK(j["rp"][1]["value"] == 4);
  for (auto& s : j["rp"][0]["witness"]) {
    CHECK((s["kind"] == "act" || s["kind"] == "time"));
    CHECK(s["from"].is_number());
    CHECK(s["to"].is_number());
  }

  // Keys come out in a stable reading order.
  CHECK(js.find("\"schema_version\"") < js.find("\"input\""));
  CHECK(js.find("\"rts\"") < js.find("\"rrts\""));
  CHECK(js.find("\"catastrophic\"") < js.find("\"asymptotic\""));
  CHECK(js.find("\"asymptotic\"") < js.find("\"rp\""));

  std::string text = report_to_text(r, rr);
  CHECK(text.find("input: fifo:1\n") != std::string::npos);
  CHECK(text.find("RTS:  8 nodes, 12 action edges, 8 time edges\n") != std::string::npos);
  CHECK(text.find("RRTS: 8 nodes, 12 action edges, 4 time edges\n") != std::string::npos);
  CHECK(text.find("catastrophic: none\n") != std::string::npos);
  CHECK(text.find("asymptotic (baseline): 2 (minimum cycle mean 1/2)\n") != std::string::npos);
  CHECK(text.find("rp(1) = 2\n") != std::string::npos);
  CHECK(text.find("rp(2) = 4\n") != std::string::npos);
}

TEST_CASE("json report renders a catastrophic cycle when there is one") {
  TermTable tt;
  TermId p = parse1(tt, "(rec x. a.x) / {a}");
  static ProgramEnv empty;
  Semantics sem(tt, empty);
  Rts g = sem.build_rts(p);
  Rts rr = reduce_rts(g);
  PerfReport r;
  r.input = "loop";
  r.catastrophic = find_catastrophic(rr);
  REQUIRE(r.catastrophic.has_value());

  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["catastrophic"]["cycle"].is_array());
  CHECK(j["catastrophic"]["cycle"].size() == 2);

  std::string text = report_to_text(r, rr);
  CHECK(text.find("catastrophic: cycle at ") != std::string::npos);
}

TEST_CASE("file helpers report unusable paths") {
  CHECK_THROWS_AS(read_file("/nonexistent/nope.pafas"), IoError);
  CHECK_THROWS_AS(write_file("/nonexistent/nope.out", "x"), IoError);
  std::string path = "/tmp/pafas_io_test.txt";
  write_file(path, "payload\n");
  CHECK(read_file(path) == "payload\n");
}
