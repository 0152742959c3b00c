#include "pafas/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "pafas/errors.hpp"

namespace pafas {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// XML

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct XmlElem {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<XmlElem> kids;

  const std::string* attr(const std::string& key) const {
    for (const auto& [k, v] : attrs)
      if (k == key) return &v;
    return nullptr;
  }
  const std::string& need(const std::string& key) const {
    const std::string* v = attr(key);
    if (!v) throw WellFormedError("xml: <" + name + "> lacks attribute " + key);
    return *v;
  }
};

// Just enough XML for the schema above: elements, attributes, comments and
// a prolog; no text content, namespaces, CDATA or DTDs.
class XmlParser {
 public:
  explicit XmlParser(const std::string& src) : s_(src) {}

  XmlElem parse() {
    skip_misc();
    XmlElem root = element();
    skip_misc();
    if (pos_ != s_.size()) fail("trailing content after the root element");
    return root;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw WellFormedError("xml: " + msg + " (offset " + std::to_string(pos_) + ")");
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' ||
                                s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  bool starts(const char* p) const {
    return s_.compare(pos_, std::string::traits_type::length(p), p) == 0;
  }

  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts("<?")) {
        size_t e = s_.find("?>", pos_);
        if (e == std::string::npos) fail("unterminated prolog");
        pos_ = e + 2;
      } else if (starts("<!--")) {
        size_t e = s_.find("-->", pos_);
        if (e == std::string::npos) fail("unterminated comment");
        pos_ = e + 3;
      } else {
        return;
      }
    }
  }

  std::string name_token() {
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
            s_[pos_] == '-' || s_[pos_] == ':'))
      ++pos_;
    if (pos_ == start) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }

  std::string unescape(const std::string& v) {
    std::string out;
    for (size_t i = 0; i < v.size();) {
      if (v[i] != '&') {
        out += v[i++];
        continue;
      }
      size_t semi = v.find(';', i);
      if (semi == std::string::npos) fail("unterminated entity");
      std::string ent = v.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else fail("unknown entity &" + ent + ";");
      i = semi + 1;
    }
    return out;
  }

  XmlElem element() {
    if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected an element");
    ++pos_;
    XmlElem e;
    e.name = name_token();
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated tag");
      if (s_[pos_] == '/') {
        if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '>') fail("bad empty-element tag");
        pos_ += 2;
        return e;
      }
      if (s_[pos_] == '>') {
        ++pos_;
        break;
      }
      std::string key = name_token();
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected = in attribute");
      ++pos_;
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\''))
        fail("expected a quoted attribute value");
      char q = s_[pos_++];
      size_t end = s_.find(q, pos_);
      if (end == std::string::npos) fail("unterminated attribute value");
      e.attrs.emplace_back(std::move(key), unescape(s_.substr(pos_, end - pos_)));
      pos_ = end + 1;
    }
    while (true) {
      skip_misc();
      if (starts("</")) {
        pos_ += 2;
        std::string close = name_token();
        if (close != e.name) fail("mismatched </" + close + ">");
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '>') fail("bad closing tag");
        ++pos_;
        return e;
      }
      if (pos_ >= s_.size()) fail("missing </" + e.name + ">");
      if (s_[pos_] != '<') fail("unexpected text content");
      e.kids.push_back(element());
    }
  }
};

int32_t parse_id(const std::string& v, const char* what) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw WellFormedError(std::string("xml: bad ") + what + ": " + v);
  try {
    return static_cast<int32_t>(std::stol(v));
  } catch (const std::exception&) {
    throw WellFormedError(std::string("xml: ") + what + " out of range: " + v);
  }
}

}  // namespace

std::string rts_to_xml(const Rts& g) {
  std::ostringstream out;
  out << "<rts root=\"" << g.root << "\">\n";
  for (size_t i = 0; i < g.nodes.size(); ++i)
    out << "  <node id=\"" << i << "\" label=\"" << xml_escape(g.nodes[i].label)
        << "\"/>\n";
  for (size_t i = 0; i < g.nodes.size(); ++i)
    for (const auto& [a, to] : g.nodes[i].acts)
      out << "  <act from=\"" << i << "\" to=\"" << to << "\" label=\""
          << xml_escape(ActionTable::get().name(a)) << "\"/>\n";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (!g.nodes[i].time) continue;
    const TimeEdge& t = *g.nodes[i].time;
    out << "  <time from=\"" << i << "\" to=\"" << t.to << "\" full=\""
        << (t.full() ? "true" : "false") << "\"";
    if (t.forbid.empty()) {
      out << "/>\n";
    } else {
      out << ">";
      for (ActionId a : t.forbid)
        out << "<forbid a=\"" << xml_escape(ActionTable::get().name(a)) << "\"/>";
      out << "</time>\n";
    }
  }
  out << "</rts>\n";
  return out.str();
}

Rts rts_from_xml(const std::string& xml) {
  XmlElem root = XmlParser(xml).parse();
  if (root.name != "rts") throw WellFormedError("xml: expected <rts>, got <" + root.name + ">");
  Rts g;
  std::unordered_map<int32_t, int32_t> index;
  for (const XmlElem& k : root.kids) {
    if (k.name != "node") continue;
    int32_t id = parse_id(k.need("id"), "node id");
    if (!index.emplace(id, static_cast<int32_t>(g.nodes.size())).second)
      throw WellFormedError("xml: duplicate node id " + std::to_string(id));
    RtsNode node;
    if (const std::string* label = k.attr("label")) node.label = *label;
    g.nodes.push_back(std::move(node));
  }
  auto resolve = [&](int32_t id, const char* what) {
    auto it = index.find(id);
    if (it == index.end())
      throw WellFormedError(std::string("xml: ") + what + " refers to unknown node " +
                            std::to_string(id));
    return it->second;
  };
  int32_t root_id = parse_id(root.need("root"), "root");
  g.root = resolve(root_id, "root");
  for (const XmlElem& k : root.kids) {
    if (k.name == "node") continue;
    if (k.name == "act") {
      int32_t from = resolve(parse_id(k.need("from"), "act from"), "act");
      int32_t to = resolve(parse_id(k.need("to"), "act to"), "act");
      ActionId a = actions().intern(k.need("label"));
      g.nodes[from].acts.emplace_back(a, to);
    } else if (k.name == "time") {
      int32_t from = resolve(parse_id(k.need("from"), "time from"), "time");
      int32_t to = resolve(parse_id(k.need("to"), "time to"), "time");
      if (g.nodes[from].time)
        throw WellFormedError("xml: two time edges from node " + k.need("from"));
      TimeEdge t;
      t.to = to;
      for (const XmlElem& f : k.kids) {
        if (f.name != "forbid")
          throw WellFormedError("xml: unexpected <" + f.name + "> inside <time>");
        ActionId a = actions().intern(f.need("a"));
        if (a == kTau) throw WellFormedError("xml: tau cannot be forbidden");
        aset_insert(t.forbid, a);
      }
      const std::string& full = k.need("full");
      if (full != "true" && full != "false")
        throw WellFormedError("xml: full must be true or false");
      if ((full == "true") != t.forbid.empty())
        throw WellFormedError("xml: full flag disagrees with the forbid list");
      g.nodes[from].time = std::move(t);
    } else {
      throw WellFormedError("xml: unexpected <" + k.name + "> inside <rts>");
    }
  }
  for (RtsNode& n : g.nodes) std::sort(n.acts.begin(), n.acts.end());
  return g;
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string rts_to_dot(const Rts& g, const Path* highlight) {
  // Membership test for the highlighted path.
  auto on_path = [&](const Step& probe) {
    if (!highlight) return false;
    for (const Step& s : *highlight) {
      if (s.from != probe.from || s.to != probe.to || s.is_time != probe.is_time)
        continue;
      if (s.is_time ? s.forbid == probe.forbid : s.act == probe.act) return true;
    }
    return false;
  };
  std::ostringstream out;
  out << "digraph rts {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << dot_escape(g.nodes[i].label) << "\"";
    if (static_cast<int32_t>(i) == g.root) out << ", peripheries=2";
    out << "];\n";
  }
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    for (const auto& [a, to] : g.nodes[i].acts) {
      Step probe;
      probe.act = a;
      probe.from = static_cast<int32_t>(i);
      probe.to = to;
      out << "  n" << i << " -> n" << to << " [label=\""
          << dot_escape(ActionTable::get().name(a)) << "\"";
      if (on_path(probe)) out << ", color=red, penwidth=2";
      out << "];\n";
    }
    if (g.nodes[i].time) {
      const TimeEdge& t = *g.nodes[i].time;
      Step probe;
      probe.is_time = true;
      probe.forbid = t.forbid;
      probe.from = static_cast<int32_t>(i);
      probe.to = t.to;
      out << "  n" << i << " -> n" << t.to;
      if (t.full()) out << " [style=bold, label=\"1\"";
      else out << " [style=dashed, label=\"time" << dot_escape(aset_str(t.forbid)) << "\"";
      if (on_path(probe)) out << ", color=red, penwidth=2";
      out << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Reports

namespace {

nlohmann::ordered_json step_json(const Step& s) {
  nlohmann::ordered_json j;
  if (s.is_time) {
    j["kind"] = "time";
    nlohmann::ordered_json forbid = nlohmann::ordered_json::array();
    for (ActionId a : s.forbid) forbid.push_back(ActionTable::get().name(a));
    j["forbid"] = forbid;
  } else {
    j["kind"] = "act";
    j["label"] = ActionTable::get().name(s.act);
  }
  j["from"] = s.from;
  j["to"] = s.to;
  return j;
}

nlohmann::ordered_json path_json(const Path& p) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Step& s : p) arr.push_back(step_json(s));
  return arr;
}

const char* asym_status_str(AsymStatus s) {
  switch (s) {
    case AsymStatus::kOk: return "ok";
    case AsymStatus::kNoCycle: return "no-cycle";
    case AsymStatus::kZeroThroughput: return "zero-throughput";
  }
  return "?";
}

nlohmann::ordered_json asym_json(const AsymResult& a) {
  nlohmann::ordered_json j;
  j["status"] = asym_status_str(a.status);
  if (a.status == AsymStatus::kOk) {
    j["performance"] = a.performance.str();
    j["mean"] = a.mean.str();
  } else if (a.status == AsymStatus::kZeroThroughput) {
    j["mean"] = a.mean.str();
  }
  j["g_nodes"] = a.sizes.g_nodes;
  j["g_action_edges"] = a.sizes.g_action_edges;
  j["g_full_steps"] = a.sizes.g_full_steps;
  j["gprime_nodes"] = a.sizes.gp_nodes;
  j["gprime_edges"] = a.sizes.gp_edges;
  if (a.status != AsymStatus::kNoCycle) j["witness"] = path_json(a.witness);
  return j;
}

}  // namespace

std::string report_to_json(const PerfReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = PerfReport::kSchemaVersion;
  j["input"] = r.input;
  j["warnings"] = r.warnings;
  j["rts"] = {{"nodes", r.rts_nodes},
              {"action_edges", r.rts_action_edges},
              {"time_edges", r.rts_time_edges}};
  j["rrts"] = {{"nodes", r.rrts_nodes},
               {"action_edges", r.rrts_action_edges},
               {"time_edges", r.rrts_time_edges}};
  if (r.catastrophic) {
    j["catastrophic"] = {{"cycle", path_json(r.catastrophic->cycle)}};
  } else {
    j["catastrophic"] = nullptr;
  }
  nlohmann::ordered_json asym = nlohmann::ordered_json::object();
  for (const AsymEntry& e : r.asym) asym[e.method] = asym_json(e.result);
  j["asymptotic"] = asym;
  nlohmann::ordered_json rp = nlohmann::ordered_json::array();
  for (const RpEntry& e : r.rp)
    rp.push_back(nlohmann::ordered_json{
        {"n", e.n}, {"value", e.value}, {"witness", path_json(e.witness)}});
  j["rp"] = rp;
  return j.dump(2) + "\n";
}

std::string report_to_text(const PerfReport& r, const Rts& rrts) {
  std::ostringstream out;
  out << "input: " << r.input << "\n";
  for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
  out << "RTS:  " << r.rts_nodes << " nodes, " << r.rts_action_edges
      << " action edges, " << r.rts_time_edges << " time edges\n";
  out << "RRTS: " << r.rrts_nodes << " nodes, " << r.rrts_action_edges
      << " action edges, " << r.rrts_time_edges << " time edges\n";
  auto start_of = [&](const Path& p) -> std::string {
    if (p.empty()) return rrts.nodes[rrts.root].label;
    return rrts.nodes[p.front().from].label;
  };
  if (r.catastrophic) {
    out << "catastrophic: cycle at " << start_of(r.catastrophic->cycle) << ": "
        << path_str(r.catastrophic->cycle) << "\n";
  } else {
    out << "catastrophic: none\n";
  }
  for (const AsymEntry& e : r.asym) {
    out << "asymptotic (" << e.method << "): ";
    switch (e.result.status) {
      case AsymStatus::kOk:
        out << e.result.performance.str() << " (minimum cycle mean "
            << e.result.mean.str() << ")\n";
        out << "  worst cycle at " << start_of(e.result.witness) << ": "
            << path_str(e.result.witness) << "\n";
        break;
      case AsymStatus::kNoCycle:
        out << "undefined (no full-step cycle; the system quiesces)\n";
        break;
      case AsymStatus::kZeroThroughput:
        out << "zero-throughput cycle: " << path_str(e.result.witness) << "\n";
        break;
    }
    out << "  G: " << e.result.sizes.g_nodes << " nodes, "
        << e.result.sizes.g_action_edges << " action edges, "
        << e.result.sizes.g_full_steps << " full steps; G': "
        << e.result.sizes.gp_nodes << " nodes, " << e.result.sizes.gp_edges
        << " edges\n";
  }
  for (const RpEntry& e : r.rp) {
    out << "rp(" << e.n << ") = " << e.value << "\n";
    out << "  critical path: "
        << (e.witness.empty() ? std::string("(empty)") : path_str(e.witness))
        << "\n";
  }
  return out.str();
}

}  // namespace pafas
