#pragma once

#include <string>

#include "pafas/report.hpp"
#include "pafas/rts.hpp"

namespace pafas {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Lossless graph interchange:
//   <rts root="0">
//     <node id="0" label="..."/> ...
//     <act from="0" to="1" label="in"/> ...
//     <time from="0" to="2" full="false"><forbid a="in"/></time> ...
//   </rts>
std::string rts_to_xml(const Rts& g);
Rts rts_from_xml(const std::string& xml);

// Graphviz view; full time steps are drawn bold, refusal-constrained ones
// dashed with their forbidden set. highlight, when given, colors that path.
std::string rts_to_dot(const Rts& g, const Path* highlight = nullptr);

std::string report_to_json(const PerfReport& r);
std::string report_to_text(const PerfReport& r, const Rts& rrts);

}  // namespace pafas
