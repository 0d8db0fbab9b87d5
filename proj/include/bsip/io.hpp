#pragma once

#include <string>
#include <vector>

#include "bsip/trial.hpp"

namespace bsip {

// Marker CSV: header `t,x1,y1,x2,y2,x3,y3,x4,y4,x5,y5`, seconds and meters.
// Force CSV: header `t,Rx,Ry,C`, SI units. Both must be uniformly sampled at
// the expected rate (tolerance 1e-6 s). Every failure is a ParseError carrying
// the 1-based line number.
MarkerRecord parse_markers(const std::string& text, const std::string& origin = "<string>",
                           double rate = 100.0);
ForceRecord parse_forces(const std::string& text, const std::string& origin = "<string>",
                         double rate = 1000.0);
MarkerRecord ingest_markers(const std::string& path, double rate = 100.0);
ForceRecord ingest_forces(const std::string& path, double rate = 1000.0);

std::string format_markers(const MarkerRecord& m);
std::string format_forces(const ForceRecord& f);

// %.17g
std::string format_double(double v);

// Header line plus one row per index; columns must have equal length.
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bsip
