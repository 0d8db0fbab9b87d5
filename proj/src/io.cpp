#include "bsip/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bsip/config.hpp"
#include "bsip/error.hpp"

namespace bsip {

namespace {

constexpr double kTimeTolerance = 1e-6;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

// Parses a numeric table with a fixed header into columns.
std::vector<std::vector<double>> parse_table(const std::string& text, const std::string& origin,
                                             const std::vector<std::string>& header, double rate) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  std::vector<std::vector<double>> cols(header.size());
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = strip(raw);
    if (body.empty()) continue;
    auto fields = split(body);
    if (!have_header) {
      for (auto& f : fields) f = strip(f);
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ParseError(origin, line, "header must be '" + expected + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(origin, line, "expected " + std::to_string(header.size()) + " fields, found " +
                                         std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      try {
        cols[c].push_back(parse_double(fields[c]));
      } catch (const InputError& e) {
        throw ParseError(origin, line, "column " + header[c] + ": " + e.what());
      }
    }
    const auto& t = cols[0];
    const std::size_t n = t.size();
    if (n >= 2) {
      if (!(t[n - 1] > t[n - 2])) throw ParseError(origin, line, "time is not strictly increasing");
      const double expected = t[0] + static_cast<double>(n - 1) / rate;
      if (std::abs(t[n - 1] - expected) > kTimeTolerance) {
        throw ParseError(origin, line, "sampling is not uniform at " + format_double(rate) + " Hz");
      }
    }
  }
  if (!have_header) throw ParseError(origin, 0, "missing header");
  if (cols[0].size() < 2) throw ParseError(origin, line, "need at least two samples");
  return cols;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MarkerRecord parse_markers(const std::string& text, const std::string& origin, double rate) {
  std::vector<std::string> header{"t"};
  for (std::size_t j = 1; j <= kLandmarks; ++j) {
    header.push_back("x" + std::to_string(j));
    header.push_back("y" + std::to_string(j));
  }
  auto cols = parse_table(text, origin, header, rate);
  MarkerRecord m;
  m.rate = rate;
  m.time = std::move(cols[0]);
  for (std::size_t j = 0; j < kLandmarks; ++j) {
    m.landmarks[j].x = std::move(cols[1 + 2 * j]);
    m.landmarks[j].y = std::move(cols[2 + 2 * j]);
  }
  return m;
}

ForceRecord parse_forces(const std::string& text, const std::string& origin, double rate) {
  auto cols = parse_table(text, origin, {"t", "Rx", "Ry", "C"}, rate);
  ForceRecord f;
  f.rate = rate;
  f.time = std::move(cols[0]);
  f.rx = std::move(cols[1]);
  f.ry = std::move(cols[2]);
  f.torque = std::move(cols[3]);
  return f;
}

MarkerRecord ingest_markers(const std::string& path, double rate) {
  return parse_markers(read_text_file(path), path, rate);
}

ForceRecord ingest_forces(const std::string& path, double rate) {
  return parse_forces(read_text_file(path), path, rate);
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InputError("CSV header and column count differ");
  const std::size_t n = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns) {
    if (c.size() != n) throw InputError("CSV columns have different lengths");
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][i]);
    }
    out += '\n';
  }
  return out;
}

std::string format_markers(const MarkerRecord& m) {
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{m.time};
  for (std::size_t j = 0; j < kLandmarks; ++j) {
    header.push_back("x" + std::to_string(j + 1));
    header.push_back("y" + std::to_string(j + 1));
    cols.push_back(m.landmarks[j].x);
    cols.push_back(m.landmarks[j].y);
  }
  return format_csv(header, cols);
}

std::string format_forces(const ForceRecord& f) {
  return format_csv({"t", "Rx", "Ry", "C"}, {f.time, f.rx, f.ry, f.torque});
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace bsip
