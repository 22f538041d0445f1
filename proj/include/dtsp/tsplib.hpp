#pragma once

// Reader and writer for the subset of TSPLIB used here: NAME, TYPE : TSP,
// COMMENT, DIMENSION, EDGE_WEIGHT_TYPE : EUC_2D (or the EUC_2D_REAL
// extension for unrounded distances), NODE_COORD_SECTION with 1-based
// "index x y" lines, EOF.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"

namespace dtsp {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// %.17g round-trips every double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  // from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline Instance parse_tsplib(std::istream& in) {
  std::string name = "instance";
  std::optional<std::size_t> dimension;
  std::optional<MetricKind> kind;
  std::vector<std::optional<Point>> coords;
  std::size_t coord_count = 0;
  bool in_coords = false;
  std::size_t line_no = 0;
  std::size_t section_line = 0;

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;

    if (detail::upper(line) == "EOF") break;

    if (in_coords) {
      const auto fields = detail::split_ws(line);
      if (fields.size() != 3) {
        throw ParseError(line_no, "expected 'index x y' in NODE_COORD_SECTION");
      }
      const auto index = detail::parse_int(fields[0]);
      const auto x = detail::parse_double(fields[1]);
      const auto y = detail::parse_double(fields[2]);
      if (!index || !x || !y) throw ParseError(line_no, "malformed coordinate line");
      if (*index < 1 || static_cast<std::size_t>(*index) > *dimension) {
        throw ParseError(line_no, "node index " + std::to_string(*index) +
                                      " outside 1.." + std::to_string(*dimension));
      }
      auto& slot = coords[static_cast<std::size_t>(*index - 1)];
      if (slot) throw ParseError(line_no, "duplicate node index " + std::to_string(*index));
      if (!std::isfinite(*x) || !std::isfinite(*y)) {
        throw ParseError(line_no, "non-finite coordinate");
      }
      slot = Point{*x, *y};
      ++coord_count;
      continue;
    }

    const std::string keyword_line = detail::upper(line);
    if (keyword_line == "NODE_COORD_SECTION" || keyword_line.rfind("NODE_COORD_SECTION", 0) == 0) {
      if (!dimension) throw ParseError(line_no, "NODE_COORD_SECTION before DIMENSION");
      if (!kind) throw ParseError(line_no, "NODE_COORD_SECTION before EDGE_WEIGHT_TYPE");
      coords.assign(*dimension, std::nullopt);
      in_coords = true;
      section_line = line_no;
      continue;
    }

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected 'KEYWORD : value', got '" + std::string(line) + "'");
    }
    const std::string key = detail::upper(detail::trim(line.substr(0, colon)));
    const std::string_view value = detail::trim(line.substr(colon + 1));

    if (key == "NAME") {
      name = std::string(value);
    } else if (key == "COMMENT" || key == "DISPLAY_DATA_TYPE") {
      // informational only
    } else if (key == "TYPE") {
      if (detail::upper(value) != "TSP") {
        throw ParseError(line_no, "unsupported TYPE '" + std::string(value) + "'");
      }
    } else if (key == "DIMENSION") {
      const auto d = detail::parse_int(value);
      if (!d || *d < 1) throw ParseError(line_no, "DIMENSION must be a positive integer");
      dimension = static_cast<std::size_t>(*d);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      const std::string v = detail::upper(value);
      if (v == "EUC_2D") {
        kind = MetricKind::EuclidRoundedTSPLIB;
      } else if (v == "EUC_2D_REAL") {
        kind = MetricKind::EuclidReal;
      } else {
        throw ParseError(line_no, "unsupported EDGE_WEIGHT_TYPE '" + std::string(value) + "'");
      }
    } else {
      throw ParseError(line_no, "unsupported keyword '" + key + "'");
    }
  }

  if (!in_coords) throw ParseError(line_no, "missing NODE_COORD_SECTION");
  if (coord_count != *dimension) {
    throw ParseError(line_no, "DIMENSION is " + std::to_string(*dimension) + " but " +
                                  std::to_string(coord_count) +
                                  " coordinate lines follow NODE_COORD_SECTION (line " +
                                  std::to_string(section_line) + ")");
  }
  std::vector<Point> points;
  points.reserve(coords.size());
  for (const auto& c : coords) points.push_back(*c);
  return Instance::from_points(std::move(points), *kind, name);
}

inline Instance parse_tsplib(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_tsplib(in);
}

inline void write_tsplib(const Instance& inst, std::ostream& out) {
  if (inst.kind() == MetricKind::ExplicitMatrix || !inst.has_points()) {
    throw ConfigError("write_tsplib: only coordinate instances can be written");
  }
  out << "NAME : " << inst.name() << '\n'
      << "TYPE : TSP\n"
      << "DIMENSION : " << inst.size() << '\n'
      << "EDGE_WEIGHT_TYPE : "
      << (inst.kind() == MetricKind::EuclidRoundedTSPLIB ? "EUC_2D" : "EUC_2D_REAL") << '\n'
      << "NODE_COORD_SECTION\n";
  const auto& pts = inst.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << (i + 1) << ' ' << detail::format_double(pts[i].x) << ' '
        << detail::format_double(pts[i].y) << '\n';
  }
  out << "EOF\n";
}

inline std::string write_tsplib(const Instance& inst) {
  std::ostringstream out;
  write_tsplib(inst, out);
  return out.str();
}

// TSPLIB TOUR_SECTION: 1-based indices, -1 terminator.
inline void write_tour_tsplib(const std::vector<Node>& order, const std::string& name,
                              std::ostream& out) {
  out << "NAME : " << name << ".tour\n"
      << "TYPE : TOUR\n"
      << "DIMENSION : " << order.size() << '\n'
      << "TOUR_SECTION\n";
  for (Node v : order) out << (std::size_t{v} + 1) << '\n';
  out << "-1\nEOF\n";
}

// One 0-based index per line.
inline void write_tour_plain(const std::vector<Node>& order, std::ostream& out) {
  for (Node v : order) out << v << '\n';
}

}  // namespace dtsp
