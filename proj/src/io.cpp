#include "pointproc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace pointproc::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(ws);
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError("missing CSV column '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const auto& cell = rows.at(row).at(col);
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ParseError(at_line(line_of[row]) + "'" + cell + "' is not a finite number");
  }
  return v;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(at_line(lineno) + "expected " +
                       std::to_string(t.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_of.push_back(lineno);
  }
  return t;
}

EventTimes read_event_times(std::istream& in, double horizon) {
  const auto t = read_csv(in);
  if (t.header.empty()) return EventTimes({}, horizon);
  const auto c = t.column("t");
  std::vector<double> times;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double v = t.number(r, c);
    if (!times.empty() && !(v > times.back())) {
      throw ParseError(at_line(t.line_of[r]) + "event times must be strictly increasing");
    }
    if (!(v > 0.0) || v > horizon) {
      throw ParseError(at_line(t.line_of[r]) + "event time outside (0, horizon]");
    }
    times.push_back(v);
  }
  return EventTimes(std::move(times), horizon);
}

void write_event_times(std::ostream& out, const EventTimes& ev) {
  out << "t\n";
  for (double v : ev.times()) out << format_number(v) << '\n';
}

SpatialPattern read_pattern_csv(std::istream& in, const Region& region) {
  const auto t = read_csv(in);
  if (t.header.empty()) return SpatialPattern({}, region);
  const auto cx = t.column("x");
  const auto cy = t.column("y");
  std::vector<Point> pts;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Point p{t.number(r, cx), t.number(r, cy)};
    if (!region.contains(p)) {
      throw OutOfBoundsError(at_line(t.line_of[r]) + "point lies outside the region");
    }
    pts.push_back(p);
  }
  return SpatialPattern(std::move(pts), region);
}

void write_pattern_csv(std::ostream& out, const SpatialPattern& pattern) {
  out << "x,y\n";
  for (const auto& p : pattern.points()) {
    out << format_number(p.x) << ',' << format_number(p.y) << '\n';
  }
}

SpaceTimeEvents read_space_time_csv(std::istream& in, const Region& region,
                                    double horizon) {
  const auto t = read_csv(in);
  if (t.header.empty()) return SpaceTimeEvents({}, region, horizon);
  const auto cx = t.column("x");
  const auto cy = t.column("y");
  const auto ct = t.column("t");
  std::vector<SpaceTimePoint> ev;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    SpaceTimePoint e{t.number(r, cx), t.number(r, cy), t.number(r, ct)};
    if (!region.contains({e.x, e.y}) || e.t < 0.0 || e.t > horizon) {
      throw OutOfBoundsError(at_line(t.line_of[r]) +
                             "event lies outside the region or [0, horizon]");
    }
    ev.push_back(e);
  }
  return SpaceTimeEvents(std::move(ev), region, horizon);
}

void write_space_time_csv(std::ostream& out, const SpaceTimeEvents& events) {
  out << "x,y,t\n";
  for (const auto& e : events.events()) {
    out << format_number(e.x) << ',' << format_number(e.y) << ','
        << format_number(e.t) << '\n';
  }
}

namespace {

std::vector<SpaceTimePoint> geojson_points(std::istream& in, bool need_time) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid GeoJSON: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
    throw ParseError("GeoJSON input must be a FeatureCollection");
  }
  std::vector<SpaceTimePoint> out;
  std::size_t i = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = "feature " + std::to_string(i++) + ": ";
    const auto& g = f.contains("geometry") ? f["geometry"] : nlohmann::json();
    if (!g.is_object() || g.value("type", "") != "Point") {
      throw ParseError(where + "geometry must be a Point");
    }
    const auto& c = g["coordinates"];
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ParseError(where + "Point needs numeric [x, y] coordinates");
    }
    SpaceTimePoint p{c[0].get<double>(), c[1].get<double>(), 0.0};
    if (need_time) {
      const auto props = f.value("properties", nlohmann::json::object());
      if (!props.contains("t") || !props["t"].is_number()) {
        throw ParseError(where + "missing numeric property 't'");
      }
      p.t = props["t"].get<double>();
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

SpatialPattern read_pattern_geojson(std::istream& in, const Region& region) {
  std::vector<Point> pts;
  for (const auto& p : geojson_points(in, false)) pts.push_back({p.x, p.y});
  return SpatialPattern(std::move(pts), region);
}

SpaceTimeEvents read_space_time_geojson(std::istream& in, const Region& region,
                                        double horizon) {
  return SpaceTimeEvents(geojson_points(in, true), region, horizon);
}

void write_grid(std::ostream& out, const GridSpec& spec,
                std::span<const double> values, const std::string& value_name) {
  if (values.size() != spec.cell_count()) throw ShapeError("grid value count mismatch");
  out << "cell_x,cell_y," << value_name << '\n';
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto c = spec.unflat(k);
    out << c.ix << ',' << c.iy << ',' << format_number(values[k]) << '\n';
  }
}

void write_count_grid(std::ostream& out, const CountGrid& grid) {
  out << "cell_x,cell_y,value\n";
  const auto counts = grid.counts();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto c = grid.spec().unflat(k);
    out << c.ix << ',' << c.iy << ',' << counts[k] << '\n';
  }
}

CountGrid read_count_grid(std::istream& in, const GridSpec& spec) {
  const auto t = read_csv(in);
  const auto cx = t.column("cell_x");
  const auto cy = t.column("cell_y");
  const auto cv = t.column("value");
  CountGrid grid(spec);
  std::vector<bool> seen(spec.cell_count(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double x = t.number(r, cx);
    const double y = t.number(r, cy);
    const double v = t.number(r, cv);
    if (x < 0 || y < 0 || x != std::floor(x) || y != std::floor(y) ||
        x >= static_cast<double>(spec.nx()) || y >= static_cast<double>(spec.ny())) {
      throw ParseError(at_line(t.line_of[r]) + "cell index outside the grid");
    }
    if (v < 0 || v != std::floor(v)) {
      throw ParseError(at_line(t.line_of[r]) + "count must be a non-negative integer");
    }
    const auto ix = static_cast<std::size_t>(x);
    const auto iy = static_cast<std::size_t>(y);
    if (seen[spec.flat({ix, iy})]) {
      throw ParseError(at_line(t.line_of[r]) + "duplicate cell");
    }
    seen[spec.flat({ix, iy})] = true;
    grid.at(ix, iy) = static_cast<std::int64_t>(v);
  }
  return grid;
}

void write_curve(std::ostream& out, std::span<const double> radii,
                 std::span<const double> observed) {
  out << "r,observed\n";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    out << format_number(radii[i]) << ',' << format_number(observed[i]) << '\n';
  }
}

void write_envelope(std::ostream& out, const EnvelopeResult& env) {
  out << "r,observed,lower,upper\n";
  for (std::size_t i = 0; i < env.distances.size(); ++i) {
    out << format_number(env.distances[i]) << ',' << format_number(env.observed[i])
        << ',' << format_number(env.lower[i]) << ',' << format_number(env.upper[i])
        << '\n';
  }
}

void write_scan_results(std::ostream& out, std::span<const ScanResult> results) {
  out << "cx,cy,radius,t_start,t_end,observed,expected,llr,p_value\n";
  for (const auto& r : results) {
    const auto& c = r.cylinder;
    out << format_number(c.cx) << ',' << format_number(c.cy) << ','
        << format_number(c.radius) << ',' << format_number(c.t_start) << ','
        << format_number(c.t_end) << ',' << r.observed << ','
        << format_number(r.expected) << ',' << format_number(r.llr) << ','
        << format_number(r.p_value) << '\n';
  }
}

}  // namespace pointproc::io
