#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pointproc/cluster.hpp"
#include "pointproc/core.hpp"
#include "pointproc/spatial.hpp"

namespace pointproc::io {

// Fixed 17-significant-digit rendering used for every numeric output.
std::string format_number(double v);

// Parsed CSV table. `line_of[i]` is the 1-based file line of row i.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_of;

  // Column position by name; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(std::istream& in);

// CSV `t`, one ascending time per row.
EventTimes read_event_times(std::istream& in, double horizon);
void write_event_times(std::ostream& out, const EventTimes& ev);

// CSV `x,y`.
SpatialPattern read_pattern_csv(std::istream& in, const Region& region);
void write_pattern_csv(std::ostream& out, const SpatialPattern& pattern);

// CSV `x,y,t`.
SpaceTimeEvents read_space_time_csv(std::istream& in, const Region& region,
                                    double horizon);
void write_space_time_csv(std::ostream& out, const SpaceTimeEvents& events);

// GeoJSON FeatureCollection of Point features; `t` read from properties.
SpatialPattern read_pattern_geojson(std::istream& in, const Region& region);
SpaceTimeEvents read_space_time_geojson(std::istream& in, const Region& region,
                                        double horizon);

// Grid export `cell_x,cell_y,<value_name>`, one row per cell in flat order.
void write_grid(std::ostream& out, const GridSpec& spec,
                std::span<const double> values,
                const std::string& value_name = "value");
void write_count_grid(std::ostream& out, const CountGrid& grid);
CountGrid read_count_grid(std::istream& in, const GridSpec& spec);

// Curve export `r,observed` or `r,observed,lower,upper`.
void write_curve(std::ostream& out, std::span<const double> radii,
                 std::span<const double> observed);
void write_envelope(std::ostream& out, const EnvelopeResult& env);

// `cx,cy,radius,t_start,t_end,observed,expected,llr,p_value`.
void write_scan_results(std::ostream& out, std::span<const ScanResult> results);

}  // namespace pointproc::io
