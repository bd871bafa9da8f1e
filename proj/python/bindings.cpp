#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pointproc/cluster.hpp"
#include "pointproc/spatial.hpp"
#include "pointproc/temporal.hpp"

namespace py = pybind11;
using namespace pointproc;

namespace {

using XY = std::pair<double, double>;
using Bounds = std::tuple<double, double, double, double>;

Region region_of(const Bounds& b) {
  return Region(std::get<0>(b), std::get<1>(b), std::get<2>(b), std::get<3>(b));
}

SpatialPattern pattern_of(const std::vector<XY>& xy, const Bounds& b) {
  std::vector<Point> pts;
  pts.reserve(xy.size());
  for (const auto& [x, y] : xy) pts.push_back({x, y});
  return SpatialPattern(std::move(pts), region_of(b));
}

std::vector<XY> xy_of(const SpatialPattern& p) {
  std::vector<XY> out;
  for (const auto& q : p.points()) out.emplace_back(q.x, q.y);
  return out;
}

std::vector<double> times_of(const EventTimes& ev) {
  return {ev.times().begin(), ev.times().end()};
}

StatisticConfig config_of(const std::string& statistic, const std::string& correction) {
  StatisticConfig c;
  if (statistic == "g") c.statistic = Statistic::G;
  else if (statistic == "f") c.statistic = Statistic::F;
  else if (statistic == "k") c.statistic = Statistic::K;
  else throw ParameterError("statistic must be g, f or k");
  if (correction == "border") c.correction = EdgeCorrection::border;
  else if (correction != "none") throw ParameterError("correction must be none or border");
  return c;
}

EdgeCorrection correction_of(const std::string& s) {
  return config_of("k", s).correction;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Point process simulation and spatial statistics";

  static py::exception<Error> error(m, "PointprocError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", py::overload_cast<>(&RngStream::uniform))
      .def("next_u64", &RngStream::next_u64)
      .def_property_readonly("seed", &RngStream::seed);

  // Temporal
  m.def("poisson_count_pmf", &poisson_count_pmf, py::arg("rate"), py::arg("a"), py::arg("b"),
        py::arg("n"));
  m.def("inter_arrival_times",
        [](std::vector<double> t, double horizon) {
          return inter_arrival_times(EventTimes(std::move(t), horizon));
        },
        py::arg("times"), py::arg("horizon"));
  m.def("simulate_hpp",
        [](double rate, double horizon, RngStream& rng) {
          return times_of(simulate_hpp(rate, horizon, rng));
        },
        py::arg("rate"), py::arg("horizon"), py::arg("rng"));

  py::class_<IntensityFn>(m, "IntensityFn")
      .def_static("constant", &IntensityFn::constant, py::arg("rate"), py::arg("horizon"))
      .def_static("piecewise_linear", &IntensityFn::piecewise_linear, py::arg("knots"))
      .def_static("sinusoid", &IntensityFn::sinusoid, py::arg("base"), py::arg("amplitude"),
                  py::arg("period"), py::arg("horizon"), py::arg("segments_per_period") = 8)
      .def("__call__", &IntensityFn::operator())
      .def_property_readonly("horizon", &IntensityFn::horizon);
  m.def("simulate_nhpp",
        [](const IntensityFn& f, double horizon, RngStream& rng) {
          return times_of(simulate_nhpp(f, horizon, rng));
        },
        py::arg("intensity"), py::arg("horizon"), py::arg("rng"));
  m.def("nhpp_mean", &nhpp_mean, py::arg("intensity"), py::arg("t1"), py::arg("t2"));

  m.def("branching_factor",
        [](double alpha, double beta) {
          const auto b = branching_factor(HawkesModel(1.0, ExponentialKernel{alpha, beta}));
          return py::make_tuple(b.n_star, to_string(b.regime));
        },
        py::arg("alpha"), py::arg("beta"));
  m.def("branching_factor_power_law",
        [](double alpha, double delta, double eta) {
          const auto b = branching_factor(HawkesModel(1.0, PowerLawKernel{alpha, delta, eta}));
          return py::make_tuple(b.n_star, to_string(b.regime));
        },
        py::arg("alpha"), py::arg("delta"), py::arg("eta"));
  m.def("expected_cluster_size", &expected_cluster_size, py::arg("n_star"));
  m.def("simulate_hawkes",
        [](double mu, double alpha, double beta, double horizon, RngStream& rng,
           std::size_t max_events) {
          HawkesSimOptions opt;
          opt.max_events = max_events;
          opt.warn = [](const std::string& w) {
            PyErr_WarnEx(PyExc_RuntimeWarning, w.c_str(), 1);
          };
          return times_of(
              simulate_hawkes(HawkesModel(mu, ExponentialKernel{alpha, beta}), horizon, rng, opt));
        },
        py::arg("mu"), py::arg("alpha"), py::arg("beta"), py::arg("horizon"), py::arg("rng"),
        py::arg("max_events") = 10'000'000);

  // Spatial. Patterns are lists of (x, y); regions are (xmin, xmax, ymin, ymax).
  const Bounds unit{0.0, 1.0, 0.0, 1.0};
  m.def("simulate_csr",
        [](double rate, const Bounds& b, RngStream& rng) {
          return xy_of(simulate_csr(rate, region_of(b), rng));
        },
        py::arg("rate"), py::arg("region") = unit, py::arg("rng"));
  m.def("kde_surface",
        [](const std::vector<XY>& xy, double bandwidth, std::size_t nx, std::size_t ny,
           const Bounds& b) {
          const auto p = pattern_of(xy, b);
          return kde_surface(p, GridSpec(p.region(), nx, ny), bandwidth).values;
        },
        py::arg("points"), py::arg("bandwidth"), py::arg("nx") = 50, py::arg("ny") = 50,
        py::arg("region") = unit);
  m.def("quadrat_test",
        [](const std::vector<XY>& xy, std::size_t nx, std::size_t ny, const Bounds& b) {
          const auto p = pattern_of(xy, b);
          const auto q = quadrat_counts(p, GridSpec(p.region(), nx, ny));
          const auto c = q.counts.counts();
          return py::make_tuple(std::vector<std::int64_t>(c.begin(), c.end()), q.chi_square,
                                q.df, q.p_value);
        },
        py::arg("points"), py::arg("nx") = 5, py::arg("ny") = 5, py::arg("region") = unit);
  m.def("mean_min_distance",
        [](const std::vector<XY>& xy, const Bounds& b) {
          return mean_min_distance(pattern_of(xy, b));
        },
        py::arg("points"), py::arg("region") = unit);
  m.def("nni", [](const std::vector<XY>& xy, const Bounds& b) { return nni(pattern_of(xy, b)); },
        py::arg("points"), py::arg("region") = unit);
  m.def("g_function",
        [](const std::vector<XY>& xy, const std::vector<double>& r, const Bounds& b) {
          return g_function(pattern_of(xy, b), r);
        },
        py::arg("points"), py::arg("radii"), py::arg("region") = unit);
  m.def("f_function",
        [](const std::vector<XY>& xy, const std::vector<double>& r, std::size_t probe_nx,
           std::size_t probe_ny, const Bounds& b) {
          const auto p = pattern_of(xy, b);
          return f_function(p, GridSpec(p.region(), probe_nx, probe_ny), r);
        },
        py::arg("points"), py::arg("radii"), py::arg("probe_nx") = 50,
        py::arg("probe_ny") = 50, py::arg("region") = unit);
  m.def("ripleys_k",
        [](const std::vector<XY>& xy, const std::vector<double>& r,
           const std::string& correction, const Bounds& b) {
          return ripleys_k(pattern_of(xy, b), r, correction_of(correction));
        },
        py::arg("points"), py::arg("radii"), py::arg("correction") = "none",
        py::arg("region") = unit);
  m.def("csr_envelope",
        [](const std::vector<XY>& xy, const std::vector<double>& r, const std::string& statistic,
           std::size_t nsim, RngStream& rng, const std::string& correction, const Bounds& b,
           std::size_t threads) {
          const auto e = csr_envelope(pattern_of(xy, b), config_of(statistic, correction), r,
                                      nsim, rng, threads);
          py::dict d;
          d["r"] = e.distances;
          d["observed"] = e.observed;
          d["lower"] = e.lower;
          d["upper"] = e.upper;
          return d;
        },
        py::arg("points"), py::arg("radii"), py::arg("statistic"), py::arg("nsim"),
        py::arg("rng"), py::arg("correction") = "none", py::arg("region") = unit,
        py::arg("threads") = 1);

  // Cluster detection.
  m.def("rss",
        [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
           std::size_t nx, std::size_t ny) {
          const GridSpec g(Region(), nx, ny);
          return rss(CountGrid(g, a), CountGrid(g, b));
        },
        py::arg("a"), py::arg("b"), py::arg("nx"), py::arg("ny"));
  m.def("gi_star",
        [](const std::vector<XY>& xy, std::size_t nx, std::size_t ny, double radius,
           const Bounds& b) {
          const auto p = pattern_of(xy, b);
          const GridSpec g(p.region(), nx, ny);
          return gi_star(aggregate_to_grid(p, g), radius).z;
        },
        py::arg("points"), py::arg("nx"), py::arg("ny"), py::arg("radius"),
        py::arg("region") = unit);
  m.def("space_time_scan",
        [](const std::vector<std::tuple<double, double, double>>& xyt, double horizon,
           std::size_t nx, std::size_t ny, std::size_t slices, std::size_t lattice_nx,
           std::size_t lattice_ny, std::vector<double> radii, std::vector<double> durations,
           std::size_t nsim, RngStream& rng, const Bounds& b, std::size_t threads) {
          const auto region = region_of(b);
          std::vector<SpaceTimePoint> ev;
          for (const auto& [x, y, t] : xyt) ev.push_back({x, y, t});
          const auto base = ScanBaseline::uniform(GridSpec(region, nx, ny), slices, horizon);
          const ScanConfig cfg{GridSpec(region, lattice_nx, lattice_ny), std::move(radii),
                               std::move(durations), nsim, threads};
          py::list out;
          for (const auto& r :
               space_time_scan(SpaceTimeEvents(std::move(ev), region, horizon), base, cfg, rng)) {
            py::dict d;
            d["cx"] = r.cylinder.cx;
            d["cy"] = r.cylinder.cy;
            d["radius"] = r.cylinder.radius;
            d["t_start"] = r.cylinder.t_start;
            d["t_end"] = r.cylinder.t_end;
            d["observed"] = r.observed;
            d["expected"] = r.expected;
            d["llr"] = r.llr;
            d["p_value"] = r.p_value;
            out.append(d);
          }
          return out;
        },
        py::arg("events"), py::arg("horizon") = 1.0, py::arg("nx") = 20, py::arg("ny") = 20,
        py::arg("slices") = 10, py::arg("lattice_nx") = 10, py::arg("lattice_ny") = 10,
        py::arg("radii") = std::vector<double>{0.05, 0.1, 0.15, 0.2},
        py::arg("durations") = std::vector<double>{0.1, 0.2, 0.3, 0.4}, py::arg("nsim") = 999,
        py::arg("rng"), py::arg("region") = unit, py::arg("threads") = 1);
}
