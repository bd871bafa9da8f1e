#include "cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pointproc/cluster.hpp"
#include "pointproc/io.hpp"
#include "pointproc/spatial.hpp"
#include "pointproc/temporal.hpp"

namespace pointproc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Params = std::map<std::string, std::string>;

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameter parsing. Every flag is kept as its literal string so the manifest
// can replay the exact invocation.

const std::string& raw(const Params& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end() || it->second.empty()) {
    throw UsageError("missing required option --" + key);
  }
  return it->second;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw UsageError(what + ": '" + s + "' is not a finite number");
  }
  return v;
}

double number(const Params& p, const std::string& key) {
  return parse_double(raw(p, key), "--" + key);
}

std::size_t whole(const Params& p, const std::string& key) {
  const auto& s = raw(p, key);
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw UsageError("--" + key + ": '" + s + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "a:b:n" gives n evenly spaced values from a to b; otherwise a comma list.
std::vector<double> number_list(const Params& p, const std::string& key) {
  const auto& s = raw(p, key);
  const auto parts = split_list(s, ':');
  if (parts.size() == 3 && s.find(',') == std::string::npos) {
    const double a = parse_double(parts[0], "--" + key);
    const double b = parse_double(parts[1], "--" + key);
    const double n = parse_double(parts[2], "--" + key);
    if (n < 1 || n != std::floor(n)) {
      throw UsageError("--" + key + ": count in a:b:n must be a positive integer");
    }
    const auto count = static_cast<std::size_t>(n);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = count == 1 ? a
                          : a + (b - a) * static_cast<double>(i) /
                                    static_cast<double>(count - 1);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item, "--" + key));
  if (out.empty()) throw UsageError("--" + key + " is empty");
  return out;
}

Region region_of(const Params& p) {
  const auto v = number_list(p, "region");
  if (v.size() != 4) throw UsageError("--region expects xmin,xmax,ymin,ymax");
  return Region(v[0], v[1], v[2], v[3]);
}

bool is_geojson(const Params& p) {
  const auto fmt = p.count("format") ? p.at("format") : std::string("auto");
  if (fmt == "csv") return false;
  if (fmt == "geojson") return true;
  if (fmt != "auto") throw UsageError("--format must be auto, csv or geojson");
  const auto ext = fs::path(raw(p, "input")).extension().string();
  return ext == ".geojson" || ext == ".json";
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  return in;
}

SpatialPattern load_pattern(const Params& p) {
  auto in = open_input(raw(p, "input"));
  return is_geojson(p) ? io::read_pattern_geojson(in, region_of(p))
                       : io::read_pattern_csv(in, region_of(p));
}

// ---------------------------------------------------------------------------
// Run context: output bookkeeping and manifest diagnostics.

class Context {
 public:
  Context(fs::path dir, std::uint64_t seed, std::size_t threads, std::ostream& diag)
      : dir_(std::move(dir)), seed_(seed), threads_(threads), diag_(diag) {}

  std::uint64_t seed() const { return seed_; }
  std::size_t threads() const { return threads_; }
  json& diagnostics() { return diagnostics_; }
  const std::vector<std::string>& outputs() const { return names_; }

  void warn(const std::string& msg) { diag_ << "warning: " << msg << '\n'; }

  void write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const fs::path path = dir_ / name;
    written_.push_back(path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("io", "cannot write '" + path.string() + "'");
    fill(f);
    f.close();
    if (!f) throw Error("io", "failed writing '" + path.string() + "'");
    names_.push_back(name);
  }

  void rollback() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  fs::path dir_;
  std::uint64_t seed_;
  std::size_t threads_;
  std::ostream& diag_;
  json diagnostics_ = json::object();
  std::vector<fs::path> written_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// simulate

void simulate_hpp_cmd(const Params& p, Context& ctx) {
  RngStream rng(ctx.seed());
  const auto ev = simulate_hpp(number(p, "rate"), number(p, "horizon"), rng);
  ctx.diagnostics()["events"] = ev.size();
  ctx.write("events.csv", [&](std::ostream& o) { io::write_event_times(o, ev); });
}

IntensityFn intensity_of(const Params& p, double horizon) {
  const auto& kind = raw(p, "intensity");
  if (kind == "constant") return IntensityFn::constant(number(p, "rate"), horizon);
  if (kind == "sinusoid") {
    return IntensityFn::sinusoid(number(p, "base"), number(p, "amplitude"),
                                 number(p, "period"), horizon,
                                 whole(p, "segments-per-period"));
  }
  if (kind == "piecewise") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& item : split_list(raw(p, "knots"))) {
      const auto tr = split_list(item, ':');
      if (tr.size() != 2) throw UsageError("--knots expects t:rate pairs");
      knots.emplace_back(parse_double(tr[0], "--knots"), parse_double(tr[1], "--knots"));
    }
    return IntensityFn::piecewise_linear(std::move(knots));
  }
  throw UsageError("--intensity must be constant, piecewise or sinusoid");
}

void simulate_nhpp_cmd(const Params& p, Context& ctx) {
  const double horizon = number(p, "horizon");
  const auto intensity = intensity_of(p, horizon);
  RngStream rng(ctx.seed());
  const auto ev = simulate_nhpp(intensity, horizon, rng);
  ctx.diagnostics()["events"] = ev.size();
  ctx.diagnostics()["expected_events"] = nhpp_mean(intensity, 0.0, horizon);
  ctx.write("events.csv", [&](std::ostream& o) { io::write_event_times(o, ev); });
}

void simulate_hawkes_cmd(const Params& p, Context& ctx) {
  const HawkesModel model(number(p, "mu"),
                          ExponentialKernel{number(p, "alpha"), number(p, "beta")});
  const auto b = branching_factor(model);
  ctx.diagnostics()["n_star"] = b.n_star;
  ctx.diagnostics()["regime"] = to_string(b.regime);
  HawkesSimOptions opts;
  opts.max_events = whole(p, "max-events");
  opts.warn = [&](const std::string& m) { ctx.warn(m); };
  RngStream rng(ctx.seed());
  const auto ev = simulate_hawkes(model, number(p, "horizon"), rng, opts);
  ctx.diagnostics()["events"] = ev.size();
  ctx.write("events.csv", [&](std::ostream& o) { io::write_event_times(o, ev); });
}

void simulate_csr_cmd(const Params& p, Context& ctx) {
  RngStream rng(ctx.seed());
  const auto pattern = simulate_csr(number(p, "rate"), region_of(p), rng);
  ctx.diagnostics()["points"] = pattern.size();
  ctx.write("pattern.csv", [&](std::ostream& o) { io::write_pattern_csv(o, pattern); });
}

// ---------------------------------------------------------------------------
// analyze

EdgeCorrection correction_of(const Params& p) {
  const auto& c = raw(p, "correction");
  if (c == "none") return EdgeCorrection::none;
  if (c == "border") return EdgeCorrection::border;
  throw UsageError("--correction must be none or border");
}

void write_statistic(const Params& p, Context& ctx, const SpatialPattern& pattern,
                     const StatisticConfig& config, std::size_t nsim,
                     const std::string& name) {
  const auto radii = number_list(p, "radii");
  if (nsim == 0) {
    const auto curve = evaluate_statistic(pattern, config, radii);
    ctx.write(name, [&](std::ostream& o) { io::write_curve(o, radii, curve); });
    return;
  }
  RngStream rng(ctx.seed());
  const auto env = csr_envelope(pattern, config, radii, nsim, rng, ctx.threads());
  std::size_t escapes = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (env.observed[i] < env.lower[i] || env.observed[i] > env.upper[i]) ++escapes;
  }
  ctx.diagnostics()["nsim"] = nsim;
  ctx.diagnostics()["radii_outside_envelope"] = escapes;
  ctx.write(name, [&](std::ostream& o) { io::write_envelope(o, env); });
}

void analyze_curve_cmd(Statistic stat, const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  StatisticConfig config;
  config.statistic = stat;
  if (stat == Statistic::K) config.correction = correction_of(p);
  if (stat == Statistic::F) {
    config.probe_nx = whole(p, "probe-nx");
    config.probe_ny = whole(p, "probe-ny");
  }
  write_statistic(p, ctx, pattern, config, whole(p, "envelope"), "curve.csv");
}

void analyze_envelope_cmd(const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  StatisticConfig config;
  const auto& s = raw(p, "statistic");
  if (s == "g") {
    config.statistic = Statistic::G;
  } else if (s == "f") {
    config.statistic = Statistic::F;
  } else if (s == "k") {
    config.statistic = Statistic::K;
  } else {
    throw UsageError("--statistic must be g, f or k");
  }
  config.correction = correction_of(p);
  config.probe_nx = whole(p, "probe-nx");
  config.probe_ny = whole(p, "probe-ny");
  const auto nsim = whole(p, "nsim");
  if (nsim < 19) throw UsageError("--nsim must be at least 19");
  write_statistic(p, ctx, pattern, config, nsim, "envelope.csv");
}

void analyze_kde_cmd(const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  const GridSpec spec(pattern.region(), whole(p, "nx"), whole(p, "ny"));
  const double d = number(p, "bandwidth");
  const auto& r = pattern.region();
  if (d > 0.25 * std::min(r.width(), r.height())) {
    ctx.warn("bandwidth is large relative to the region; edge cells are "
             "biased low (no edge correction)");
  }
  const auto surface = kde_surface(pattern, spec, d);
  ctx.write("surface.csv",
            [&](std::ostream& o) { io::write_grid(o, spec, surface.values); });
}

void analyze_nni_cmd(const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  const double dmin = mean_min_distance(pattern);
  const double index = nni(pattern);
  ctx.write("nni.csv", [&](std::ostream& o) {
    o << "n,mean_min_distance,nni\n"
      << pattern.size() << ',' << io::format_number(dmin) << ','
      << io::format_number(index) << '\n';
  });
}

void analyze_quadrat_cmd(const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  const auto test =
      quadrat_counts(pattern, GridSpec(pattern.region(), whole(p, "nx"), whole(p, "ny")));
  ctx.write("counts.csv", [&](std::ostream& o) { io::write_count_grid(o, test.counts); });
  ctx.write("quadrat.csv", [&](std::ostream& o) {
    o << "chi_square,df,p_value\n"
      << io::format_number(test.chi_square) << ',' << test.df << ','
      << io::format_number(test.p_value) << '\n';
  });
}

void analyze_dispersion_cmd(const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  std::vector<std::size_t> blocks;
  for (double b : number_list(p, "blocks")) {
    if (b < 1 || b != std::floor(b)) throw UsageError("--blocks must be positive integers");
    blocks.push_back(static_cast<std::size_t>(b));
  }
  const auto rows = dispersion_by_block(
      pattern, GridSpec(pattern.region(), whole(p, "nx"), whole(p, "ny")), blocks);
  ctx.write("dispersion.csv", [&](std::ostream& o) {
    o << "block_size,index\n";
    for (const auto& r : rows) o << r.block_size << ',' << io::format_number(r.index) << '\n';
  });
}

// ---------------------------------------------------------------------------
// detect

void detect_gistar_cmd(const Params& p, Context& ctx) {
  const auto pattern = load_pattern(p);
  const GridSpec spec(pattern.region(), whole(p, "nx"), whole(p, "ny"));
  const auto grid = aggregate_to_grid(pattern, spec);
  const auto z = gi_star(grid, number(p, "radius"));
  ctx.diagnostics()["hot_cells"] = z.hot_cells(number(p, "threshold")).size();
  ctx.write("zscores.csv", [&](std::ostream& o) { io::write_grid(o, spec, z.z, "z"); });
}

void detect_scan_cmd(const Params& p, Context& ctx) {
  const auto region = region_of(p);
  const double horizon = number(p, "horizon");
  SpaceTimeEvents events;
  {
    auto in = open_input(raw(p, "input"));
    events = is_geojson(p) ? io::read_space_time_geojson(in, region, horizon)
                           : io::read_space_time_csv(in, region, horizon);
  }
  const GridSpec spec(region, whole(p, "nx"), whole(p, "ny"));
  const auto files = split_list(p.count("baseline") ? p.at("baseline") : std::string());
  ScanBaseline baseline = [&] {
    if (files.empty()) return ScanBaseline::uniform(spec, whole(p, "slices"), horizon);
    std::vector<CountGrid> grids;
    for (const auto& f : files) {
      auto in = open_input(f);
      grids.push_back(io::read_count_grid(in, spec));
    }
    return ScanBaseline::from_grids(grids, horizon);
  }();

  ScanConfig config;
  const std::size_t lx = whole(p, "lattice-nx");
  const std::size_t ly = whole(p, "lattice-ny");
  config.lattice = GridSpec(region, lx == 0 ? spec.nx() : lx, ly == 0 ? spec.ny() : ly);
  config.radii = number_list(p, "radii");
  config.durations = number_list(p, "durations");
  config.nsim = whole(p, "nsim");
  if (config.nsim < 99) throw UsageError("--nsim must be at least 99");
  config.threads = ctx.threads();

  RngStream rng(ctx.seed());
  auto results = space_time_scan(events, baseline, config, rng);
  ctx.diagnostics()["candidates"] = results.size();
  const std::size_t top = whole(p, "top");
  if (top > 0 && results.size() > top) results.resize(top);
  ctx.write("scan.csv", [&](std::ostream& o) { io::write_scan_results(o, results); });
}

// ---------------------------------------------------------------------------
// Command table

struct Leaf {
  std::string command;
  std::string name;
  std::string description;
  std::vector<std::array<std::string, 3>> options;  // name, default, help
  std::function<void(const Params&, Context&)> handler;
};

std::vector<Leaf> leaves() {
  const std::array<std::string, 3> input{"input", "", "input point file (CSV or GeoJSON)"};
  const std::array<std::string, 3> format{"format", "auto", "auto|csv|geojson"};
  const std::array<std::string, 3> region{"region", "0,1,0,1", "xmin,xmax,ymin,ymax"};
  const std::array<std::string, 3> radii{"radii", "0.01:0.1:10",
                                         "a:b:n evenly spaced or comma list"};
  const std::array<std::string, 3> envelope{"envelope", "0",
                                            "CSR envelope replicates (0 = none)"};
  using S = Statistic;
  return {
      {"simulate", "hpp", "homogeneous Poisson process",
       {{"rate", "", "events per unit time"}, {"horizon", "", "end of (0, T]"}},
       simulate_hpp_cmd},
      {"simulate", "nhpp", "non-homogeneous Poisson process by thinning",
       {{"intensity", "constant", "constant|piecewise|sinusoid"},
        {"rate", "1", "constant rate"},
        {"knots", "", "piecewise t:rate list, linear between knots"},
        {"base", "1", "sinusoid base"},
        {"amplitude", "0", "sinusoid amplitude"},
        {"period", "1", "sinusoid period"},
        {"segments-per-period", "8", "sinusoid envelope pieces per period"},
        {"horizon", "", "end of (0, T]"}},
       simulate_nhpp_cmd},
      {"simulate", "hawkes", "exponential-kernel Hawkes process (Ogata thinning)",
       {{"mu", "", "baseline intensity"},
        {"alpha", "", "kernel jump size"},
        {"beta", "", "kernel decay rate"},
        {"horizon", "", "end of (0, T]"},
        {"max-events", "10000000", "abort beyond this many events"}},
       simulate_hawkes_cmd},
      {"simulate", "csr", "complete spatial randomness",
       {{"rate", "", "points per unit area"}, region},
       simulate_csr_cmd},
      {"analyze", "kde", "naive kernel density surface",
       {input, format, region, {"nx", "50", ""}, {"ny", "50", ""},
        {"bandwidth", "", "kernel radius"}},
       analyze_kde_cmd},
      {"analyze", "g", "nearest-neighbour distance CDF",
       {input, format, region, radii, envelope},
       [](const Params& p, Context& c) { analyze_curve_cmd(S::G, p, c); }},
      {"analyze", "f", "empty-space distance CDF",
       {input, format, region, radii, envelope, {"probe-nx", "50", ""},
        {"probe-ny", "50", ""}},
       [](const Params& p, Context& c) { analyze_curve_cmd(S::F, p, c); }},
      {"analyze", "k", "Ripley's K",
       {input, format, region, radii, envelope, {"correction", "none", "none|border"}},
       [](const Params& p, Context& c) { analyze_curve_cmd(S::K, p, c); }},
      {"analyze", "envelope", "CSR envelope around g, f or k",
       {input, format, region, radii, {"statistic", "k", "g|f|k"}, {"nsim", "99", ""},
        {"correction", "none", "none|border"}, {"probe-nx", "50", ""},
        {"probe-ny", "50", ""}},
       analyze_envelope_cmd},
      {"analyze", "nni", "nearest neighbour index",
       {input, format, region}, analyze_nni_cmd},
      {"analyze", "quadrat", "quadrat counts and chi-square dispersion test",
       {input, format, region, {"nx", "5", ""}, {"ny", "5", ""}}, analyze_quadrat_cmd},
      {"analyze", "dispersion", "index of dispersion by block size",
       {input, format, region, {"nx", "16", ""}, {"ny", "16", ""},
        {"blocks", "1,2,4,8", "block sizes dividing nx and ny"}},
       analyze_dispersion_cmd},
      {"detect", "gistar", "Getis-Ord Gi* z-scores on a count grid",
       {input, format, region, {"nx", "10", ""}, {"ny", "10", ""},
        {"radius", "", "neighbourhood radius (length units)"},
        {"threshold", "1.96", "hot-cell z threshold"}},
       detect_gistar_cmd},
      {"detect", "scan", "space-time scan statistic",
       {input, format, region, {"horizon", "1", "time horizon"},
        {"nx", "20", "baseline grid columns"}, {"ny", "20", "baseline grid rows"},
        {"slices", "10", "time slices (uniform baseline)"},
        {"baseline", "", "comma list of per-slice count grid CSVs"},
        {"lattice-nx", "0", "centre lattice columns (0 = nx)"},
        {"lattice-ny", "0", "centre lattice rows (0 = ny)"},
        {"radii", "0.05,0.1,0.15,0.2", ""}, {"durations", "0.1,0.2,0.3,0.4", ""},
        {"nsim", "999", "Monte Carlo replicates (>= 99)"},
        {"top", "0", "rows to export (0 = all)"}},
       detect_scan_cmd},
  };
}

std::uint64_t fallback_seed() {
  if (const char* env = std::getenv("POINTPROC_SEED")) {
    const std::string s(env);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
    throw UsageError("POINTPROC_SEED is not an unsigned integer");
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int execute(const Leaf& leaf, const Params& params, std::uint64_t seed,
            std::size_t threads, const fs::path& out_dir, std::ostream& out,
            std::ostream& diag) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  Context ctx(out_dir, seed, threads, diag);
  try {
    leaf.handler(params, ctx);
    json manifest;
    manifest["tool"] = "pointproc";
    manifest["version"] = kVersion;
    manifest["command"] = leaf.command;
    manifest["subcommand"] = leaf.name;
    manifest["seed"] = seed;
    manifest["params"] = params;
    manifest["outputs"] = ctx.outputs();
    manifest["diagnostics"] = ctx.diagnostics();
    ctx.write("manifest.json",
              [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  } catch (const UsageError& e) {
    ctx.rollback();
    diag << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    ctx.rollback();
    diag << "error (" << e.kind() << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    ctx.rollback();
    diag << "error: " << e.what() << '\n';
    return 1;
  }
  for (const auto& name : ctx.outputs()) out << (out_dir / name).string() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& diag) {
  CLI::App app{"Point process simulation and point pattern analysis", "pointproc"};
  app.set_version_flag("--version", kVersion);
  app.fallthrough();

  std::string seed_str;
  std::string out_dir = ".";
  std::size_t threads = 1;
  std::string manifest_path;
  app.add_option("--seed", seed_str, "64-bit seed (falls back to $POINTPROC_SEED)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads for Monte Carlo loops")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--manifest", manifest_path, "replay the run recorded in a manifest");

  const auto table = leaves();
  std::map<std::string, CLI::App*> commands;
  std::vector<std::pair<CLI::App*, const Leaf*>> subs;
  std::map<const Leaf*, Params> values;
  for (const auto& leaf : table) {
    auto*& parent = commands[leaf.command];
    if (parent == nullptr) {
      parent = app.add_subcommand(leaf.command, leaf.command + " commands");
      parent->require_subcommand(1);
      parent->fallthrough();
    }
    auto* sub = parent->add_subcommand(leaf.name, leaf.description);
    sub->fallthrough();
    auto& store = values[&leaf];
    for (const auto& [name, def, help] : leaf.options) {
      store[name] = def;
      auto* opt = sub->add_option("--" + name, store[name], help);
      if (!def.empty()) opt->capture_default_str();
    }
    subs.emplace_back(sub, &leaf);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    diag << "usage error: " << e.what() << '\n';
    return 2;
  }

  if (!manifest_path.empty()) {
    json m;
    try {
      std::ifstream in(manifest_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");
      m = json::parse(in);
      std::vector<std::string> replay{m.at("command").get<std::string>(),
                                      m.at("subcommand").get<std::string>()};
      for (const auto& [k, v] : m.at("params").items()) {
        replay.push_back("--" + k);
        replay.push_back(v.get<std::string>());
      }
      replay.push_back("--seed");
      replay.push_back(std::to_string(m.at("seed").get<std::uint64_t>()));
      replay.push_back("--out");
      replay.push_back(out_dir);
      replay.push_back("--threads");
      replay.push_back(std::to_string(threads));
      return run(replay, out, diag);
    } catch (const std::exception& e) {
      diag << "error: invalid manifest: " << e.what() << '\n';
      return 2;
    }
  }

  for (const auto& [sub, leaf] : subs) {
    if (!sub->parsed()) continue;
    std::uint64_t seed = 0;
    try {
      if (seed_str.empty()) {
        seed = fallback_seed();
      } else {
        const auto res = std::from_chars(seed_str.data(),
                                         seed_str.data() + seed_str.size(), seed);
        if (res.ec != std::errc() || res.ptr != seed_str.data() + seed_str.size()) {
          throw UsageError("--seed must be an unsigned 64-bit integer");
        }
      }
    } catch (const UsageError& e) {
      diag << "usage error: " << e.what() << '\n';
      return 2;
    }
    return execute(*leaf, values[leaf], seed, threads, out_dir, out, diag);
  }
  diag << "usage error: a command is required\n" << app.help();
  return 2;
}

}  // namespace pointproc::cli
