// efdkit command-line front end.
//
//   efdkit decompose --method efd --modes 3 signal.csv --out dir
//   efdkit segment   --method ewt-minima --modes 4 signal.csv
//   efdkit tfr       --method efd --modes 2 signal.csv --out dir
//   efdkit reproduce table2 --out dir
//   efdkit timing    --reps 5
//
// Exit codes: 0 ok, 2 usage, 3 invalid input, 4 segmentation failure,
// 5 numeric/internal failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "efdkit/efdkit.hpp"
#include "efdkit/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace efdkit;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInvalidInput = 3, kSegmentation = 4, kNumeric = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string method = "efd";
  std::optional<std::size_t> n_modes;
  std::optional<double> rate;
  std::optional<std::string> boundary;
  std::uint64_t seed = 42;
  std::string grid = "32x32";
  std::string out = ".";
  std::string format = "csv";
  std::string experiment;
  std::size_t reps = 5;
  double epsilon = 0.5;
  std::optional<double> fmax;
  std::optional<double> fstep;
};

Method method_of(const RunConfig& cfg) {
  const auto m = parse_method(cfg.method);
  if (!m) throw UsageError("unknown method '" + cfg.method + "'");
  return *m;
}

bool is_fdm(Method m) { return m == Method::FdmLth || m == Method::FdmHtl; }

DecomposeOptions options_of(const RunConfig& cfg) {
  DecomposeOptions o;
  o.method = method_of(cfg);
  if (!is_fdm(o.method)) {
    if (!cfg.n_modes) throw UsageError("--modes is required for " + cfg.method);
    o.n_modes = *cfg.n_modes;
    o.boundary = BoundaryMode::Mirror;
  }
  if (cfg.boundary) {
    if (*cfg.boundary == "periodic") o.boundary = BoundaryMode::Periodic;
    else if (*cfg.boundary == "mirror") o.boundary = BoundaryMode::Mirror;
    else throw UsageError("--boundary must be periodic or mirror");
    if (is_fdm(o.method) && o.boundary != BoundaryMode::Periodic)
      throw UsageError("the FDM scans work on the periodic signal only");
  }
  return o;
}

Signal load(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("an input CSV is required");
  return io::read_signal_csv(cfg.input, cfg.rate);
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
  const auto x = g.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(g);
    std::size_t used = 0;
    const auto a = std::stoul(g.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(g);
    const auto l = std::stoul(g.substr(x + 1), &used);
    if (used != g.size() - x - 1 || a == 0 || l == 0) throw std::invalid_argument(g);
    return {a, l};
  } catch (const std::logic_error&) {
    throw UsageError("--grid must look like 32x32");
  }
}

// Writes files under the output directory and remembers their names for the manifest.
class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    io::write_file((dir_ / name).string(), content);
    files_.push_back(name);
  }

  void manifest(json meta) {
    meta["tool"] = "efdkit";
    meta["version"] = std::string(kVersion);
    meta["files"] = files_;
    io::write_file((dir_ / "manifest.json").string(), io::dump(meta));
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

// Tabular output as CSV or as a JSON array of row objects.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;

  std::string render(const std::string& format) const {
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows) {
        json obj;
        for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = r[i];
        arr.push_back(obj);
      }
      return io::dump(arr);
    }
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ",";
        if (r[i].is_number_float()) s += io::fmt(r[i].get<double>());
        else if (r[i].is_string()) s += r[i].get<std::string>();
        else s += r[i].dump();
      }
      s += "\n";
    }
    return s;
  }
};

std::string ext(const std::string& format) { return format == "json" ? ".json" : ".csv"; }

json fdm_bands_json(const FibfSet& set, double rate, std::size_t length) {
  json bands = json::array();
  for (const auto& b : set.bands)
    bands.push_back({{"lo", b.lo},
                     {"hi", b.hi},
                     {"lo_hz", static_cast<double>(b.lo) * rate / static_cast<double>(length)},
                     {"hi_hz", static_cast<double>(b.hi) * rate / static_cast<double>(length)}});
  return {{"direction", set.direction == ScanDirection::LTH ? "lth" : "htl"}, {"bands", bands}};
}

// ---------------------------------------------------------------- decompose

int cmd_decompose(const RunConfig& cfg) {
  const auto opt = options_of(cfg);
  const Signal x = load(cfg);
  const ModeSet ms = decompose(x, opt);

  Outputs out(cfg.out);
  if (cfg.format == "json") {
    json j{{"method", std::string(to_string(ms.method))}, {"sample_rate_hz", x.sample_rate_hz()}};
    j["modes"] = json::array();
    for (const auto& m : ms.modes) j["modes"].push_back(m.values());
    j["residual"] = ms.residual;
    if (ms.segmentation) j["segmentation"] = io::segmentation_json(*ms.segmentation, x.sample_rate_hz());
    out.write("decomposition.json", io::dump(j));
  } else {
    out.write("modes.csv", io::modes_csv(ms));
    out.write("residual.csv", io::series_csv({"residual"}, {std::span<const double>(ms.residual)}, x.sample_rate_hz()));
    if (ms.segmentation)
      out.write("segmentation.json", io::dump(io::segmentation_json(*ms.segmentation, x.sample_rate_hz())));
  }
  if (is_fdm(opt.method)) {
    const auto set = opt.method == Method::FdmLth ? fdm_lth(x, opt.tol_if) : fdm_htl(x, opt.tol_if);
    out.write("fdm_bands.json", io::dump(fdm_bands_json(set, x.sample_rate_hz(), x.size())));
  }

  // || x - (sum of modes + residual) || / || x ||
  const auto rec = ms.reconstruction();
  double num = 0, den = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    num += (x[r] - rec[r]) * (x[r] - rec[r]);
    den += x[r] * x[r];
  }
  const double err = den > 0 ? std::sqrt(num / den) : std::sqrt(num);

  out.manifest({{"command", "decompose"},
                {"input", cfg.input},
                {"method", std::string(to_string(opt.method))},
                {"n_modes", ms.size()},
                {"boundary", std::string(to_string(opt.boundary))},
                {"sample_rate_hz", x.sample_rate_hz()},
                {"samples", x.size()},
                {"format", cfg.format}});
  std::printf("modes %zu\n", ms.size());
  std::printf("residual_energy %s\n", io::fmt(ms.relative_residual()).c_str());
  std::printf("reconstruction_residual %s\n", io::fmt(err).c_str());
  return kOk;
}

// ---------------------------------------------------------------- segment

int cmd_segment(const RunConfig& cfg) {
  const Method m = method_of(cfg);
  const Signal x = load(cfg);
  json j;
  if (is_fdm(m)) {
    const auto set = m == Method::FdmLth ? fdm_lth(x) : fdm_htl(x);
    j = fdm_bands_json(set, x.sample_rate_hz(), x.size());
  } else {
    if (!cfg.n_modes) throw UsageError("--modes is required for " + cfg.method);
    const auto tech = m == Method::Efd         ? SegmentationTechnique::ImprovedAdaptive
                      : m == Method::EwtMaxima ? SegmentationTechnique::LocalMaxima
                                               : SegmentationTechnique::LowestMinima;
    j = io::segmentation_json(segment(MagnitudeProfile::from_signal(x.samples()), *cfg.n_modes, tech),
                              x.sample_rate_hz());
  }
  if (cfg.out == ".") {
    std::cout << io::dump(j);
  } else {
    Outputs out(cfg.out);
    out.write("segmentation.json", io::dump(j));
    out.manifest({{"command", "segment"}, {"input", cfg.input}, {"method", cfg.method}});
  }
  return kOk;
}

// ---------------------------------------------------------------- tfr

int cmd_tfr(const RunConfig& cfg) {
  const auto opt = options_of(cfg);
  const Signal x = load(cfg);
  const auto tracks = method_tfr(x, opt);
  const double fmax = cfg.fmax.value_or(x.sample_rate_hz() / 2);
  const double fstep = cfg.fstep.value_or(x.sample_rate_hz() / static_cast<double>(x.size()));
  const auto raster = raster_tfr(tracks, uniform_axis(0.0, fmax, fstep));

  Outputs out(cfg.out);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    out.write("track" + std::to_string(i + 1) + ".csv", io::track_csv(tracks[i]));
    double s = 0;
    for (double f : tracks[i].inst_frequency_hz) s += f;
    std::printf("track %zu mean_if_hz %s\n", i + 1, io::fmt(s / static_cast<double>(tracks[i].size())).c_str());
  }
  out.write("tfr.csv", io::raster_csv(raster));
  out.write("tfr.pgm", io::raster_pgm(raster));
  out.manifest({{"command", "tfr"},
                {"input", cfg.input},
                {"method", std::string(to_string(opt.method))},
                {"tracks", tracks.size()},
                {"freq_max_hz", fmax},
                {"freq_step_hz", fstep},
                {"clipped", raster.clipped}});
  std::printf("clipped %zu\n", raster.clipped);
  return kOk;
}

// ---------------------------------------------------------------- reproduce

TestSignalSpec spec_for(SignalId id, std::uint64_t seed) {
  auto s = TestSignalSpec::defaults(id);
  s.seed = seed;
  return s;
}

Table rmse_table(SignalId id) {
  const auto g = generate(TestSignalSpec::defaults(id));
  Table t;
  t.header = {"component"};
  std::vector<std::vector<json>> cols;
  for (Method m : kBenchMethods) {
    t.header.emplace_back(to_string(m));
    std::vector<json> col;
    try {
      const auto match = match_components(decompose(g.signal, benchmark_protocol(m, id)).modes, g.components);
      for (double v : match.rmse) col.emplace_back(v);
    } catch (const Error& e) {
      col.assign(g.components.size(), json("error"));
      std::fprintf(stderr, "%s: %s\n", std::string(to_string(m)).c_str(), e.what());
    }
    cols.push_back(std::move(col));
  }
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    std::vector<json> row{"C" + std::to_string(c + 1)};
    for (const auto& col : cols) row.push_back(col[c]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void segmentation_figure(Outputs& out, const std::string& name, SignalId id, std::uint64_t seed) {
  const auto g = generate(spec_for(id, seed));
  const auto prof = MagnitudeProfile::from_signal(g.signal.samples());
  const double fs = g.signal.sample_rate_hz();
  std::vector<double> freq(prof.magnitudes.size());
  for (std::size_t k = 0; k < freq.size(); ++k) freq[k] = prof.omega(k) * fs / (2 * kPi);
  std::string csv = "freq_hz,magnitude\n";
  for (std::size_t k = 0; k < freq.size(); ++k) csv += io::fmt(freq[k]) + "," + io::fmt(prof.magnitudes[k]) + "\n";
  out.write(name + "_spectrum.csv", csv);
  const auto lm = segment(prof, reference_mode_count(Method::EwtMinima, id), SegmentationTechnique::LowestMinima);
  const auto im = segment(prof, reference_mode_count(Method::Efd, id), SegmentationTechnique::ImprovedAdaptive);
  out.write(name + "_lowest_minima.json", io::dump(io::segmentation_json(lm, fs)));
  out.write(name + "_improved.json", io::dump(io::segmentation_json(im, fs)));
  std::printf("%s lowest_minima first/last boundary hz: %s %s\n", name.c_str(), io::fmt(lm.boundaries_hz(fs)[0]).c_str(),
              io::fmt(lm.boundaries_hz(fs).back()).c_str());
  std::printf("%s improved first/last boundary hz: %s %s\n", name.c_str(), io::fmt(im.boundaries_hz(fs)[0]).c_str(),
              io::fmt(im.boundaries_hz(fs).back()).c_str());
}

int cmd_reproduce(const RunConfig& cfg) {
  const std::string& e = cfg.experiment;
  static const std::vector<std::string> known{"table2", "table3", "table4", "table5", "table6", "fig6", "fig7", "fig14"};
  if (std::find(known.begin(), known.end(), e) == known.end()) throw UsageError("unknown experiment '" + e + "'");

  Outputs out(cfg.out);
  json meta{{"command", "reproduce"}, {"experiment", e}, {"format", cfg.format}};
  if (e == "table2" || e == "table3" || e == "table4") {
    const SignalId id = e == "table2" ? SignalId::Sig3 : e == "table3" ? SignalId::Sig4 : SignalId::Sig5;
    const auto t = rmse_table(id);
    out.write(e + ext(cfg.format), t.render(cfg.format));
    std::cout << t.render("csv");
    meta["signal"] = std::string(to_string(id));
    meta["mode_counts"] = {{"efd", reference_mode_count(Method::Efd, id)}, {"ewt", reference_mode_count(Method::EwtMinima, id)}};
  } else if (e == "table5") {
    Table t;
    t.header = {"method", "tfr_rmse"};
    const auto g = generate(TestSignalSpec::defaults(SignalId::Sig3));
    const auto axis = tfr_axis();
    out.write("table5_truth.pgm", io::raster_pgm(raster_tfr(benchmark_tfr(g.components), axis)));
    for (Method m : kBenchMethods) {
      t.rows.push_back({std::string(to_string(m)), tfr_rmse(m, SignalId::Sig3)});
      const auto r = raster_tfr(method_tfr(g.signal, benchmark_protocol(m, SignalId::Sig3)), axis);
      out.write("table5_" + std::string(to_string(m)) + ".pgm", io::raster_pgm(r));
    }
    out.write(e + ext(cfg.format), t.render(cfg.format));
    std::cout << t.render("csv");
    meta["signal"] = "sig3";
    meta["freq_axis"] = {{"start_hz", 0.0}, {"stop_hz", 50.0}, {"step_hz", 0.25}};
  } else if (e == "table6") {
    std::vector<TestSignalSpec> specs;
    for (SignalId id : {SignalId::Sig3, SignalId::Sig4, SignalId::Sig5}) specs.push_back(TestSignalSpec::defaults(id));
    const auto entries = time_methods(specs, {std::begin(kBenchMethods), std::end(kBenchMethods)}, cfg.reps);
    Table t;
    t.header = {"signal", "method", "median_s", "repetitions"};
    for (const auto& en : entries)
      t.rows.push_back({std::string(to_string(en.signal)), std::string(to_string(en.method)), en.median_s, en.seconds.size()});
    out.write(e + ext(cfg.format), t.render(cfg.format));
    std::cout << t.render("csv");
    meta["repetitions"] = cfg.reps;
    meta["note"] = "wall-clock timings are not reproducible byte for byte";
  } else if (e == "fig6" || e == "fig7") {
    segmentation_figure(out, e, e == "fig6" ? SignalId::Sig1 : SignalId::Sig2, cfg.seed);
    meta["seed"] = cfg.seed;
    meta["snr_db"] = 10.0;
  } else {  // fig14
    const auto [na, nl] = parse_grid(cfg.grid);
    const auto grid = QMapGrid::standard(na, nl);
    Table t;
    t.header = {"method", "failure_fraction"};
    for (Method m : kBenchMethods) {
      const auto map = q_map(m, grid, cfg.epsilon);
      const std::string tag(to_string(m));
      out.write("fig14_" + tag + ".csv", io::qmap_csv(map));
      out.write("fig14_" + tag + ".pgm", io::qmap_pgm(map));
      t.rows.push_back({tag, map.failure_fraction()});
    }
    out.write("fig14_summary" + ext(cfg.format), t.render(cfg.format));
    std::cout << t.render("csv");
    meta["grid"] = {{"a", na}, {"lambda_r", nl}};
    meta["epsilon"] = cfg.epsilon;
  }
  out.manifest(meta);
  return kOk;
}

// ---------------------------------------------------------------- timing

int cmd_timing(const RunConfig& cfg) {
  Table t;
  t.header = {"signal", "method", "median_s", "repetitions"};
  if (cfg.input.empty()) {
    std::vector<TestSignalSpec> specs;
    for (SignalId id : {SignalId::Sig3, SignalId::Sig4, SignalId::Sig5}) specs.push_back(TestSignalSpec::defaults(id));
    for (const auto& en : time_methods(specs, {std::begin(kBenchMethods), std::end(kBenchMethods)}, cfg.reps))
      t.rows.push_back({std::string(to_string(en.signal)), std::string(to_string(en.method)), en.median_s, en.seconds.size()});
  } else {
    if (cfg.reps < 3) throw UsageError("--reps must be at least 3");
    const auto opt = options_of(cfg);
    const Signal x = load(cfg);
    (void)decompose(x, opt);
    std::vector<double> secs;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      (void)decompose(x, opt);
      secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    t.rows.push_back({cfg.input, std::string(to_string(opt.method)), median(secs), secs.size()});
  }
  std::cout << t.render(cfg.format);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Fourier decomposition toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  RunConfig cfg;

  auto add_method = [&](CLI::App* c) {
    c->add_option("--method", cfg.method, "efd | ewt-maxima | ewt-minima | fdm-lth | fdm-htl");
  };
  auto add_signal = [&](CLI::App* c, bool required) {
    c->add_option("input", cfg.input, "signal CSV (t,value or value)")->required(required);
    c->add_option("--rate", cfg.rate, "sample rate in Hz (required for one-column input)");
    c->add_option("--modes", cfg.n_modes, "number of modes (EFD/EWT)")->check(CLI::PositiveNumber);
    c->add_option("--boundary", cfg.boundary, "periodic | mirror (default: mirror for EFD/EWT)");
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", cfg.out, "output directory")->capture_default_str();
    c->add_option("--format", cfg.format, "tabular output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  auto* dec = app.add_subcommand("decompose", "decompose a signal into modes");
  add_method(dec);
  add_signal(dec, true);
  add_out(dec);

  auto* seg = app.add_subcommand("segment", "print the spectrum segmentation (FDM: band edges)");
  add_method(seg);
  add_signal(seg, true);
  seg->add_option("--out", cfg.out, "output directory (default: print to stdout)");

  auto* tfr = app.add_subcommand("tfr", "instantaneous amplitude/frequency of each mode");
  add_method(tfr);
  add_signal(tfr, true);
  add_out(tfr);
  tfr->add_option("--fmax", cfg.fmax, "top of the raster frequency axis in Hz (default fs/2)");
  tfr->add_option("--fstep", cfg.fstep, "raster frequency step in Hz (default fs/N)");

  auto* rep = app.add_subcommand("reproduce", "regenerate an experiment");
  rep->add_option("experiment", cfg.experiment, "table2..table6 | fig6 | fig7 | fig14")->required();
  add_out(rep);
  rep->add_option("--seed", cfg.seed, "noise seed for the noisy signals")->capture_default_str();
  rep->add_option("--grid", cfg.grid, "Q-map grid, a x lambda_r")->capture_default_str();
  rep->add_option("--reps", cfg.reps, "timing repetitions")->capture_default_str();
  rep->add_option("--epsilon", cfg.epsilon, "Q threshold")->capture_default_str();

  auto* tim = app.add_subcommand("timing", "median decomposition time per method");
  add_method(tim);
  add_signal(tim, false);
  tim->add_option("--reps", cfg.reps, "timed repetitions")->capture_default_str();
  tim->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kUsage;
  }

  try {
    if (dec->parsed()) return cmd_decompose(cfg);
    if (seg->parsed()) return cmd_segment(cfg);
    if (tfr->parsed()) return cmd_tfr(cfg);
    if (rep->parsed()) return cmd_reproduce(cfg);
    if (tim->parsed()) return cmd_timing(cfg);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "efdkit: %s\n", e.what());
    return kUsage;
  } catch (const SegmentationInfeasible& e) {
    std::fprintf(stderr, "efdkit: %s\n", e.what());
    return kSegmentation;
  } catch (const InvalidSegmentation& e) {
    std::fprintf(stderr, "efdkit: %s\n", e.what());
    return kSegmentation;
  } catch (const EmptyBand& e) {
    std::fprintf(stderr, "efdkit: %s\n", e.what());
    return kSegmentation;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "efdkit: %s\n", e.what());
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "efdkit: %s\n", e.what());
    return kNumeric;
  }
  return kUsage;
}
