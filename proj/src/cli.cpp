#include "oscdecon/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <csignal>
#include <limits>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "oscdecon/deconvolve.hpp"
#include "oscdecon/error.hpp"
#include "oscdecon/json_io.hpp"
#include "oscdecon/response.hpp"
#include "oscdecon/service.hpp"
#include "oscdecon/spectral.hpp"
#include "oscdecon/synth.hpp"

namespace oscdecon {

namespace fs = std::filesystem;

namespace {

json load_json_file(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::IoError, "config file not found: " + path);
  return parse_json(read_file(path));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

fs::path manifest_path_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

int cmd_synth(const std::string& config_path, const std::string& output_dir,
              std::optional<std::uint64_t> seed, std::ostream& err) {
  const json raw = load_json_file(config_path);
  SimConfig cfg = decode<SimConfig>(raw);
  if (seed) cfg.seed = *seed;
  const SimResult sim = simulate(cfg);

  const fs::path dir(output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  write_csv_file(sim.measured, dir / "measured.csv");
  write_csv_file(sim.truth_force, dir / "truth.csv");

  RunManifest m;
  m.command = "synth";
  m.config = cfg;
  m.input_digest = "sha256:" + sha256_hex(json(cfg).dump());
  m.metadata = {{"samples", sim.measured.size()},
                {"dt", cfg.dt},
                {"duration", cfg.duration},
                {"integrator", "rk4"},
                {"substeps", cfg.substeps},
                {"rng", "mt19937_64 + box-muller"},
                {"measured_digest", series_digest(sim.measured)},
                {"truth_digest", series_digest(sim.truth_force)}};
  write_text(dir / "manifest.json", canonical_dump(m));
  err << "wrote " << sim.measured.size() << " samples to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& input, std::ostream& out, std::ostream& err) {
  const TimeSeries ts = read_csv_file(input);
  const auto peaks = top_peaks(ts, 5);
  if (peaks.empty()) {
    err << "no dominant peak: spectrum of " << input << " is flat\n";
    return kExitEmpty;
  }
  json doc = {{"input", input},
              {"input_digest", series_digest(ts)},
              {"samples", ts.size()},
              {"dt", ts.dt},
              {"dominant", peaks.front()},
              {"peaks", peaks}};
  out << canonical_dump(doc);
  return kExitOk;
}

int cmd_filter(const std::string& input, const std::string& config_path, const std::string& output,
               std::ostream& err) {
  const TimeSeries ts = read_csv_file(input);
  const auto chain = decode<FilterChainConfig>(load_json_file(config_path));
  const CascadeResult result = cascade_detailed(ts, chain);
  const RunManifest manifest = make_filter_manifest(ts, chain, result);
  write_csv_file(result.force, output);
  write_text(manifest_path_for(output), canonical_dump(manifest));
  for (const auto& s : manifest.settle) {
    err << "stage " << s.stage << ": settle " << s.samples << " samples\n";
  }
  return kExitOk;
}

/// Response config:
///   {"dt": s, "stage": FilterStageConfig | "chain": FilterChainConfig,
///    "sigma_f2": [..], "freqs": [..] | "grid": {"f_min", "f_max", "points"},
///    "cycles": 10}
int cmd_response(const std::string& config_path, const std::string& output, std::ostream& err) {
  const json cfg = load_json_file(config_path);

  FilterChainConfig chain;
  if (cfg.contains("chain")) {
    chain = decode<FilterChainConfig>(cfg["chain"]);
  } else if (cfg.contains("stage")) {
    chain.stages = {decode<FilterStageConfig>(cfg["stage"])};
    chain.dt = decode<double>(cfg.at("dt"));
  } else {
    throw Error(ErrorCode::InvalidArgument, "response config needs 'stage' or 'chain'");
  }
  chain.validate();

  std::vector<double> sigmas;
  if (cfg.contains("sigma_f2")) {
    sigmas = decode<std::vector<double>>(cfg["sigma_f2"]);
    require(!sigmas.empty(), "sigma_f2 list is empty");
  } else {
    sigmas = {chain.stages.front().sigma_f2};
  }

  std::vector<double> freqs;
  if (cfg.contains("freqs")) {
    freqs = decode<std::vector<double>>(cfg["freqs"]);
  } else {
    const json grid = cfg.value("grid", json::object());
    freqs = default_grid(chain.dt, grid.value("points", std::size_t{200}), grid.value("f_min", 0.1));
    if (grid.contains("f_max")) {
      const double f_max = grid["f_max"].get<double>();
      const double f_min = freqs.front();
      const std::size_t n = freqs.size();
      for (std::size_t i = 0; i < n; ++i) {
        freqs[i] = f_min * std::pow(f_max / f_min, static_cast<double>(i) / static_cast<double>(n - 1));
      }
    }
  }
  require(!freqs.empty(), "frequency grid is empty");
  const std::size_t cycles = cfg.value("cycles", std::size_t{10});

  std::vector<std::vector<ResponsePoint>> columns;
  for (double sf2 : sigmas) {
    FilterChainConfig c = chain;
    for (auto& s : c.stages) s.sigma_f2 = sf2;
    if (c.stages.size() == 1 && c.post_smooth == 0) {
      columns.push_back(frequency_response(make_stage(c.stages.front(), c.dt), freqs, cycles));
      continue;
    }
    double slowest = std::numeric_limits<double>::infinity();
    for (const auto& st : c.stages) {
      const KalmanModel m = make_stage(st, c.dt);
      slowest = std::min(slowest, closed_loop_decay_rate(m, steady_state(m).gain));
    }
    require(slowest > 0.0, "fixed-gain filter is not stable", ErrorCode::Unstable);
    const SignalSystem system = [&c](const TimeSeries& in) { return cascade(in, c, StageInit::Zero); };
    columns.push_back(measure_response(system, c.dt, freqs, cycles,
                                       kSettleTimeConstants * static_cast<double>(c.stages.size()) / slowest));
  }

  std::ostringstream csv;
  csv << "freq_hz";
  for (double sf2 : sigmas) csv << ",gain_sigma_f2=" << format_double(sf2);
  csv << '\n';
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    csv << format_double(freqs[i]);
    for (const auto& col : columns) csv << ',' << format_double(col[i].gain);
    csv << '\n';
  }
  write_text(output, csv.str());
  err << "wrote " << freqs.size() << " x " << sigmas.size() << " response table to " << output << "\n";
  return kExitOk;
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& address, const std::string& data_dir, std::ostream& err) {
  std::string host = address;
  int port = 8080;
  if (const auto colon = address.rfind(':'); colon != std::string::npos) {
    host = address.substr(0, colon);
    try {
      port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
      err << "invalid address '" << address << "'\n";
      return kExitUsage;
    }
  }
  std::error_code ec;
  if (!fs::is_directory(data_dir, ec)) {
    err << "data directory not found: " << data_dir << "\n";
    return kExitUsage;
  }
  HttpServer server(Service(data_dir), [&err](const std::string& line) { err << line << std::endl; });
  if (!server.bind(host, port)) {
    err << "cannot bind " << host << ":" << port << "\n";
    return kExitUsage;
  }
  err << "serving " << data_dir << " on http://" << host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen_after_bind();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kalman-filter removal of oscillatory transients from force measurements", "oscdecon"};
  app.require_subcommand(1);

  std::string config, input, output, address = "127.0.0.1:8080", data_dir = ".";
  std::optional<std::uint64_t> seed;

  auto* synth = app.add_subcommand("synth", "simulate a damped oscillator under a force profile");
  synth->add_option("--config", config, "SimConfig JSON")->required();
  synth->add_option("--output", output, "output directory")->default_val(".");
  synth->add_option("--seed", seed, "override the config seed");

  auto* analyze = app.add_subcommand("analyze", "list dominant spectral peaks");
  analyze->add_option("--input", input, "time-series CSV")->required();

  auto* filter = app.add_subcommand("filter", "remove transients with a filter chain");
  filter->add_option("--input", input, "time-series CSV")->required();
  filter->add_option("--config", config, "FilterChainConfig JSON")->required();
  filter->add_option("--output", output, "filtered force CSV")->required();

  auto* response = app.add_subcommand("response", "tabulate frequency response");
  response->add_option("--config", config, "response config JSON")->required();
  response->add_option("--output", output, "response CSV")->required();

  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  serve->add_option("--address", address, "host:port")->default_val("127.0.0.1:8080");
  serve->add_option("--data-dir", data_dir, "dataset directory")->default_val(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(config, output, seed, err);
    if (*analyze) return cmd_analyze(input, out, err);
    if (*filter) return cmd_filter(input, config, output, err);
    if (*response) return cmd_response(config, output, err);
    if (*serve) return cmd_serve(address, data_dir, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace oscdecon
