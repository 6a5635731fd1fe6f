#include "trapnet/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "text_format.hpp"
#include "trapnet/api.hpp"
#include "trapnet/error.hpp"
#include "trapnet/export.hpp"

namespace trapnet {

namespace {

struct InputFlags {
  std::string path;
  std::string format;  // empty: infer from extension
  bool planar = false;
};

struct OutputFlags {
  std::string path;
  std::string format;
};

void add_input(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("-i,--input", in.path, "Deployment file (CSV or GeoJSON)")->required();
  cmd->add_option("--input-format", in.format, "csv or geojson (default: by extension)")
      ->check(CLI::IsMember({"csv", "geojson"}));
  cmd->add_flag("--planar", in.planar, "Project geographic input onto a local plane first");
}

void add_output(CLI::App* cmd, OutputFlags& out, std::string default_format, std::vector<std::string> allowed) {
  out.format = std::move(default_format);
  cmd->add_option("-o,--output", out.path, "Output file (default: stdout)");
  cmd->add_option("--export", out.format, "Output format")->check(CLI::IsMember(std::move(allowed)))->capture_default_str();
}

Deployment load_input(const InputFlags& in) {
  std::ifstream file(in.path, std::ios::binary);
  if (!file) throw InputError("cannot open " + in.path);
  DeploymentFormat format = DeploymentFormat::csv;
  if (in.format == "geojson") {
    format = DeploymentFormat::geojson;
  } else if (in.format.empty()) {
    const auto dot = in.path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : in.path.substr(dot);
    if (ext == ".geojson" || ext == ".json") format = DeploymentFormat::geojson;
  }
  Deployment d = load_deployment(file, format);
  if (in.planar && d.mode() == CoordinateMode::geographic && !d.empty()) d = project_planar(d);
  return d;
}

void write_output(const OutputFlags& out, const std::string& text, std::ostream& stdout_stream) {
  if (out.path.empty()) {
    stdout_stream << text;
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  if (!file) throw InputError("cannot write " + out.path);
  file << text;
}

ExportFormat format_of(const OutputFlags& out) { return *parse_export_format(out.format); }

struct SimFlags {
  std::string capacity = "1";
  double sleep_minutes = 5.0;
  std::string gateway = "auto";
  std::size_t max_rounds = SimConfig{}.max_rounds;

  SimConfig config() const {
    SimConfig cfg;
    cfg.link_capacity = parse_capacity(capacity);
    cfg.sleep_minutes = sleep_minutes;
    cfg.gateway = parse_gateway(gateway);
    cfg.max_rounds = max_rounds;
    return cfg;
  }
};

void add_sim(CLI::App* cmd, SimFlags& sim) {
  cmd->add_option("--capacity", sim.capacity, "Messages per link per round, or 'inf'")->capture_default_str();
  cmd->add_option("--sleep-min", sim.sleep_minutes, "Minutes represented by one round")->capture_default_str();
  cmd->add_option("--gateway", sim.gateway, "'auto' or a site id")->capture_default_str();
  cmd->add_option("--max-rounds", sim.max_rounds, "Round limit")->capture_default_str();
}

int default_port() {
  if (const char* env = std::getenv("TRAPNET_PORT")) {
    if (auto p = detail::parse_integer<int>(env); p && *p >= 0 && *p < 65536) return *p;
  }
  return 8080;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"trapnet: light-trap surveillance network planning"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic planar deployment (CSV)");
  std::size_t gen_n = 60;
  std::string gen_bbox = "0,0,40,60";
  std::uint64_t gen_seed = 7;
  OutputFlags gen_out;
  gen->add_option("-n,--nodes", gen_n, "Number of sites")->capture_default_str();
  gen->add_option("--bbox", gen_bbox, "min_x,min_y,max_x,max_y in km")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  add_output(gen, gen_out, "csv", {"csv", "json"});

  // build
  auto* build = app.add_subcommand("build", "Export the radio graph, or the wind graph when wind flags are given");
  InputFlags build_in;
  OutputFlags build_out;
  std::optional<double> build_range, wind_v, wind_t, wind_bearing;
  add_input(build, build_in);
  build->add_option("--range", build_range, "Transmission range in km");
  build->add_option("--wind-v", wind_v, "Wind velocity km/h");
  build->add_option("--wind-t", wind_t, "Sampling time in hours");
  build->add_option("--wind-bearing", wind_bearing, "Direction the wind blows toward, degrees from north");
  add_output(build, build_out, "dot", {"dot", "geojson", "json"});

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Print one metrics row");
  InputFlags metrics_in;
  OutputFlags metrics_out;
  double metrics_range = 0.0;
  std::string metrics_gateway = "auto";
  RegimeOptions metrics_regime;
  add_input(metrics, metrics_in);
  metrics->add_option("--range", metrics_range, "Transmission range in km")->required();
  metrics->add_option("--gateway", metrics_gateway, "'auto' or a site id")->capture_default_str();
  metrics->add_option("--over-connect", metrics_regime.over_connect_fraction,
                      "Fan-out fraction of n marking over-connection")
      ->capture_default_str();
  add_output(metrics, metrics_out, "csv", {"csv", "json"});

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Metrics for a list of ranges");
  InputFlags sweep_in;
  OutputFlags sweep_out;
  std::string sweep_ranges = "5,6,7,8,9,10,20,30,40";
  bool sweep_simulate = false;
  SimFlags sweep_sim;
  RegimeOptions sweep_regime;
  add_input(sweep, sweep_in);
  sweep->add_option("--ranges", sweep_ranges, "Comma-separated ranges in km")->capture_default_str();
  sweep->add_flag("--simulate", sweep_simulate, "Add routing/election/collection summaries");
  add_sim(sweep, sweep_sim);
  sweep->add_option("--over-connect", sweep_regime.over_connect_fraction,
                    "Fan-out fraction of n marking over-connection")
      ->capture_default_str();
  add_output(sweep, sweep_out, "csv", {"csv", "json"});

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a synchronous simulation and write its trace");
  InputFlags sim_in;
  OutputFlags sim_out;
  double sim_range = 0.0;
  std::string sim_behavior;
  SimFlags sim_flags;
  add_input(simulate, sim_in);
  simulate->add_option("--range", sim_range, "Transmission range in km")->required();
  simulate->add_option("--behavior", sim_behavior, "route, elect or collect")
      ->required()
      ->check(CLI::IsMember({"route", "elect", "collect"}));
  add_sim(simulate, sim_flags);
  add_output(simulate, sim_out, "json", {"json", "csv"});

  // serve
  auto* serve = app.add_subcommand("serve", "Serve read-only JSON endpoints over HTTP");
  InputFlags serve_in;
  ServeOptions serve_opts;
  serve_opts.port = default_port();
  std::string static_dir;
  add_input(serve, serve_in);
  serve->add_option("--host", serve_opts.host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_opts.port, "Port (default: $TRAPNET_PORT or 8080)")->capture_default_str();
  serve->add_option("--static-dir", static_dir, "Directory of UI assets served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*gen) {
      std::vector<double> box;
      std::stringstream ss(gen_bbox);
      for (std::string tok; std::getline(ss, tok, ',');) {
        auto v = detail::parse_double(detail::trim(tok));
        if (!v) throw InputError("--bbox: malformed value '" + tok + "'");
        box.push_back(*v);
      }
      if (box.size() != 4) throw InputError("--bbox expects min_x,min_y,max_x,max_y");
      const Deployment d = generate_synthetic(gen_n, BoundingBox{box[0], box[1], box[2], box[3]}, gen_seed);
      write_output(gen_out, export_text(std::cref(d), format_of(gen_out)), out);
      return 0;
    }

    if (*build) {
      const Deployment d = load_input(build_in);
      const int wind_count = (wind_v ? 1 : 0) + (wind_t ? 1 : 0) + (wind_bearing ? 1 : 0);
      if (wind_count != 0 && wind_count != 3) {
        err << "error: --wind-v, --wind-t and --wind-bearing must be given together\n";
        return 2;
      }
      if (wind_count == 3) {
        const WindGraph wg = build_wind_graph(d, WindField(*wind_v, *wind_t, *wind_bearing));
        if (format_of(build_out) == ExportFormat::json) {
          const RadioGraph g = build_radio_graph(d, build_range.value_or(wind_radius_km(wg.wind())));
          write_output(build_out, graph_json(g, &wg).dump(2) + "\n", out);
        } else {
          write_output(build_out, export_text(std::cref(wg), format_of(build_out)), out);
        }
        return 0;
      }
      if (!build_range) {
        err << "error: build needs --range or the wind flags\n";
        return 2;
      }
      const RadioGraph g = build_radio_graph(d, *build_range);
      write_output(build_out, export_text(std::cref(g), format_of(build_out)), out);
      return 0;
    }

    if (*metrics) {
      const Deployment d = load_input(metrics_in);
      const RadioGraph g = build_radio_graph(d, metrics_range);
      const SweepRow row = metrics_row(g, parse_gateway(metrics_gateway), metrics_regime);
      const std::vector<SweepRow> rows{row};
      const std::string text =
          format_of(metrics_out) == ExportFormat::json ? to_json(row).dump(2) + "\n" : sweep_csv(rows);
      write_output(metrics_out, text, out);
      return 0;
    }

    if (*sweep) {
      const Deployment d = load_input(sweep_in);
      SweepOptions opts;
      opts.simulate = sweep_simulate;
      opts.sim = sweep_sim.config();
      opts.regime = sweep_regime;
      const auto rows = range_sweep(d, parse_range_list(sweep_ranges), opts);
      write_output(sweep_out, export_text(std::cref(rows), format_of(sweep_out)), out);
      return 0;
    }

    if (*simulate) {
      const Deployment d = load_input(sim_in);
      const RadioGraph g = build_radio_graph(d, sim_range);
      const RoundTrace trace = run_simulation(g, *parse_behavior(sim_behavior), sim_flags.config());
      write_output(sim_out, export_text(std::cref(trace), format_of(sim_out)), out);
      if (!trace.quiescent) {
        err << "error: simulation did not reach quiescence within " << trace.config.max_rounds << " rounds\n";
        return 1;
      }
      return 0;
    }

    if (*serve) {
      if (!static_dir.empty()) serve_opts.static_dir = static_dir;
      const ApiService api(load_input(serve_in));
      HttpServer server(api, serve_opts);
      const int port = server.bind();
      err << "serving " << api.deployment().size() << " sites on http://" << serve_opts.host << ":" << port << "\n";
      server.listen();
      return 0;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace trapnet
