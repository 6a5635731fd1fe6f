// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "oracles.hpp"
#include "trapnet/cli.hpp"
#include "trapnet/sweep.hpp"
#include "trapnet/sync_engine.hpp"

using namespace trapnet;

namespace {

// Collects the first few mismatches of a criterion.
struct Failures {
  std::vector<std::string> items;
  std::size_t checks = 0;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && items.size() < 5) items.push_back(what);
    if (!ok && items.size() == 5) items.push_back("...");
  }
  bool ok() const { return items.empty(); }
};

int failed = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Failures&)>& body) {
  Failures f;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(f);
  } catch (const std::exception& e) {
    f.items.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.expect(secs < budget_s, "took longer than budget");
  const bool pass = f.ok();
  if (!pass) ++failed;
  std::printf("%s  %-28s %8.3fs (budget %gs, %zu checks)\n", pass ? "PASS" : "FAIL", name.c_str(), secs, budget_s,
              f.checks);
  for (const auto& item : f.items) std::printf("      %s\n", item.c_str());
  std::fflush(stdout);
}

std::string S(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::size_t index_of_id(const Deployment& d, SiteId id) {
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k].id == id) return k;
  }
  return d.size();
}

void wind_radius(Failures& f) {
  f.expect(wind_radius_km(WindField(2.0, 4.0, 0.0)) == 8.0, "v=2 t=4 should give exactly 8 km");
}

void latency(Failures& f) {
  f.expect(latency_minutes(9, 5.0) == 45.0, "depth 9 at 5 min");
  f.expect(latency_minutes(12, 5.0) == 60.0, "depth 12 at 5 min");
  // The same figures end to end: convergecast on a path, gateway at one end.
  for (std::size_t depth : {9, 12}) {
    SimConfig cfg;
    cfg.gateway = 1;
    cfg.link_capacity = std::nullopt;
    const auto t = convergecast_collect(build_radio_graph(oracle::path(depth + 1), 1.0), cfg);
    f.expect(t.collection->gateway_eccentricity == depth, "path depth");
    f.expect(t.collection->latency_minutes == 5.0 * static_cast<double>(depth),
             "end-to-end latency for depth " + std::to_string(depth));
  }
}

void routing_oracle(Failures& f) {
  const double ranges[] = {3, 5, 6, 8, 10, 15, 25};
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const std::size_t n = 5 + (seed * 37) % 96;  // 5..100
    const double r = ranges[seed % 7];
    const auto d = oracle::random_planar(n, 40, 60, seed);
    const auto g = build_radio_graph(d, r);
    const auto fw = oracle::all_pairs_hops(oracle::planar_adjacency(d, r));
    const auto res = routing_convergence(g);
    const std::string tag = "seed " + std::to_string(seed) + " n=" + std::to_string(n) + " r=" + S(r);
    f.expect(res.trace.quiescent, tag + ": no quiescence");
    int diameter = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& table = res.tables.at(d[i].id);
      const auto& links = g.neighbor_ids(d[i].id);
      std::size_t reachable = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (fw[i][j] == oracle::kInf) continue;
        ++reachable;
        diameter = std::max(diameter, fw[i][j]);
        auto it = table.find(d[j].id);
        if (it == table.end()) {
          f.expect(false, tag + ": missing route");
          continue;
        }
        f.expect(it->second.hops == static_cast<Hops>(fw[i][j]), tag + ": distance mismatch");
        if (i == j) {
          f.expect(!it->second.link_index, tag + ": self route has a first hop");
          continue;
        }
        const auto hop = links.at(it->second.link_index.value());
        f.expect(fw[index_of_id(d, hop)][j] == fw[i][j] - 1, tag + ": first hop off a shortest path");
      }
      f.expect(table.size() == reachable, tag + ": table holds unreachable destinations");
    }
    f.expect(res.trace.convergence_round.value_or(0) <= static_cast<std::size_t>(diameter),
             tag + ": converged after the diameter");
  }
}

void metrics_oracle(Failures& f) {
  const double ranges[] = {0, 2, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 30, 40, 80};
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const std::size_t n = 1 + seed % 50;
    const auto d = oracle::random_planar(n, 40, 60, seed);
    for (double r : ranges) {
      const auto m = network_metrics(build_radio_graph(d, r));
      const auto o = oracle::brute_metrics(d, r);
      const std::string tag = "seed " + std::to_string(seed) + " r=" + S(r) + ": ";
      f.expect(m.total_nodes == o.total, tag + "total_nodes");
      f.expect(m.bound_nodes == o.bound, tag + "bound_nodes");
      f.expect(m.isolated_nodes == o.isolated, tag + "isolated_nodes");
      f.expect(m.undirected_edges == o.edges, tag + "undirected_edges");
      f.expect(m.channels == o.channels, tag + "channels");
      f.expect(m.fanout_min == o.fmin, tag + "fanout_min");
      f.expect(m.fanout_max == o.fmax, tag + "fanout_max");
      f.expect(m.network_count == o.networks, tag + "network_count");
      f.expect(m.component_count == o.components, tag + "component_count");
      f.expect(m.diameter_max == static_cast<Hops>(o.diameter), tag + "diameter_max");
      f.expect(m.radius_min == static_cast<Hops>(o.radius), tag + "radius_min");
      f.expect(m.depth_leader == static_cast<Hops>(o.depth), tag + "depth_leader");
      f.expect(m.leader == o.leader, tag + "leader");
    }
  }
}

void monotonicity(Failures& f) {
  std::vector<double> ranges{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 25, 30, 40, 60, 80};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto d = oracle::random_planar(20 + seed % 60, 40, 60, seed);
    std::set<std::pair<SiteId, SiteId>> prev_edges;
    std::optional<NetworkMetrics> prev;
    bool all_joined = false;
    for (double r : ranges) {
      const auto g = build_radio_graph(d, r);
      const auto m = network_metrics(g);
      const auto e = g.edges();
      const std::set<std::pair<SiteId, SiteId>> edges(e.begin(), e.end());
      const std::string tag = "seed " + std::to_string(seed) + " r=" + S(r) + ": ";
      if (prev) {
        f.expect(std::includes(edges.begin(), edges.end(), prev_edges.begin(), prev_edges.end()), tag + "edge set");
        f.expect(m.bound_nodes >= prev->bound_nodes, tag + "bound_nodes");
        f.expect(m.undirected_edges >= prev->undirected_edges, tag + "edges");
        f.expect(m.channels >= prev->channels, tag + "channels");
        f.expect(m.fanout_min >= prev->fanout_min, tag + "fanout_min");
        f.expect(m.fanout_max >= prev->fanout_max, tag + "fanout_max");
        f.expect(m.component_count <= prev->component_count, tag + "component_count");
        if (all_joined) f.expect(m.diameter_max <= prev->diameter_max, tag + "diameter after joining");
      }
      all_joined = all_joined || m.component_count == 1;
      prev_edges = edges;
      prev = m;
    }
  }
}

void wind_laws(Failures& f) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto d = oracle::random_planar(40, 40, 40, seed);
    const double bearing = static_cast<double>((seed * 53) % 360) + 0.25 * static_cast<double>(seed % 4);
    const WindField w(0.5 + static_cast<double>(seed % 5), 2.0 + static_cast<double>(seed % 3), bearing);
    const double radius = wind_radius_km(w);
    const auto wg = build_wind_graph(d, w);
    const auto adj = oracle::planar_adjacency(d, radius);
    const std::string tag = "seed " + std::to_string(seed) + ": ";

    for (const auto& [a, b] : wg.undirected_support()) {
      f.expect(adj[index_of_id(d, a)][index_of_id(d, b)] == 1, tag + "wind edge outside the radio graph");
    }
    const auto arcs = wg.arcs();
    const std::set<std::pair<SiteId, SiteId>> arc_set(arcs.begin(), arcs.end());
    const double to_rad = std::numbers::pi / 180.0;
    const double ex = std::sin(w.bearing_deg() * to_rad), ny = std::cos(w.bearing_deg() * to_rad);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& p = std::get<PlanarPoint>(d[i].position);
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        if (!adj[i][j]) continue;
        const auto& q = std::get<PlanarPoint>(d[j].position);
        const double along = ex * (q.x_km - p.x_km) + ny * (q.y_km - p.y_km);
        const bool fwd = arc_set.count({d[i].id, d[j].id}) > 0, back = arc_set.count({d[j].id, d[i].id}) > 0;
        if (std::abs(along) > 1e-9) {
          f.expect(fwd != back, tag + "strict downwind/upwind pair not asymmetric");
          f.expect(fwd == (along > 0), tag + "arc points upwind");
        }
      }
    }

    // A pair exactly across the wind on the compass grid: both arcs present.
    const double side = std::min(radius, 3.0);
    const double cardinal = static_cast<double>(90 * (seed % 4));
    const bool ns = static_cast<int>(cardinal) % 180 == 0;
    const auto pair = oracle::planar({{0, 0}, {ns ? side : 0.0, ns ? 0.0 : side}});
    const auto cross = build_wind_graph(pair, WindField(w.velocity_kmh(), w.sampling_hours(), cardinal));
    f.expect(cross.arc_total() == 2, tag + "crosswind pair should be linked both ways");
  }
}

void contention(Failures& f) {
  for (std::size_t n = 2; n <= 40; ++n) {
    SimConfig cfg;
    cfg.gateway = 1;
    const auto t = convergecast_collect(build_radio_graph(oracle::path(n), 1.0), cfg);
    f.expect(t.collection->completion_round == n - 1, "path n=" + std::to_string(n));
    f.expect(oracle::path_convergecast_rounds(n) == n - 1, "counter oracle n=" + std::to_string(n));
  }
  for (std::size_t leaves = 1; leaves <= 5; ++leaves) {
    SimConfig cfg;
    cfg.gateway = 1;
    const auto t = convergecast_collect(build_radio_graph(oracle::star(leaves), 1.05), cfg);
    f.expect(t.collection->completion_round == std::size_t{1}, "star leaves=" + std::to_string(leaves));
  }
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto d = oracle::random_planar(60, 40, 60, seed);
    for (double r : {6.0, 8.0, 10.0, 20.0}) {
      for (std::size_t cap : {1, 2, 4}) {
        SimConfig cfg;
        cfg.link_capacity = cap;
        const auto t = convergecast_collect(build_radio_graph(d, r), cfg);
        const auto& c = *t.collection;
        const std::string tag = "seed " + std::to_string(seed) + " r=" + S(r) + " cap=" + std::to_string(cap) + ": ";
        f.expect(t.quiescent && c.completion_round.has_value(), tag + "did not complete");
        for (const auto& rec : t.rounds) {
          f.expect(rec.max_link_load <= cap, tag + "capacity exceeded in round " + std::to_string(rec.round));
          f.expect(rec.samples_delivered + rec.samples_in_transit + rec.samples_undeliverable == c.samples_originated,
                   tag + "samples not conserved in round " + std::to_string(rec.round));
        }
      }
    }
  }
}

void study_area_shape(Failures& f) {
  const auto d = generate_synthetic(60, BoundingBox{0, 0, 40, 60}, 7);
  const auto rows = range_sweep(d, kStudyRanges);
  f.expect(rows.size() == 9, "nine rows");
  f.expect(rows.front().regime == Regime::disrupted && rows.front().metrics.isolated_nodes > 0,
           "smallest range should be disrupted with isolated traps");
  std::optional<std::size_t> threshold;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& m = rows[i].metrics;
    if (m.bound_nodes == 60 && m.network_count == 1 && m.component_count == 1) {
      threshold = i;
      break;
    }
  }
  f.expect(threshold.has_value() && *threshold > 0, "a threshold range binds all 60 traps into one network");
  if (!threshold) return;
  for (std::size_t i = 0; i < *threshold; ++i) f.expect(rows[i].regime == Regime::disrupted, "disrupted before");
  for (std::size_t i = *threshold; i < rows.size(); ++i) {
    f.expect(rows[i].metrics.component_count == 1, "stays one network");
    if (i > *threshold) {
      f.expect(rows[i].metrics.diameter_max <= rows[i - 1].metrics.diameter_max,
               "diameter declines at " + S(rows[i].range_km));
      f.expect(rows[i].metrics.fanout_max >= rows[i - 1].metrics.fanout_max,
               "fan-out grows at " + S(rows[i].range_km));
    }
  }
  f.expect(rows[*threshold].regime == Regime::single, "threshold range is a single network");
  f.expect(rows.back().regime == Regime::over_connected, "largest range is over-connected");
  f.expect(rows.back().metrics.diameter_max < rows[*threshold].metrics.diameter_max, "diameter falls overall");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    f.expect(static_cast<int>(rows[i].regime) >= static_cast<int>(rows[i - 1].regime), "regimes in order");
  }
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "trapnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

void determinism(Failures& f) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("trapnet_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string input = (dir / "d.csv").string();
  const std::vector<std::vector<std::string>> commands{
      {"gen", "--seed", "7"},
      {"sweep", "-i", input},
      {"sweep", "-i", input, "--simulate"},
      {"simulate", "-i", input, "--range", "10", "--behavior", "collect"},
      {"simulate", "-i", input, "--range", "20", "--behavior", "elect"},
      {"simulate", "-i", input, "--range", "8", "--behavior", "route", "--capacity", "inf"},
      {"build", "-i", input, "--range", "8", "--export", "geojson"},
  };
  f.expect(cli({"gen", "--seed", "7", "-o", input}).code == 0, "gen");
  for (const auto& cmd : commands) {
    const auto a = cli(cmd), b = cli(cmd);
    f.expect(a.code == 0 && b.code == 0, cmd[0] + " failed");
    f.expect(!a.out.empty() && a.out == b.out, cmd[0] + " output differs between runs");
  }
  fs::remove_all(dir);
}

}  // namespace

int main() {
  criterion("wind radius", 1, wind_radius);
  criterion("latency arithmetic", 1, latency);
  criterion("routing oracle", 30, routing_oracle);
  criterion("metrics oracle", 30, metrics_oracle);
  criterion("monotonicity", 10, monotonicity);
  criterion("wind-graph laws", 10, wind_laws);
  criterion("convergecast contention", 10, contention);
  criterion("study-area regime sequence", 10, study_area_shape);
  criterion("determinism", 10, determinism);
  std::printf("%s: %d failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
