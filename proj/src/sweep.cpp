#include "trapnet/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "text_format.hpp"
#include "trapnet/error.hpp"

namespace trapnet {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::disrupted:
      return "disrupted";
    case Regime::single:
      return "single";
    case Regime::over_connected:
      return "over_connected";
  }
  return "?";
}

Regime classify_regime(const NetworkMetrics& m, const RegimeOptions& opts) {
  if (m.network_count != 1 || m.isolated_nodes > 0) return Regime::disrupted;
  const double threshold = opts.over_connect_fraction * static_cast<double>(m.total_nodes);
  if (static_cast<double>(m.fanout_max) >= threshold) return Regime::over_connected;
  return Regime::single;
}

namespace {

SimSummary simulate_row(const RadioGraph& g, const SimConfig& cfg) {
  SimSummary s;
  auto routing = routing_convergence(g, cfg);
  if (routing.trace.quiescent) s.convergence_round = routing.trace.convergence_round;

  auto election = leader_election(g, cfg);
  s.leader = election.trace.leader;
  s.diameter = election.trace.diameter;

  // An automatic gateway is skipped when nothing is bound; an explicit one
  // must be usable.
  if (!cfg.gateway) {
    auto leader = auto_leader(g);
    if (!leader || g.degree(g.index_of(*leader)) == 0) return s;
  }
  auto trace = convergecast_collect(g, cfg);
  s.gateway = trace.collection->gateway;
  s.completion_round = trace.collection->completion_round;
  s.latency_minutes = trace.collection->latency_minutes;
  return s;
}

}  // namespace

std::vector<SweepRow> range_sweep(const Deployment& d, std::vector<double> ranges, const SweepOptions& opts) {
  if (ranges.empty()) throw DomainError("at least one range is required");
  for (double r : ranges) {
    if (!std::isfinite(r) || r < 0.0) throw DomainError("range " + detail::format_double(r) + " must be >= 0");
  }
  if (opts.simulate) opts.sim.validate();
  std::sort(ranges.begin(), ranges.end());

  std::vector<SweepRow> rows;
  rows.reserve(ranges.size());
  for (double r : ranges) {
    try {
      const RadioGraph g = build_radio_graph(d, r);
      SweepRow row;
      row.range_km = r;
      row.metrics = network_metrics(g, opts.sim.gateway);
      row.regime = classify_regime(row.metrics, opts.regime);
      if (opts.simulate) row.simulation = simulate_row(g, opts.sim);
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      throw DomainError("range_km=" + detail::format_double(r) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace trapnet
