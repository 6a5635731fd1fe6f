#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "trapnet/sync_engine.hpp"
#include "trapnet/topology.hpp"

namespace trapnet {

enum class Regime { disrupted, single, over_connected };

const char* to_string(Regime r);

struct RegimeOptions {
  // A single network counts as over-connected once fanout_max reaches this
  // fraction of total_nodes.
  double over_connect_fraction = 0.5;
};

struct SimSummary {
  std::optional<std::size_t> convergence_round;
  std::optional<SiteId> leader;
  std::optional<Hops> diameter;
  std::optional<SiteId> gateway;
  std::optional<std::size_t> completion_round;
  std::optional<double> latency_minutes;
  friend bool operator==(const SimSummary&, const SimSummary&) = default;
};

struct SweepRow {
  double range_km = 0.0;
  NetworkMetrics metrics;
  Regime regime = Regime::disrupted;
  std::optional<SimSummary> simulation;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// disrupted: not exactly one network, or any isolated node. over_connected:
// otherwise, when fanout_max >= fraction * total_nodes. single: the rest.
Regime classify_regime(const NetworkMetrics& m, const RegimeOptions& opts = {});
inline Regime classify_regime(const SweepRow& row, const RegimeOptions& opts = {}) {
  return classify_regime(row.metrics, opts);
}

struct SweepOptions {
  bool simulate = false;
  SimConfig sim;
  RegimeOptions regime;
};

/// One row per requested range, sorted ascending. Errors from the graph or
/// simulation layers are rethrown as DomainError prefixed with the range.
std::vector<SweepRow> range_sweep(const Deployment& d, std::vector<double> ranges, const SweepOptions& opts = {});

// Default sweep: nine ranges from 5 to 40 km.
inline const std::vector<double> kStudyRanges{5, 6, 7, 8, 9, 10, 20, 30, 40};

}  // namespace trapnet
