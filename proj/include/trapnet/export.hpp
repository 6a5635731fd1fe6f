#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "trapnet/sweep.hpp"
#include "trapnet/sync_engine.hpp"
#include "trapnet/topology.hpp"

namespace trapnet {

using Json = nlohmann::ordered_json;

// Exact sweep CSV header; the simulation columns are appended only when at
// least one row carries a simulation summary.
inline constexpr const char* kSweepHeader =
    "range_km,total_nodes,bound_nodes,isolated_nodes,undirected_edges,channels,fanout_min,fanout_max,"
    "network_count,diameter_max,radius_min,depth_leader,regime";
inline constexpr const char* kSweepSimHeader = ",convergence_round,completion_round,latency_minutes";

std::string sweep_csv(const std::vector<SweepRow>& rows);
Json to_json(const SweepRow& row);
Json sweep_json(const std::vector<SweepRow>& rows);

// A metrics row as the `metrics` command and /api/metrics report it.
SweepRow metrics_row(const RadioGraph& g, std::optional<SiteId> leader, const RegimeOptions& opts = {});

Json deployment_json(const Deployment& d);
Json graph_json(const RadioGraph& g, const WindGraph* wind = nullptr);
std::string graph_dot(const RadioGraph& g);
std::string graph_dot(const WindGraph& g);
std::string graph_geojson(const RadioGraph& g);
std::string graph_geojson(const WindGraph& g);

Json trace_json(const RoundTrace& t);
std::string trace_csv(const RoundTrace& t);

enum class ExportFormat { csv, json, dot, geojson };
std::optional<ExportFormat> parse_export_format(std::string_view name);

using Exportable =
    std::variant<std::reference_wrapper<const std::vector<SweepRow>>, std::reference_wrapper<const RadioGraph>,
                 std::reference_wrapper<const WindGraph>, std::reference_wrapper<const RoundTrace>,
                 std::reference_wrapper<const Deployment>>;

/// Renders any exportable object. JSON output is pretty-printed with a
/// trailing newline. Unsupported pairings (e.g. a sweep as DOT) throw
/// DomainError.
std::string export_text(const Exportable& object, ExportFormat format);

}  // namespace trapnet
