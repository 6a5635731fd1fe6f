#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trapnet/geo.hpp"

namespace trapnet {

using Hops = std::uint32_t;

// Dense node index: position of a site in its deployment.
using NodeIndex = std::size_t;

/// Shared indexing for graphs built over a deployment: id <-> index lookup
/// and per-node adjacency lists ordered by ascending neighbor id.
class SiteGraph {
 public:
  const Deployment& deployment() const { return deployment_; }
  std::size_t node_count() const { return deployment_.size(); }

  SiteId id_at(NodeIndex i) const { return deployment_[i].id; }
  std::optional<NodeIndex> find(SiteId id) const;
  // Throws DomainError for unknown ids.
  NodeIndex index_of(SiteId id) const;

  // Neighbor indices of node i, sorted by ascending neighbor id.
  const std::vector<NodeIndex>& adjacent(NodeIndex i) const { return adjacency_[i]; }
  std::vector<SiteId> neighbor_ids(SiteId id) const;

  // Number of adjacency entries summed over all nodes.
  std::size_t arc_count() const;

 protected:
  SiteGraph(Deployment d, std::vector<std::vector<NodeIndex>> adjacency);

 private:
  Deployment deployment_;
  std::vector<std::vector<NodeIndex>> adjacency_;
  std::unordered_map<SiteId, NodeIndex> index_;
};

/// Undirected unit-disk graph: an edge joins u != v iff distance <= range.
class RadioGraph : public SiteGraph {
 public:
  double range_km() const { return range_km_; }
  std::size_t edge_count() const { return arc_count() / 2; }
  // Each undirected edge once as (smaller id, larger id), sorted.
  std::vector<std::pair<SiteId, SiteId>> edges() const;
  std::size_t degree(NodeIndex i) const { return adjacent(i).size(); }

 private:
  friend RadioGraph build_radio_graph(const Deployment&, double);
  RadioGraph(Deployment d, double range_km, std::vector<std::vector<NodeIndex>> adjacency)
      : SiteGraph(std::move(d), std::move(adjacency)), range_km_(range_km) {}

  double range_km_ = 0.0;
};

RadioGraph build_radio_graph(const Deployment& d, double range_km);

/// Wind over the sampling window. bearing_deg is where the wind blows
/// toward, clockwise from north, normalized to [0, 360).
class WindField {
 public:
  // Throws DomainError when velocity < 0, hours <= 0 or any value is
  // non-finite.
  WindField(double velocity_kmh, double sampling_hours, double bearing_deg);

  double velocity_kmh() const { return velocity_kmh_; }
  double sampling_hours() const { return sampling_hours_; }
  double bearing_deg() const { return bearing_deg_; }

 private:
  double velocity_kmh_;
  double sampling_hours_;
  double bearing_deg_;
};

// Maximum dispersal distance v * t.
double wind_radius_km(const WindField& w);

/// Directed dispersal graph. N1 -> N2 iff |N1N2| <= v*t and the angle between
/// the wind bearing and the direction N1 -> N2 is at most a right angle.
class WindGraph : public SiteGraph {
 public:
  const WindField& wind() const { return wind_; }
  std::size_t arc_total() const { return arc_count(); }
  // Directed arcs (from id, to id), sorted.
  std::vector<std::pair<SiteId, SiteId>> arcs() const;
  // Undirected support: {u, v} with u < v, present if either direction is.
  std::vector<std::pair<SiteId, SiteId>> undirected_support() const;

 private:
  friend WindGraph build_wind_graph(const Deployment&, const WindField&);
  WindGraph(Deployment d, WindField w, std::vector<std::vector<NodeIndex>> adjacency)
      : SiteGraph(std::move(d), std::move(adjacency)), wind_(w) {}

  WindField wind_;
};

WindGraph build_wind_graph(const Deployment& d, const WindField& w);

// Unit vector (east, north) for a compass bearing; exact at multiples of 90.
Displacement bearing_unit_vector(double bearing_deg);

// Components as sorted id lists, ordered by their smallest id.
std::vector<std::vector<SiteId>> components(const RadioGraph& g);

// BFS hop counts from source; nullopt marks unreachable nodes.
std::map<SiteId, std::optional<Hops>> hop_distances(const RadioGraph& g, SiteId source);

// Index-based BFS used by the metrics and the simulator. Unreachable nodes
// get kUnreachable.
inline constexpr Hops kUnreachable = static_cast<Hops>(-1);
std::vector<Hops> bfs_hops(const SiteGraph& g, NodeIndex source);

Hops eccentricity(const RadioGraph& g, SiteId node);

struct NetworkMetrics {
  double range_km = 0.0;
  std::size_t total_nodes = 0;
  std::size_t bound_nodes = 0;
  std::size_t isolated_nodes = 0;
  std::size_t undirected_edges = 0;
  std::size_t channels = 0;
  // Over bound nodes; 0 when none are bound.
  std::size_t fanout_min = 0;
  std::size_t fanout_max = 0;
  // Components with at least two nodes.
  std::size_t network_count = 0;
  // All components, singletons included.
  std::size_t component_count = 0;
  Hops diameter_max = 0;
  Hops radius_min = 0;
  Hops depth_leader = 0;
  // Absent only for an empty deployment.
  std::optional<SiteId> leader;

  friend bool operator==(const NetworkMetrics&, const NetworkMetrics&) = default;
};

// The automatic leader: the maximum id in the largest component. Equal-size
// components are resolved toward the one holding the larger maximum id.
std::optional<SiteId> auto_leader(const RadioGraph& g);

/// Computes every Table-style metric. An explicit leader must exist and be
/// bound (DomainError otherwise); nullopt selects auto_leader().
NetworkMetrics network_metrics(const RadioGraph& g, std::optional<SiteId> leader = std::nullopt);

}  // namespace trapnet
