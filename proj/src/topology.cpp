#include "trapnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

#include "trapnet/error.hpp"

namespace trapnet {

namespace {

void sort_by_id(const Deployment& d, std::vector<NodeIndex>& list) {
  std::sort(list.begin(), list.end(), [&d](NodeIndex a, NodeIndex b) { return d[a].id < d[b].id; });
}

struct ComponentScan {
  std::vector<std::size_t> component_of;            // per node
  std::vector<std::vector<NodeIndex>> members;      // per component, BFS order
};

ComponentScan scan_components(const SiteGraph& g) {
  const std::size_t n = g.node_count();
  ComponentScan scan;
  scan.component_of.assign(n, static_cast<std::size_t>(-1));
  for (NodeIndex start = 0; start < n; ++start) {
    if (scan.component_of[start] != static_cast<std::size_t>(-1)) continue;
    const std::size_t c = scan.members.size();
    auto& list = scan.members.emplace_back();
    scan.component_of[start] = c;
    list.push_back(start);
    for (std::size_t head = 0; head < list.size(); ++head) {
      for (NodeIndex v : g.adjacent(list[head])) {
        if (scan.component_of[v] == static_cast<std::size_t>(-1)) {
          scan.component_of[v] = c;
          list.push_back(v);
        }
      }
    }
  }
  return scan;
}

Hops max_finite(const std::vector<Hops>& hops) {
  Hops best = 0;
  for (Hops h : hops) {
    if (h != kUnreachable) best = std::max(best, h);
  }
  return best;
}

}  // namespace

SiteGraph::SiteGraph(Deployment d, std::vector<std::vector<NodeIndex>> adjacency)
    : deployment_(std::move(d)), adjacency_(std::move(adjacency)) {
  index_.reserve(deployment_.size());
  for (NodeIndex i = 0; i < deployment_.size(); ++i) index_.emplace(deployment_[i].id, i);
}

std::optional<NodeIndex> SiteGraph::find(SiteId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex SiteGraph::index_of(SiteId id) const {
  auto i = find(id);
  if (!i) throw DomainError("unknown node id " + std::to_string(id));
  return *i;
}

std::vector<SiteId> SiteGraph::neighbor_ids(SiteId id) const {
  std::vector<SiteId> out;
  for (NodeIndex v : adjacent(index_of(id))) out.push_back(id_at(v));
  return out;
}

std::size_t SiteGraph::arc_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total;
}

std::vector<std::pair<SiteId, SiteId>> RadioGraph::edges() const {
  std::vector<std::pair<SiteId, SiteId>> out;
  out.reserve(edge_count());
  for (NodeIndex u = 0; u < node_count(); ++u) {
    for (NodeIndex v : adjacent(u)) {
      if (id_at(u) < id_at(v)) out.emplace_back(id_at(u), id_at(v));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RadioGraph build_radio_graph(const Deployment& d, double range_km) {
  if (!(range_km >= 0.0) || !std::isfinite(range_km)) {
    throw DomainError("range must be a finite non-negative length");
  }
  const std::size_t n = d.size();
  std::vector<std::vector<NodeIndex>> adjacency(n);
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = u + 1; v < n; ++v) {
      if (distance_km(d[u].position, d[v].position) <= range_km) {
        adjacency[u].push_back(v);
        adjacency[v].push_back(u);
      }
    }
  }
  for (auto& list : adjacency) sort_by_id(d, list);
  return RadioGraph(d, range_km, std::move(adjacency));
}

WindField::WindField(double velocity_kmh, double sampling_hours, double bearing_deg)
    : velocity_kmh_(velocity_kmh), sampling_hours_(sampling_hours) {
  if (!std::isfinite(velocity_kmh) || velocity_kmh < 0.0) {
    throw DomainError("wind velocity must be a finite value >= 0 km/h");
  }
  if (!std::isfinite(sampling_hours) || sampling_hours <= 0.0) {
    throw DomainError("sampling time must be a finite value > 0 h");
  }
  if (!std::isfinite(bearing_deg)) throw DomainError("wind bearing must be finite");
  double b = std::fmod(bearing_deg, 360.0);
  if (b < 0.0) b += 360.0;
  if (b >= 360.0) b = 0.0;
  bearing_deg_ = b;
}

double wind_radius_km(const WindField& w) { return w.velocity_kmh() * w.sampling_hours(); }

Displacement bearing_unit_vector(double bearing_deg) {
  double b = std::fmod(bearing_deg, 360.0);
  if (b < 0.0) b += 360.0;
  if (b == 0.0 || b == 360.0) return {0.0, 1.0};
  if (b == 90.0) return {1.0, 0.0};
  if (b == 180.0) return {0.0, -1.0};
  if (b == 270.0) return {-1.0, 0.0};
  const double rad = b * std::numbers::pi / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

WindGraph build_wind_graph(const Deployment& d, const WindField& w) {
  const double radius = wind_radius_km(w);
  const Displacement toward = bearing_unit_vector(w.bearing_deg());
  const std::size_t n = d.size();
  std::vector<std::vector<NodeIndex>> adjacency(n);
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = 0; v < n; ++v) {
      if (u == v) continue;
      const Displacement step = displacement_km(d[u].position, d[v].position);
      if (std::hypot(step.east_km, step.north_km) > radius) continue;
      // |beta| <= pi/2 exactly when the projection on the bearing is >= 0.
      if (toward.east_km * step.east_km + toward.north_km * step.north_km >= 0.0) {
        adjacency[u].push_back(v);
      }
    }
  }
  for (auto& list : adjacency) sort_by_id(d, list);
  return WindGraph(d, w, std::move(adjacency));
}

std::vector<std::pair<SiteId, SiteId>> WindGraph::arcs() const {
  std::vector<std::pair<SiteId, SiteId>> out;
  for (NodeIndex u = 0; u < node_count(); ++u) {
    for (NodeIndex v : adjacent(u)) out.emplace_back(id_at(u), id_at(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<SiteId, SiteId>> WindGraph::undirected_support() const {
  std::vector<std::pair<SiteId, SiteId>> out;
  for (auto [a, b] : arcs()) out.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Hops> bfs_hops(const SiteGraph& g, NodeIndex source) {
  std::vector<Hops> hops(g.node_count(), kUnreachable);
  std::queue<NodeIndex> frontier;
  hops[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    NodeIndex u = frontier.front();
    frontier.pop();
    for (NodeIndex v : g.adjacent(u)) {
      if (hops[v] == kUnreachable) {
        hops[v] = hops[u] + 1;
        frontier.push(v);
      }
    }
  }
  return hops;
}

std::vector<std::vector<SiteId>> components(const RadioGraph& g) {
  auto scan = scan_components(g);
  std::vector<std::vector<SiteId>> out;
  out.reserve(scan.members.size());
  for (const auto& list : scan.members) {
    auto& ids = out.emplace_back();
    for (NodeIndex i : list) ids.push_back(g.id_at(i));
    std::sort(ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::map<SiteId, std::optional<Hops>> hop_distances(const RadioGraph& g, SiteId source) {
  const auto hops = bfs_hops(g, g.index_of(source));
  std::map<SiteId, std::optional<Hops>> out;
  for (NodeIndex i = 0; i < hops.size(); ++i) {
    out.emplace(g.id_at(i), hops[i] == kUnreachable ? std::nullopt : std::optional<Hops>(hops[i]));
  }
  return out;
}

Hops eccentricity(const RadioGraph& g, SiteId node) { return max_finite(bfs_hops(g, g.index_of(node))); }

namespace {

// Index of the largest component; ties go to the one with the larger max id.
std::optional<std::size_t> largest_component(const SiteGraph& g, const ComponentScan& scan) {
  std::optional<std::size_t> best;
  SiteId best_max = 0;
  for (std::size_t c = 0; c < scan.members.size(); ++c) {
    SiteId top = 0;
    for (NodeIndex i : scan.members[c]) top = std::max(top, g.id_at(i));
    if (!best || scan.members[c].size() > scan.members[*best].size() ||
        (scan.members[c].size() == scan.members[*best].size() && top > best_max)) {
      best = c;
      best_max = top;
    }
  }
  return best;
}

SiteId max_id(const SiteGraph& g, const std::vector<NodeIndex>& members) {
  SiteId top = 0;
  for (NodeIndex i : members) top = std::max(top, g.id_at(i));
  return top;
}

}  // namespace

std::optional<SiteId> auto_leader(const RadioGraph& g) {
  auto scan = scan_components(g);
  auto c = largest_component(g, scan);
  if (!c) return std::nullopt;
  return max_id(g, scan.members[*c]);
}

NetworkMetrics network_metrics(const RadioGraph& g, std::optional<SiteId> leader) {
  NetworkMetrics m;
  m.range_km = g.range_km();
  m.total_nodes = g.node_count();
  m.undirected_edges = g.edge_count();
  m.channels = 2 * m.undirected_edges;

  bool any_bound = false;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const std::size_t deg = g.degree(i);
    if (deg == 0) {
      ++m.isolated_nodes;
      continue;
    }
    ++m.bound_nodes;
    m.fanout_min = any_bound ? std::min(m.fanout_min, deg) : deg;
    m.fanout_max = std::max(m.fanout_max, deg);
    any_bound = true;
  }

  if (leader) {
    const NodeIndex li = g.index_of(*leader);
    if (g.degree(li) == 0) throw DomainError("leader " + std::to_string(*leader) + " is isolated");
  }

  const auto scan = scan_components(g);
  m.component_count = scan.members.size();
  std::vector<Hops> ecc(g.node_count(), 0);
  for (const auto& members : scan.members) {
    if (members.size() < 2) continue;
    ++m.network_count;
    for (NodeIndex i : members) {
      ecc[i] = max_finite(bfs_hops(g, i));
      m.diameter_max = std::max(m.diameter_max, ecc[i]);
    }
  }

  if (auto c = largest_component(g, scan)) {
    const auto& members = scan.members[*c];
    m.radius_min = ecc[members.front()];
    for (NodeIndex i : members) m.radius_min = std::min(m.radius_min, ecc[i]);
    m.leader = leader ? *leader : max_id(g, members);
    m.depth_leader = ecc[g.index_of(*m.leader)];
  }
  return m;
}

}  // namespace trapnet
