#include "trapnet/export.hpp"

#include <sstream>

#include "text_format.hpp"
#include "trapnet/error.hpp"

namespace trapnet {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::string optional_csv(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return detail::format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

Json position_json(const Position& p) {
  Json j;
  if (const auto* g = std::get_if<GeoPoint>(&p)) {
    j["lon"] = g->lon;
    j["lat"] = g->lat;
  } else {
    const auto& q = std::get<PlanarPoint>(p);
    j["x_km"] = q.x_km;
    j["y_km"] = q.y_km;
  }
  return j;
}

Json coordinates(const Position& p) {
  if (const auto* g = std::get_if<GeoPoint>(&p)) return Json::array({g->lon, g->lat});
  const auto& q = std::get<PlanarPoint>(p);
  return Json::array({q.x_km, q.y_km});
}

Json node_list(const SiteGraph& g) {
  Json nodes = Json::array();
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto& s = g.deployment()[i];
    Json n;
    n["id"] = s.id;
    n["label"] = s.label;
    const Json pos = position_json(s.position);
    for (auto& [k, v] : pos.items()) n[k] = v;
    n["degree"] = g.adjacent(i).size();
    nodes.push_back(std::move(n));
  }
  return nodes;
}

Json pair_list(const std::vector<std::pair<SiteId, SiteId>>& pairs) {
  Json out = Json::array();
  for (auto [a, b] : pairs) out.push_back(Json::array({a, b}));
  return out;
}

Json wind_json(const WindField& w) {
  Json j;
  j["velocity_kmh"] = w.velocity_kmh();
  j["sampling_hours"] = w.sampling_hours();
  j["bearing_deg"] = w.bearing_deg();
  j["radius_km"] = wind_radius_km(w);
  return j;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string dot_text(const SiteGraph& g, bool directed, const std::vector<std::pair<SiteId, SiteId>>& links,
                     const std::string& comment) {
  std::ostringstream os;
  os << (directed ? "digraph" : "graph") << " trapnet {\n";
  os << "  // " << comment << "\n";
  for (const auto& s : g.deployment()) {
    os << "  " << s.id << " [label=" << dot_quote(std::to_string(s.id) + ":" + s.label) << "];\n";
  }
  const char* op = directed ? " -> " : " -- ";
  for (auto [a, b] : links) os << "  " << a << op << b << ";\n";
  os << "}\n";
  return os.str();
}

std::string geojson_text(const SiteGraph& g, const std::vector<std::pair<SiteId, SiteId>>& links, bool directed) {
  Json features = Json::array();
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto& s = g.deployment()[i];
    Json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", coordinates(s.position)}};
    f["properties"] = {{"id", s.id}, {"label", s.label}, {"degree", g.adjacent(i).size()}};
    features.push_back(std::move(f));
  }
  for (auto [a, b] : links) {
    Json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "LineString"},
                     {"coordinates", Json::array({coordinates(g.deployment()[g.index_of(a)].position),
                                                  coordinates(g.deployment()[g.index_of(b)].position)})}};
    f["properties"] = {{directed ? "from" : "source", a}, {directed ? "to" : "target", b}};
    features.push_back(std::move(f));
  }
  Json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  return doc.dump(2) + "\n";
}

}  // namespace

SweepRow metrics_row(const RadioGraph& g, std::optional<SiteId> leader, const RegimeOptions& opts) {
  SweepRow row;
  row.range_km = g.range_km();
  row.metrics = network_metrics(g, leader);
  row.regime = classify_regime(row.metrics, opts);
  return row;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  bool with_sim = false;
  for (const auto& r : rows) with_sim = with_sim || r.simulation.has_value();

  std::ostringstream os;
  os << kSweepHeader << (with_sim ? kSweepSimHeader : "") << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << detail::format_double(r.range_km) << ',' << m.total_nodes << ',' << m.bound_nodes << ','
       << m.isolated_nodes << ',' << m.undirected_edges << ',' << m.channels << ',' << m.fanout_min << ','
       << m.fanout_max << ',' << m.network_count << ',' << m.diameter_max << ',' << m.radius_min << ','
       << m.depth_leader << ',' << to_string(r.regime);
    if (with_sim) {
      const SimSummary s = r.simulation.value_or(SimSummary{});
      os << ',' << optional_csv(s.convergence_round) << ',' << optional_csv(s.completion_round) << ','
         << optional_csv(s.latency_minutes);
    }
    os << '\n';
  }
  return os.str();
}

Json to_json(const SweepRow& row) {
  const auto& m = row.metrics;
  Json j;
  j["range_km"] = row.range_km;
  j["total_nodes"] = m.total_nodes;
  j["bound_nodes"] = m.bound_nodes;
  j["isolated_nodes"] = m.isolated_nodes;
  j["undirected_edges"] = m.undirected_edges;
  j["channels"] = m.channels;
  j["fanout_min"] = m.fanout_min;
  j["fanout_max"] = m.fanout_max;
  j["network_count"] = m.network_count;
  j["diameter_max"] = m.diameter_max;
  j["radius_min"] = m.radius_min;
  j["depth_leader"] = m.depth_leader;
  j["regime"] = to_string(row.regime);
  j["component_count"] = m.component_count;
  j["leader"] = optional_json(m.leader);
  if (row.simulation) {
    const auto& s = *row.simulation;
    j["convergence_round"] = optional_json(s.convergence_round);
    j["completion_round"] = optional_json(s.completion_round);
    j["latency_minutes"] = optional_json(s.latency_minutes);
    j["gateway"] = optional_json(s.gateway);
    j["election_leader"] = optional_json(s.leader);
    j["election_diameter"] = optional_json(s.diameter);
  }
  return j;
}

Json sweep_json(const std::vector<SweepRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  return out;
}

Json deployment_json(const Deployment& d) {
  Json j;
  j["coordinate_mode"] = to_string(d.mode());
  Json sites = Json::array();
  for (const auto& s : d) {
    Json site;
    site["id"] = s.id;
    site["label"] = s.label;
    const Json pos = position_json(s.position);
    for (auto& [k, v] : pos.items()) site[k] = v;
    sites.push_back(std::move(site));
  }
  j["sites"] = std::move(sites);
  return j;
}

Json graph_json(const RadioGraph& g, const WindGraph* wind) {
  Json j;
  j["range_km"] = g.range_km();
  j["coordinate_mode"] = to_string(g.deployment().mode());
  j["nodes"] = node_list(g);
  j["edges"] = pair_list(g.edges());
  j["edge_count"] = g.edge_count();
  if (wind) {
    j["wind"] = wind_json(wind->wind());
    j["wind_arcs"] = pair_list(wind->arcs());
    j["wind_arc_count"] = wind->arc_total();
  }
  return j;
}

std::string graph_dot(const RadioGraph& g) {
  return dot_text(g, false, g.edges(), "range_km=" + detail::format_double(g.range_km()));
}

std::string graph_dot(const WindGraph& g) {
  const auto& w = g.wind();
  return dot_text(g, true, g.arcs(),
                  "wind velocity_kmh=" + detail::format_double(w.velocity_kmh()) +
                      " sampling_hours=" + detail::format_double(w.sampling_hours()) +
                      " bearing_deg=" + detail::format_double(w.bearing_deg()));
}

std::string graph_geojson(const RadioGraph& g) { return geojson_text(g, g.edges(), false); }
std::string graph_geojson(const WindGraph& g) { return geojson_text(g, g.arcs(), true); }

Json trace_json(const RoundTrace& t) {
  const bool collect = t.behavior == BehaviorKind::collect;
  Json config;
  config["behavior"] = to_string(t.behavior);
  config["range_km"] = t.range_km;
  config["node_count"] = t.node_count;
  config["max_rounds"] = t.config.max_rounds;
  config["link_capacity"] = t.config.link_capacity ? Json(*t.config.link_capacity) : Json("unlimited");
  config["sleep_minutes"] = t.config.sleep_minutes;
  config["gateway"] = t.config.gateway ? Json(*t.config.gateway) : Json("auto");

  Json rounds = Json::array();
  for (const auto& r : t.rounds) {
    Json j;
    j["round"] = r.round;
    j["messages_sent"] = r.messages_sent;
    j["messages_received"] = r.messages_received;
    j["max_link_load"] = r.max_link_load;
    j["max_queue_depth"] = r.max_queue_depth;
    j["queued_total"] = r.queued_total;
    j["state_changes"] = r.state_changes;
    if (collect) {
      j["samples_delivered"] = r.samples_delivered;
      j["samples_in_transit"] = r.samples_in_transit;
      j["samples_undeliverable"] = r.samples_undeliverable;
    }
    rounds.push_back(std::move(j));
  }

  Json summary;
  summary["quiescent"] = t.quiescent;
  summary["rounds_executed"] = t.rounds_executed();
  summary["convergence_round"] = optional_json(t.convergence_round);
  if (t.behavior == BehaviorKind::elect) {
    summary["leader"] = optional_json(t.leader);
    summary["diameter"] = optional_json(t.diameter);
    Json comps = Json::array();
    for (const auto& c : t.leaders) {
      Json j;
      j["leader"] = c.leader;
      j["diameter"] = c.diameter;
      j["size"] = c.members.size();
      j["agreed"] = c.agreed;
      j["members"] = c.members;
      comps.push_back(std::move(j));
    }
    summary["components"] = std::move(comps);
  }
  if (t.collection) {
    const auto& c = *t.collection;
    summary["gateway"] = c.gateway;
    summary["gateway_eccentricity"] = c.gateway_eccentricity;
    summary["component_diameter"] = c.component_diameter;
    summary["samples_originated"] = c.samples_originated;
    summary["samples_delivered"] = c.samples_delivered;
    summary["samples_undeliverable"] = c.undeliverable.size();
    summary["undeliverable"] = c.undeliverable;
    summary["completion_round"] = optional_json(c.completion_round);
    summary["latency_minutes"] = optional_json(c.latency_minutes);
    Json deliveries = Json::array();
    for (const auto& d : c.deliveries) {
      Json j;
      j["origin"] = d.origin;
      j["delivery_round"] = d.delivery_round;
      j["hops"] = d.hops;
      j["value"] = d.value;
      deliveries.push_back(std::move(j));
    }
    summary["deliveries"] = std::move(deliveries);
  }

  Json out;
  out["config"] = std::move(config);
  out["rounds"] = std::move(rounds);
  out["summary"] = std::move(summary);
  return out;
}

std::string trace_csv(const RoundTrace& t) {
  std::ostringstream os;
  os << "round,messages_sent,messages_received,max_link_load,max_queue_depth,queued_total,state_changes,"
        "samples_delivered,samples_in_transit,samples_undeliverable\n";
  for (const auto& r : t.rounds) {
    os << r.round << ',' << r.messages_sent << ',' << r.messages_received << ',' << r.max_link_load << ','
       << r.max_queue_depth << ',' << r.queued_total << ',' << r.state_changes << ',' << r.samples_delivered << ','
       << r.samples_in_transit << ',' << r.samples_undeliverable << '\n';
  }
  return os.str();
}

std::optional<ExportFormat> parse_export_format(std::string_view name) {
  if (name == "csv") return ExportFormat::csv;
  if (name == "json") return ExportFormat::json;
  if (name == "dot") return ExportFormat::dot;
  if (name == "geojson") return ExportFormat::geojson;
  return std::nullopt;
}

std::string export_text(const Exportable& object, ExportFormat format) {
  auto unsupported = [](const char* what) {
    return DomainError(std::string("unsupported export format for ") + what);
  };
  return std::visit(
      [&](const auto& ref) -> std::string {
        const auto& obj = ref.get();
        using T = std::decay_t<decltype(obj)>;
        if constexpr (std::is_same_v<T, std::vector<SweepRow>>) {
          if (format == ExportFormat::csv) return sweep_csv(obj);
          if (format == ExportFormat::json) return sweep_json(obj).dump(2) + "\n";
          throw unsupported("a sweep");
        } else if constexpr (std::is_same_v<T, RadioGraph>) {
          if (format == ExportFormat::dot) return graph_dot(obj);
          if (format == ExportFormat::geojson) return graph_geojson(obj);
          if (format == ExportFormat::json) return graph_json(obj).dump(2) + "\n";
          throw unsupported("a radio graph");
        } else if constexpr (std::is_same_v<T, WindGraph>) {
          if (format == ExportFormat::dot) return graph_dot(obj);
          if (format == ExportFormat::geojson) return graph_geojson(obj);
          throw unsupported("a wind graph");
        } else if constexpr (std::is_same_v<T, RoundTrace>) {
          if (format == ExportFormat::json) return trace_json(obj).dump(2) + "\n";
          if (format == ExportFormat::csv) return trace_csv(obj);
          throw unsupported("a trace");
        } else {
          std::ostringstream os;
          if (format == ExportFormat::csv) {
            save_deployment(obj, os, DeploymentFormat::csv);
          } else if (format == ExportFormat::geojson) {
            save_deployment(obj, os, DeploymentFormat::geojson);
          } else if (format == ExportFormat::json) {
            os << deployment_json(obj).dump(2) << '\n';
          } else {
            throw unsupported("a deployment");
          }
          return os.str();
        }
      },
      object);
}

}  // namespace trapnet
