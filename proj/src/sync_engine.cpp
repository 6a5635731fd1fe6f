#include "trapnet/sync_engine.hpp"

#include <algorithm>
#include <cmath>

#include "trapnet/error.hpp"

namespace trapnet {

void SimConfig::validate() const {
  if (max_rounds == 0) throw DomainError("max_rounds must be at least 1");
  if (link_capacity && *link_capacity == 0) throw DomainError("link capacity must be at least 1 or unlimited");
  if (!std::isfinite(sleep_minutes) || sleep_minutes <= 0.0) throw DomainError("sleep minutes must be > 0");
}

const char* to_string(BehaviorKind kind) {
  switch (kind) {
    case BehaviorKind::route:
      return "route";
    case BehaviorKind::elect:
      return "elect";
    case BehaviorKind::collect:
      return "collect";
  }
  return "?";
}

std::optional<BehaviorKind> parse_behavior(std::string_view name) {
  if (name == "route") return BehaviorKind::route;
  if (name == "elect") return BehaviorKind::elect;
  if (name == "collect") return BehaviorKind::collect;
  return std::nullopt;
}

double latency_minutes(std::size_t rounds, double sleep_minutes) {
  if (!std::isfinite(sleep_minutes) || sleep_minutes < 0.0) throw DomainError("sleep minutes must be >= 0");
  return static_cast<double>(rounds) * sleep_minutes;
}

void NodeContext::send(std::size_t link, Message m) {
  if (link >= outbox_.size()) throw DomainError("node " + std::to_string(id_) + " has no link " + std::to_string(link));
  outbox_[link].push_back(std::move(m));
  ++sent_;
}

SyncEngine::SyncEngine(const SiteGraph& g, const SimConfig& cfg) : graph_(g), cfg_(cfg) {
  cfg_.validate();
  const std::size_t n = g.node_count();
  link_ids_.resize(n);
  reverse_.resize(n);
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v : g.adjacent(u)) {
      link_ids_[u].push_back(g.id_at(v));
      const auto& back = g.adjacent(v);
      auto it = std::lower_bound(back.begin(), back.end(), u,
                                 [&g](NodeIndex a, NodeIndex b) { return g.id_at(a) < g.id_at(b); });
      if (it == back.end() || *it != u) throw DomainError("simulator requires a symmetric graph");
      reverse_[u].push_back(static_cast<std::size_t>(it - back.begin()));
    }
  }
}

EngineRun SyncEngine::run(Behavior& behavior) {
  const std::size_t n = graph_.node_count();
  outbox_.assign(n, {});
  inbox_.assign(n, {});
  for (NodeIndex u = 0; u < n; ++u) outbox_[u].resize(link_ids_[u].size());

  EngineRun result;
  for (std::size_t round = 1; round <= cfg_.max_rounds; ++round) {
    RoundRecord rec;
    rec.round = round;

    for (NodeIndex u = 0; u < n; ++u) {
      NodeContext ctx(u, graph_.id_at(u), link_ids_[u], outbox_[u], rec.messages_sent);
      behavior.produce(ctx, round);
    }

    // Receivers drain their links in ascending sender id order, so each inbox
    // comes out sorted by (sender id, FIFO position).
    for (NodeIndex v = 0; v < n; ++v) {
      auto& inbox = inbox_[v];
      inbox.clear();
      const auto& senders = graph_.adjacent(v);
      for (std::size_t k = 0; k < senders.size(); ++k) {
        auto& queue = outbox_[senders[k]][reverse_[v][k]];
        const std::size_t take = cfg_.link_capacity ? std::min(queue.size(), *cfg_.link_capacity) : queue.size();
        for (std::size_t t = 0; t < take; ++t) {
          Message m = std::move(queue.front());
          queue.pop_front();
          ++m.hop_count;
          inbox.push_back(Delivery{k, std::move(m)});
        }
        rec.messages_received += take;
        rec.max_link_load = std::max(rec.max_link_load, take);
      }
    }

    for (NodeIndex v = 0; v < n; ++v) {
      NodeContext ctx(v, graph_.id_at(v), link_ids_[v], outbox_[v], rec.messages_sent);
      if (behavior.analyze(ctx, inbox_[v], round)) ++rec.state_changes;
    }

    for (const auto& links : outbox_) {
      for (const auto& q : links) {
        rec.queued_total += q.size();
        rec.max_queue_depth = std::max(rec.max_queue_depth, q.size());
      }
    }
    behavior.finish_round(rec);
    result.rounds.push_back(rec);

    if (rec.state_changes > 0) result.last_change_round = round;
    if (rec.messages_received == 0 && rec.state_changes == 0 && rec.queued_total == 0) {
      result.quiescent = true;
      break;
    }
  }
  return result;
}

namespace {

using AdvertVector = std::vector<RouteAdvert>;

class RoutingBehavior final : public Behavior {
 public:
  explicit RoutingBehavior(const SiteGraph& g) : tables_(g.node_count()), dirty_(g.node_count(), true) {
    for (NodeIndex i = 0; i < g.node_count(); ++i) tables_[i].emplace(g.id_at(i), RouteEntry{0, std::nullopt});
  }

  void produce(NodeContext& node, std::size_t) override {
    if (!dirty_[node.index()]) return;
    dirty_[node.index()] = false;
    auto adverts = std::make_shared<AdvertVector>();
    for (const auto& [dest, entry] : tables_[node.index()]) adverts->push_back({dest, entry.hops});
    AdvertList shared = std::move(adverts);
    for (std::size_t k = 0; k < node.links().size(); ++k) node.send(k, Message{node.id(), 0, TableBody{shared}});
  }

  bool analyze(NodeContext& node, std::span<const Delivery> inbox, std::size_t) override {
    auto& table = tables_[node.index()];
    const auto links = node.links();
    bool changed = false;
    for (const auto& d : inbox) {
      const auto& body = std::get<TableBody>(d.message.body);
      for (const auto& advert : *body.routes) {
        const Hops offered = advert.hops + 1;
        auto [it, inserted] = table.try_emplace(advert.destination, RouteEntry{offered, d.link});
        if (inserted) {
          changed = true;
          continue;
        }
        auto& entry = it->second;
        if (!entry.link_index) continue;  // own entry
        if (offered < entry.hops || (offered == entry.hops && links[d.link] < links[*entry.link_index])) {
          entry = RouteEntry{offered, d.link};
          changed = true;
        }
      }
    }
    if (changed) dirty_[node.index()] = true;
    return changed;
  }

  std::vector<RoutingTable> take_tables() { return std::move(tables_); }

 private:
  std::vector<RoutingTable> tables_;
  std::vector<bool> dirty_;
};

class ElectionBehavior final : public Behavior {
 public:
  explicit ElectionBehavior(const SiteGraph& g) : state_(g.node_count()) {
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      state_[i].leader = g.id_at(i);
      state_[i].distances.emplace(g.id_at(i), 0);
    }
  }

  void produce(NodeContext& node, std::size_t) override {
    auto& s = state_[node.index()];
    if (!s.dirty) return;
    s.dirty = false;
    auto adverts = std::make_shared<AdvertVector>();
    for (const auto& [dest, hops] : s.distances) adverts->push_back({dest, hops});
    AdvertList shared = std::move(adverts);
    for (std::size_t k = 0; k < node.links().size(); ++k) {
      node.send(k, Message{node.id(), 0, LeaderBody{s.leader, s.diameter, shared}});
    }
  }

  bool analyze(NodeContext& node, std::span<const Delivery> inbox, std::size_t) override {
    auto& s = state_[node.index()];
    bool changed = false;
    for (const auto& d : inbox) {
      const auto& body = std::get<LeaderBody>(d.message.body);
      if (body.candidate > s.leader) {
        s.leader = body.candidate;
        changed = true;
      }
      if (body.diameter_estimate > s.diameter) {
        s.diameter = body.diameter_estimate;
        changed = true;
      }
      for (const auto& advert : *body.distances) {
        const Hops offered = advert.hops + 1;
        auto [it, inserted] = s.distances.try_emplace(advert.destination, offered);
        if (inserted || offered < it->second) {
          it->second = offered;
          changed = true;
        }
      }
    }
    Hops own_eccentricity = 0;
    for (const auto& [dest, hops] : s.distances) own_eccentricity = std::max(own_eccentricity, hops);
    if (own_eccentricity > s.diameter) {
      s.diameter = own_eccentricity;
      changed = true;
    }
    if (changed) s.dirty = true;
    return changed;
  }

  SiteId leader_of(NodeIndex i) const { return state_[i].leader; }
  Hops diameter_of(NodeIndex i) const { return state_[i].diameter; }

 private:
  struct State {
    SiteId leader = 0;
    Hops diameter = 0;
    std::map<SiteId, Hops> distances;
    bool dirty = true;
  };
  std::vector<State> state_;
};

class CollectBehavior final : public Behavior {
 public:
  CollectBehavior(NodeIndex gateway, std::vector<std::optional<std::size_t>> first_hop, std::vector<bool> reachable)
      : gateway_(gateway), first_hop_(std::move(first_hop)), reachable_(std::move(reachable)) {
    for (bool r : reachable_) undeliverable_ += r ? 0 : 1;
  }

  void produce(NodeContext& node, std::size_t round) override {
    if (round != 1 || !reachable_[node.index()]) return;
    Message sample{node.id(), 0, SampleBody{static_cast<double>(node.id()), round}};
    if (node.index() == gateway_) {
      deliveries_.push_back({node.id(), static_cast<double>(node.id()), round, 0});
      gateway_changed_ = true;
      return;
    }
    node.send(*first_hop_[node.index()], std::move(sample));
  }

  bool analyze(NodeContext& node, std::span<const Delivery> inbox, std::size_t round) override {
    bool changed = false;
    if (node.index() == gateway_ && gateway_changed_) {
      gateway_changed_ = false;
      changed = true;
    }
    for (const auto& d : inbox) {
      const auto& body = std::get<SampleBody>(d.message.body);
      if (node.index() == gateway_) {
        deliveries_.push_back({d.message.origin, body.value, round, d.message.hop_count});
      } else {
        node.send(*first_hop_[node.index()], d.message);
      }
      changed = true;
    }
    return changed;
  }

  void finish_round(RoundRecord& rec) override {
    rec.samples_delivered = deliveries_.size();
    rec.samples_in_transit = rec.queued_total;
    rec.samples_undeliverable = undeliverable_;
  }

  std::vector<SampleDelivery> deliveries() const { return deliveries_; }

 private:
  NodeIndex gateway_;
  std::vector<std::optional<std::size_t>> first_hop_;
  std::vector<bool> reachable_;
  std::size_t undeliverable_ = 0;
  std::vector<SampleDelivery> deliveries_;
  bool gateway_changed_ = false;
};

RoundTrace make_trace(const RadioGraph& g, BehaviorKind kind, const SimConfig& cfg) {
  RoundTrace t;
  t.behavior = kind;
  t.config = cfg;
  t.range_km = g.range_km();
  t.node_count = g.node_count();
  return t;
}

}  // namespace

SiteId resolve_gateway(const RadioGraph& g, std::optional<SiteId> requested) {
  if (requested) {
    const NodeIndex i = g.index_of(*requested);
    if (g.degree(i) == 0) throw DomainError("gateway " + std::to_string(*requested) + " is isolated");
    return *requested;
  }
  auto leader = auto_leader(g);
  if (!leader || g.degree(g.index_of(*leader)) == 0) {
    throw DomainError("no bound gateway available: every node is isolated");
  }
  return *leader;
}

RoutingResult routing_convergence(const RadioGraph& g, const SimConfig& cfg) {
  SyncEngine engine(g, cfg);
  RoutingBehavior behavior(g);
  EngineRun run = engine.run(behavior);

  RoutingResult out;
  auto tables = behavior.take_tables();
  for (NodeIndex i = 0; i < g.node_count(); ++i) out.tables.emplace(g.id_at(i), std::move(tables[i]));
  out.trace = make_trace(g, BehaviorKind::route, cfg);
  out.trace.rounds = std::move(run.rounds);
  out.trace.quiescent = run.quiescent;
  out.trace.convergence_round = run.last_change_round;
  return out;
}

ElectionResult leader_election(const RadioGraph& g, const SimConfig& cfg) {
  SyncEngine engine(g, cfg);
  ElectionBehavior behavior(g);
  EngineRun run = engine.run(behavior);

  ElectionResult out;
  for (auto& members : components(g)) {
    ComponentLeader c;
    const NodeIndex first = g.index_of(members.front());
    c.leader = behavior.leader_of(first);
    c.diameter = behavior.diameter_of(first);
    for (SiteId id : members) {
      const NodeIndex i = g.index_of(id);
      c.agreed = c.agreed && behavior.leader_of(i) == c.leader && behavior.diameter_of(i) == c.diameter;
    }
    c.members = std::move(members);
    out.components.push_back(std::move(c));
  }

  out.trace = make_trace(g, BehaviorKind::elect, cfg);
  out.trace.rounds = std::move(run.rounds);
  out.trace.quiescent = run.quiescent;
  out.trace.convergence_round = run.last_change_round;
  out.trace.leaders = out.components;
  if (auto main = auto_leader(g)) {
    for (const auto& c : out.components) {
      if (std::binary_search(c.members.begin(), c.members.end(), *main)) {
        out.trace.leader = c.leader;
        out.trace.diameter = c.diameter;
      }
    }
  }
  return out;
}

RoundTrace convergecast_collect(const RadioGraph& g, const SimConfig& cfg) {
  cfg.validate();
  const SiteId gateway = resolve_gateway(g, cfg.gateway);
  const NodeIndex gw = g.index_of(gateway);

  RoutingResult routing = routing_convergence(g, cfg);
  RoundTrace trace = make_trace(g, BehaviorKind::collect, cfg);
  trace.convergence_round = routing.trace.convergence_round;

  CollectionSummary summary;
  summary.gateway = gateway;
  summary.samples_originated = g.node_count();
  const auto gateway_hops = bfs_hops(g, gw);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (gateway_hops[i] == kUnreachable) {
      summary.undeliverable.push_back(g.id_at(i));
      continue;
    }
    summary.gateway_eccentricity = std::max(summary.gateway_eccentricity, gateway_hops[i]);
    summary.component_diameter = std::max(summary.component_diameter, eccentricity(g, g.id_at(i)));
  }
  std::sort(summary.undeliverable.begin(), summary.undeliverable.end());

  if (!routing.trace.quiescent) {
    trace.quiescent = false;
    trace.collection = std::move(summary);
    return trace;
  }

  std::vector<std::optional<std::size_t>> first_hop(g.node_count());
  std::vector<bool> reachable(g.node_count(), false);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const auto& table = routing.tables.at(g.id_at(i));
    auto it = table.find(gateway);
    if (it == table.end()) continue;
    reachable[i] = true;
    first_hop[i] = it->second.link_index;
  }

  SyncEngine engine(g, cfg);
  CollectBehavior behavior(gw, std::move(first_hop), std::move(reachable));
  EngineRun run = engine.run(behavior);

  summary.deliveries = behavior.deliveries();
  std::sort(summary.deliveries.begin(), summary.deliveries.end(),
            [](const SampleDelivery& a, const SampleDelivery& b) { return a.origin < b.origin; });
  summary.samples_delivered = summary.deliveries.size();
  if (run.quiescent && summary.samples_delivered + summary.undeliverable.size() == summary.samples_originated) {
    std::size_t last = 0;
    for (const auto& d : summary.deliveries) last = std::max(last, d.delivery_round);
    summary.completion_round = last;
    summary.latency_minutes = latency_minutes(last, cfg.sleep_minutes);
  }

  trace.rounds = std::move(run.rounds);
  trace.quiescent = run.quiescent;
  trace.collection = std::move(summary);
  return trace;
}

RoundTrace run_simulation(const RadioGraph& g, BehaviorKind behavior, const SimConfig& cfg) {
  switch (behavior) {
    case BehaviorKind::route:
      return routing_convergence(g, cfg).trace;
    case BehaviorKind::elect:
      return leader_election(g, cfg).trace;
    case BehaviorKind::collect:
      return convergecast_collect(g, cfg);
  }
  throw DomainError("unknown behavior");
}

}  // namespace trapnet
