#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trapnet/topology.hpp"

namespace trapnet {

// Simulation input -----------------------------------------------------------

struct SimConfig {
  std::size_t max_rounds = 10000;
  // Messages per directed link per round; nullopt means unlimited.
  std::optional<std::size_t> link_capacity = 1;
  double sleep_minutes = 5.0;
  // nullopt selects auto_leader().
  std::optional<SiteId> gateway;

  // Throws DomainError on max_rounds == 0, capacity == 0 or sleep <= 0.
  void validate() const;
};

enum class BehaviorKind { route, elect, collect };

const char* to_string(BehaviorKind kind);
// Accepts "route", "elect", "collect".
std::optional<BehaviorKind> parse_behavior(std::string_view name);

// Messages -------------------------------------------------------------------

enum class MessageKind { table_exchange, leader_probe, data_sample };

struct RouteAdvert {
  SiteId destination = 0;
  Hops hops = 0;
};

using AdvertList = std::shared_ptr<const std::vector<RouteAdvert>>;

struct TableBody {
  AdvertList routes;
};

struct LeaderBody {
  SiteId candidate = 0;
  Hops diameter_estimate = 0;
  AdvertList distances;
};

struct SampleBody {
  double value = 0.0;
  std::size_t origin_round = 0;
};

struct Message {
  SiteId origin = 0;
  // Incremented by the engine each time the message crosses a link.
  Hops hop_count = 0;
  std::variant<TableBody, LeaderBody, SampleBody> body;

  MessageKind kind() const { return static_cast<MessageKind>(body.index()); }
};

// Engine ---------------------------------------------------------------------

struct RoundRecord {
  std::size_t round = 0;
  // Messages placed in output buffers during this round.
  std::size_t messages_sent = 0;
  // Messages that crossed a link during the exchange phase.
  std::size_t messages_received = 0;
  std::size_t max_link_load = 0;
  // Deepest output buffer after the round completes.
  std::size_t max_queue_depth = 0;
  std::size_t queued_total = 0;
  std::size_t state_changes = 0;
  // Collection runs only.
  std::size_t samples_delivered = 0;
  std::size_t samples_in_transit = 0;
  std::size_t samples_undeliverable = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct Delivery {
  std::size_t link = 0;  // receiver-side link index the message arrived on
  Message message;
};

/// Handle a behavior uses to act as one node.
class NodeContext {
 public:
  NodeIndex index() const { return index_; }
  SiteId id() const { return id_; }
  // Neighbor ids in ascending order; link k leads to links()[k].
  std::span<const SiteId> links() const { return links_; }
  void send(std::size_t link, Message m);

 private:
  friend class SyncEngine;
  NodeContext(NodeIndex index, SiteId id, std::span<const SiteId> links, std::vector<std::deque<Message>>& outbox,
              std::size_t& sent)
      : index_(index), id_(id), links_(links), outbox_(outbox), sent_(sent) {}

  NodeIndex index_;
  SiteId id_;
  std::span<const SiteId> links_;
  std::vector<std::deque<Message>>& outbox_;
  std::size_t& sent_;
};

class Behavior {
 public:
  virtual ~Behavior() = default;
  // Phase 1: fill output buffers.
  virtual void produce(NodeContext& node, std::size_t round) = 0;
  // Phase 3: consume this round's input, in (sender id, FIFO) order. Returns
  // true when local state changed.
  virtual bool analyze(NodeContext& node, std::span<const Delivery> inbox, std::size_t round) = 0;
  // Called once per round after analysis to annotate the record.
  virtual void finish_round(RoundRecord&) {}
};

struct EngineRun {
  std::vector<RoundRecord> rounds;
  bool quiescent = false;
  // Last round in which any node reported a state change; 0 if none did.
  std::size_t last_change_round = 0;
};

/// Synchronous round executor. Each round runs produce on every node, moves
/// at most link_capacity messages across each directed link (the rest stay
/// queued in FIFO order), then runs analyze on every node. The run stops at
/// the first round that moves nothing and changes nothing, or at max_rounds.
class SyncEngine {
 public:
  SyncEngine(const SiteGraph& g, const SimConfig& cfg);

  EngineRun run(Behavior& behavior);

  const std::vector<SiteId>& links_of(NodeIndex i) const { return link_ids_[i]; }

 private:
  const SiteGraph& graph_;
  SimConfig cfg_;
  std::vector<std::vector<SiteId>> link_ids_;
  // reverse_[u][k]: index of u within the link list of its k-th neighbor.
  std::vector<std::vector<std::size_t>> reverse_;
  std::vector<std::vector<std::deque<Message>>> outbox_;
  std::vector<std::vector<Delivery>> inbox_;
};

// Results --------------------------------------------------------------------

struct RouteEntry {
  Hops hops = 0;
  // Position of the first-hop neighbor in the node's sorted link list; empty
  // for the node's own entry.
  std::optional<std::size_t> link_index;
  friend bool operator==(const RouteEntry&, const RouteEntry&) = default;
};

using RoutingTable = std::map<SiteId, RouteEntry>;

struct ComponentLeader {
  std::vector<SiteId> members;
  SiteId leader = 0;
  Hops diameter = 0;
  // Every member reported the same leader and diameter.
  bool agreed = true;
  friend bool operator==(const ComponentLeader&, const ComponentLeader&) = default;
};

struct SampleDelivery {
  SiteId origin = 0;
  double value = 0.0;
  std::size_t delivery_round = 0;
  Hops hops = 0;
  friend bool operator==(const SampleDelivery&, const SampleDelivery&) = default;
};

struct CollectionSummary {
  SiteId gateway = 0;
  Hops gateway_eccentricity = 0;
  Hops component_diameter = 0;
  std::size_t samples_originated = 0;
  std::size_t samples_delivered = 0;
  std::vector<SiteId> undeliverable;
  std::vector<SampleDelivery> deliveries;  // sorted by origin
  // Set when every deliverable sample reached the gateway.
  std::optional<std::size_t> completion_round;
  std::optional<double> latency_minutes;
  friend bool operator==(const CollectionSummary&, const CollectionSummary&) = default;
};

struct RoundTrace {
  BehaviorKind behavior = BehaviorKind::route;
  SimConfig config;
  double range_km = 0.0;
  std::size_t node_count = 0;
  std::vector<RoundRecord> rounds;
  bool quiescent = false;
  // Routing/election: last round with a state change. Collection: the
  // convergence round of the routing phase that precedes it.
  std::optional<std::size_t> convergence_round;

  std::vector<ComponentLeader> leaders;  // election only
  std::optional<SiteId> leader;          // election: the largest component's
  std::optional<Hops> diameter;

  std::optional<CollectionSummary> collection;

  std::size_t rounds_executed() const { return rounds.size(); }
};

struct RoutingResult {
  std::map<SiteId, RoutingTable> tables;
  RoundTrace trace;
};

struct ElectionResult {
  std::vector<ComponentLeader> components;
  RoundTrace trace;
};

/// Distance-vector table exchange: every node floods its working table each
/// round it changes; a destination is adopted at (advertised + 1) hops, ties
/// going to the lowest-id neighbor.
RoutingResult routing_convergence(const RadioGraph& g, const SimConfig& cfg = {});

/// Max-id flooding with piggybacked distance vectors; each node derives its
/// eccentricity and floods the largest one seen as the diameter.
ElectionResult leader_election(const RadioGraph& g, const SimConfig& cfg = {});

/// Routes tables first, then every node emits one sample at round 1 toward
/// the gateway along first-hop links, subject to link capacity.
RoundTrace convergecast_collect(const RadioGraph& g, const SimConfig& cfg = {});

RoundTrace run_simulation(const RadioGraph& g, BehaviorKind behavior, const SimConfig& cfg = {});

double latency_minutes(std::size_t rounds, double sleep_minutes);

// Validates and resolves the collection gateway: explicit ids must exist and
// be bound; auto picks auto_leader(). Throws DomainError otherwise.
SiteId resolve_gateway(const RadioGraph& g, std::optional<SiteId> requested);

}  // namespace trapnet
