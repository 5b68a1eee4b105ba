#pragma once

#include "swarmlink/rng.hpp"
#include "swarmlink/world.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmlink {

enum class LinkState { Connected, Lost, Reestablishing };
std::string_view link_state_name(LinkState state);
/// Connected->Lost, Lost->Reestablishing, Reestablishing->Connected, Reestablishing->Lost.
bool is_valid_transition(LinkState from, LinkState to);

enum class MessageKind { Heartbeat, Beacon, HandshakeReq, HandshakeAck, TooClose, TooFar, SensorData };
std::string_view message_kind_name(MessageKind kind);
bool is_link_control(MessageKind kind);

/// Unordered pair of UAV ids, stored with first < second.
struct UavPair {
  int first = 0;
  int second = 0;

  static UavPair of(int a, int b);
  bool involves(int id) const { return first == id || second == id; }
  /// "1-2"
  std::string key() const;
  /// "Device 1 and Device 2"
  std::string device_label() const;

  friend auto operator<=>(const UavPair&, const UavPair&) = default;
};

struct SwarmMessage {
  MessageKind kind = MessageKind::Heartbeat;
  int sender = 0;
  int receiver = 0;
  std::int64_t sent_tick = 0;
  std::vector<std::uint8_t> payload;
};

struct LinkParams {
  int miss_threshold = 5;      // ticks of heartbeat silence tolerated
  int beacon_period = 2;       // ticks
  int handshake_timeout = 10;  // ticks
  double comm_range = 20.0;    // m
  int latency = 1;             // ticks per hop
  int jitter = 0;              // extra random ticks per hop, uniform in [0, jitter]

  bool valid() const;
  friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

struct Outage {
  std::int64_t disruption_tick = 0;
  std::optional<std::int64_t> reconnect_tick;
};

struct StateTransition {
  std::int64_t tick = 0;
  LinkState from = LinkState::Connected;
  LinkState to = LinkState::Connected;
};

struct LinkRecord {
  UavPair pair;
  LinkState state = LinkState::Connected;
  std::int64_t last_heartbeat_tick = 0;
  std::int64_t state_since_tick = 0;
  std::optional<std::int64_t> disruption_tick;
  std::optional<std::int64_t> reconnect_tick;
  std::vector<Outage> outages;
  std::vector<StateTransition> transitions;

  static LinkRecord connected(UavPair pair, std::int64_t now);
  void transition(LinkState to, std::int64_t now);
};

struct ChannelCondition {
  double distance = 0.0;
  bool occluded = false;
  bool disrupted = false;
};

enum class Delivery { Delivered, Dropped };

Delivery deliver(const SwarmMessage& msg, const ChannelCondition& channel, const LinkParams& params);

/// Failure detector: Connected -> Lost once the silence exceeds miss_threshold ticks.
LinkRecord heartbeat_tick(LinkRecord record, std::int64_t now, const LinkParams& params);

struct ReestablishStep {
  LinkRecord record;
  std::vector<SwarmMessage> outbox;
};

/// Recovery protocol for a non-connected pair. The lower id beacons every beacon_period ticks
/// while Lost; the higher id answers a beacon with HandshakeReq and the lower id acknowledges.
/// The pair is Connected when the ack arrives.
ReestablishStep reestablish_tick(LinkRecord record, std::span<const SwarmMessage> inbox, std::int64_t now,
                                 const LinkParams& params);

struct ReestablishmentRow {
  UavPair pair;
  std::int64_t disruption_tick = 0;
  std::optional<std::int64_t> reconnect_tick;
  std::optional<double> elapsed_s;

  bool recovered() const { return reconnect_tick.has_value(); }
};

std::vector<ReestablishmentRow> measure_reestablishment(std::span<const LinkRecord> records, double dt);

struct DisruptionWindow {
  UavPair pair;
  std::int64_t start_tick = 0;  // inclusive
  std::int64_t end_tick = 0;    // exclusive

  bool active(std::int64_t tick) const { return start_tick <= tick && tick < end_tick; }
};

/// Tick-synchronous transport: a message accepted at tick t arrives at t + latency (+ jitter).
class Network {
 public:
  struct Counters {
    std::int64_t sent = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
  };

  Network(LinkParams params, RngStream jitter_rng);

  Delivery send(SwarmMessage msg, std::int64_t now, const ChannelCondition& channel);
  /// Messages due at `now`, in send order.
  std::vector<SwarmMessage> collect(std::int64_t now);
  Counters counters(int sender) const;

 private:
  LinkParams params_;
  RngStream jitter_rng_;
  std::multimap<std::int64_t, SwarmMessage> pending_;
  std::map<int, Counters> counters_;
};

/// Pairs of consecutive ids: 1-2, 2-3, ...
std::vector<UavPair> chain_pairs(std::vector<int> ids);

/// Runs the heartbeat detector and recovery protocol for every pair during the link phase.
class LinkEngine {
 public:
  LinkEngine(std::vector<UavPair> pairs, LinkParams params, std::vector<DisruptionWindow> windows,
             RngStream jitter_rng, std::int64_t start_tick = 0);

  void tick(World& world);

  ChannelCondition condition(const World& world, int a, int b) const;
  Delivery send(const World& world, SwarmMessage msg);

  const LinkParams& params() const { return params_; }
  const std::vector<LinkRecord>& records() const { return records_; }
  const Network& network() const { return network_; }
  /// Non link-control messages that arrived this tick.
  const std::vector<SwarmMessage>& app_inbox() const { return app_inbox_; }

 private:
  LinkParams params_;
  std::vector<DisruptionWindow> windows_;
  std::vector<LinkRecord> records_;
  Network network_;
  std::vector<SwarmMessage> app_inbox_;
};

}  // namespace swarmlink
