#include "swarmlink/link.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmlink {

std::string_view link_state_name(LinkState state) {
  switch (state) {
    case LinkState::Connected: return "Connected";
    case LinkState::Lost: return "Lost";
    case LinkState::Reestablishing: return "Reestablishing";
  }
  return "?";
}

bool is_valid_transition(LinkState from, LinkState to) {
  using enum LinkState;
  return (from == Connected && to == Lost) || (from == Lost && to == Reestablishing) ||
         (from == Reestablishing && to == Connected) || (from == Reestablishing && to == Lost);
}

std::string_view message_kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::Heartbeat: return "Heartbeat";
    case MessageKind::Beacon: return "Beacon";
    case MessageKind::HandshakeReq: return "HandshakeReq";
    case MessageKind::HandshakeAck: return "HandshakeAck";
    case MessageKind::TooClose: return "TooClose";
    case MessageKind::TooFar: return "TooFar";
    case MessageKind::SensorData: return "SensorData";
  }
  return "?";
}

bool is_link_control(MessageKind kind) {
  return kind == MessageKind::Heartbeat || kind == MessageKind::Beacon || kind == MessageKind::HandshakeReq ||
         kind == MessageKind::HandshakeAck;
}

UavPair UavPair::of(int a, int b) {
  if (a == b) throw std::invalid_argument("a link pair needs two distinct uavs");
  return {std::min(a, b), std::max(a, b)};
}

std::string UavPair::key() const { return std::to_string(first) + "-" + std::to_string(second); }

std::string UavPair::device_label() const {
  return "Device " + std::to_string(first) + " and Device " + std::to_string(second);
}

bool LinkParams::valid() const {
  // A fresh connection hears its first heartbeat only after one hop, so the detector must tolerate
  // at least the slowest hop or it would flap straight back to Lost.
  return miss_threshold >= latency + jitter && beacon_period >= 1 && handshake_timeout >= 2 * (latency + jitter) &&
         comm_range > 0.0 && latency >= 1 && jitter >= 0;
}

LinkRecord LinkRecord::connected(UavPair pair, std::int64_t now) {
  LinkRecord r;
  r.pair = pair;
  r.last_heartbeat_tick = now;
  r.state_since_tick = now;
  return r;
}

void LinkRecord::transition(LinkState to, std::int64_t now) {
  transitions.push_back({now, state, to});
  state = to;
  state_since_tick = now;
}

Delivery deliver(const SwarmMessage& msg, const ChannelCondition& channel, const LinkParams& params) {
  if (msg.sender == msg.receiver) return Delivery::Dropped;
  if (channel.disrupted || channel.occluded || channel.distance > params.comm_range) return Delivery::Dropped;
  return Delivery::Delivered;
}

LinkRecord heartbeat_tick(LinkRecord record, std::int64_t now, const LinkParams& params) {
  if (record.state != LinkState::Connected) return record;
  if (now - record.last_heartbeat_tick > params.miss_threshold) {
    record.transition(LinkState::Lost, now);
    record.disruption_tick = record.last_heartbeat_tick + 1;
    record.reconnect_tick.reset();
    record.outages.push_back({*record.disruption_tick, std::nullopt});
  }
  return record;
}

namespace {

bool has_message(std::span<const SwarmMessage> inbox, MessageKind kind, int sender, int receiver) {
  return std::any_of(inbox.begin(), inbox.end(), [&](const SwarmMessage& m) {
    return m.kind == kind && m.sender == sender && m.receiver == receiver;
  });
}

SwarmMessage make_message(MessageKind kind, int sender, int receiver, std::int64_t now) {
  return SwarmMessage{kind, sender, receiver, now, {}};
}

}  // namespace

ReestablishStep reestablish_tick(LinkRecord record, std::span<const SwarmMessage> inbox, std::int64_t now,
                                 const LinkParams& params) {
  ReestablishStep step;
  const int lo = record.pair.first;
  const int hi = record.pair.second;

  auto beacon_if_due = [&] {
    if ((now - record.state_since_tick) % params.beacon_period == 0) {
      step.outbox.push_back(make_message(MessageKind::Beacon, lo, hi, now));
    }
  };

  switch (record.state) {
    case LinkState::Connected:
      break;
    case LinkState::Lost:
      if (has_message(inbox, MessageKind::Beacon, lo, hi)) {
        record.transition(LinkState::Reestablishing, now);
        step.outbox.push_back(make_message(MessageKind::HandshakeReq, hi, lo, now));
      } else {
        beacon_if_due();
      }
      break;
    case LinkState::Reestablishing:
      if (has_message(inbox, MessageKind::HandshakeAck, lo, hi)) {
        record.transition(LinkState::Connected, now);
        record.reconnect_tick = now;
        record.last_heartbeat_tick = now;
        if (!record.outages.empty()) record.outages.back().reconnect_tick = now;
        break;
      }
      if (has_message(inbox, MessageKind::HandshakeReq, hi, lo)) {
        step.outbox.push_back(make_message(MessageKind::HandshakeAck, lo, hi, now));
      } else if (now - record.state_since_tick > params.handshake_timeout) {
        record.transition(LinkState::Lost, now);
        beacon_if_due();
      }
      break;
  }
  step.record = std::move(record);
  return step;
}

std::vector<ReestablishmentRow> measure_reestablishment(std::span<const LinkRecord> records, double dt) {
  std::vector<ReestablishmentRow> rows;
  for (const auto& r : records) {
    for (const auto& o : r.outages) {
      ReestablishmentRow row{r.pair, o.disruption_tick, o.reconnect_tick, std::nullopt};
      if (o.reconnect_tick) row.elapsed_s = static_cast<double>(*o.reconnect_tick - o.disruption_tick) * dt;
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReestablishmentRow& a, const ReestablishmentRow& b) { return a.pair < b.pair; });
  return rows;
}

Network::Network(LinkParams params, RngStream jitter_rng) : params_(params), jitter_rng_(std::move(jitter_rng)) {}

Delivery Network::send(SwarmMessage msg, std::int64_t now, const ChannelCondition& channel) {
  auto& c = counters_[msg.sender];
  ++c.sent;
  msg.sent_tick = now;
  const Delivery d = deliver(msg, channel, params_);
  if (d == Delivery::Dropped) {
    ++c.dropped;
    return d;
  }
  ++c.delivered;
  std::int64_t arrival = now + params_.latency;
  if (params_.jitter > 0) arrival += jitter_rng_.uniform_int(0, params_.jitter);
  pending_.emplace(arrival, std::move(msg));
  return d;
}

std::vector<SwarmMessage> Network::collect(std::int64_t now) {
  std::vector<SwarmMessage> due;
  auto end = pending_.upper_bound(now);
  for (auto it = pending_.begin(); it != end; ++it) due.push_back(std::move(it->second));
  pending_.erase(pending_.begin(), end);
  return due;
}

Network::Counters Network::counters(int sender) const {
  auto it = counters_.find(sender);
  return it == counters_.end() ? Counters{} : it->second;
}

std::vector<UavPair> chain_pairs(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  std::vector<UavPair> pairs;
  for (std::size_t i = 1; i < ids.size(); ++i) pairs.push_back(UavPair::of(ids[i - 1], ids[i]));
  return pairs;
}

LinkEngine::LinkEngine(std::vector<UavPair> pairs, LinkParams params, std::vector<DisruptionWindow> windows,
                       RngStream jitter_rng, std::int64_t start_tick)
    : params_(params), windows_(std::move(windows)), network_(params, std::move(jitter_rng)) {
  for (const auto& p : pairs) records_.push_back(LinkRecord::connected(p, start_tick));
}

ChannelCondition LinkEngine::condition(const World& world, int a, int b) const {
  ChannelCondition c;
  const Uav* ua = world.find(a);
  const Uav* ub = world.find(b);
  if (!ua || !ub) {
    c.disrupted = true;
    return c;
  }
  c.distance = (ua->state.position - ub->state.position).norm();
  c.occluded = segment_hits_obstacle(ua->state.position, ub->state.position, world.env).has_value();
  if (a != b) {
    const UavPair pair = UavPair::of(a, b);
    const auto now = world.clock.tick;
    c.disrupted = std::any_of(windows_.begin(), windows_.end(),
                              [&](const DisruptionWindow& w) { return w.pair == pair && w.active(now); });
  }
  return c;
}

Delivery LinkEngine::send(const World& world, SwarmMessage msg) {
  const ChannelCondition c = condition(world, msg.sender, msg.receiver);
  return network_.send(std::move(msg), world.clock.tick, c);
}

void LinkEngine::tick(World& world) {
  const std::int64_t now = world.clock.tick;
  std::vector<SwarmMessage> arrived = network_.collect(now);
  app_inbox_.clear();
  std::vector<SwarmMessage> control;
  for (auto& m : arrived) {
    if (is_link_control(m.kind)) {
      control.push_back(std::move(m));
    } else {
      app_inbox_.push_back(std::move(m));
    }
  }

  for (auto& record : records_) {
    std::vector<SwarmMessage> mine;
    for (const auto& m : control) {
      if (m.sender != m.receiver && UavPair::of(m.sender, m.receiver) == record.pair) mine.push_back(m);
    }
    const auto transitions_before = record.transitions.size();

    if (record.state == LinkState::Connected) {
      for (const auto& m : mine) {
        if (m.kind == MessageKind::Heartbeat) record.last_heartbeat_tick = now;
      }
    }
    record = heartbeat_tick(std::move(record), now, params_);
    if (record.state != LinkState::Connected) {
      ReestablishStep step = reestablish_tick(std::move(record), mine, now, params_);
      record = std::move(step.record);
      for (auto& m : step.outbox) send(world, std::move(m));
    }
    if (record.state == LinkState::Connected) {
      send(world, SwarmMessage{MessageKind::Heartbeat, record.pair.first, record.pair.second, now, {}});
      send(world, SwarmMessage{MessageKind::Heartbeat, record.pair.second, record.pair.first, now, {}});
    }
    for (auto i = transitions_before; i < record.transitions.size(); ++i) world.record(Phase::Link, "transition");
  }
}

}  // namespace swarmlink
