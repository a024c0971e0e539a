#include "squarecut/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "squarecut/error.hpp"

namespace squarecut {

namespace {

constexpr std::int32_t kInfiniteDist = std::numeric_limits<std::int32_t>::max();

}  // namespace

FlowNetwork::FlowNetwork(int node_count) {
  if (node_count < 0) throw Error(Errc::invalid_argument, "negative node count");
  nodes_.resize(static_cast<std::size_t>(node_count));
}

FlowNetwork::NodeId FlowNetwork::add_node() {
  nodes_.emplace_back();
  return static_cast<NodeId>(nodes_.size() - 1);
}

void FlowNetwork::check_node(NodeId id) const {
  if (id < 0 || id >= node_count()) throw Error(Errc::invalid_argument, "node id out of range: " + std::to_string(id));
}

void FlowNetwork::add_arc(NodeId from, NodeId to, Capacity capacity) {
  if (solved_) throw Error(Errc::invalid_argument, "network already solved");
  if (!(capacity >= 0.0)) throw Error(Errc::invalid_argument, "arc capacity must be non-negative");
  if (to == kSource) throw Error(Errc::invalid_argument, "arcs into the source are not allowed");
  if (from == kSink) throw Error(Errc::invalid_argument, "arcs out of the sink are not allowed");
  if (from == to) throw Error(Errc::invalid_argument, "self loops are not allowed");

  if (from == kSource && to == kSink) {
    direct_capacity_ += capacity;
    ++terminal_arcs_;
    return;
  }
  if (from == kSource) {
    check_node(to);
    nodes_[to].source_cap += capacity;
    ++terminal_arcs_;
    return;
  }
  if (to == kSink) {
    check_node(from);
    nodes_[from].sink_cap += capacity;
    ++terminal_arcs_;
    return;
  }
  check_node(from);
  check_node(to);
  const auto forward = static_cast<std::int32_t>(arcs_.size());
  arcs_.push_back({to, nodes_[from].first, capacity, capacity});
  nodes_[from].first = forward;
  arcs_.push_back({from, nodes_[to].first, 0.0, 0.0});
  nodes_[to].first = forward + 1;
}

std::vector<FlowNetwork::Arc> FlowNetwork::arcs() const {
  std::vector<Arc> out;
  out.reserve(arcs_.size() / 2);
  for (std::size_t a = 0; a < arcs_.size(); a += 2) {
    out.push_back({tail_of(static_cast<std::int32_t>(a)), arcs_[a].head, arcs_[a].capacity});
  }
  return out;
}

void FlowNetwork::set_active(NodeId i) {
  Node& n = nodes_[i];
  if (n.active) return;
  n.active = true;
  n.next_active = kNone;
  if (queue_last_ == kNone) {
    queue_first_ = i;
  } else {
    nodes_[queue_last_].next_active = i;
  }
  queue_last_ = i;
}

FlowNetwork::NodeId FlowNetwork::next_active() {
  while (queue_first_ != kNone) {
    const NodeId i = queue_first_;
    queue_first_ = nodes_[i].next_active;
    if (queue_first_ == kNone) queue_last_ = kNone;
    nodes_[i].active = false;
    nodes_[i].next_active = kNone;
    if (nodes_[i].parent != kNone) return i;
  }
  return kNone;
}

double FlowNetwork::max_flow() {
  if (solved_) throw Error(Errc::invalid_argument, "network already solved");
  solved_ = true;

  if (std::isinf(direct_capacity_)) throw Error(Errc::unbounded, "infinite arc from source to sink");
  flow_ = direct_capacity_;

  for (NodeId i = 0; i < node_count(); ++i) {
    Node& n = nodes_[i];
    if (std::isinf(n.source_cap) && std::isinf(n.sink_cap)) {
      throw Error(Errc::unbounded, "node " + std::to_string(i) + " has infinite capacity to both terminals");
    }
    // Flow through s -> i -> t is routed up front; only the difference stays.
    const Capacity common = std::min(n.source_cap, n.sink_cap);
    flow_ += common;
    n.residual_terminal = n.source_cap - n.sink_cap;
    n.timestamp = 0;
    if (n.residual_terminal > kCapacityEps) {
      n.in_sink = false;
      n.parent = kTerminal;
      n.dist = 1;
      set_active(i);
    } else if (n.residual_terminal < -kCapacityEps) {
      n.in_sink = true;
      n.parent = kTerminal;
      n.dist = 1;
      set_active(i);
    } else {
      n.residual_terminal = 0.0;
      n.parent = kNone;
    }
  }

  NodeId current = kNone;
  for (;;) {
    NodeId i = current;
    if (i != kNone) {
      nodes_[i].active = false;
      if (nodes_[i].parent == kNone) i = kNone;
    }
    if (i == kNone) {
      i = next_active();
      if (i == kNone) break;
    }

    std::int32_t path = kNone;
    const Node& ni = nodes_[i];
    if (!ni.in_sink) {
      for (std::int32_t a = ni.first; a != kNone; a = arcs_[a].next) {
        if (arcs_[a].residual <= kCapacityEps) continue;
        const NodeId j = arcs_[a].head;
        Node& nj = nodes_[j];
        if (nj.parent == kNone) {
          nj.in_sink = false;
          nj.parent = a ^ 1;
          nj.timestamp = ni.timestamp;
          nj.dist = ni.dist + 1;
          set_active(j);
        } else if (nj.in_sink) {
          path = a;
          break;
        } else if (nj.timestamp <= ni.timestamp && nj.dist > ni.dist) {
          nj.parent = a ^ 1;
          nj.timestamp = ni.timestamp;
          nj.dist = ni.dist + 1;
        }
      }
    } else {
      for (std::int32_t a = ni.first; a != kNone; a = arcs_[a].next) {
        if (arcs_[a ^ 1].residual <= kCapacityEps) continue;
        const NodeId j = arcs_[a].head;
        Node& nj = nodes_[j];
        if (nj.parent == kNone) {
          nj.in_sink = true;
          nj.parent = a ^ 1;
          nj.timestamp = ni.timestamp;
          nj.dist = ni.dist + 1;
          set_active(j);
        } else if (!nj.in_sink) {
          path = a ^ 1;
          break;
        } else if (nj.timestamp <= ni.timestamp && nj.dist > ni.dist) {
          nj.parent = a ^ 1;
          nj.timestamp = ni.timestamp;
          nj.dist = ni.dist + 1;
        }
      }
    }

    ++time_;
    if (path == kNone) {
      current = kNone;
      continue;
    }
    // Keep i out of the queue while it is being reprocessed.
    nodes_[i].active = true;
    current = i;
    augment(path);
    while (!orphans_.empty()) {
      const NodeId orphan = orphans_.front();
      orphans_.pop_front();
      if (nodes_[orphan].in_sink) {
        process_sink_orphan(orphan);
      } else {
        process_source_orphan(orphan);
      }
    }
  }
  return flow_;
}

void FlowNetwork::augment(std::int32_t middle) {
  Capacity bottleneck = arcs_[middle].residual;
  NodeId i = tail_of(middle);
  for (std::int32_t a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    bottleneck = std::min(bottleneck, arcs_[a ^ 1].residual);
    i = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, nodes_[i].residual_terminal);
  i = arcs_[middle].head;
  for (std::int32_t a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    bottleneck = std::min(bottleneck, arcs_[a].residual);
    i = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, -nodes_[i].residual_terminal);
  if (std::isinf(bottleneck)) throw Error(Errc::unbounded, "augmenting path of infinite capacity");

  arcs_[middle ^ 1].residual += bottleneck;
  arcs_[middle].residual -= bottleneck;

  auto orphan = [this](NodeId n) {
    nodes_[n].parent = kOrphan;
    orphans_.push_front(n);
  };

  i = tail_of(middle);
  for (std::int32_t a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    arcs_[a].residual += bottleneck;
    arcs_[a ^ 1].residual -= bottleneck;
    const NodeId parent = arcs_[a].head;
    if (arcs_[a ^ 1].residual <= kCapacityEps) {
      arcs_[a ^ 1].residual = 0.0;
      orphan(i);
    }
    i = parent;
  }
  nodes_[i].residual_terminal -= bottleneck;
  if (nodes_[i].residual_terminal <= kCapacityEps) {
    nodes_[i].residual_terminal = 0.0;
    orphan(i);
  }

  i = arcs_[middle].head;
  for (std::int32_t a = nodes_[i].parent; a != kTerminal; a = nodes_[i].parent) {
    arcs_[a ^ 1].residual += bottleneck;
    arcs_[a].residual -= bottleneck;
    const NodeId parent = arcs_[a].head;
    if (arcs_[a].residual <= kCapacityEps) {
      arcs_[a].residual = 0.0;
      orphan(i);
    }
    i = parent;
  }
  nodes_[i].residual_terminal += bottleneck;
  if (nodes_[i].residual_terminal >= -kCapacityEps) {
    nodes_[i].residual_terminal = 0.0;
    orphan(i);
  }

  flow_ += bottleneck;
}

void FlowNetwork::process_source_orphan(NodeId i) {
  std::int32_t best_arc = kNone;
  std::int32_t best_dist = kInfiniteDist;

  for (std::int32_t a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    if (arcs_[a0 ^ 1].residual <= kCapacityEps) continue;
    NodeId j = arcs_[a0].head;
    if (nodes_[j].in_sink || nodes_[j].parent == kNone) continue;

    // Walk towards the root to make sure j still hangs off the source.
    std::int32_t d = 0;
    for (;;) {
      Node& nj = nodes_[j];
      if (nj.timestamp == time_) {
        d += nj.dist;
        break;
      }
      const std::int32_t a = nj.parent;
      ++d;
      if (a == kTerminal) {
        nj.timestamp = time_;
        nj.dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfiniteDist) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; nodes_[j].timestamp != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].timestamp = time_;
      nodes_[j].dist = d--;
    }
  }

  if (best_arc != kNone) {
    nodes_[i].parent = best_arc;
    nodes_[i].timestamp = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }

  nodes_[i].parent = kNone;
  for (std::int32_t a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    const NodeId j = arcs_[a0].head;
    const Node& nj = nodes_[j];
    if (nj.in_sink || nj.parent == kNone) continue;
    if (arcs_[a0 ^ 1].residual > kCapacityEps) set_active(j);
    if (nj.parent != kTerminal && nj.parent != kOrphan && arcs_[nj.parent].head == i) {
      nodes_[j].parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

void FlowNetwork::process_sink_orphan(NodeId i) {
  std::int32_t best_arc = kNone;
  std::int32_t best_dist = kInfiniteDist;

  for (std::int32_t a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    if (arcs_[a0].residual <= kCapacityEps) continue;
    NodeId j = arcs_[a0].head;
    if (!nodes_[j].in_sink || nodes_[j].parent == kNone) continue;

    std::int32_t d = 0;
    for (;;) {
      Node& nj = nodes_[j];
      if (nj.timestamp == time_) {
        d += nj.dist;
        break;
      }
      const std::int32_t a = nj.parent;
      ++d;
      if (a == kTerminal) {
        nj.timestamp = time_;
        nj.dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfiniteDist) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; nodes_[j].timestamp != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].timestamp = time_;
      nodes_[j].dist = d--;
    }
  }

  if (best_arc != kNone) {
    nodes_[i].parent = best_arc;
    nodes_[i].timestamp = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }

  nodes_[i].parent = kNone;
  for (std::int32_t a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    const NodeId j = arcs_[a0].head;
    const Node& nj = nodes_[j];
    if (!nj.in_sink || nj.parent == kNone) continue;
    if (arcs_[a0].residual > kCapacityEps) set_active(j);
    if (nj.parent != kTerminal && nj.parent != kOrphan && arcs_[nj.parent].head == i) {
      nodes_[j].parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

std::vector<bool> FlowNetwork::min_cut_source_set() const {
  if (!solved_) throw Error(Errc::invalid_argument, "max_flow must run before querying the cut");
  std::vector<bool> in_set(nodes_.size(), false);
  std::vector<NodeId> stack;
  for (NodeId i = 0; i < node_count(); ++i) {
    if (nodes_[i].residual_terminal > kCapacityEps) {
      in_set[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const NodeId i = stack.back();
    stack.pop_back();
    for (std::int32_t a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
      const NodeId j = arcs_[a].head;
      if (!in_set[j] && arcs_[a].residual > kCapacityEps) {
        in_set[j] = true;
        stack.push_back(j);
      }
    }
  }
  return in_set;
}

Capacity FlowNetwork::cut_capacity(const std::vector<bool>& source_set) const {
  if (source_set.size() != nodes_.size()) throw Error(Errc::invalid_argument, "source set size mismatch");
  Capacity total = direct_capacity_;
  for (NodeId i = 0; i < node_count(); ++i) {
    total += source_set[i] ? nodes_[i].sink_cap : nodes_[i].source_cap;
  }
  for (std::size_t a = 0; a < arcs_.size(); a += 2) {
    const NodeId from = tail_of(static_cast<std::int32_t>(a));
    const NodeId to = arcs_[a].head;
    if (source_set[from] && !source_set[to]) total += arcs_[a].capacity;
  }
  return total;
}

std::vector<int> extract_boundary(const std::vector<bool>& source_set, int ray_count, int nodes_per_ray) {
  if (ray_count <= 0 || nodes_per_ray <= 0 ||
      source_set.size() < static_cast<std::size_t>(ray_count) * static_cast<std::size_t>(nodes_per_ray)) {
    throw Error(Errc::invalid_argument, "source set does not cover the ray grid");
  }
  std::vector<int> boundary(static_cast<std::size_t>(ray_count), -1);
  for (int r = 0; r < ray_count; ++r) {
    for (int z = nodes_per_ray - 1; z >= 0; --z) {
      if (source_set[static_cast<std::size_t>(r) * nodes_per_ray + z]) {
        boundary[r] = z;
        break;
      }
    }
    if (boundary[r] < 0) throw Error(Errc::empty_ray, "ray " + std::to_string(r) + " has no node in the closed set");
  }
  return boundary;
}

}  // namespace squarecut
