#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

namespace squarecut {

/// Arc capacity. kInfinite is IEEE +inf, so sums involving it saturate and
/// subtracting finite flow leaves it unbounded.
using Capacity = double;
inline constexpr Capacity kInfinite = std::numeric_limits<double>::infinity();

/// Residual capacities at or below this are treated as saturated.
inline constexpr double kCapacityEps = 1e-9;

/// Directed s-t flow network solved with the Boykov-Kolmogorov augmenting
/// path algorithm (two search trees that are reused between augmentations).
///
/// Grid nodes are dense ids [0, node_count). The virtual terminals are
/// addressed with kSource and kSink; arcs into the source or out of the sink
/// are rejected.
class FlowNetwork {
 public:
  using NodeId = std::int32_t;
  static constexpr NodeId kSource = -1;
  static constexpr NodeId kSink = -2;

  struct Arc {
    NodeId from;
    NodeId to;
    Capacity capacity;
  };

  explicit FlowNetwork(int node_count = 0);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  NodeId add_node();

  /// Adds from -> to with the given capacity; either end may be a terminal.
  void add_arc(NodeId from, NodeId to, Capacity capacity);

  /// Non-terminal arcs in insertion order.
  std::vector<Arc> arcs() const;
  std::size_t arc_count() const { return arcs_.size() / 2; }
  /// Arcs touching s or t, including any direct s -> t arc.
  std::size_t terminal_arc_count() const { return terminal_arcs_; }
  /// Original capacity of the terminal arcs of a node (0 when absent).
  Capacity source_capacity(NodeId node) const { return nodes_.at(node).source_cap; }
  Capacity sink_capacity(NodeId node) const { return nodes_.at(node).sink_cap; }

  /// Computes the maximum flow. Throws Errc::unbounded when an augmenting path
  /// of infinite capacity exists. The network may be solved only once.
  double max_flow();
  double flow_value() const { return flow_; }
  bool solved() const { return solved_; }

  /// Nodes reachable from s in the residual network (the minimal min cut).
  std::vector<bool> min_cut_source_set() const;

  /// Capacity of the cut (S, V \ S) under the original capacities.
  Capacity cut_capacity(const std::vector<bool>& source_set) const;

 private:
  static constexpr std::int32_t kNone = -1;
  static constexpr std::int32_t kTerminal = -2;
  static constexpr std::int32_t kOrphan = -3;

  struct Node {
    std::int32_t first = kNone;   // head of the outgoing arc list
    std::int32_t parent = kNone;  // arc to the parent, or kNone / kTerminal / kOrphan
    std::int32_t next_active = kNone;
    bool active = false;
    bool in_sink = false;
    std::int32_t timestamp = 0;
    std::int32_t dist = 0;
    Capacity residual_terminal = 0.0;  // > 0: from s, < 0: to t
    Capacity source_cap = 0.0;
    Capacity sink_cap = 0.0;
  };

  struct ResidualArc {
    NodeId head;
    std::int32_t next;  // next arc out of the same tail
    Capacity residual;
    Capacity capacity;  // original; 0 for reverse arcs
  };

  NodeId tail_of(std::int32_t arc) const { return arcs_[arc ^ 1].head; }
  void check_node(NodeId id) const;

  void set_active(NodeId i);
  NodeId next_active();
  void augment(std::int32_t middle_arc);
  void process_source_orphan(NodeId i);
  void process_sink_orphan(NodeId i);

  std::vector<Node> nodes_;
  std::vector<ResidualArc> arcs_;
  std::size_t terminal_arcs_ = 0;
  double flow_ = 0.0;
  bool solved_ = false;

  Capacity direct_capacity_ = 0.0;
  NodeId queue_first_ = kNone;
  NodeId queue_last_ = kNone;
  std::deque<NodeId> orphans_;
  std::int32_t time_ = 0;
};

/// Outcome of the minimum closed set computation on an R x Z ray grid.
struct CutResult {
  double flow_value = 0.0;
  std::vector<bool> source_set;  // grid nodes only, row-major by ray
  std::vector<int> boundary;     // highest source-side level per ray
  double cut_cost = 0.0;         // sum over rays of cost at the boundary level
};

/// Highest level of each ray that lies in the source set. Throws
/// Errc::empty_ray when a ray has no node in the set.
std::vector<int> extract_boundary(const std::vector<bool>& source_set, int ray_count, int nodes_per_ray);

}  // namespace squarecut
