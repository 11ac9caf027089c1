// Dendrite network representation: nodes carrying lumped segment electricals,
// resistive axial edges, role labels, and the merging-branch topology builder.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dsim/segment.hpp"

namespace dsim {

using NodeId = int;

struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  double resistance = 0.0;  // Ohm
};

// An undirected resistive graph. Node ids index the segments vector. Terminal
// nodes simply lack a further neighbor (open-circuit boundary).
struct Topology {
  std::vector<SegmentElectrical> segments;
  std::vector<Edge> edges;
  std::map<std::string, NodeId> labels;

  int node_count() const { return static_cast<int>(segments.size()); }

  NodeId label(const std::string& name) const {
    auto it = labels.find(name);
    if (it == labels.end()) throw std::out_of_range("no node labelled '" + name + "'");
    return it->second;
  }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Checks every topology invariant and reports all violations found.
inline ValidationReport validate(const Topology& t) {
  ValidationReport rep;
  const int n = t.node_count();
  if (n == 0) {
    rep.issues.push_back("topology has no nodes");
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    try {
      t.segments[i].validate();
    } catch (const std::invalid_argument& e) {
      rep.issues.push_back("node " + std::to_string(i) + ": " + e.what());
    }
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<std::vector<NodeId>> adj(n);
  for (const Edge& e : t.edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) {
      rep.issues.push_back("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                           ") references a missing node");
      continue;
    }
    if (e.a == e.b)
      rep.issues.push_back("self-edge at node " + std::to_string(e.a));
    if (!(e.resistance > 0.0))
      rep.issues.push_back("non-positive resistance on edge (" + std::to_string(e.a) + "," +
                           std::to_string(e.b) + ")");
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert(key).second)
      rep.issues.push_back("duplicate edge (" + std::to_string(e.a) + "," +
                           std::to_string(e.b) + ")");
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  // connectivity by breadth-first sweep from node 0
  std::vector<char> visited(n, 0);
  std::vector<NodeId> queue{0};
  visited[0] = 1;
  while (!queue.empty()) {
    NodeId u = queue.back();
    queue.pop_back();
    for (NodeId v : adj[u])
      if (!visited[v]) {
        visited[v] = 1;
        queue.push_back(v);
      }
  }
  int unreachable = static_cast<int>(std::count(visited.begin(), visited.end(), 0));
  if (unreachable > 0)
    rep.issues.push_back("disconnected: " + std::to_string(unreachable) +
                         " node(s) unreachable from node 0");
  for (const auto& [name, id] : t.labels)
    if (id < 0 || id >= n)
      rep.issues.push_back("label '" + name + "' references missing node " + std::to_string(id));
  return rep;
}

// Two input branches of branch_len segments meeting at one vertex segment,
// followed by an output chain of out_len segments. Each segment owns the
// series resistor on its output side, so the edge joining adjacent nodes
// carries the r_series of the node nearer the inputs and the vertex
// resistance sits between the vertex and the first output node. The last
// output segment's resistor dangles into the open circuit and is unused.
//
// Node numbering: input branch A is 0..branch_len-1 from its open end inward,
// the vertex is branch_len, the output chain follows, and input branch B
// occupies the remaining ids from its open end inward. Labels: "input_a",
// "input_b", "vertex", "output_probe" (first output-chain node).
inline Topology build_merge_topology(int branch_len, int out_len,
                                     const SegmentElectrical& seg, double r_vertex) {
  if (branch_len < 2) throw std::invalid_argument("branch_len must be at least 2");
  if (out_len < 1) throw std::invalid_argument("out_len must be at least 1");
  if (!(r_vertex > 0.0)) throw std::invalid_argument("r_vertex must be positive");
  seg.validate();

  Topology t;
  const NodeId vertex = branch_len;
  const NodeId out_first = vertex + 1;
  const NodeId b_first = vertex + out_len + 1;  // open end of branch B
  const int n = 2 * branch_len + 1 + out_len;

  t.segments.assign(n, seg);
  SegmentElectrical vseg = seg;
  vseg.r_series = r_vertex;
  t.segments[vertex] = vseg;

  // upstream = the endpoint nearer the inputs
  auto connect = [&](NodeId upstream, NodeId downstream) {
    t.edges.push_back({upstream, downstream, t.segments[upstream].r_series});
  };

  for (NodeId i = 0; i + 1 < branch_len; ++i) connect(i, i + 1);
  connect(branch_len - 1, vertex);
  connect(vertex, out_first);
  for (NodeId i = out_first; i + 1 < out_first + out_len; ++i) connect(i, i + 1);
  for (NodeId i = b_first; i + 1 < b_first + branch_len; ++i) connect(i, i + 1);
  connect(b_first + branch_len - 1, vertex);

  t.labels["input_a"] = 0;
  t.labels["input_b"] = b_first;
  t.labels["vertex"] = vertex;
  t.labels["output_probe"] = out_first;
  return t;
}

// Builder parameters in one bundle; r_vertex defaults to the nominal segment
// series resistance, and vertex_sources=false silences the vertex segment.
struct MergeSpec {
  int branch_len = 6;
  int out_len = 3;
  SegmentElectrical segment = derive_electrical({}, {});
  std::optional<double> r_vertex{};
  bool vertex_sources = true;

  bool operator==(const MergeSpec&) const = default;
};

inline Topology build_merge_topology(const MergeSpec& spec) {
  Topology t = build_merge_topology(spec.branch_len, spec.out_len, spec.segment,
                                    spec.r_vertex.value_or(spec.segment.r_series));
  if (!spec.vertex_sources) {
    SegmentElectrical& v = t.segments[t.label("vertex")];
    v.na_enabled = false;
    v.k_enabled = false;
  }
  return t;
}

// External drive on one node: either a rectangular current injection or an
// idealized forced trigger of the sodium surge at a given instant.
struct Stimulus {
  enum class Kind { CurrentInjection, ForceTrigger };

  NodeId target = 0;
  Kind kind = Kind::CurrentInjection;
  double amplitude = 0.0;  // A (injection only)
  double start = 0.0;      // s; injection onset, or the trigger instant
  double duration = 0.0;   // s (injection only)

  static Stimulus injection(NodeId node, double amplitude, double start, double duration) {
    return {node, Kind::CurrentInjection, amplitude, start, duration};
  }
  static Stimulus trigger(NodeId node, double at) {
    return {node, Kind::ForceTrigger, 0.0, at, 0.0};
  }

  void validate() const {
    if (!(start >= 0.0)) throw std::invalid_argument("stimulus start must be non-negative");
    if (kind == Kind::CurrentInjection && !(duration > 0.0))
      throw std::invalid_argument("injection duration must be positive");
  }
};

}  // namespace dsim
