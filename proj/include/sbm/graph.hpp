#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbm/rng.hpp"

namespace sbm {

using VertexId = std::uint32_t;
using Label = std::int8_t;

struct Edge {
  VertexId u;
  VertexId v;
  auto operator<=>(const Edge&) const = default;
};

/// Immutable simple undirected graph on vertices 0..n-1.
///
/// Edges are stored with u < v in lexicographic order; adjacency lists are
/// sorted. Construction rejects self-loops, duplicates and out-of-range ids.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  SimpleGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(VertexId u, VertexId v) const;

  /// Graph with vertex v renamed to perm[v].
  SimpleGraph permuted(std::span<const VertexId> perm) const;

  bool operator==(const SimpleGraph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> adjacency_;
};

/// A simple graph together with a +1/-1 label on every vertex.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  LabeledGraph(SimpleGraph graph, std::vector<Label> labels);

  const SimpleGraph& graph() const { return graph_; }
  std::span<const Label> labels() const { return labels_; }
  Label label(VertexId v) const { return labels_[v]; }
  std::size_t num_vertices() const { return graph_.num_vertices(); }
  std::size_t num_edges() const { return graph_.num_edges(); }

  bool operator==(const LabeledGraph&) const = default;

 private:
  SimpleGraph graph_;
  std::vector<Label> labels_;
};

/// Planted bisection parameters: within-class edge probability a/n,
/// between-class b/n.
struct ModelParams {
  std::size_t n = 0;
  double a = 0.0;
  double b = 0.0;

  /// Throws std::invalid_argument unless n > 0, 0 < b <= a, a/n <= 1.
  void validate() const;

  double p() const { return a / static_cast<double>(n); }
  double q() const { return b / static_cast<double>(n); }
  double d() const { return (a + b) / 2.0; }
  double f() const { return (a - b) / 2.0; }
  double t() const { return (a - b) * (a - b) / (2.0 * (a + b)); }
  /// Intensity c of the Erdos-Renyi null G(n, c/n) with matching mean degree.
  double null_intensity() const { return d(); }
};

struct SbmOptions {
  /// Force exactly floor(n/2) vertices labelled +1 instead of iid labels.
  bool balanced = false;
};

LabeledGraph sample_sbm(const ModelParams& params, RngStream& rng, SbmOptions options = {});

/// G(n, c/n) with iid uniform labels that play no role in edge placement.
LabeledGraph sample_er(std::size_t n, double c, RngStream& rng);

struct Ball {
  SimpleGraph subgraph;              // induced, on local ids
  std::vector<VertexId> vertices;    // local id -> original id, BFS order
  std::vector<int> distance;         // by local id
};

/// Induced subgraph on vertices within graph distance r of v.
Ball ball(const SimpleGraph& g, VertexId v, int r);

/// Checks every structural invariant; throws std::logic_error on violation.
void check_invariants(const LabeledGraph& g);

}  // namespace sbm
