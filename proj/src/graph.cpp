#include "sbm/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sbm {

SimpleGraph::SimpleGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ > std::numeric_limits<VertexId>::max()) throw std::invalid_argument("graph too large");
  for (auto& e : edges_) {
    if (e.u >= n_ || e.v >= n_) throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");

  offsets_.assign(n_ + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  // Lexicographic edge order makes every adjacency list come out sorted:
  // the lists receive smaller neighbours (as v) in order of u, then larger
  // neighbours (as u) in order of v.
  for (const auto& e : edges_) adjacency_[fill[e.v]++] = e.u;
  for (const auto& e : edges_) adjacency_[fill[e.u]++] = e.v;
}

bool SimpleGraph::has_edge(VertexId u, VertexId v) const {
  if (u >= n_ || v >= n_) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

SimpleGraph SimpleGraph::permuted(std::span<const VertexId> perm) const {
  if (perm.size() != n_) throw std::invalid_argument("permutation size mismatch");
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back({perm[e.u], perm[e.v]});
  return SimpleGraph(n_, std::move(out));
}

LabeledGraph::LabeledGraph(SimpleGraph graph, std::vector<Label> labels)
    : graph_(std::move(graph)), labels_(std::move(labels)) {
  if (labels_.size() != graph_.num_vertices())
    throw std::invalid_argument("label vector length differs from vertex count");
  for (Label l : labels_)
    if (l != 1 && l != -1) throw std::invalid_argument("labels must be +1 or -1");
}

void ModelParams::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
  if (!(a >= b)) throw std::invalid_argument("require b <= a");
  if (a / static_cast<double>(n) > 1.0) throw std::invalid_argument("a/n exceeds 1");
}

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

// All pairs {members[i], members[j]}, i < j, kept independently with
// probability p. Geometric skipping over the triangular pair sequence.
void sample_within(std::span<const VertexId> members, double p, RngStream& rng,
                   std::vector<Edge>& out) {
  const auto s = static_cast<std::int64_t>(members.size());
  if (s < 2 || p <= 0.0) return;
  std::int64_t v = 1;
  std::int64_t w = -1;
  while (v < s) {
    const std::uint64_t skip = rng.geometric_skip(p);
    if (skip == kNever || skip > static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(s))
      break;
    w += 1 + static_cast<std::int64_t>(skip);
    while (w >= v && v < s) {
      w -= v;
      ++v;
    }
    if (v < s) out.push_back({members[w], members[v]});
  }
}

// All pairs in left x right, kept independently with probability p.
void sample_across(std::span<const VertexId> left, std::span<const VertexId> right, double p,
                   RngStream& rng, std::vector<Edge>& out) {
  const std::uint64_t cols = right.size();
  const std::uint64_t total = left.size() * cols;
  if (total == 0 || p <= 0.0) return;
  std::uint64_t idx = 0;
  bool first = true;
  while (true) {
    const std::uint64_t skip = rng.geometric_skip(p);
    if (skip >= total) break;
    idx = first ? skip : idx + 1 + skip;
    first = false;
    if (idx >= total) break;
    out.push_back({left[idx / cols], right[idx % cols]});
  }
}

std::vector<Label> draw_labels(std::size_t n, RngStream& rng, bool balanced) {
  std::vector<Label> labels(n);
  if (!balanced) {
    for (auto& l : labels) l = static_cast<Label>(rng.sign());
    return labels;
  }
  for (std::size_t i = 0; i < n; ++i) labels[i] = i < n / 2 ? 1 : -1;
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.uniform_int(i)]);
  return labels;
}

}  // namespace

LabeledGraph sample_sbm(const ModelParams& params, RngStream& rng, SbmOptions options) {
  params.validate();
  auto labels = draw_labels(params.n, rng, options.balanced);
  std::vector<VertexId> plus, minus;
  for (std::size_t v = 0; v < params.n; ++v)
    (labels[v] == 1 ? plus : minus).push_back(static_cast<VertexId>(v));

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(params.d() * static_cast<double>(params.n) * 0.6) + 16);
  sample_within(plus, params.p(), rng, edges);
  sample_within(minus, params.p(), rng, edges);
  sample_across(plus, minus, params.q(), rng, edges);
  LabeledGraph out(SimpleGraph(params.n, std::move(edges)), std::move(labels));
#ifndef NDEBUG
  check_invariants(out);
#endif
  return out;
}

LabeledGraph sample_er(std::size_t n, double c, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be nonnegative");
  if (c / static_cast<double>(n) > 1.0) throw std::invalid_argument("c/n exceeds 1");
  auto labels = draw_labels(n, rng, false);
  std::vector<VertexId> all(n);
  std::iota(all.begin(), all.end(), VertexId{0});
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(c * static_cast<double>(n) * 0.6) + 16);
  sample_within(all, c / static_cast<double>(n), rng, edges);
  LabeledGraph out(SimpleGraph(n, std::move(edges)), std::move(labels));
#ifndef NDEBUG
  check_invariants(out);
#endif
  return out;
}

Ball ball(const SimpleGraph& g, VertexId v, int r) {
  if (v >= g.num_vertices()) throw std::out_of_range("ball: vertex out of range");
  if (r < 0) throw std::invalid_argument("ball: negative radius");
  Ball out;
  std::vector<std::int64_t> local(g.num_vertices(), -1);
  out.vertices.push_back(v);
  out.distance.push_back(0);
  local[v] = 0;
  for (std::size_t head = 0; head < out.vertices.size(); ++head) {
    const int dist = out.distance[head];
    if (dist == r) continue;
    for (VertexId w : g.neighbors(out.vertices[head])) {
      if (local[w] >= 0) continue;
      local[w] = static_cast<std::int64_t>(out.vertices.size());
      out.vertices.push_back(w);
      out.distance.push_back(dist + 1);
    }
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < out.vertices.size(); ++i)
    for (VertexId w : g.neighbors(out.vertices[i]))
      if (local[w] > static_cast<std::int64_t>(i))
        edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(local[w])});
  out.subgraph = SimpleGraph(out.vertices.size(), std::move(edges));
  return out;
}

void check_invariants(const LabeledGraph& g) {
  const auto& s = g.graph();
  std::size_t degree_sum = 0;
  for (VertexId v = 0; v < s.num_vertices(); ++v) {
    auto nb = s.neighbors(v);
    degree_sum += nb.size();
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] == v) throw std::logic_error("self-loop in adjacency");
      if (i > 0 && nb[i - 1] >= nb[i]) throw std::logic_error("adjacency not strictly sorted");
      if (!s.has_edge(nb[i], v)) throw std::logic_error("adjacency not symmetric");
    }
  }
  if (degree_sum != 2 * s.num_edges()) throw std::logic_error("degree sum mismatch");
  for (const auto& e : s.edges()) {
    if (!(e.u < e.v)) throw std::logic_error("edge not normalised");
    if (!s.has_edge(e.u, e.v)) throw std::logic_error("edge missing from adjacency");
  }
  if (g.labels().size() != s.num_vertices()) throw std::logic_error("label length");
  for (Label l : g.labels())
    if (l != 1 && l != -1) throw std::logic_error("label out of range");
}

}  // namespace sbm
