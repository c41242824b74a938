#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "epswae/dense_matrix.hpp"
#include "epswae/errors.hpp"
#include "epswae/sw_distance.hpp"

namespace epswae {

// ---------------------------------------------------------------------------
// Per-sample neighborhood scales
// ---------------------------------------------------------------------------

struct NeighborScales {
  DenseVector c;   // average distance to the k nearest neighbors, per sample
  std::size_t k = 0;
};

/// c_j = mean Euclidean distance from point j to its k nearest neighbors
/// (self excluded; coincident points count as zero-distance neighbors).
inline NeighborScales knn_scales(const PointCloud& points, std::size_t k) {
  const std::size_t n = points.rows();
  if (n < 2) throw UsageError("knn_scales: need at least 2 points");
  if (k < 1 || k > n - 1) throw UsageError("knn_scales: k must lie in [1, N-1]");
  NeighborScales out;
  out.k = k;
  out.c.resize(n);
  std::vector<double> dists(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) dists[w++] = euclidean_distance(points.row_span(j), points.row_span(i));
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += dists[i];
    out.c[j] = acc / static_cast<double>(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Thresholded graph
// ---------------------------------------------------------------------------

enum class EdgeRule {
  /// Undirected: edge {i,j} iff d(i,j) < t * max(c_i, c_j).
  OrUndirected,
  /// Directed: arc i -> j iff d(i,j) < t * c_j (the receiver's scale governs).
  Directed,
};

struct ThresholdedGraph {
  // adjacency[i] = (neighbor, weight) pairs, sorted by neighbor index.
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
  double t = 0.0;
  double h = 1.0;
  std::size_t edge_count = 0;  // undirected edges / directed arcs
  bool directed = false;

  std::size_t node_count() const { return adjacency.size(); }
};

/// Connects samples whose distance clears the per-sample threshold; the edge
/// weight is d(i,j)^h ("energy"). No self-loops; coincident points never
/// connect through a zero threshold.
inline ThresholdedGraph build_graph(const PointCloud& points, const NeighborScales& scales,
                                    double t, double h,
                                    EdgeRule rule = EdgeRule::OrUndirected) {
  const std::size_t n = points.rows();
  if (scales.c.size() != n) throw UsageError("build_graph: scales/points size mismatch");
  if (!(t > 0.0)) throw UsageError("build_graph: t must be > 0");
  if (!(h >= 1.0)) throw UsageError("build_graph: h must be >= 1");
  ThresholdedGraph g;
  g.t = t;
  g.h = h;
  g.directed = (rule == EdgeRule::Directed);
  g.adjacency.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (g.directed ? 0 : i + 1); j < n; ++j) {
      if (i == j) continue;
      const double d = euclidean_distance(points.row_span(i), points.row_span(j));
      const bool connect = g.directed ? (d < t * scales.c[j])
                                      : (d < t * std::max(scales.c[i], scales.c[j]));
      if (!connect) continue;
      const double w = (h == 1.0) ? d : (h == 2.0 ? d * d : std::pow(d, h));
      g.adjacency[i].emplace_back(j, w);
      if (!g.directed) g.adjacency[j].emplace_back(i, w);
      ++g.edge_count;
    }
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

namespace detail {

/// Connected components over the undirected reading of the adjacency.
inline std::size_t component_count(const ThresholdedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t comps = n;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : g.adjacency[i]) {
      const std::size_t a = find(i), b = find(j);
      if (a != b) {
        parent[a] = b;
        --comps;
      }
    }
  return comps;
}

}  // namespace detail

struct GrowthSchedule {
  double t0 = 1.0;
  double growth_factor = 1.1;
  double t_max = 1e3;
};

/// Increases t geometrically until the graph has a single connected
/// component; returns that graph and the final threshold.
inline std::pair<ThresholdedGraph, double> grow_until_connected(
    const PointCloud& points, const NeighborScales& scales, double h,
    const GrowthSchedule& schedule = {}) {
  if (!(schedule.t0 > 0.0)) throw UsageError("grow_until_connected: t0 must be > 0");
  if (!(schedule.growth_factor > 1.0))
    throw UsageError("grow_until_connected: growth_factor must be > 1");
  double t = schedule.t0;
  std::size_t last_components = points.rows();
  while (t <= schedule.t_max) {
    ThresholdedGraph g = build_graph(points, scales, t, h);
    last_components = detail::component_count(g);
    if (last_components == 1) return {std::move(g), t};
    t *= schedule.growth_factor;
  }
  throw DisconnectedGraphError(
      "grow_until_connected: graph still disconnected at t_max = " +
          std::to_string(schedule.t_max),
      last_components);
}

// ---------------------------------------------------------------------------
// Least-energy paths
// ---------------------------------------------------------------------------

struct GeodesicPath {
  std::vector<std::size_t> nodes;  // graph node indices along the path
  PointCloud points;               // path coordinates (densified if requested)
  double energy = 0.0;             // sum of traversed edge weights
};

namespace detail {

inline std::vector<std::size_t> walk_back(const std::vector<std::size_t>& pred,
                                          std::size_t src, std::size_t node) {
  std::vector<std::size_t> path{node};
  while (node != src) {
    node = pred[node];
    path.push_back(node);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

/// Dijkstra over nonnegative edge energies. Exact ties between path energies
/// are broken toward the lexicographically smallest node sequence.
inline GeodesicPath shortest_path(const ThresholdedGraph& g, const PointCloud& points,
                                  std::size_t src, std::size_t dst) {
  const std::size_t n = g.node_count();
  if (src >= n || dst >= n) throw UsageError("shortest_path: node index out of range");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> pred(n, n);
  std::vector<bool> settled(n, false);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u] || d > dist[u]) continue;
    settled[u] = true;
    if (u == dst) break;
    for (const auto& [v, w] : g.adjacency[u]) {
      if (settled[v]) continue;
      const double cand = dist[u] + w;
      bool better = cand < dist[v];
      if (!better && cand == dist[v] && pred[v] != n) {
        // Tie: keep the lexicographically smaller full path to v.
        auto via_u = detail::walk_back(pred, src, u);
        via_u.push_back(v);
        auto via_old = detail::walk_back(pred, src, pred[v]);
        via_old.push_back(v);
        better = via_u < via_old;
      }
      if (better) {
        dist[v] = cand;
        pred[v] = u;
        heap.emplace(cand, v);
      }
    }
  }
  if (dist[dst] == kInf)
    throw DisconnectedGraphError("shortest_path: destination unreachable",
                                 detail::component_count(g));

  GeodesicPath path;
  path.nodes = (src == dst) ? std::vector<std::size_t>{src}
                            : detail::walk_back(pred, src, dst);
  path.energy = dist[dst];
  path.points = PointCloud(path.nodes.size(), points.cols());
  for (std::size_t i = 0; i < path.nodes.size(); ++i)
    for (std::size_t c = 0; c < points.cols(); ++c)
      path.points(i, c) = points(path.nodes[i], c);
  return path;
}

// ---------------------------------------------------------------------------
// Network-geodesic queries
// ---------------------------------------------------------------------------

enum class SampleTag { Posterior, Prior, Endpoint };

struct LatentSampleSet {
  PointCloud points;
  std::vector<SampleTag> tags;  // one per point; optional (empty = untagged)
};

struct GeodesicQueryConfig {
  std::size_t k = 5;
  double h = 2.0;
  bool densify = false;
  GrowthSchedule schedule{};
};

struct GeodesicResult {
  GeodesicPath path;
  double t_final = 0.0;
};

/// knn scales -> grow threshold to connectivity -> least-energy path.
/// With densify, a linearly interpolated midpoint is inserted between every
/// two consecutive path points (midpoints carry no graph membership, so
/// `path.nodes` keeps the original node ids).
inline GeodesicResult network_geodesic(const LatentSampleSet& samples, std::size_t start,
                                       std::size_t end, const GeodesicQueryConfig& cfg) {
  const std::size_t n = samples.points.rows();
  if (start >= n || end >= n) throw UsageError("network_geodesic: endpoint out of range");
  if (!samples.tags.empty() && samples.tags.size() != n)
    throw UsageError("network_geodesic: tag count mismatch");
  const NeighborScales scales = knn_scales(samples.points, cfg.k);
  auto [graph, t_final] = grow_until_connected(samples.points, scales, cfg.h, cfg.schedule);
  GeodesicResult res;
  res.t_final = t_final;
  res.path = shortest_path(graph, samples.points, start, end);
  if (cfg.densify && res.path.points.rows() > 1) {
    const PointCloud& orig = res.path.points;
    PointCloud dense(2 * orig.rows() - 1, orig.cols());
    for (std::size_t i = 0; i < orig.rows(); ++i) {
      for (std::size_t c = 0; c < orig.cols(); ++c) {
        dense(2 * i, c) = orig(i, c);
        if (i + 1 < orig.rows())
          dense(2 * i + 1, c) = 0.5 * (orig(i, c) + orig(i + 1, c));
      }
    }
    res.path.points = std::move(dense);
  }
  return res;
}

/// n_points evenly spaced points on the segment [a, b], endpoints included.
inline PointCloud linear_interpolation(std::span<const double> a,
                                       std::span<const double> b, std::size_t n_points) {
  if (a.size() != b.size()) throw ShapeError("linear_interpolation: dim mismatch");
  if (n_points < 2) throw UsageError("linear_interpolation: need at least 2 points");
  PointCloud out(n_points, a.size());
  for (std::size_t i = 0; i < n_points; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n_points - 1);
    for (std::size_t c = 0; c < a.size(); ++c)
      out(i, c) = (1.0 - s) * a[c] + s * b[c];
  }
  return out;
}

}  // namespace epswae
