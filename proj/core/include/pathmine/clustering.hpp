#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pathmine/event_log.hpp"

namespace pathmine {

/// Fixed-dimension real vectors, one per non-conformant trace.
struct PointSet {
  std::vector<std::vector<double>> vectors;
  std::size_t dim = 0;
};

PointSet make_point_set(std::vector<std::vector<double>> vectors);

/// Per-point labels: -1 = noise, 0..gamma-1 = clusters.
struct ClusterLabels {
  std::vector<int> labels;
  int gamma = 0;
};

using DistanceFn = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Density-based clustering. A point is core when at least min_pts points
/// (itself included) lie within eps; clusters are the density-connected
/// components of core points. Border points go to the cluster of their
/// nearest core, so the resulting partition does not depend on point order.
/// Cluster numbers follow the smallest member index.
ClusterLabels dbscan(const PointSet& points, double eps, int min_pts,
                     const DistanceFn& distance = euclidean_distance);

/// OPTICS ordering (eps = infinity) with a DBSCAN-equivalent extraction at
/// eps_extract; border points are normalized with the same nearest-core rule
/// as dbscan, so both algorithms produce the same partition at equal
/// thresholds.
ClusterLabels optics(const PointSet& points, int min_pts, double eps_extract,
                     const DistanceFn& distance = euclidean_distance);

/// Reachability profile of an OPTICS run, mostly for inspection and tests.
struct OpticsOrdering {
  std::vector<std::size_t> order;            // visit order, point indices
  std::vector<double> reachability;          // by point index; inf = undefined
  std::vector<double> core_distance;         // by point index; inf = never core
};

OpticsOrdering optics_ordering(const PointSet& points, int min_pts,
                               const DistanceFn& distance = euclidean_distance);

/// One sublog per cluster 0..gamma-1, in label order, plus a trailing
/// residual sublog collecting noise points when any exist. Sublogs partition
/// the input.
std::vector<EventLog> split_into_sublogs(const EventLog& log_subset, const ClusterLabels& labels);

}  // namespace pathmine
