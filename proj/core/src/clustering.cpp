#include "pathmine/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "pathmine/errors.hpp"

namespace pathmine {

PointSet make_point_set(std::vector<std::vector<double>> vectors) {
  PointSet set;
  if (!vectors.empty()) {
    set.dim = vectors.front().size();
    for (const auto& v : vectors) {
      if (v.size() != set.dim) throw InvalidArgument("point set has mixed dimensionality");
      for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument("point set contains non-finite entries");
    }
  }
  set.vectors = std::move(vectors);
  return set;
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

std::vector<std::vector<double>> distance_matrix(const PointSet& points,
                                                 const DistanceFn& distance) {
  const std::size_t n = points.vectors.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = distance(points.vectors[i], points.vectors[j]);
  return dist;
}

std::vector<bool> core_flags(const std::vector<std::vector<double>>& dist, double eps,
                             int min_pts) {
  const std::size_t n = dist.size();
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    int neighbours = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (dist[i][j] <= eps) ++neighbours;  // includes the point itself
    core[i] = neighbours >= min_pts;
  }
  return core;
}

// clusters = density-connected components of core points; borders join the
// cluster of their nearest core (coordinate order breaks exact ties)
ClusterLabels label_from_cores(const PointSet& points,
                               const std::vector<std::vector<double>>& dist,
                               const std::vector<bool>& core, double eps) {
  const std::size_t n = dist.size();
  ClusterLabels result;
  result.labels.assign(n, -1);

  int next_cluster = 0;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || result.labels[seed] != -1) continue;
    const int cluster = next_cluster++;
    std::vector<std::size_t> frontier{seed};
    result.labels[seed] = cluster;
    while (!frontier.empty()) {
      const std::size_t at = frontier.back();
      frontier.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (!core[j] || result.labels[j] != -1 || dist[at][j] > eps) continue;
        result.labels[j] = cluster;
        frontier.push_back(j);
      }
    }
  }
  result.gamma = next_cluster;

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i] || result.labels[i] != -1) continue;
    int best_cluster = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    const std::vector<double>* best_coords = nullptr;
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || dist[i][j] > eps) continue;
      const bool better =
          dist[i][j] < best_dist ||
          (dist[i][j] == best_dist && best_coords && points.vectors[j] < *best_coords);
      if (best_cluster == -1 || better) {
        best_cluster = result.labels[j];
        best_dist = dist[i][j];
        best_coords = &points.vectors[j];
      }
    }
    result.labels[i] = best_cluster;  // stays -1 when no core is in range
  }
  return result;
}

}  // namespace

ClusterLabels dbscan(const PointSet& points, double eps, int min_pts,
                     const DistanceFn& distance) {
  if (points.vectors.empty()) throw EmptyPointSet();
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (min_pts < 1) throw InvalidArgument("min_pts must be >= 1");
  const auto dist = distance_matrix(points, distance);
  const auto core = core_flags(dist, eps, min_pts);
  return label_from_cores(points, dist, core, eps);
}

OpticsOrdering optics_ordering(const PointSet& points, int min_pts, const DistanceFn& distance) {
  if (points.vectors.empty()) throw EmptyPointSet();
  if (min_pts < 1) throw InvalidArgument("min_pts must be >= 1");
  const std::size_t n = points.vectors.size();
  const auto dist = distance_matrix(points, distance);
  const double inf = std::numeric_limits<double>::infinity();

  OpticsOrdering out;
  out.reachability.assign(n, inf);
  out.core_distance.assign(n, inf);

  // core distance = distance to the min_pts-th closest point, self included
  std::vector<double> row;
  for (std::size_t i = 0; i < n && static_cast<std::size_t>(min_pts) <= n; ++i) {
    row = dist[i];
    std::nth_element(row.begin(), row.begin() + (min_pts - 1), row.end());
    out.core_distance[i] = row[static_cast<std::size_t>(min_pts - 1)];
  }

  std::vector<bool> processed(n, false);
  // seeds keyed by (reachability, index); duplicates resolved via processed[]
  using Seed = std::pair<double, std::size_t>;
  std::priority_queue<Seed, std::vector<Seed>, std::greater<Seed>> seeds;

  auto update_neighbours = [&](std::size_t p) {
    const double cd = out.core_distance[p];
    if (cd == inf) return;
    for (std::size_t q = 0; q < n; ++q) {
      if (processed[q]) continue;
      const double reach = std::max(cd, dist[p][q]);
      if (reach < out.reachability[q]) {
        out.reachability[q] = reach;
        seeds.push({reach, q});
      }
    }
  };

  for (std::size_t start = 0; start < n; ++start) {
    if (processed[start]) continue;
    processed[start] = true;
    out.order.push_back(start);
    update_neighbours(start);
    while (!seeds.empty()) {
      const auto [reach, q] = seeds.top();
      seeds.pop();
      if (processed[q]) continue;
      processed[q] = true;
      out.order.push_back(q);
      update_neighbours(q);
    }
  }
  return out;
}

ClusterLabels optics(const PointSet& points, int min_pts, double eps_extract,
                     const DistanceFn& distance) {
  if (!(eps_extract > 0.0)) throw InvalidArgument("eps_extract must be positive");
  const OpticsOrdering ordering = optics_ordering(points, min_pts, distance);
  const std::size_t n = points.vectors.size();
  const auto dist = distance_matrix(points, distance);

  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) core[i] = ordering.core_distance[i] <= eps_extract;

  // scan pass: cluster the core points exactly as ExtractDBSCAN would
  std::vector<int> scan_labels(n, -1);
  int cluster = -1;
  for (std::size_t idx : ordering.order) {
    if (ordering.reachability[idx] > eps_extract) {
      if (core[idx]) scan_labels[idx] = ++cluster;
    } else if (core[idx]) {
      scan_labels[idx] = cluster;
    }
  }

  // renumber by smallest member index and attach non-core points with the
  // nearest-core rule shared with dbscan
  ClusterLabels result;
  result.labels.assign(n, -1);
  std::vector<int> renumber(static_cast<std::size_t>(cluster + 1), -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || scan_labels[i] < 0) continue;
    int& mapped = renumber[static_cast<std::size_t>(scan_labels[i])];
    if (mapped < 0) mapped = next++;
    result.labels[i] = mapped;
  }
  result.gamma = next;

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    int best_cluster = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    const std::vector<double>* best_coords = nullptr;
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || dist[i][j] > eps_extract) continue;
      const bool better =
          dist[i][j] < best_dist ||
          (dist[i][j] == best_dist && best_coords && points.vectors[j] < *best_coords);
      if (best_cluster == -1 || better) {
        best_cluster = result.labels[j];
        best_dist = dist[i][j];
        best_coords = &points.vectors[j];
      }
    }
    result.labels[i] = best_cluster;
  }
  return result;
}

std::vector<EventLog> split_into_sublogs(const EventLog& log_subset, const ClusterLabels& labels) {
  if (labels.labels.size() != log_subset.size())
    throw LengthMismatch(labels.labels.size(), log_subset.size());

  std::vector<std::vector<Trace>> buckets(static_cast<std::size_t>(labels.gamma));
  std::vector<Trace> residual;
  for (std::size_t i = 0; i < log_subset.traces.size(); ++i) {
    const int label = labels.labels[i];
    if (label < 0) residual.push_back(log_subset.traces[i]);
    else buckets[static_cast<std::size_t>(label)].push_back(log_subset.traces[i]);
  }
  std::vector<EventLog> sublogs;
  for (auto& bucket : buckets) sublogs.push_back(make_log(std::move(bucket)));
  if (!residual.empty()) sublogs.push_back(make_log(std::move(residual)));
  return sublogs;
}

}  // namespace pathmine
