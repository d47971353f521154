#include "lsr/roadmap.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lsr/io_util.hpp"
#include "lsr/metric.hpp"

namespace lsr {

using nlohmann::json;

ReferenceGraph build_reference_graph(std::span<const TransitionTuple> tuples) {
  ReferenceGraph g;
  const Eigen::Index dim = tuples.empty() ? 0 : tuples.front().z1.size();
  g.vertices.resize(dim, 2 * static_cast<Eigen::Index>(tuples.size()));
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    if (t.z1.size() != dim || t.z2.size() != dim)
      throw std::invalid_argument("build_reference_graph: inconsistent dimensions");
    g.vertices.col(2 * i) = t.z1;
    g.vertices.col(2 * i + 1) = t.z2;
    if (t.action) {
      g.edges.emplace_back(static_cast<int>(2 * i), static_cast<int>(2 * i + 1));
      g.edge_actions.push_back(t.u.value_or(ActionSpec{}));
    }
  }
  return g;
}

std::vector<ValidRegion> cluster_epsilon(const Matrix& vertices, double epsilon,
                                         Metric m) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("cluster_epsilon: epsilon must be positive");
  const int n = static_cast<int>(vertices.cols());
  const Eigen::Index dim = vertices.rows();
  std::vector<ValidRegion> regions;
  std::vector<int> unvisited(n);
  for (int i = 0; i < n; ++i) unvisited[i] = i;

  while (!unvisited.empty()) {
    ValidRegion region;
    region.epsilon = epsilon;
    region.metric = m;
    // Seed with the lowest unvisited index; the resulting partition equals
    // the connected components of the eps-proximity graph, so the choice
    // does not affect the result.
    std::deque<int> frontier{unvisited.front()};
    region.member_indices.push_back(unvisited.front());
    unvisited.erase(unvisited.begin());
    while (!frontier.empty()) {
      const int w = frontier.front();
      frontier.pop_front();
      const double* wp = vertices.col(w).data();
      for (std::size_t k = 0; k < unvisited.size();) {
        const int h = unvisited[k];
        if (within_epsilon(wp, vertices.col(h).data(), dim, m, epsilon)) {
          region.member_indices.push_back(h);
          frontier.push_back(h);
          unvisited.erase(unvisited.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
          ++k;
        }
      }
    }
    std::sort(region.member_indices.begin(), region.member_indices.end());
    regions.push_back(std::move(region));
  }
  // Order regions by smallest member so the ids are scan-order independent.
  std::sort(regions.begin(), regions.end(), [](const ValidRegion& a, const ValidRegion& b) {
    return a.member_indices.front() < b.member_indices.front();
  });
  return regions;
}

namespace {

Vector region_representative(const Matrix& vertices, const ValidRegion& region) {
  Vector mean = Vector::Zero(vertices.rows());
  for (int idx : region.member_indices) mean += vertices.col(idx);
  mean /= static_cast<double>(region.member_indices.size());
  // The mean is a valid representative only if it lies inside the region,
  // i.e. within strict eps of some member; otherwise fall back to the
  // member closest to the mean.
  double best_dist = std::numeric_limits<double>::infinity();
  int best_member = region.member_indices.front();
  for (int idx : region.member_indices) {
    const double d = distance(mean, Vector(vertices.col(idx)), region.metric);
    if (d < best_dist) {
      best_dist = d;
      best_member = idx;
    }
  }
  if (best_dist < region.epsilon) return mean;
  return vertices.col(best_member);
}

}  // namespace

Roadmap build_lsr(std::span<const TransitionTuple> tuples, double epsilon,
                  Metric m, int min_samples) {
  if (min_samples < 1) throw std::invalid_argument("build_lsr: min_samples must be >= 1");
  const ReferenceGraph g = build_reference_graph(tuples);
  const auto regions = cluster_epsilon(g.vertices, epsilon, m);

  std::vector<int> region_of(static_cast<std::size_t>(g.vertices.cols()), -1);
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (int idx : regions[r].member_indices) region_of[idx] = static_cast<int>(r);

  Roadmap roadmap;
  roadmap.epsilon = epsilon;
  roadmap.metric = m;
  roadmap.min_samples = min_samples;
  roadmap.latent_dim = static_cast<int>(g.vertices.rows());

  // Keep regions meeting the pruning threshold; node ids are the surviving
  // regions in region order.
  std::vector<int> node_of_region(regions.size(), -1);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (static_cast<int>(regions[r].member_indices.size()) < min_samples) continue;
    RoadmapNode node;
    node.representative = region_representative(g.vertices, regions[r]);
    node.member_count = static_cast<int>(regions[r].member_indices.size());
    node.region_id = static_cast<int>(r);
    node_of_region[r] = static_cast<int>(roadmap.nodes.size());
    roadmap.nodes.push_back(std::move(node));
  }
  if (roadmap.nodes.empty())
    throw std::runtime_error("build_lsr: roadmap empty; lower min_samples");

  std::map<std::pair<int, int>, std::vector<ActionSpec>> collapsed;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int ri = region_of[g.edges[e].first];
    const int rj = region_of[g.edges[e].second];
    if (ri == rj) continue;  // no self-edges
    const int ni = node_of_region[ri];
    const int nj = node_of_region[rj];
    if (ni < 0 || nj < 0) continue;  // incident to a pruned node
    collapsed[{ni, nj}].push_back(g.edge_actions[e]);
  }
  for (auto& [key, actions] : collapsed) {
    std::sort(actions.begin(), actions.end());
    roadmap.edges.push_back(RoadmapEdge{key.first, key.second, std::move(actions)});
  }
  return roadmap;
}

std::vector<std::vector<int>> Roadmap::adjacency() const {
  std::vector<std::vector<int>> adj(nodes.size());
  for (const auto& e : edges) adj[e.src].push_back(e.dst);
  for (auto& neighbors : adj) std::sort(neighbors.begin(), neighbors.end());
  return adj;
}

int nearest_node(const Roadmap& roadmap, const Vector& z) {
  if (roadmap.nodes.empty()) throw std::invalid_argument("nearest_node: empty roadmap");
  int best = 0;
  double best_dist = distance(z, roadmap.nodes[0].representative, roadmap.metric);
  for (std::size_t i = 1; i < roadmap.nodes.size(); ++i) {
    const double d = distance(z, roadmap.nodes[i].representative, roadmap.metric);
    if (d < best_dist) {  // strict: ties keep the smallest node id
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

namespace {

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{start};
  dist[start] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

}  // namespace

int hop_distance(const Roadmap& roadmap, int start, int goal) {
  const auto adj = roadmap.adjacency();
  return bfs_distances(adj, start)[goal];
}

std::vector<std::vector<int>> all_shortest_paths(const Roadmap& roadmap,
                                                 int start, int goal, int cap) {
  const int n = static_cast<int>(roadmap.nodes.size());
  if (start < 0 || start >= n || goal < 0 || goal >= n)
    throw std::invalid_argument("all_shortest_paths: node id out of range");
  if (cap < 1) throw std::invalid_argument("all_shortest_paths: cap must be >= 1");
  if (start == goal) return {{start}};

  const auto adj = roadmap.adjacency();
  const auto dist = bfs_distances(adj, start);
  if (dist[goal] < 0) return {};
  std::vector<std::vector<int>> radj(adj.size());
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (int v : adj[u]) radj[v].push_back(static_cast<int>(u));
  const auto dist_back = bfs_distances(radj, goal);

  // DFS restricted to edges on some shortest path, neighbors in ascending id
  // order, enumerates paths lexicographically; stop once cap paths are
  // collected. The backward-distance check makes every branch end at goal.
  std::vector<std::vector<int>> paths;
  std::vector<int> current{start};
  auto dfs = [&](auto&& self, int u) -> bool {
    if (u == goal) {
      paths.push_back(current);
      return static_cast<int>(paths.size()) >= cap;
    }
    for (int v : adj[u]) {
      if (dist[v] != dist[u] + 1) continue;
      if (dist_back[v] < 0 || dist[v] + dist_back[v] != dist[goal]) continue;
      current.push_back(v);
      const bool full = self(self, v);
      current.pop_back();
      if (full) return true;
    }
    return false;
  };
  dfs(dfs, start);
  return paths;
}

PlanQuery plan_nodes(const Roadmap& roadmap, const Vector& z_start,
                     const Vector& z_goal, int cap) {
  PlanQuery q;
  q.start_node = nearest_node(roadmap, z_start);
  q.goal_node = nearest_node(roadmap, z_goal);
  q.node_paths = all_shortest_paths(roadmap, q.start_node, q.goal_node, cap);
  return q;
}

std::vector<Matrix> plan(const Roadmap& roadmap, const Vector& z_start,
                         const Vector& z_goal, int cap) {
  const PlanQuery q = plan_nodes(roadmap, z_start, z_goal, cap);
  std::vector<Matrix> plans;
  plans.reserve(q.node_paths.size());
  for (const auto& path : q.node_paths) {
    Matrix p(roadmap.latent_dim, path.size());
    for (std::size_t i = 0; i < path.size(); ++i)
      p.col(static_cast<Eigen::Index>(i)) = roadmap.nodes[path[i]].representative;
    plans.push_back(std::move(p));
  }
  return plans;
}

Matrix linear_interpolation_plan(const Vector& z_start, const Vector& z_goal, int n) {
  if (n < 2) throw std::invalid_argument("linear_interpolation_plan: n must be >= 2");
  if (z_start.size() != z_goal.size())
    throw std::invalid_argument("linear_interpolation_plan: dimension mismatch");
  Matrix points(z_start.size(), n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    points.col(i) = (1.0 - t) * z_start + t * z_goal;
  }
  return points;
}

void save_roadmap(const Roadmap& roadmap, const std::filesystem::path& file) {
  json j;
  j["epsilon"] = roadmap.epsilon;
  j["metric"] = to_string(roadmap.metric);
  j["min_samples"] = roadmap.min_samples;
  j["latent_dim"] = roadmap.latent_dim;
  json nodes = json::array();
  for (std::size_t i = 0; i < roadmap.nodes.size(); ++i) {
    const auto& node = roadmap.nodes[i];
    json rep = json::array();
    for (Eigen::Index d = 0; d < node.representative.size(); ++d)
      rep.push_back(node.representative[d]);
    nodes.push_back(json{{"id", i},
                         {"region_id", node.region_id},
                         {"member_count", node.member_count},
                         {"representative", std::move(rep)}});
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : roadmap.edges) {
    json actions = json::array();
    for (const auto& u : e.actions)
      actions.push_back(json{{"pick", {u.pick.row, u.pick.col}},
                             {"release", {u.release.row, u.release.col}}});
    edges.push_back(json{{"src", e.src}, {"dst", e.dst}, {"actions", std::move(actions)}});
  }
  j["edges"] = std::move(edges);
  write_file_atomic(file, j.dump() + "\n");
}

Roadmap load_roadmap(const std::filesystem::path& file) {
  const json j = json::parse(read_file(file));
  Roadmap roadmap;
  roadmap.epsilon = j.at("epsilon").get<double>();
  roadmap.metric = metric_from_string(j.at("metric").get<std::string>());
  roadmap.min_samples = j.at("min_samples").get<int>();
  roadmap.latent_dim = j.at("latent_dim").get<int>();
  for (const auto& rec : j.at("nodes")) {
    RoadmapNode node;
    node.region_id = rec.at("region_id").get<int>();
    node.member_count = rec.at("member_count").get<int>();
    const auto& rep = rec.at("representative");
    node.representative.resize(static_cast<Eigen::Index>(rep.size()));
    for (std::size_t d = 0; d < rep.size(); ++d)
      node.representative[static_cast<Eigen::Index>(d)] = rep[d].get<double>();
    roadmap.nodes.push_back(std::move(node));
  }
  for (const auto& rec : j.at("edges")) {
    RoadmapEdge e;
    e.src = rec.at("src").get<int>();
    e.dst = rec.at("dst").get<int>();
    for (const auto& a : rec.at("actions")) {
      ActionSpec u;
      u.pick = {a.at("pick")[0].get<int>(), a.at("pick")[1].get<int>()};
      u.release = {a.at("release")[0].get<int>(), a.at("release")[1].get<int>()};
      e.actions.push_back(u);
    }
    roadmap.edges.push_back(std::move(e));
  }
  return roadmap;
}

}  // namespace lsr
