#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lsr/types.hpp"

namespace lsr {

/// Phase-1 lookup graph: one vertex per tuple endpoint (duplicates kept),
/// one directed edge per action tuple from its z1 vertex to its z2 vertex.
struct ReferenceGraph {
  Matrix vertices;  // latent_dim x (2 * n_tuples), tuple i -> columns 2i, 2i+1
  std::vector<std::pair<int, int>> edges;
  std::vector<ActionSpec> edge_actions;  // parallel to edges
};

ReferenceGraph build_reference_graph(std::span<const TransitionTuple> tuples);

/// A maximal set of vertices closed under strict-eps adjacency; the regions
/// partition the vertex set and equal the connected components of the
/// eps-proximity graph, independent of scan order.
struct ValidRegion {
  std::vector<int> member_indices;  // ascending
  double epsilon = 0.0;
  Metric metric = Metric::L1;
};

std::vector<ValidRegion> cluster_epsilon(const Matrix& vertices, double epsilon,
                                         Metric m);

struct RoadmapNode {
  Vector representative;
  int member_count = 0;
  int region_id = 0;
};

struct RoadmapEdge {
  int src = 0;
  int dst = 0;
  std::vector<ActionSpec> actions;  // witnessed specifics, sorted, duplicates kept
};

/// The latent-space roadmap: one node per surviving valid region with a
/// representative inside the region, directed edges witnessed by action
/// tuples crossing two regions.
struct Roadmap {
  std::vector<RoadmapNode> nodes;
  std::vector<RoadmapEdge> edges;
  double epsilon = 0.0;
  Metric metric = Metric::L1;
  int min_samples = 1;
  int latent_dim = 0;

  /// Outgoing neighbor node ids, ascending, per node.
  std::vector<std::vector<int>> adjacency() const;
};

/// Full build: reference graph, strict-eps clustering, node representatives
/// (region-member mean if it stays within eps of a member, otherwise the
/// member closest to the mean), cross-region edges, and pruning of nodes
/// with fewer than min_samples members. Throws std::runtime_error if
/// pruning removes every node.
Roadmap build_lsr(std::span<const TransitionTuple> tuples, double epsilon,
                  Metric m, int min_samples = 1);

/// Node whose representative is closest to z; ties resolve to the smallest
/// node id. Throws std::invalid_argument on an empty roadmap.
int nearest_node(const Roadmap& roadmap, const Vector& z);

/// Every directed path of minimal hop-length from start to goal, in
/// lexicographic node-id order, truncated at cap. start == goal yields the
/// single zero-length path; an unreachable goal yields an empty list.
std::vector<std::vector<int>> all_shortest_paths(const Roadmap& roadmap,
                                                 int start, int goal, int cap = 100);

/// Hop distance from start to goal, or -1 if unreachable.
int hop_distance(const Roadmap& roadmap, int start, int goal);

struct PlanQuery {
  int start_node = 0;
  int goal_node = 0;
  std::vector<std::vector<int>> node_paths;
};

/// nearest_node on both endpoints composed with all_shortest_paths.
PlanQuery plan_nodes(const Roadmap& roadmap, const Vector& z_start,
                     const Vector& z_goal, int cap = 100);

/// Latent plans: the representatives along each shortest path, one matrix
/// per plan with points as columns.
std::vector<Matrix> plan(const Roadmap& roadmap, const Vector& z_start,
                         const Vector& z_goal, int cap = 100);

/// n >= 2 equally spaced points from z_start to z_goal inclusive, columns.
Matrix linear_interpolation_plan(const Vector& z_start, const Vector& z_goal, int n);

void save_roadmap(const Roadmap& roadmap, const std::filesystem::path& file);
Roadmap load_roadmap(const std::filesystem::path& file);

}  // namespace lsr
