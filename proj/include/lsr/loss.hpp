#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lsr/types.hpp"

namespace lsr {

struct LossConfig {
  double d_m = 20.0;          // minimum action distance enforced by the hinge
  double gamma = 1.0;         // action-term weight
  double lambda_prior = 1e-3; // quadratic pull toward the origin
  Metric metric = Metric::L1;
};

/// Action term: hinge max(0, d_m - ||z1 - z2||) for action pairs, the plain
/// distance for no-action pairs. Always nonnegative.
double action_loss(const Vector& z1, const Vector& z2, bool action,
                   const LossConfig& cfg);

/// Analytic (sub)gradient of action_loss with respect to both endpoints.
/// At the hinge kink (dist == d_m) the zero branch applies; metric kinks
/// follow the metric_subgradient conventions.
std::pair<Vector, Vector> action_loss_grad(const Vector& z1, const Vector& z2,
                                           bool action, const LossConfig& cfg);

/// Embeddings of a symbolic dataset after optimization: one point per tuple
/// endpoint (columns), with its configuration label.
struct EmbeddingSet {
  Matrix points;
  std::vector<int> labels;
};

/// Minimizes sum over tuples of gamma * action_loss + lambda_prior *
/// (||z1||^2 + ||z2||^2) by plain constant-step gradient descent. The
/// optimization variables are one embedding per distinct label occurring in
/// the tuples -- the label is the only identity symbolic tuples share, so
/// samples of one label move together. Throws std::runtime_error if the
/// loss becomes non-finite (suggests a smaller step_size).
EmbeddingSet optimize_embeddings(std::span<const SymbolicTuple> tuples,
                                 int latent_dim, const LossConfig& cfg,
                                 int steps, double step_size, std::uint64_t seed);

struct ClassStats {
  int class_id = 0;
  double intra_mean = 0.0;  // sample-to-own-centroid distances
  double intra_std = 0.0;
  double inter_mean = 0.0;  // this centroid to every other centroid
  double inter_std = 0.0;
  double margin = 0.0;      // min inter - max intra
};

struct ClassDistanceReport {
  std::vector<ClassStats> classes;
  int skipped_empty = 0;  // labels in range with zero samples, excluded
};

/// Per-class distance statistics. num_classes == 0 infers the label range
/// from the data; classes without samples are excluded and counted.
/// Throws std::invalid_argument with fewer than two populated classes.
ClassDistanceReport class_distance_stats(const EmbeddingSet& emb, Metric m,
                                         int num_classes = 0);

void save_embedding_set(const EmbeddingSet& emb, const std::filesystem::path& file);
EmbeddingSet load_embedding_set(const std::filesystem::path& file);

/// CSV: class_id, intra_mean, intra_std, inter_mean, inter_std, margin.
void save_class_stats_csv(const ClassDistanceReport& report,
                          const std::filesystem::path& file);

}  // namespace lsr
