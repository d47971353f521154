#pragma once

#include <cstdint>
#include <filesystem>

#include "lsr/dataset.hpp"
#include "lsr/rng.hpp"
#include "lsr/types.hpp"

namespace lsr {

enum class EmbedderMode { Separated, Overlapping };

std::string to_string(EmbedderMode m);
EmbedderMode embedder_mode_from_string(const std::string& s);

/// Synthetic encoder/decoder: one centroid per configuration label plus
/// isotropic per-coordinate jitter. In Separated mode all centroid pairs are
/// at least d_m apart; Overlapping mode scales a normal draw so the mean
/// pairwise distance is roughly d_m with no minimum-separation guarantee.
struct EmbedderModel {
  Matrix centroids;  // latent_dim x num_classes, one column per label
  int latent_dim = 0;
  double noise_sigma = 0.0;
  EmbedderMode mode = EmbedderMode::Separated;
  Metric metric = Metric::L1;
  double d_m = 0.0;
  std::uint64_t seed = 0;

  int num_classes() const { return static_cast<int>(centroids.cols()); }
};

/// Expected distance between two points whose coordinates each carry
/// independent N(0, sigma^2) noise, for the given metric and dimension.
/// Used to calibrate noise_sigma and the centroid draw scale.
double expected_pair_distance(Metric m, int dim, double sigma);

/// Default jitter scale: the expected no-action pair distance is 0.1 * d_m
/// in Separated mode and 1.5 * d_m in Overlapping mode (the latter makes
/// intra- and inter-class distances comparable, as in an unstructured
/// encoder).
double default_noise_sigma(Metric m, int dim, double d_m, EmbedderMode mode);

/// Builds the centroid table. Separated mode draws centroids at a scale
/// comfortably above d_m and repels any violating pair until the minimum
/// pairwise distance is >= d_m; throws std::runtime_error if separation
/// cannot be reached (suggests a larger latent_dim). noise_sigma <= 0 picks
/// the mode default.
EmbedderModel fit_centroids(int num_classes, int latent_dim, Metric m,
                            EmbedderMode mode, double d_m, std::uint64_t seed,
                            double noise_sigma = 0.0);

/// centroid[label] plus isotropic jitter of scale noise_sigma. Throws
/// std::out_of_range for labels outside the model.
Vector encode(const EmbedderModel& model, int label, Rng& rng);
Vector encode(const EmbedderModel& model, int label, std::uint64_t seed);

/// Label of the nearest centroid; ties resolve to the smallest label.
int decode(const EmbedderModel& model, const Vector& z);

/// Exhaustive O(classes^2) scan of the minimum pairwise centroid distance.
double min_centroid_separation(const EmbedderModel& model);

/// Upgrades a symbolic dataset to a latent one: both endpoints of every
/// tuple are encoded with fresh jitter; labels and action fields carry over.
LatentDataset embed_dataset(const SymbolicDataset& ds, const EmbedderModel& model,
                            std::uint64_t seed);

void save_embedder(const EmbedderModel& model, const std::filesystem::path& file);
EmbedderModel load_embedder(const std::filesystem::path& file);

}  // namespace lsr
