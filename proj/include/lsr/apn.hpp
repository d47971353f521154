#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lsr/types.hpp"

namespace lsr {

/// Supervised action-prediction data: concatenated (z1, z2) inputs and the
/// pick/release grid cells (0..8, row * 3 + col) as two 9-way targets.
struct ApnDataset {
  Matrix inputs;  // (2 * latent_dim) x n, one column per pair
  std::vector<std::int8_t> pick_cells;
  std::vector<std::int8_t> release_cells;
  int latent_dim = 0;

  int size() const { return static_cast<int>(inputs.cols()); }
};

/// For every action tuple, emits the original latent pair plus s_samples
/// jittered pairs drawn with isotropic noise of scale posterior_sigma around
/// each endpoint: (s_samples + 1) * |tuples| training pairs. Throws
/// std::invalid_argument if a tuple is not an action pair.
ApnDataset augment_pairs(std::span<const TransitionTuple> action_tuples,
                         int s_samples, double posterior_sigma, std::uint64_t seed);

/// Diamond-shaped MLP: 2*latent_dim -> 256 -> 512 -> 256 -> 18, rectifier
/// activations, two 9-way output heads (pick cells, release cells).
struct ApnModel {
  std::vector<Matrix> weights;  // weights[l]: out x in
  std::vector<Vector> biases;
  int latent_dim = 0;

  int input_dim() const { return 2 * latent_dim; }
};

inline constexpr int kApnHiddenWidths[] = {256, 512, 256};
inline constexpr int kApnOutputs = 18;

/// Fresh model with seeded scaled-normal initialization.
ApnModel make_apn(int latent_dim, std::uint64_t seed,
                  std::span<const int> hidden_widths = kApnHiddenWidths);

/// Raw 18-row logits for a batch of input columns.
Matrix apn_logits(const ApnModel& model, const Matrix& inputs);

/// Mean over columns of the summed cross-entropy of the two heads.
double apn_batch_loss(const ApnModel& model, const Matrix& inputs,
                      std::span<const std::int8_t> pick,
                      std::span<const std::int8_t> release);

struct ApnGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Backpropagated gradients of apn_batch_loss for the same batch.
ApnGradients apn_batch_gradients(const ApnModel& model, const Matrix& inputs,
                                 std::span<const std::int8_t> pick,
                                 std::span<const std::int8_t> release,
                                 double* loss_out = nullptr);

struct ApnTrainOptions {
  int epochs = 60;
  double step_size = 0.05;
  int batch_size = 64;
  double validation_fraction = 0.2;  // selects the best epoch
  std::vector<int> hidden_widths;    // empty = the default diamond
};

struct ApnTrainStats {
  int selected_epoch = 0;  // 1-based
  double val_loss_first = 0.0;
  double val_loss_selected = 0.0;
  double val_accuracy_selected = 0.0;  // mean of pick and release accuracy
};

/// Mini-batch SGD on the summed cross-entropy; deterministic given the
/// seed. The best-performing epoch by validation accuracy is returned, with
/// ties going to the later epoch (final weights when the split is empty).
/// Throws std::runtime_error on a non-finite loss.
ApnModel train_apn(const ApnDataset& ds, const ApnTrainOptions& options,
                   std::uint64_t seed, ApnTrainStats* stats = nullptr);

/// Argmax cell of each head mapped to grid coordinates; ties resolve to the
/// smallest cell index.
ActionSpec propose_action(const ApnModel& model, const Vector& z1, const Vector& z2);

struct ApnAccuracy {
  double pick = 0.0;
  double release = 0.0;
  double both = 0.0;
};

ApnAccuracy apn_accuracy(const ApnModel& model, const ApnDataset& ds);

/// CSV: seed, pick_acc, release_acc, both_acc (one row per entry).
void save_accuracy_csv(std::span<const std::pair<std::uint64_t, ApnAccuracy>> rows,
                       const std::filesystem::path& file);

/// Majority action among the k nearest training pairs under the metric on
/// concatenated inputs; ties resolve to the smallest (pick, release) cells.
/// Throws std::invalid_argument on an empty training set.
ActionSpec knn_propose(const ApnDataset& train, const Vector& z1, const Vector& z2,
                       int k, Metric m);

void save_apn(const ApnModel& model, const std::filesystem::path& file);
ApnModel load_apn(const std::filesystem::path& file);

}  // namespace lsr
