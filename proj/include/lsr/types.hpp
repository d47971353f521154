#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace lsr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Distance used for latent-space comparisons. Exactly one kind is active
/// per dataset/roadmap artifact and is recorded in every output file.
enum class Metric { L1, L2, Linf };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

/// A cell of the 3x3 stacking grid. Row 0 is the ground level.
struct GridCell {
  int row = 0;
  int col = 0;

  auto operator<=>(const GridCell&) const = default;
};

/// Pick-and-release coordinates of a single move.
struct ActionSpec {
  GridCell pick;
  GridCell release;

  auto operator<=>(const ActionSpec&) const = default;
};

/// One training tuple: a latent pair plus the action indicator `a` and, for
/// action pairs, the action specifics `u`. Class labels are ground truth
/// carried only by synthetic data.
struct TransitionTuple {
  Vector z1;
  Vector z2;
  bool action = false;
  std::optional<ActionSpec> u;
  std::optional<int> class1;
  std::optional<int> class2;
};

/// Latent-free tuple as produced by a symbolic generator; the embedder
/// upgrades these to TransitionTuples.
struct SymbolicTuple {
  int class1 = 0;
  int class2 = 0;
  bool action = false;
  std::optional<ActionSpec> u;
};

/// Throws std::invalid_argument if the tuple breaks a structural invariant
/// (action flag vs. presence of u, dimension mismatch, non-finite coords).
void validate_tuple(const TransitionTuple& t);

}  // namespace lsr
