#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsr/types.hpp"

namespace lsr::boxworld {

inline constexpr int kColumns = 3;
inline constexpr int kMaxHeight = 3;
inline constexpr int kNumBoxes = 4;

/// A stacking configuration: 3x3 grid of cells, each empty (-1) or holding
/// one of four distinguishable boxes (0..3). cells[row * 3 + col], row 0 is
/// the ground. Valid states hold every box exactly once and obey gravity
/// (no box floats above an empty cell).
struct BoxState {
  std::array<std::int8_t, kColumns * kMaxHeight> cells;

  std::int8_t at(int row, int col) const { return cells[row * kColumns + col]; }
  std::int8_t& at(int row, int col) { return cells[row * kColumns + col]; }

  /// Nine characters, '.' for empty and 'A'..'D' for boxes, in cell order.
  /// The lexicographic order of this string defines the label integers.
  std::string serialize() const;

  bool operator==(const BoxState&) const = default;
  auto operator<=>(const BoxState&) const = default;
};

/// Stack heights per column.
std::array<int, kColumns> column_heights(const BoxState& s);

/// True iff the state holds each box exactly once and obeys gravity. When
/// given, *reason names the violated rule ("duplicate box", "floating box").
bool state_valid(const BoxState& s, std::string* reason = nullptr);

/// All valid configurations in lexicographic serialization order. The index
/// of a state in this list is its configuration label. The list is built
/// once and cached.
const std::vector<BoxState>& enumerate_states();

/// Label of a valid state; throws std::invalid_argument for invalid states.
int state_label(const BoxState& s);

const BoxState& state_from_label(int label);

/// Every (pick, release) pair allowed by the stacking rules: the pick
/// addresses the topmost box of a non-empty column and the release the first
/// free cell of a different, non-full column.
std::vector<ActionSpec> legal_actions(const BoxState& s);

/// Moves the picked box to the release cell. Throws std::invalid_argument
/// naming the violated rule when the action is not legal in s.
BoxState apply_action(const BoxState& s, const ActionSpec& u);

/// The unique action mapping `from` onto `to`, if the two states are one
/// legal move apart.
std::optional<ActionSpec> transition_action(const BoxState& from,
                                            const BoxState& to);

struct TransitionCheck {
  bool valid = false;
  std::string reason;
};

struct PlanValidityReport {
  bool all_transitions_valid = false;
  std::vector<TransitionCheck> per_transition;
  std::vector<bool> states_valid;
};

/// Checks a full plan: transition i is valid iff actions[i] is legal in
/// states[i] and produces states[i+1]. Throws std::invalid_argument unless
/// len(actions) == len(states) - 1.
PlanValidityReport validate_plan(std::span<const BoxState> states,
                                 std::span<const ActionSpec> actions);

/// Symbolic dataset: round(n_pairs * action_fraction) action tuples (random
/// state, random legal action) and no-action tuples repeating one state
/// label, in seeded shuffled order. Latent jitter is added later by the
/// embedder.
std::vector<SymbolicTuple> generate_dataset(int n_pairs, double action_fraction,
                                            std::uint64_t seed);

}  // namespace lsr::boxworld
