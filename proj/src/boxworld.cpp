#include "lsr/boxworld.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "lsr/rng.hpp"

namespace lsr::boxworld {

std::string BoxState::serialize() const {
  std::string s(cells.size(), '.');
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i] >= 0) s[i] = static_cast<char>('A' + cells[i]);
  return s;
}

std::array<int, kColumns> column_heights(const BoxState& s) {
  std::array<int, kColumns> h{};
  for (int c = 0; c < kColumns; ++c) {
    int k = 0;
    while (k < kMaxHeight && s.at(k, c) >= 0) ++k;
    h[c] = k;
  }
  return h;
}

bool state_valid(const BoxState& s, std::string* reason) {
  std::array<int, kNumBoxes> count{};
  for (auto cell : s.cells) {
    if (cell < -1 || cell >= kNumBoxes) {
      if (reason) *reason = "unknown box identifier";
      return false;
    }
    if (cell >= 0) ++count[cell];
  }
  for (int b = 0; b < kNumBoxes; ++b)
    if (count[b] > 1) {
      if (reason) *reason = "duplicate box";
      return false;
    }
  for (int b = 0; b < kNumBoxes; ++b)
    if (count[b] == 0) {
      if (reason) *reason = "missing box";
      return false;
    }
  for (int c = 0; c < kColumns; ++c)
    for (int r = 1; r < kMaxHeight; ++r)
      if (s.at(r, c) >= 0 && s.at(r - 1, c) < 0) {
        if (reason) *reason = "floating box";
        return false;
      }
  return true;
}

namespace {

std::vector<BoxState> build_states() {
  std::vector<BoxState> states;
  std::array<int, kNumBoxes> perm{0, 1, 2, 3};
  for (int h0 = 0; h0 <= kMaxHeight; ++h0)
    for (int h1 = 0; h1 <= kMaxHeight; ++h1) {
      const int h2 = kNumBoxes - h0 - h1;
      if (h2 < 0 || h2 > kMaxHeight) continue;
      std::array<int, kColumns> heights{h0, h1, h2};
      std::vector<std::pair<int, int>> slots;  // (row, col) in fill order
      for (int c = 0; c < kColumns; ++c)
        for (int r = 0; r < heights[c]; ++r) slots.emplace_back(r, c);
      std::sort(perm.begin(), perm.end());
      do {
        BoxState s;
        s.cells.fill(-1);
        for (std::size_t i = 0; i < slots.size(); ++i)
          s.at(slots[i].first, slots[i].second) = static_cast<std::int8_t>(perm[i]);
        states.push_back(s);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  std::sort(states.begin(), states.end(),
            [](const BoxState& a, const BoxState& b) { return a.serialize() < b.serialize(); });
  return states;
}

const std::map<std::string, int>& label_index() {
  static const std::map<std::string, int> index = [] {
    std::map<std::string, int> m;
    const auto& states = enumerate_states();
    for (std::size_t i = 0; i < states.size(); ++i)
      m.emplace(states[i].serialize(), static_cast<int>(i));
    return m;
  }();
  return index;
}

}  // namespace

const std::vector<BoxState>& enumerate_states() {
  static const std::vector<BoxState> states = build_states();
  return states;
}

int state_label(const BoxState& s) {
  const auto& index = label_index();
  auto it = index.find(s.serialize());
  if (it == index.end())
    throw std::invalid_argument("state_label: state violates the stacking rules");
  return it->second;
}

const BoxState& state_from_label(int label) {
  const auto& states = enumerate_states();
  if (label < 0 || label >= static_cast<int>(states.size()))
    throw std::out_of_range("state_from_label: label out of range");
  return states[label];
}

std::vector<ActionSpec> legal_actions(const BoxState& s) {
  const auto h = column_heights(s);
  std::vector<ActionSpec> actions;
  for (int src = 0; src < kColumns; ++src) {
    if (h[src] == 0) continue;
    for (int dst = 0; dst < kColumns; ++dst) {
      if (dst == src || h[dst] >= kMaxHeight) continue;
      actions.push_back(ActionSpec{GridCell{h[src] - 1, src}, GridCell{h[dst], dst}});
    }
  }
  return actions;
}

BoxState apply_action(const BoxState& s, const ActionSpec& u) {
  const auto h = column_heights(s);
  const auto [pick, release] = u;
  if (pick.col < 0 || pick.col >= kColumns || release.col < 0 || release.col >= kColumns ||
      pick.row < 0 || pick.row >= kMaxHeight || release.row < 0 || release.row >= kMaxHeight)
    throw std::invalid_argument("apply_action: cell outside the grid");
  if (h[pick.col] == 0)
    throw std::invalid_argument("apply_action: pick column is empty");
  if (pick.row != h[pick.col] - 1)
    throw std::invalid_argument("apply_action: pick must address the topmost box of its column");
  if (release.col == pick.col)
    throw std::invalid_argument("apply_action: release column equals pick column");
  if (h[release.col] >= kMaxHeight)
    throw std::invalid_argument("apply_action: release column is full");
  if (release.row != h[release.col])
    throw std::invalid_argument("apply_action: release must be the first free cell of its column");
  BoxState out = s;
  out.at(release.row, release.col) = out.at(pick.row, pick.col);
  out.at(pick.row, pick.col) = -1;
  return out;
}

std::optional<ActionSpec> transition_action(const BoxState& from, const BoxState& to) {
  if (!state_valid(from) || !state_valid(to)) return std::nullopt;
  GridCell emptied{-1, -1};
  GridCell filled{-1, -1};
  int diffs = 0;
  for (int r = 0; r < kMaxHeight; ++r)
    for (int c = 0; c < kColumns; ++c) {
      if (from.at(r, c) == to.at(r, c)) continue;
      ++diffs;
      if (from.at(r, c) >= 0 && to.at(r, c) < 0)
        emptied = GridCell{r, c};
      else if (from.at(r, c) < 0 && to.at(r, c) >= 0)
        filled = GridCell{r, c};
      else
        return std::nullopt;  // a cell swapped one box for another
    }
  if (diffs != 2 || emptied.row < 0 || filled.row < 0) return std::nullopt;
  if (from.at(emptied.row, emptied.col) != to.at(filled.row, filled.col))
    return std::nullopt;
  const ActionSpec u{emptied, filled};
  const auto legal = legal_actions(from);
  if (std::find(legal.begin(), legal.end(), u) == legal.end()) return std::nullopt;
  return u;
}

PlanValidityReport validate_plan(std::span<const BoxState> states,
                                 std::span<const ActionSpec> actions) {
  if (states.empty() || actions.size() != states.size() - 1)
    throw std::invalid_argument("validate_plan: need len(actions) == len(states) - 1");
  PlanValidityReport report;
  report.states_valid.reserve(states.size());
  std::vector<std::string> state_reasons(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    report.states_valid.push_back(state_valid(states[i], &state_reasons[i]));

  report.all_transitions_valid = true;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    TransitionCheck check;
    if (!report.states_valid[i]) {
      check.reason = state_reasons[i];
    } else if (!report.states_valid[i + 1]) {
      check.reason = state_reasons[i + 1];
    } else {
      const auto legal = legal_actions(states[i]);
      if (std::find(legal.begin(), legal.end(), actions[i]) == legal.end()) {
        check.reason = "illegal action";
      } else if (!(apply_action(states[i], actions[i]) == states[i + 1])) {
        check.reason = "action does not produce the successor state";
      } else {
        check.valid = true;
      }
    }
    report.all_transitions_valid = report.all_transitions_valid && check.valid;
    report.per_transition.push_back(std::move(check));
  }
  return report;
}

std::vector<SymbolicTuple> generate_dataset(int n_pairs, double action_fraction,
                                            std::uint64_t seed) {
  if (n_pairs < 0)
    throw std::invalid_argument("generate_dataset: negative pair count");
  if (action_fraction < 0.0 || action_fraction > 1.0)
    throw std::invalid_argument("generate_dataset: action_fraction outside [0, 1]");
  const auto& states = enumerate_states();
  const int n_action = static_cast<int>(std::llround(action_fraction * n_pairs));
  Rng rng(seed);
  std::vector<SymbolicTuple> tuples;
  tuples.reserve(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const int label = rng.below(static_cast<int>(states.size()));
    SymbolicTuple t;
    t.class1 = label;
    if (i < n_action) {
      const auto actions = legal_actions(states[label]);
      const ActionSpec u = actions[rng.below(static_cast<int>(actions.size()))];
      t.class2 = state_label(apply_action(states[label], u));
      t.action = true;
      t.u = u;
    } else {
      t.class2 = label;
    }
    tuples.push_back(std::move(t));
  }
  // Fisher-Yates so action and no-action tuples interleave deterministically.
  for (int i = n_pairs - 1; i > 0; --i)
    std::swap(tuples[i], tuples[rng.below(i + 1)]);
  return tuples;
}

}  // namespace lsr::boxworld
