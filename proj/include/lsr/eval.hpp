#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsr/apn.hpp"
#include "lsr/dataset.hpp"
#include "lsr/embedder.hpp"
#include "lsr/roadmap.hpp"
#include "lsr/types.hpp"

namespace lsr {

/// Planning metrics over sampled start/goal trials. "all" counts trials
/// where every returned shortest path is oracle-valid, "any" trials with at
/// least one valid path, "trans" the fraction of valid transitions over
/// every transition of every returned path. A plan is valid when its
/// decoded endpoints match the sampled start and goal configurations and
/// every consecutive decoded pair admits a legal move.
struct EvalReport {
  double all_pct = 0.0;
  double any_pct = 0.0;
  double trans_pct = 0.0;
  int n_trials = 0;
  Metric metric = Metric::L1;
  std::optional<double> w_eps;
  double epsilon = 0.0;
  std::optional<double> apn_pick_acc;
  std::optional<double> apn_release_acc;
  std::uint64_t seed = 0;
  bool warning = false;
  int n_paths = 0;
  int n_transitions = 0;
  int n_nodes = 0;
  std::string notes;
};

/// Plans between freshly encoded, distinct configurations and scores the
/// decoded plans with the stacking oracle. Trials whose endpoints decode to
/// the same configuration are resampled. Throws std::invalid_argument on an
/// empty roadmap.
EvalReport evaluate_planning(const Roadmap& roadmap, const EmbedderModel& embedder,
                             int n_trials, std::uint64_t seed, int cap = 100);

/// Straight-line baseline: per trial the segment between the encoded start
/// and goal is sampled at n points, n being the hop length of the roadmap
/// shortest path for the same trial. Trials with fewer than 2 hops are
/// resampled (no interior to sample).
EvalReport evaluate_linear_baseline(const Roadmap& roadmap,
                                    const EmbedderModel& embedder, int n_trials,
                                    std::uint64_t seed);

/// evaluate_planning plus action proposals on every consecutive
/// representative pair, scored against the unique oracle move between the
/// decoded states.
EvalReport evaluate_full_pipeline(const Roadmap& roadmap, const EmbedderModel& embedder,
                                  const ApnModel& apn, int n_trials,
                                  std::uint64_t seed, int cap = 100);

struct SweepEntry {
  double w_eps = 0.0;
  double epsilon = 0.0;
  int n_nodes = 0;
  EvalReport report;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  int best_index = 0;  // by all, then any, then trans, then grid order
};

/// Builds one roadmap per grid value of w_eps (epsilon estimated from the
/// dataset's no-action pairs) and evaluates each.
SweepResult sweep_w_eps(const LatentDataset& ds, const EmbedderModel& embedder,
                        std::span<const double> grid, int n_trials,
                        std::uint64_t seed, int min_samples = 1, int cap = 100);

std::string report_csv_header();
std::string report_csv_row(const EvalReport& report);
void save_report_csv(std::span<const EvalReport> reports,
                     const std::filesystem::path& file);
void save_report_json(const EvalReport& report, const std::filesystem::path& file);

}  // namespace lsr
