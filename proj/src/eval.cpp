#include "lsr/eval.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lsr/boxworld.hpp"
#include "lsr/io_util.hpp"
#include "lsr/metric.hpp"
#include "lsr/rng.hpp"

namespace lsr {

using nlohmann::json;

namespace {

constexpr const char* kTransNote =
    "trans counts every transition of every returned path";

struct Trial {
  int start_class = 0;
  int goal_class = 0;
  Vector z_start;
  Vector z_goal;
};

// Samples distinct configurations and encodes them, resampling until the
// encodings decode to two distinct configurations.
Trial sample_trial(const EmbedderModel& embedder, Rng& rng) {
  const int n = embedder.num_classes();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Trial t;
    t.start_class = rng.below(n);
    t.goal_class = rng.below(n);
    if (t.start_class == t.goal_class) continue;
    t.z_start = encode(embedder, t.start_class, rng);
    t.z_goal = encode(embedder, t.goal_class, rng);
    if (decode(embedder, t.z_start) == t.start_class &&
        decode(embedder, t.z_goal) == t.goal_class)
      return t;
  }
  throw std::runtime_error("evaluate: could not sample a decodable trial");
}

std::vector<int> decode_plan(const EmbedderModel& embedder, const Matrix& points) {
  std::vector<int> labels(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    labels[static_cast<std::size_t>(i)] = decode(embedder, Vector(points.col(i)));
  return labels;
}

struct PlanScore {
  bool valid = false;
  int transitions = 0;
  int valid_transitions = 0;
};

// A decoded plan is valid when it starts at the start configuration, ends at
// the goal, and every consecutive pair admits a legal move.
PlanScore score_decoded_plan(std::span<const int> labels, int start_class,
                             int goal_class) {
  PlanScore score;
  score.transitions = static_cast<int>(labels.size()) - 1;
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    if (labels[i] != labels[i + 1] &&
        boxworld::transition_action(boxworld::state_from_label(labels[i]),
                                    boxworld::state_from_label(labels[i + 1])))
      ++score.valid_transitions;
  }
  score.valid = !labels.empty() && labels.front() == start_class &&
                labels.back() == goal_class &&
                score.valid_transitions == score.transitions;
  return score;
}

EvalReport make_base_report(const Roadmap& roadmap, int n_trials, std::uint64_t seed) {
  EvalReport report;
  report.metric = roadmap.metric;
  report.epsilon = roadmap.epsilon;
  report.seed = seed;
  report.n_trials = n_trials;
  report.n_nodes = static_cast<int>(roadmap.nodes.size());
  report.notes = kTransNote;
  if (n_trials <= 0) {
    report.n_trials = 0;
    report.warning = true;
    report.notes += "; no trials requested";
  }
  return report;
}

void check_compatible(const Roadmap& roadmap, const EmbedderModel& embedder) {
  if (roadmap.nodes.empty()) throw std::invalid_argument("evaluate: empty roadmap");
  if (roadmap.latent_dim != embedder.latent_dim)
    throw std::invalid_argument("evaluate: roadmap and embedder latent_dim differ");
  if (roadmap.metric != embedder.metric)
    throw std::invalid_argument("evaluate: roadmap and embedder metric differ");
}

EvalReport evaluate_roadmap(const Roadmap& roadmap, const EmbedderModel& embedder,
                            const ApnModel* apn, int n_trials, std::uint64_t seed,
                            int cap) {
  check_compatible(roadmap, embedder);
  EvalReport report = make_base_report(roadmap, n_trials, seed);
  if (report.n_trials == 0) return report;

  // Representatives are fixed, so decode every node once up front.
  std::vector<int> node_label(roadmap.nodes.size());
  for (std::size_t i = 0; i < roadmap.nodes.size(); ++i)
    node_label[i] = decode(embedder, roadmap.nodes[i].representative);
  std::map<std::pair<int, int>, ActionSpec> proposal_cache;

  int all_ok = 0;
  int any_ok = 0;
  long transitions = 0;
  long valid_transitions = 0;
  long apn_scored = 0;
  long apn_pick_ok = 0;
  long apn_release_ok = 0;

  for (int trial = 0; trial < n_trials; ++trial) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(trial)));
    const Trial t = sample_trial(embedder, rng);
    const PlanQuery query = plan_nodes(roadmap, t.z_start, t.z_goal, cap);

    bool all_valid = !query.node_paths.empty();
    bool any_valid = false;
    for (const auto& path : query.node_paths) {
      std::vector<int> labels(path.size());
      for (std::size_t i = 0; i < path.size(); ++i) labels[i] = node_label[path[i]];
      const PlanScore score = score_decoded_plan(labels, t.start_class, t.goal_class);
      all_valid = all_valid && score.valid;
      any_valid = any_valid || score.valid;
      transitions += score.transitions;
      valid_transitions += score.valid_transitions;

      if (apn) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          const auto oracle = boxworld::transition_action(
              boxworld::state_from_label(labels[i]),
              boxworld::state_from_label(labels[i + 1]));
          if (!oracle) continue;  // no legal move to predict
          auto it = proposal_cache.find({path[i], path[i + 1]});
          if (it == proposal_cache.end())
            it = proposal_cache
                     .emplace(std::pair{path[i], path[i + 1]},
                              propose_action(*apn, roadmap.nodes[path[i]].representative,
                                             roadmap.nodes[path[i + 1]].representative))
                     .first;
          const ActionSpec& proposed = it->second;
          ++apn_scored;
          apn_pick_ok += proposed.pick == oracle->pick;
          apn_release_ok += proposed.release == oracle->release;
        }
      }
    }
    all_ok += all_valid;
    any_ok += any_valid;
    report.n_paths += static_cast<int>(query.node_paths.size());
  }

  report.all_pct = 100.0 * all_ok / n_trials;
  report.any_pct = 100.0 * any_ok / n_trials;
  report.n_transitions = static_cast<int>(transitions);
  if (transitions > 0) {
    report.trans_pct = 100.0 * valid_transitions / transitions;
  } else {
    report.warning = true;
    report.notes += "; no transitions scored";
  }
  if (apn) {
    if (apn_scored > 0) {
      report.apn_pick_acc = 100.0 * apn_pick_ok / apn_scored;
      report.apn_release_acc = 100.0 * apn_release_ok / apn_scored;
    } else {
      report.apn_pick_acc = 0.0;
      report.apn_release_acc = 0.0;
      report.warning = true;
      report.notes += "; no APN predictions scored";
    }
  }
  return report;
}

}  // namespace

EvalReport evaluate_planning(const Roadmap& roadmap, const EmbedderModel& embedder,
                             int n_trials, std::uint64_t seed, int cap) {
  return evaluate_roadmap(roadmap, embedder, nullptr, n_trials, seed, cap);
}

EvalReport evaluate_full_pipeline(const Roadmap& roadmap, const EmbedderModel& embedder,
                                  const ApnModel& apn, int n_trials,
                                  std::uint64_t seed, int cap) {
  return evaluate_roadmap(roadmap, embedder, &apn, n_trials, seed, cap);
}

EvalReport evaluate_linear_baseline(const Roadmap& roadmap,
                                    const EmbedderModel& embedder, int n_trials,
                                    std::uint64_t seed) {
  check_compatible(roadmap, embedder);
  EvalReport report = make_base_report(roadmap, n_trials, seed);
  report.notes += "; linear interpolation baseline, n = shortest-path hops";
  if (report.n_trials == 0) return report;

  int all_ok = 0;
  long transitions = 0;
  long valid_transitions = 0;

  for (int trial = 0; trial < n_trials; ++trial) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(trial)));
    // The interpolation needs n >= 2 samples, so trials whose roadmap path
    // has fewer than 2 hops (same or adjacent region) are resampled.
    int hops = -1;
    Trial t;
    for (int attempt = 0; attempt < 1000 && hops < 2; ++attempt) {
      t = sample_trial(embedder, rng);
      hops = hop_distance(roadmap, nearest_node(roadmap, t.z_start),
                          nearest_node(roadmap, t.z_goal));
    }
    if (hops < 2)
      throw std::runtime_error("evaluate_linear_baseline: could not sample a trial with >= 2 hops");

    const Matrix points = linear_interpolation_plan(t.z_start, t.z_goal, hops);
    const std::vector<int> labels = decode_plan(embedder, points);
    const PlanScore score = score_decoded_plan(labels, t.start_class, t.goal_class);
    all_ok += score.valid;
    transitions += score.transitions;
    valid_transitions += score.valid_transitions;
  }

  report.all_pct = 100.0 * all_ok / n_trials;
  report.any_pct = report.all_pct;  // one path per trial
  report.n_paths = n_trials;
  report.n_transitions = static_cast<int>(transitions);
  if (transitions > 0) {
    report.trans_pct = 100.0 * valid_transitions / transitions;
  } else {
    report.warning = true;
    report.notes += "; no transitions scored";
  }
  return report;
}

SweepResult sweep_w_eps(const LatentDataset& ds, const EmbedderModel& embedder,
                        std::span<const double> grid, int n_trials,
                        std::uint64_t seed, int min_samples, int cap) {
  if (grid.empty()) throw std::invalid_argument("sweep_w_eps: empty grid");
  std::vector<double> no_action_distances;
  for (const auto& t : ds.tuples)
    if (!t.action) no_action_distances.push_back(distance(t.z1, t.z2, ds.header.metric));

  SweepResult result;
  for (double w : grid) {
    SweepEntry entry;
    entry.w_eps = w;
    entry.epsilon = estimate_epsilon_from_distances(no_action_distances, w);
    const Roadmap roadmap = build_lsr(ds.tuples, entry.epsilon, ds.header.metric, min_samples);
    entry.n_nodes = static_cast<int>(roadmap.nodes.size());
    entry.report = evaluate_planning(roadmap, embedder, n_trials, seed, cap);
    entry.report.w_eps = w;
    result.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 1; i < result.entries.size(); ++i) {
    const EvalReport& a = result.entries[i].report;
    const EvalReport& b = result.entries[result.best_index].report;
    if (std::tie(a.all_pct, a.any_pct, a.trans_pct) >
        std::tie(b.all_pct, b.any_pct, b.trans_pct))
      result.best_index = static_cast<int>(i);
  }
  return result;
}

std::string report_csv_header() {
  return "metric,w_eps,epsilon,n_nodes,n_trials,all_pct,any_pct,trans_pct,"
         "apn_pick_acc,apn_release_acc,n_paths,n_transitions,seed,warning";
}

std::string report_csv_row(const EvalReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << to_string(r.metric) << ',';
  if (r.w_eps) out << *r.w_eps;
  out << ',' << r.epsilon << ',' << r.n_nodes << ',' << r.n_trials << ','
      << r.all_pct << ',' << r.any_pct << ',' << r.trans_pct << ',';
  if (r.apn_pick_acc) out << *r.apn_pick_acc;
  out << ',';
  if (r.apn_release_acc) out << *r.apn_release_acc;
  out << ',' << r.n_paths << ',' << r.n_transitions << ',' << r.seed << ','
      << (r.warning ? 1 : 0);
  return out.str();
}

void save_report_csv(std::span<const EvalReport> reports,
                     const std::filesystem::path& file) {
  std::ostringstream out;
  out << report_csv_header() << '\n';
  for (const auto& r : reports) out << report_csv_row(r) << '\n';
  write_file_atomic(file, out.str());
}

void save_report_json(const EvalReport& r, const std::filesystem::path& file) {
  json j{{"metric", to_string(r.metric)},
         {"epsilon", r.epsilon},
         {"n_nodes", r.n_nodes},
         {"n_trials", r.n_trials},
         {"all_pct", r.all_pct},
         {"any_pct", r.any_pct},
         {"trans_pct", r.trans_pct},
         {"n_paths", r.n_paths},
         {"n_transitions", r.n_transitions},
         {"seed", r.seed},
         {"warning", r.warning},
         {"notes", r.notes}};
  j["w_eps"] = r.w_eps ? json(*r.w_eps) : json(nullptr);
  j["apn_pick_acc"] = r.apn_pick_acc ? json(*r.apn_pick_acc) : json(nullptr);
  j["apn_release_acc"] = r.apn_release_acc ? json(*r.apn_release_acc) : json(nullptr);
  write_file_atomic(file, j.dump(2) + "\n");
}

}  // namespace lsr
