// Acceptance suite: runs the ten gate criteria end to end at the default
// scale (latent_dim 64, 288 classes, 5000 tuples, 1000 trials) and prints
// one pass/fail line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lsr/apn.hpp"
#include "lsr/boxworld.hpp"
#include "lsr/dataset.hpp"
#include "lsr/embedder.hpp"
#include "lsr/eval.hpp"
#include "lsr/io_util.hpp"
#include "lsr/loss.hpp"
#include "lsr/metric.hpp"
#include "lsr/roadmap.hpp"
#include "lsr/rng.hpp"
#include "oracles.hpp"

using namespace lsr;
namespace bw = lsr::boxworld;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kGenSeed = 1;
constexpr std::uint64_t kEmbedSeed = 2;
constexpr std::uint64_t kApnSeed = 3;
constexpr std::uint64_t kEvalSeed = 4;
constexpr std::uint64_t kOptSeed = 5;
constexpr int kTrials = 1000;
const std::vector<double> kGrid{-0.5, 0.0, 0.5, 1.0};

struct MetricSetup {
  Metric metric;
  double d_m;
};
const std::vector<MetricSetup> kSetups{{Metric::L1, 20.0}, {Metric::L2, 5.0},
                                       {Metric::Linf, 2.5}};

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Pipeline {
  SymbolicDataset sym;
  EmbedderModel embedder;
  LatentDataset latent;
};

Pipeline make_pipeline(MetricSetup setup, EmbedderMode mode, std::uint64_t gen_seed,
                       std::uint64_t embed_seed) {
  Pipeline p;
  p.sym.header.generator = "boxworld-1";
  p.sym.header.seed = gen_seed;
  p.sym.tuples = bw::generate_dataset(5000, 0.65, gen_seed);
  p.embedder = fit_centroids(288, 64, setup.metric, mode, setup.d_m, embed_seed);
  p.latent = embed_dataset(p.sym, p.embedder, Rng::mix(embed_seed, 1));
  return p;
}

const EvalReport& best_report(const SweepResult& sweep) {
  return sweep.entries[sweep.best_index].report;
}

// --- A1: Table-style reproduction in the separated regime ------------------

void a1() {
  std::ostringstream detail;
  bool pass = true;
  for (const auto& setup : {kSetups[0], kSetups[1]}) {
    const Pipeline p = make_pipeline(setup, EmbedderMode::Separated, kGenSeed, kEmbedSeed);
    const auto sweep = sweep_w_eps(p.latent, p.embedder, kGrid, kTrials, kEvalSeed);
    const EvalReport& r = best_report(sweep);
    pass = pass && r.all_pct >= 99.0 && r.any_pct >= 99.0 && r.trans_pct >= 99.0;
    detail << to_string(setup.metric) << ": all=" << r.all_pct << "% any=" << r.any_pct
           << "% trans=" << r.trans_pct << "%  ";
  }
  report("A1", pass, detail.str() + "(thresholds >= 99%)");
}

// --- A2: metric ordering and the gap to the overlapping embedder -----------

void a2() {
  std::ostringstream detail;
  bool pass = true;
  std::map<Metric, double> trans_sum;
  for (int s = 0; s < 3; ++s) {
    const std::uint64_t gen_seed = kGenSeed + 10 * s;
    const std::uint64_t embed_seed = kEmbedSeed + 10 * s;
    for (const auto& setup : kSetups) {
      const Pipeline sep = make_pipeline(setup, EmbedderMode::Separated, gen_seed, embed_seed);
      const auto sweep_sep = sweep_w_eps(sep.latent, sep.embedder, kGrid, kTrials, kEvalSeed);
      const double trans_sep = best_report(sweep_sep).trans_pct;
      trans_sum[setup.metric] += trans_sep;

      const Pipeline ovl = make_pipeline(setup, EmbedderMode::Overlapping, gen_seed, embed_seed);
      const auto sweep_ovl = sweep_w_eps(ovl.latent, ovl.embedder, kGrid, kTrials, kEvalSeed);
      const double trans_ovl = best_report(sweep_ovl).trans_pct;
      if (trans_sep - trans_ovl < 20.0) {
        pass = false;
        detail << "gap violated (" << to_string(setup.metric) << " seed " << s
               << ": " << trans_sep << " vs " << trans_ovl << ")  ";
      }
    }
  }
  const double l1 = trans_sum[Metric::L1] / 3.0;
  const double l2 = trans_sum[Metric::L2] / 3.0;
  const double li = trans_sum[Metric::Linf] / 3.0;
  if (!(l1 >= l2 && l2 >= li)) pass = false;
  detail << "mean trans: l1=" << l1 << "% l2=" << l2 << "% linf=" << li
         << "%; separated-overlapping gap >= 20pts on all 9 runs";
  report("A2", pass, detail.str());
}

// --- A3: the linear-interpolation baseline finds no valid plan -------------

void a3() {
  const Pipeline p = make_pipeline(kSetups[0], EmbedderMode::Separated, kGenSeed, kEmbedSeed);
  const auto no_action = filter_tuples(p.latent.tuples, false);
  const double eps = estimate_epsilon(no_action, Metric::L1, 0.5);
  const Roadmap roadmap = build_lsr(p.latent.tuples, eps, Metric::L1);
  const EvalReport r = evaluate_linear_baseline(roadmap, p.embedder, kTrials, kEvalSeed);
  std::ostringstream detail;
  detail << "baseline all=" << r.all_pct << "% (must be 0%), trans=" << r.trans_pct
         << "% over " << kTrials << " trials";
  report("A3", r.all_pct == 0.0, detail.str());
}

// --- A4: APN accuracy on a held-out action-pair split ----------------------

// Splits pairs 80/20 with stratification by class transition, so held-out
// pairs are novel jitter draws of trained transitions (the unstructured
// centroid table cannot support cross-transition generalization).
void split_by_transition(const std::vector<TransitionTuple>& action_tuples,
                         std::uint64_t seed, std::vector<TransitionTuple>* train,
                         std::vector<TransitionTuple>* test) {
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (std::size_t i = 0; i < action_tuples.size(); ++i)
    groups[{*action_tuples[i].class1, *action_tuples[i].class2}].push_back(
        static_cast<int>(i));
  Rng rng(seed);
  for (auto& [key, members] : groups) {
    for (int i = static_cast<int>(members.size()) - 1; i > 0; --i)
      std::swap(members[i], members[rng.below(i + 1)]);
    for (std::size_t k = 0; k < members.size(); ++k) {
      // every fifth sample of a transition goes to the test split; lone
      // samples stay in training
      if (members.size() > 1 && k % 5 == 0)
        test->push_back(action_tuples[members[k]]);
      else
        train->push_back(action_tuples[members[k]]);
    }
  }
}

void a4() {
  const auto t0 = Clock::now();
  std::ostringstream detail;
  bool pass = true;
  for (int s = 0; s < 5; ++s) {
    const Pipeline p = make_pipeline(kSetups[0], EmbedderMode::Separated,
                                     kGenSeed + 100 * s, kEmbedSeed + 100 * s);
    const auto action = filter_tuples(p.latent.tuples, true);
    std::vector<TransitionTuple> train_pairs, test_pairs;
    split_by_transition(action, kApnSeed + s, &train_pairs, &test_pairs);

    const auto train_ds =
        augment_pairs(train_pairs, 1, p.embedder.noise_sigma, Rng::mix(kApnSeed + s, 2));
    const auto test_ds = augment_pairs(test_pairs, 0, 0.0, 0);

    ApnTrainOptions options;
    options.epochs = 60;
    const ApnModel model = train_apn(train_ds, options, kApnSeed + s);
    const ApnAccuracy acc = apn_accuracy(model, test_ds);
    detail << "s" << s << ": pick=" << 100 * acc.pick << "% rel=" << 100 * acc.release
           << "%  ";
    pass = pass && acc.pick >= 0.99 && acc.release >= 0.99;
  }
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed <= 600.0;
  detail << "(" << static_cast<int>(elapsed) << "s of 600s budget)";
  report("A4", pass, detail.str());
}

// --- A5: clustering equals the brute-force components oracle ---------------

void a5() {
  Rng rng(271828);
  int matched = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const int n = 2 + rng.below(199);
    const int dim = 1 + rng.below(8);
    Matrix pts(dim, n);
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < dim; ++d) pts(d, i) = 2.5 * rng.normal();
    const double eps = 0.1 + 3.0 * rng.uniform();
    const Metric m = std::array{Metric::L1, Metric::L2, Metric::Linf}[instance % 3];
    const auto regions = cluster_epsilon(pts, eps, m);
    std::set<std::set<int>> partition;
    for (const auto& r : regions)
      partition.insert(std::set<int>(r.member_indices.begin(), r.member_indices.end()));
    matched += partition == oracle::proximity_components(pts, eps, m);
  }
  std::ostringstream detail;
  detail << matched << "/200 random instances match the O(n^2) oracle partition";
  report("A5", matched == 200, detail.str());
}

// --- A6: epsilon placement and decode-encode identity ----------------------

void a6() {
  const Pipeline p = make_pipeline(kSetups[0], EmbedderMode::Separated, kGenSeed, kEmbedSeed);
  double no_action_sum = 0.0;
  int no_action_count = 0;
  double min_action = std::numeric_limits<double>::infinity();
  std::vector<double> no_action_d;
  for (const auto& t : p.latent.tuples) {
    const double d = distance(t.z1, t.z2, Metric::L1);
    if (t.action) {
      min_action = std::min(min_action, d);
    } else {
      no_action_sum += d;
      ++no_action_count;
      no_action_d.push_back(d);
    }
  }
  const double mu0 = no_action_sum / no_action_count;
  const double eps = estimate_epsilon_from_distances(no_action_d, 0.5);

  Rng rng(kEvalSeed);
  int identity = 0;
  const int reps = 10000;
  for (int i = 0; i < reps; ++i) {
    const int label = rng.below(288);
    identity += decode(p.embedder, encode(p.embedder, label, rng)) == label;
  }
  const bool pass = mu0 < eps && eps < min_action && identity >= 9990;
  std::ostringstream detail;
  detail << "mu0=" << mu0 << " < eps(w=0.5)=" << eps << " < min action distance="
         << min_action << "; decode identity " << identity << "/10000";
  report("A6", pass, detail.str());
}

// --- A7: class structure from the action loss alone ------------------------

void a7() {
  const auto t0 = Clock::now();
  const auto sym = bw::generate_dataset(5000, 0.65, kGenSeed);
  LossConfig cfg;
  cfg.metric = Metric::L1;
  cfg.d_m = 20.0;
  cfg.gamma = 1.0;
  cfg.lambda_prior = 1e-3;
  const EmbeddingSet emb = optimize_embeddings(sym, 64, cfg, 2000, 0.02, kOptSeed);
  const auto stats = class_distance_stats(emb, Metric::L1, 288);
  double inter = 0.0, intra = 0.0;
  int positive = 0;
  for (const auto& s : stats.classes) {
    inter += s.inter_mean;
    intra += s.intra_mean;
    positive += s.margin > 0.0;
  }
  const double n = static_cast<double>(stats.classes.size());
  inter /= n;
  intra /= n;
  const double elapsed = seconds_since(t0);
  const bool pass = stats.classes.size() == 288 && std::abs(inter - 20.0) <= 2.0 &&
                    intra <= 2.0 && positive >= static_cast<int>(0.95 * 288) &&
                    elapsed <= 300.0;
  std::ostringstream detail;
  detail << "inter_mean=" << inter << " (target 20 +- 10%), intra_mean=" << intra
         << " (<= 2), positive margins " << positive << "/288 (>= 274), "
         << static_cast<int>(elapsed) << "s of 300s budget";
  report("A7", pass, detail.str());
}

// --- A8: exact state enumeration and strong connectivity -------------------

void a8() {
  const auto& states = bw::enumerate_states();
  int profiles = 0;
  for (int h0 = 0; h0 <= 3; ++h0)
    for (int h1 = 0; h1 <= 3; ++h1)
      for (int h2 = 0; h2 <= 3; ++h2)
        if (h0 + h1 + h2 == 4) ++profiles;
  const int expected = profiles * 24;

  std::vector<std::vector<int>> adj(states.size());
  std::vector<std::vector<int>> radj(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    for (const auto& u : bw::legal_actions(states[i])) {
      const int j = bw::state_label(bw::apply_action(states[i], u));
      adj[i].push_back(j);
      radj[j].push_back(static_cast<int>(i));
    }
  const auto fwd = oracle::bfs_distances(adj, 0);
  const auto bwd = oracle::bfs_distances(radj, 0);
  const bool connected = std::count(fwd.begin(), fwd.end(), -1) == 0 &&
                         std::count(bwd.begin(), bwd.end(), -1) == 0;
  const bool pass = states.size() == 288 && expected == 288 && connected;
  std::ostringstream detail;
  detail << states.size() << " states, combinatorial count " << profiles << " x 24 = "
         << expected << ", action graph strongly connected: " << (connected ? "yes" : "no");
  report("A8", pass, detail.str());
}

// --- A9: gradient checks against central finite differences ----------------

bool smooth_at(const Vector& z1, const Vector& z2, bool action, const LossConfig& cfg) {
  const Vector diff = z1 - z2;
  constexpr double margin = 1e-3;
  if (action && std::abs(distance(z1, z2, cfg.metric) - cfg.d_m) < 10 * margin) return false;
  switch (cfg.metric) {
    case Metric::L1:
      return diff.cwiseAbs().minCoeff() > margin;
    case Metric::L2:
      return diff.norm() > margin;
    case Metric::Linf: {
      Vector a = diff.cwiseAbs();
      std::sort(a.data(), a.data() + a.size());
      return a.size() < 2 || a[a.size() - 1] - a[a.size() - 2] > margin;
    }
  }
  return false;
}

void a9() {
  Rng rng(314159);
  double worst_loss = 0.0;
  int checked = 0;
  for (Metric m : {Metric::L1, Metric::L2, Metric::Linf}) {
    LossConfig cfg;
    cfg.metric = m;
    cfg.d_m = 4.0;
    int done = 0;
    while (done < 1000) {
      const int dim = 2 + rng.below(6);
      Vector z1(dim), z2(dim);
      for (int d = 0; d < dim; ++d) {
        z1[d] = 3.0 * rng.normal();
        z2[d] = 3.0 * rng.normal();
      }
      const bool action = done % 2 == 0;
      if (!smooth_at(z1, z2, action, cfg)) continue;
      ++done;
      ++checked;
      const auto [g1, g2] = action_loss_grad(z1, z2, action, cfg);
      const Vector fd1 = oracle::fd_gradient(
          [&](const Vector& x) { return action_loss(x, z2, action, cfg); }, z1);
      const Vector fd2 = oracle::fd_gradient(
          [&](const Vector& x) { return action_loss(z1, x, action, cfg); }, z2);
      const double scale = std::max({1.0, g1.norm(), g2.norm()});
      worst_loss = std::max({worst_loss, (g1 - fd1).cwiseAbs().maxCoeff() / scale,
                             (g2 - fd2).cwiseAbs().maxCoeff() / scale});
    }
  }

  // APN backward on a tiny network, 1000 random parameter probes
  const int hidden[] = {5, 7, 5};
  double worst_apn = 0.0;
  int probes = 0;
  while (probes < 1000) {
    ApnModel model = make_apn(2, rng.next(), hidden);
    Matrix inputs(4, 3);
    for (int i = 0; i < 12; ++i) inputs(i % 4, i / 4) = rng.normal();
    std::vector<std::int8_t> pick(3), release(3);
    for (int i = 0; i < 3; ++i) {
      pick[i] = static_cast<std::int8_t>(rng.below(9));
      release[i] = static_cast<std::int8_t>(rng.below(9));
    }
    const auto grads = apn_batch_gradients(model, inputs, pick, release);
    for (int probe = 0; probe < 25 && probes < 1000; ++probe, ++probes) {
      const int layer = rng.below(static_cast<int>(model.weights.size()));
      const int r = rng.below(static_cast<int>(model.weights[layer].rows()));
      const int c = rng.below(static_cast<int>(model.weights[layer].cols()));
      const double h = 1e-5;
      const double saved = model.weights[layer](r, c);
      model.weights[layer](r, c) = saved + h;
      const double up = apn_batch_loss(model, inputs, pick, release);
      model.weights[layer](r, c) = saved - h;
      const double down = apn_batch_loss(model, inputs, pick, release);
      model.weights[layer](r, c) = saved;
      const double fd = (up - down) / (2 * h);
      worst_apn = std::max(worst_apn, std::abs(grads.weights[layer](r, c) - fd) /
                                          std::max(1.0, std::abs(fd)));
    }
  }
  const bool pass = worst_loss < 1e-4 && worst_apn < 1e-4;
  std::ostringstream detail;
  detail << "action loss: max rel err " << worst_loss << " over " << checked
         << " points; APN backward: max rel err " << worst_apn << " over 1000 probes";
  report("A9", pass, detail.str());
}

// --- A10: byte-identical pipeline reports across reruns --------------------

void a10(const std::string& cli_path) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "lsr_acceptance_a10";
  std::error_code ec;
  fs::remove_all(base, ec);

  auto run_pipeline = [&](const fs::path& dir) {
    fs::create_directories(dir);
    const std::string q = "\"" + cli_path + "\"";
    std::vector<std::string> commands{
        q + " gen --n 2000 --action-fraction 0.65 --seed 1 --out " + (dir / "sym.jsonl").string(),
        q + " embed --in " + (dir / "sym.jsonl").string() + " --out " +
            (dir / "latent.jsonl").string() + " --embedder-out " + (dir / "emb.json").string() +
            " --latent-dim 64 --metric l1 --d-m 20 --mode separated --seed 2",
        q + " build --in " + (dir / "latent.jsonl").string() + " --w-eps 0.5 --out " +
            (dir / "roadmap.json").string(),
        q + " eval --roadmap " + (dir / "roadmap.json").string() + " --embedder " +
            (dir / "emb.json").string() + " --n-trials 300 --seed 4 --report-csv " +
            (dir / "report.csv").string() + " --report-json " + (dir / "report.json").string() +
            " > " + (dir / "stdout.txt").string()};
    for (const auto& cmd : commands)
      if (std::system(cmd.c_str()) != 0) return false;
    return true;
  };

  const bool ran = run_pipeline(base / "run1") && run_pipeline(base / "run2");
  bool identical = ran;
  std::ostringstream detail;
  if (ran) {
    for (const char* name : {"report.csv", "report.json", "roadmap.json", "latent.jsonl"}) {
      const bool same =
          read_file(base / "run1" / name) == read_file(base / "run2" / name);
      identical = identical && same;
      detail << name << (same ? " identical; " : " DIFFERS; ");
    }
  } else {
    detail << "pipeline run failed";
  }
  report("A10", identical, detail.str());
  fs::remove_all(base, ec);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli_path = argc > 1 ? argv[1] : LSR_CLI_PATH;
  const std::string only = argc > 2 ? argv[2] : "";
  const auto t0 = Clock::now();
  auto want = [&](const char* id) { return only.empty() || only == id; };
  if (want("A1")) a1();
  if (want("A2")) a2();
  if (want("A3")) a3();
  if (want("A4")) a4();
  if (want("A5")) a5();
  if (want("A6")) a6();
  if (want("A7")) a7();
  if (want("A8")) a8();
  if (want("A9")) a9();
  if (want("A10")) a10(cli_path);
  std::printf("acceptance finished in %.0fs with %d failure(s)\n", seconds_since(t0),
              g_failures);
  return g_failures;
}
