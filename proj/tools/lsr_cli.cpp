// Command-line front end: dataset generation, embedding, roadmap building,
// planning, APN training, embedding optimization, and evaluation. Every
// subcommand is non-interactive and deterministic given its seeds.
//
// Exit codes: 0 success, 1 usage error, 2 violated evaluation threshold,
// 3 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lsr/boxworld.hpp"
#include "lsr/dataset.hpp"
#include "lsr/embedder.hpp"
#include "lsr/eval.hpp"
#include "lsr/loss.hpp"
#include "lsr/metric.hpp"
#include "lsr/roadmap.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitThreshold = 2;
constexpr int kExitIo = 3;

struct GenArgs {
  int n = 5000;
  double action_fraction = 0.65;
  std::uint64_t seed = 1;
  std::string out;
};

struct EmbedArgs {
  std::string in;
  std::string out;
  std::string embedder_out;
  int latent_dim = 64;
  std::string metric = "l1";
  std::string mode = "separated";
  double d_m = 20.0;
  double noise_sigma = 0.0;  // 0 = mode default
  std::uint64_t seed = 2;
};

struct BuildArgs {
  std::string in;
  std::string out;
  double w_eps = 0.5;
  double epsilon = 0.0;  // >0 overrides w_eps
  int min_samples = 1;
};

struct PlanArgs {
  std::string roadmap;
  std::string embedder;
  int start = 0;
  int goal = 0;
  int cap = 100;
  std::uint64_t seed = 7;
};

struct TrainArgs {
  std::string in;
  std::string out;
  std::string embedder;  // optional source for posterior sigma
  std::string accuracy_csv;
  int s_samples = 1;
  double posterior_sigma = -1.0;
  int epochs = 60;
  double step_size = 0.05;
  double val_frac = 0.2;
  int batch_size = 64;
  std::uint64_t seed = 3;
};

struct EvalArgs {
  std::string roadmap;
  std::string embedder;
  std::string apn;
  bool baseline = false;
  int n_trials = 1000;
  int cap = 100;
  std::uint64_t seed = 4;
  std::string report_csv;
  std::string report_json;
  double min_all = -1.0;
  double min_any = -1.0;
  double min_trans = -1.0;
  double max_all = 101.0;
};

struct OptArgs {
  std::string in;
  std::string out;
  std::string stats_csv;
  int latent_dim = 64;
  std::string metric = "l1";
  double d_m = 20.0;
  double gamma = 1.0;
  double lambda_prior = 1e-3;
  int steps = 2000;
  double step_size = 0.02;
  std::uint64_t seed = 5;
};

struct SweepArgs {
  std::string in;
  std::string embedder;
  std::string grid = "-0.5,0,0.5,1";
  std::string out_csv;
  std::string best_roadmap_out;
  int n_trials = 1000;
  int min_samples = 1;
  int cap = 100;
  std::uint64_t seed = 6;
};

std::vector<double> parse_grid(const std::string& grid) {
  std::vector<double> values;
  std::string token;
  std::istringstream in(grid);
  while (std::getline(in, token, ','))
    if (!token.empty()) values.push_back(std::stod(token));
  if (values.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return values;
}

void print_report(const lsr::EvalReport& r) {
  std::cout << "metric=" << lsr::to_string(r.metric) << " epsilon=" << r.epsilon
            << " nodes=" << r.n_nodes << " trials=" << r.n_trials
            << "\n  all=" << r.all_pct << "%  any=" << r.any_pct
            << "%  trans=" << r.trans_pct << "%";
  if (r.apn_pick_acc)
    std::cout << "  apn_pick=" << *r.apn_pick_acc
              << "%  apn_release=" << *r.apn_release_acc << "%";
  std::cout << "\n  paths=" << r.n_paths << " transitions=" << r.n_transitions
            << (r.warning ? "  [warning]" : "") << "\n";
}

int run_gen(const GenArgs& a) {
  lsr::SymbolicDataset ds;
  ds.header.latent_dim = 0;
  ds.header.seed = a.seed;
  ds.header.generator = "boxworld-1";
  ds.tuples = lsr::boxworld::generate_dataset(a.n, a.action_fraction, a.seed);
  save_symbolic_dataset(ds, a.out);
  std::cout << "wrote " << ds.tuples.size() << " symbolic tuples to " << a.out << "\n";
  return 0;
}

int run_embed(const EmbedArgs& a) {
  const auto sym = lsr::load_symbolic_dataset(a.in);
  int num_classes = 0;
  for (const auto& t : sym.tuples)
    num_classes = std::max({num_classes, t.class1 + 1, t.class2 + 1});
  const auto model = lsr::fit_centroids(
      num_classes, a.latent_dim, lsr::metric_from_string(a.metric),
      lsr::embedder_mode_from_string(a.mode), a.d_m, a.seed, a.noise_sigma);
  const auto latent = lsr::embed_dataset(sym, model, lsr::Rng::mix(a.seed, 1));
  save_dataset(latent, a.out);
  save_embedder(model, a.embedder_out);
  std::cout << "embedded " << latent.tuples.size() << " tuples (" << num_classes
            << " classes, dim " << a.latent_dim << ") -> " << a.out << "\n";
  return 0;
}

int run_build(const BuildArgs& a) {
  const auto ds = lsr::load_dataset(a.in);
  double epsilon = a.epsilon;
  if (!(epsilon > 0.0)) {
    const auto no_action = lsr::filter_tuples(ds.tuples, false);
    epsilon = lsr::estimate_epsilon(no_action, ds.header.metric, a.w_eps);
  }
  const auto roadmap = lsr::build_lsr(ds.tuples, epsilon, ds.header.metric, a.min_samples);
  save_roadmap(roadmap, a.out);
  std::cout << "roadmap: " << roadmap.nodes.size() << " nodes, "
            << roadmap.edges.size() << " edges, epsilon=" << epsilon << " -> "
            << a.out << "\n";
  return 0;
}

int run_plan(const PlanArgs& a) {
  const auto roadmap = lsr::load_roadmap(a.roadmap);
  const auto embedder = lsr::load_embedder(a.embedder);
  lsr::Rng rng(a.seed);
  const lsr::Vector z_start = lsr::encode(embedder, a.start, rng);
  const lsr::Vector z_goal = lsr::encode(embedder, a.goal, rng);
  const auto query = lsr::plan_nodes(roadmap, z_start, z_goal, a.cap);
  std::cout << "start node " << query.start_node << ", goal node " << query.goal_node
            << ", " << query.node_paths.size() << " shortest path(s)\n";
  for (const auto& path : query.node_paths) {
    std::cout << "  nodes:";
    for (int n : path) std::cout << ' ' << n;
    std::cout << "  classes:";
    std::vector<lsr::boxworld::BoxState> states;
    for (int n : path) {
      const int label = lsr::decode(embedder, roadmap.nodes[n].representative);
      states.push_back(lsr::boxworld::state_from_label(label));
      std::cout << ' ' << label;
    }
    bool valid = true;
    for (std::size_t i = 0; i + 1 < states.size(); ++i)
      valid = valid && lsr::boxworld::transition_action(states[i], states[i + 1]).has_value();
    std::cout << (valid ? "  [valid]" : "  [invalid]") << "\n";
  }
  if (query.node_paths.empty()) std::cout << "  goal unreachable\n";
  return 0;
}

int run_train(const TrainArgs& a) {
  const auto ds = lsr::load_dataset(a.in);
  double sigma = a.posterior_sigma;
  if (sigma < 0.0) {
    if (a.embedder.empty())
      throw CLI::ValidationError("--posterior-sigma",
                                 "give --posterior-sigma or --embedder");
    sigma = lsr::load_embedder(a.embedder).noise_sigma;
  }
  const auto action = lsr::filter_tuples(ds.tuples, true);
  const auto apn_ds = lsr::augment_pairs(action, a.s_samples, sigma, lsr::Rng::mix(a.seed, 2));
  lsr::ApnTrainOptions options;
  options.epochs = a.epochs;
  options.step_size = a.step_size;
  options.validation_fraction = a.val_frac;
  options.batch_size = a.batch_size;
  const auto model = lsr::train_apn(apn_ds, options, a.seed);
  save_apn(model, a.out);
  const auto acc = lsr::apn_accuracy(model, apn_ds);
  if (!a.accuracy_csv.empty()) {
    const std::vector<std::pair<std::uint64_t, lsr::ApnAccuracy>> rows{{a.seed, acc}};
    lsr::save_accuracy_csv(rows, a.accuracy_csv);
  }
  std::cout << "trained on " << apn_ds.size() << " pairs (S=" << a.s_samples
            << "); training-set pick=" << 100 * acc.pick
            << "% release=" << 100 * acc.release << "% -> " << a.out << "\n";
  return 0;
}

int run_eval(const EvalArgs& a) {
  const auto roadmap = lsr::load_roadmap(a.roadmap);
  const auto embedder = lsr::load_embedder(a.embedder);
  lsr::EvalReport report;
  if (a.baseline) {
    report = lsr::evaluate_linear_baseline(roadmap, embedder, a.n_trials, a.seed);
  } else if (!a.apn.empty()) {
    const auto apn = lsr::load_apn(a.apn);
    report = lsr::evaluate_full_pipeline(roadmap, embedder, apn, a.n_trials, a.seed, a.cap);
  } else {
    report = lsr::evaluate_planning(roadmap, embedder, a.n_trials, a.seed, a.cap);
  }
  print_report(report);
  if (!a.report_csv.empty())
    save_report_csv(std::vector<lsr::EvalReport>{report}, a.report_csv);
  if (!a.report_json.empty()) save_report_json(report, a.report_json);

  if (report.all_pct < a.min_all || report.any_pct < a.min_any ||
      report.trans_pct < a.min_trans || report.all_pct > a.max_all) {
    std::cerr << "evaluation threshold violated\n";
    return kExitThreshold;
  }
  return 0;
}

int run_optimize(const OptArgs& a) {
  const auto sym = lsr::load_symbolic_dataset(a.in);
  lsr::LossConfig cfg;
  cfg.metric = lsr::metric_from_string(a.metric);
  cfg.d_m = a.d_m;
  cfg.gamma = a.gamma;
  cfg.lambda_prior = a.lambda_prior;
  const auto emb = lsr::optimize_embeddings(sym.tuples, a.latent_dim, cfg, a.steps,
                                            a.step_size, a.seed);
  if (!a.out.empty()) save_embedding_set(emb, a.out);
  const auto stats = lsr::class_distance_stats(emb, cfg.metric);
  if (!a.stats_csv.empty()) save_class_stats_csv(stats, a.stats_csv);
  double inter = 0.0, intra = 0.0;
  int positive = 0;
  for (const auto& s : stats.classes) {
    inter += s.inter_mean;
    intra += s.intra_mean;
    positive += s.margin > 0.0;
  }
  const double n = static_cast<double>(stats.classes.size());
  std::cout << "classes=" << stats.classes.size() << " inter_mean=" << inter / n
            << " intra_mean=" << intra / n << " positive_margins=" << positive
            << "/" << stats.classes.size() << "\n";
  return 0;
}

int run_sweep(const SweepArgs& a) {
  const auto ds = lsr::load_dataset(a.in);
  const auto embedder = lsr::load_embedder(a.embedder);
  const auto grid = parse_grid(a.grid);
  const auto sweep =
      lsr::sweep_w_eps(ds, embedder, grid, a.n_trials, a.seed, a.min_samples, a.cap);
  std::vector<lsr::EvalReport> reports;
  for (const auto& entry : sweep.entries) {
    std::cout << "w_eps=" << entry.w_eps << " epsilon=" << entry.epsilon
              << " nodes=" << entry.n_nodes << " all=" << entry.report.all_pct
              << "% any=" << entry.report.any_pct << "% trans=" << entry.report.trans_pct
              << "%\n";
    reports.push_back(entry.report);
  }
  const auto& best = sweep.entries[sweep.best_index];
  std::cout << "best w_eps=" << best.w_eps << " (all=" << best.report.all_pct << "%)\n";
  if (!a.out_csv.empty()) save_report_csv(reports, a.out_csv);
  if (!a.best_roadmap_out.empty()) {
    const auto roadmap =
        lsr::build_lsr(ds.tuples, best.epsilon, ds.header.metric, a.min_samples);
    save_roadmap(roadmap, a.best_roadmap_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-space roadmap toolkit: build roadmaps over separated "
               "embedding regions, plan between configurations, and validate "
               "plans with the exact box-stacking oracle"};
  app.require_subcommand(1);
  app.set_config("--config");

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen", "Generate a symbolic box-stacking dataset");
  cmd_gen->add_option("--n", gen.n, "Number of tuples")->capture_default_str();
  cmd_gen->add_option("--action-fraction", gen.action_fraction,
                      "Fraction of action pairs")->capture_default_str();
  cmd_gen->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  cmd_gen->add_option("--out", gen.out, "Output dataset (jsonl)")->required();

  EmbedArgs embed;
  auto* cmd_embed = app.add_subcommand("embed", "Encode a symbolic dataset into latent space");
  cmd_embed->add_option("--in", embed.in, "Symbolic dataset")->required();
  cmd_embed->add_option("--out", embed.out, "Latent dataset output")->required();
  cmd_embed->add_option("--embedder-out", embed.embedder_out, "Embedder model output")->required();
  cmd_embed->add_option("--latent-dim", embed.latent_dim)->capture_default_str();
  cmd_embed->add_option("--metric", embed.metric, "l1, l2 or linf")->capture_default_str();
  cmd_embed->add_option("--mode", embed.mode, "separated or overlapping")->capture_default_str();
  cmd_embed->add_option("--d-m", embed.d_m, "Minimum class separation")->capture_default_str();
  cmd_embed->add_option("--noise-sigma", embed.noise_sigma,
                        "Per-coordinate jitter (0 = mode default)")->capture_default_str();
  cmd_embed->add_option("--seed", embed.seed)->capture_default_str();

  BuildArgs build;
  auto* cmd_build = app.add_subcommand("build", "Build the roadmap from a latent dataset");
  cmd_build->add_option("--in", build.in, "Latent dataset")->required();
  cmd_build->add_option("--out", build.out, "Roadmap output")->required();
  cmd_build->add_option("--w-eps", build.w_eps, "Weight for the epsilon estimate")
      ->capture_default_str();
  cmd_build->add_option("--epsilon", build.epsilon,
                        "Fixed epsilon (overrides --w-eps when > 0)")->capture_default_str();
  cmd_build->add_option("--min-samples", build.min_samples, "Node pruning threshold")
      ->capture_default_str();

  PlanArgs planArgs;
  auto* cmd_plan = app.add_subcommand("plan", "Plan between two configuration labels");
  cmd_plan->add_option("--roadmap", planArgs.roadmap)->required();
  cmd_plan->add_option("--embedder", planArgs.embedder)->required();
  cmd_plan->add_option("--start", planArgs.start, "Start configuration label")->required();
  cmd_plan->add_option("--goal", planArgs.goal, "Goal configuration label")->required();
  cmd_plan->add_option("--cap", planArgs.cap, "Maximum paths returned")->capture_default_str();
  cmd_plan->add_option("--seed", planArgs.seed, "Encoding jitter seed")->capture_default_str();

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train-apn", "Train the action proposal network");
  cmd_train->add_option("--in", train.in, "Latent dataset")->required();
  cmd_train->add_option("--out", train.out, "Model output")->required();
  cmd_train->add_option("--embedder", train.embedder,
                        "Embedder file supplying the posterior sigma");
  cmd_train->add_option("--s", train.s_samples, "Augmentation samples per pair")
      ->capture_default_str();
  cmd_train->add_option("--posterior-sigma", train.posterior_sigma,
                        "Augmentation noise scale (overrides --embedder)");
  cmd_train->add_option("--epochs", train.epochs)->capture_default_str();
  cmd_train->add_option("--step-size", train.step_size)->capture_default_str();
  cmd_train->add_option("--val-frac", train.val_frac, "Validation fraction")
      ->capture_default_str();
  cmd_train->add_option("--batch-size", train.batch_size)->capture_default_str();
  cmd_train->add_option("--seed", train.seed)->capture_default_str();
  cmd_train->add_option("--accuracy-csv", train.accuracy_csv,
                        "Write seed,pick_acc,release_acc,both_acc here");

  EvalArgs evalArgs;
  auto* cmd_eval = app.add_subcommand("eval", "Evaluate planning over random trials");
  cmd_eval->add_option("--roadmap", evalArgs.roadmap)->required();
  cmd_eval->add_option("--embedder", evalArgs.embedder)->required();
  cmd_eval->add_option("--apn", evalArgs.apn, "Score APN proposals along plans");
  cmd_eval->add_flag("--baseline", evalArgs.baseline,
                     "Evaluate the linear-interpolation baseline instead");
  cmd_eval->add_option("--n-trials", evalArgs.n_trials)->capture_default_str();
  cmd_eval->add_option("--cap", evalArgs.cap)->capture_default_str();
  cmd_eval->add_option("--seed", evalArgs.seed)->capture_default_str();
  cmd_eval->add_option("--report-csv", evalArgs.report_csv, "CSV report path");
  cmd_eval->add_option("--report-json", evalArgs.report_json, "JSON report path");
  cmd_eval->add_option("--min-all", evalArgs.min_all, "Fail (exit 2) below this all%");
  cmd_eval->add_option("--min-any", evalArgs.min_any, "Fail (exit 2) below this any%");
  cmd_eval->add_option("--min-trans", evalArgs.min_trans, "Fail (exit 2) below this trans%");
  cmd_eval->add_option("--max-all", evalArgs.max_all, "Fail (exit 2) above this all%");

  OptArgs opt;
  auto* cmd_opt = app.add_subcommand("optimize-embeddings",
                                     "Fit free embeddings with the action loss");
  cmd_opt->add_option("--in", opt.in, "Symbolic dataset")->required();
  cmd_opt->add_option("--out", opt.out, "Embedding set output (jsonl)");
  cmd_opt->add_option("--stats-csv", opt.stats_csv, "Per-class distance stats CSV");
  cmd_opt->add_option("--latent-dim", opt.latent_dim)->capture_default_str();
  cmd_opt->add_option("--metric", opt.metric)->capture_default_str();
  cmd_opt->add_option("--d-m", opt.d_m)->capture_default_str();
  cmd_opt->add_option("--gamma", opt.gamma)->capture_default_str();
  cmd_opt->add_option("--lambda-prior", opt.lambda_prior)->capture_default_str();
  cmd_opt->add_option("--steps", opt.steps)->capture_default_str();
  cmd_opt->add_option("--step-size", opt.step_size)->capture_default_str();
  cmd_opt->add_option("--seed", opt.seed)->capture_default_str();

  SweepArgs sweepArgs;
  auto* cmd_sweep = app.add_subcommand("sweep", "Grid-search w_eps and report each roadmap");
  cmd_sweep->add_option("--in", sweepArgs.in, "Latent dataset")->required();
  cmd_sweep->add_option("--embedder", sweepArgs.embedder)->required();
  cmd_sweep->add_option("--grid", sweepArgs.grid, "Comma-separated w_eps values")
      ->capture_default_str();
  cmd_sweep->add_option("--n-trials", sweepArgs.n_trials)->capture_default_str();
  cmd_sweep->add_option("--min-samples", sweepArgs.min_samples)->capture_default_str();
  cmd_sweep->add_option("--cap", sweepArgs.cap)->capture_default_str();
  cmd_sweep->add_option("--seed", sweepArgs.seed)->capture_default_str();
  cmd_sweep->add_option("--out-csv", sweepArgs.out_csv, "Per-entry report CSV");
  cmd_sweep->add_option("--best-roadmap-out", sweepArgs.best_roadmap_out,
                        "Write the best-scoring roadmap here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_embed->parsed()) return run_embed(embed);
    if (cmd_build->parsed()) return run_build(build);
    if (cmd_plan->parsed()) return run_plan(planArgs);
    if (cmd_train->parsed()) return run_train(train);
    if (cmd_eval->parsed()) return run_eval(evalArgs);
    if (cmd_opt->parsed()) return run_optimize(opt);
    if (cmd_sweep->parsed()) return run_sweep(sweepArgs);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
