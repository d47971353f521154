#include "lsr/loss.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lsr/io_util.hpp"
#include "lsr/metric.hpp"
#include "lsr/rng.hpp"

namespace lsr {

using nlohmann::json;

double action_loss(const Vector& z1, const Vector& z2, bool action,
                   const LossConfig& cfg) {
  const double dist = distance(z1, z2, cfg.metric);
  if (action) return std::max(0.0, cfg.d_m - dist);
  return dist;
}

std::pair<Vector, Vector> action_loss_grad(const Vector& z1, const Vector& z2,
                                           bool action, const LossConfig& cfg) {
  const Vector diff = z1 - z2;
  if (action) {
    const double dist = distance(z1, z2, cfg.metric);
    if (dist >= cfg.d_m)  // saturated hinge, including the kink itself
      return {Vector::Zero(z1.size()), Vector::Zero(z2.size())};
    Vector g = metric_subgradient(diff, cfg.metric);
    return {-g, g};
  }
  Vector g = metric_subgradient(diff, cfg.metric);
  return {g, Vector(-g)};
}

EmbeddingSet optimize_embeddings(std::span<const SymbolicTuple> tuples,
                                 int latent_dim, const LossConfig& cfg,
                                 int steps, double step_size, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("optimize_embeddings: steps must be >= 1");
  if (latent_dim < 1) throw std::invalid_argument("optimize_embeddings: latent_dim < 1");
  if (cfg.d_m <= 0.0) throw std::invalid_argument("optimize_embeddings: d_m must be positive");

  std::map<int, int> var_of_label;
  for (const auto& t : tuples) {
    var_of_label.emplace(t.class1, 0);
    var_of_label.emplace(t.class2, 0);
  }
  int next = 0;
  for (auto& [label, var] : var_of_label) var = next++;
  const int n_vars = next;
  if (n_vars == 0) throw std::invalid_argument("optimize_embeddings: no tuples");

  // Small random spread around the origin.
  constexpr double kInitScale = 0.01;
  Rng rng(seed);
  Matrix vars(latent_dim, n_vars);
  for (int v = 0; v < n_vars; ++v)
    for (int d = 0; d < latent_dim; ++d) vars(d, v) = kInitScale * rng.normal();

  struct Pair {
    int v1, v2;
    bool action;
  };
  std::vector<Pair> pairs;
  pairs.reserve(tuples.size());
  for (const auto& t : tuples)
    pairs.push_back({var_of_label[t.class1], var_of_label[t.class2], t.action});

  Matrix grad(latent_dim, n_vars);
  for (int step = 0; step < steps; ++step) {
    grad.setZero();
    double loss = 0.0;
    for (const auto& p : pairs) {
      const auto c1 = vars.col(p.v1);
      const auto c2 = vars.col(p.v2);
      loss += cfg.lambda_prior * (c1.squaredNorm() + c2.squaredNorm());
      grad.col(p.v1) += 2.0 * cfg.lambda_prior * c1;
      grad.col(p.v2) += 2.0 * cfg.lambda_prior * c2;
      if (cfg.gamma == 0.0) continue;
      const Vector diff = c1 - c2;
      const double dist = distance(Vector(c1), Vector(c2), cfg.metric);
      if (p.action) {
        loss += cfg.gamma * std::max(0.0, cfg.d_m - dist);
        if (dist < cfg.d_m) {
          const Vector g = metric_subgradient(diff, cfg.metric);
          grad.col(p.v1) -= cfg.gamma * g;
          grad.col(p.v2) += cfg.gamma * g;
        }
      } else {
        loss += cfg.gamma * dist;
        const Vector g = metric_subgradient(diff, cfg.metric);
        grad.col(p.v1) += cfg.gamma * g;
        grad.col(p.v2) -= cfg.gamma * g;
      }
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("optimize_embeddings: loss diverged; reduce step_size");
    vars -= step_size * grad;
  }

  EmbeddingSet emb;
  emb.points.resize(latent_dim, 2 * static_cast<Eigen::Index>(tuples.size()));
  emb.labels.reserve(2 * tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    emb.points.col(2 * i) = vars.col(var_of_label[tuples[i].class1]);
    emb.points.col(2 * i + 1) = vars.col(var_of_label[tuples[i].class2]);
    emb.labels.push_back(tuples[i].class1);
    emb.labels.push_back(tuples[i].class2);
  }
  return emb;
}

ClassDistanceReport class_distance_stats(const EmbeddingSet& emb, Metric m,
                                         int num_classes) {
  if (emb.labels.size() != static_cast<std::size_t>(emb.points.cols()))
    throw std::invalid_argument("class_distance_stats: labels/points length mismatch");
  if (num_classes == 0)
    for (int label : emb.labels) num_classes = std::max(num_classes, label + 1);

  std::vector<std::vector<int>> samples_of(num_classes);
  for (std::size_t i = 0; i < emb.labels.size(); ++i) {
    const int label = emb.labels[i];
    if (label < 0 || label >= num_classes)
      throw std::invalid_argument("class_distance_stats: label out of range");
    samples_of[label].push_back(static_cast<int>(i));
  }

  ClassDistanceReport report;
  std::vector<int> populated;
  for (int c = 0; c < num_classes; ++c) {
    if (samples_of[c].empty())
      ++report.skipped_empty;
    else
      populated.push_back(c);
  }
  if (populated.size() < 2)
    throw std::invalid_argument("class_distance_stats: need at least two populated classes");

  Matrix centroids(emb.points.rows(), populated.size());
  for (std::size_t k = 0; k < populated.size(); ++k) {
    Vector mean = Vector::Zero(emb.points.rows());
    for (int i : samples_of[populated[k]]) mean += emb.points.col(i);
    centroids.col(static_cast<Eigen::Index>(k)) =
        mean / static_cast<double>(samples_of[populated[k]].size());
  }

  auto moments = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return std::pair{mean, std::sqrt(var)};
  };

  for (std::size_t k = 0; k < populated.size(); ++k) {
    ClassStats stats;
    stats.class_id = populated[k];
    const Vector centroid = centroids.col(static_cast<Eigen::Index>(k));
    std::vector<double> intra;
    for (int i : samples_of[populated[k]])
      intra.push_back(distance(Vector(emb.points.col(i)), centroid, m));
    std::vector<double> inter;
    for (std::size_t o = 0; o < populated.size(); ++o)
      if (o != k)
        inter.push_back(distance(centroid, Vector(centroids.col(static_cast<Eigen::Index>(o))), m));
    std::tie(stats.intra_mean, stats.intra_std) = moments(intra);
    std::tie(stats.inter_mean, stats.inter_std) = moments(inter);
    stats.margin = *std::min_element(inter.begin(), inter.end()) -
                   *std::max_element(intra.begin(), intra.end());
    report.classes.push_back(stats);
  }
  return report;
}

void save_embedding_set(const EmbeddingSet& emb, const std::filesystem::path& file) {
  std::ostringstream out;
  out << json{{"latent_dim", emb.points.rows()}, {"count", emb.points.cols()}}.dump() << '\n';
  for (Eigen::Index i = 0; i < emb.points.cols(); ++i) {
    json coords = json::array();
    for (Eigen::Index d = 0; d < emb.points.rows(); ++d) coords.push_back(emb.points(d, i));
    out << json{{"label", emb.labels[static_cast<std::size_t>(i)]}, {"z", std::move(coords)}}.dump()
        << '\n';
  }
  write_file_atomic(file, out.str());
}

EmbeddingSet load_embedding_set(const std::filesystem::path& file) {
  std::istringstream in(read_file(file));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("embedding file is empty");
  const json header = json::parse(line);
  const Eigen::Index dim = header.at("latent_dim").get<Eigen::Index>();
  const Eigen::Index count = header.at("count").get<Eigen::Index>();
  EmbeddingSet emb;
  emb.points.resize(dim, count);
  Eigen::Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    emb.labels.push_back(rec.at("label").get<int>());
    const auto& coords = rec.at("z");
    for (Eigen::Index d = 0; d < dim; ++d) emb.points(d, i) = coords[d].get<double>();
    ++i;
  }
  if (i != count) throw std::runtime_error("embedding file: record count mismatch");
  return emb;
}

void save_class_stats_csv(const ClassDistanceReport& report,
                          const std::filesystem::path& file) {
  std::ostringstream out;
  out << "class_id,intra_mean,intra_std,inter_mean,inter_std,margin\n";
  out.precision(17);
  for (const auto& s : report.classes)
    out << s.class_id << ',' << s.intra_mean << ',' << s.intra_std << ','
        << s.inter_mean << ',' << s.inter_std << ',' << s.margin << '\n';
  write_file_atomic(file, out.str());
}

}  // namespace lsr
