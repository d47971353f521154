#include "lsr/embedder.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsr/io_util.hpp"
#include "lsr/metric.hpp"

namespace lsr {

using nlohmann::json;

std::string to_string(EmbedderMode m) {
  return m == EmbedderMode::Separated ? "separated" : "overlapping";
}

EmbedderMode embedder_mode_from_string(const std::string& s) {
  if (s == "separated") return EmbedderMode::Separated;
  if (s == "overlapping") return EmbedderMode::Overlapping;
  throw std::invalid_argument("unknown embedder mode '" + s + "'");
}

namespace {

// E max_i |x_i| for dim iid standard normals, by quadrature of
// P(max > t) = 1 - (2 Phi(t) - 1)^dim.
double expected_max_abs_normal(int dim) {
  const double step = 1.0 / 4096.0;
  double acc = 0.0;
  double prev = 1.0;
  for (double t = step; t < 12.0; t += step) {
    const double cdf = std::erf(t / std::sqrt(2.0));  // 2 Phi(t) - 1
    const double tail = 1.0 - std::pow(cdf, dim);
    acc += 0.5 * (prev + tail) * step;
    prev = tail;
    if (tail < 1e-12) break;
  }
  return acc;
}

}  // namespace

double expected_pair_distance(Metric m, int dim, double sigma) {
  // Coordinate differences are N(0, 2 sigma^2).
  const double s = sigma * std::sqrt(2.0);
  switch (m) {
    case Metric::L1:
      return dim * s * std::sqrt(2.0 / M_PI);
    case Metric::L2:
      // s * sqrt(2) * Gamma((dim+1)/2) / Gamma(dim/2)
      return s * std::sqrt(2.0) *
             std::exp(std::lgamma((dim + 1) / 2.0) - std::lgamma(dim / 2.0));
    case Metric::Linf:
      return s * expected_max_abs_normal(dim);
  }
  throw std::logic_error("unknown metric");
}

double default_noise_sigma(Metric m, int dim, double d_m, EmbedderMode mode) {
  const double target =
      (mode == EmbedderMode::Separated ? 0.1 : 1.5) * d_m;
  return target / expected_pair_distance(m, dim, 1.0);
}

namespace {

// Pushes both centroids apart along the metric subgradient so their distance
// grows by `needed`.
void repel_pair(Matrix& centroids, int i, int j, Metric m, double needed) {
  Vector diff = centroids.col(i) - centroids.col(j);
  Vector sub = metric_subgradient(diff, m);
  if (sub.isZero()) {
    // coincident points: pick an arbitrary fixed direction
    sub = Vector::Zero(diff.size());
    sub[0] = 1.0;
  }
  double step = 0.0;
  switch (m) {
    case Metric::L1: {
      const double nnz = sub.cwiseAbs().sum();
      step = needed / (2.0 * std::max(nnz, 1.0));
      break;
    }
    case Metric::L2:
    case Metric::Linf:
      step = needed / 2.0;
      break;
  }
  centroids.col(i) += step * sub;
  centroids.col(j) -= step * sub;
}

}  // namespace

EmbedderModel fit_centroids(int num_classes, int latent_dim, Metric m,
                            EmbedderMode mode, double d_m, std::uint64_t seed,
                            double noise_sigma) {
  if (num_classes < 1) throw std::invalid_argument("fit_centroids: num_classes < 1");
  if (latent_dim < 1) throw std::invalid_argument("fit_centroids: latent_dim < 1");
  if (d_m <= 0.0) throw std::invalid_argument("fit_centroids: d_m must be positive");

  EmbedderModel model;
  model.latent_dim = latent_dim;
  model.mode = mode;
  model.metric = m;
  model.d_m = d_m;
  model.seed = seed;
  model.noise_sigma =
      noise_sigma > 0.0 ? noise_sigma : default_noise_sigma(m, latent_dim, d_m, mode);

  const double unit = expected_pair_distance(m, latent_dim, 1.0);
  const double scale = (mode == EmbedderMode::Separated ? 2.0 : 1.0) * d_m / unit;
  Rng rng(seed);
  model.centroids.resize(latent_dim, num_classes);
  for (int c = 0; c < num_classes; ++c)
    for (int d = 0; d < latent_dim; ++d) model.centroids(d, c) = scale * rng.normal();

  if (mode == EmbedderMode::Separated && num_classes > 1) {
    const double target = 1.02 * d_m;  // small slack so one pass usually suffices
    bool ok = false;
    for (int sweep = 0; sweep < 500 && !ok; ++sweep) {
      ok = true;
      for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j) {
          const double dist = distance(model.centroids.col(i), model.centroids.col(j), m);
          if (dist < d_m) {
            ok = false;
            repel_pair(model.centroids, i, j, m, target - dist);
          }
        }
    }
    if (!ok || min_centroid_separation(model) < d_m)
      throw std::runtime_error(
          "fit_centroids: could not reach the separation target; try a larger latent_dim");
  }
  return model;
}

Vector encode(const EmbedderModel& model, int label, Rng& rng) {
  if (label < 0 || label >= model.num_classes())
    throw std::out_of_range("encode: label out of range");
  Vector z = model.centroids.col(label);
  for (int d = 0; d < model.latent_dim; ++d) z[d] += model.noise_sigma * rng.normal();
  return z;
}

Vector encode(const EmbedderModel& model, int label, std::uint64_t seed) {
  Rng rng(seed);
  return encode(model, label, rng);
}

int decode(const EmbedderModel& model, const Vector& z) {
  if (z.size() != model.latent_dim)
    throw std::invalid_argument("decode: dimension mismatch");
  int best = 0;
  double best_dist = distance(z, Vector(model.centroids.col(0)), model.metric);
  for (int c = 1; c < model.num_classes(); ++c) {
    const double d = distance(z, Vector(model.centroids.col(c)), model.metric);
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

double min_centroid_separation(const EmbedderModel& model) {
  const int n = model.num_classes();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, distance(Vector(model.centroids.col(i)),
                                     Vector(model.centroids.col(j)), model.metric));
  return best;
}

LatentDataset embed_dataset(const SymbolicDataset& ds, const EmbedderModel& model,
                            std::uint64_t seed) {
  LatentDataset out;
  out.header = ds.header;
  out.header.latent_dim = model.latent_dim;
  out.header.metric = model.metric;
  out.header.seed = seed;
  Rng rng(seed);
  out.tuples.reserve(ds.tuples.size());
  for (const auto& t : ds.tuples) {
    TransitionTuple lt;
    lt.z1 = encode(model, t.class1, rng);
    lt.z2 = encode(model, t.class2, rng);
    lt.action = t.action;
    lt.u = t.u;
    lt.class1 = t.class1;
    lt.class2 = t.class2;
    out.tuples.push_back(std::move(lt));
  }
  return out;
}

void save_embedder(const EmbedderModel& model, const std::filesystem::path& file) {
  json j;
  j["latent_dim"] = model.latent_dim;
  j["num_classes"] = model.num_classes();
  j["metric"] = to_string(model.metric);
  j["mode"] = to_string(model.mode);
  j["d_m"] = model.d_m;
  j["noise_sigma"] = model.noise_sigma;
  j["seed"] = model.seed;
  json rows = json::array();
  for (int c = 0; c < model.num_classes(); ++c) {
    json row = json::array();
    for (int d = 0; d < model.latent_dim; ++d) row.push_back(model.centroids(d, c));
    rows.push_back(std::move(row));
  }
  j["centroids"] = std::move(rows);
  write_file_atomic(file, j.dump(2) + "\n");
}

EmbedderModel load_embedder(const std::filesystem::path& file) {
  const json j = json::parse(read_file(file));
  EmbedderModel model;
  model.latent_dim = j.at("latent_dim").get<int>();
  model.metric = metric_from_string(j.at("metric").get<std::string>());
  model.mode = embedder_mode_from_string(j.at("mode").get<std::string>());
  model.d_m = j.at("d_m").get<double>();
  model.noise_sigma = j.at("noise_sigma").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  const auto& rows = j.at("centroids");
  const int n = j.at("num_classes").get<int>();
  if (static_cast<int>(rows.size()) != n)
    throw std::runtime_error("embedder file: centroid count mismatch");
  model.centroids.resize(model.latent_dim, n);
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < model.latent_dim; ++d)
      model.centroids(d, c) = rows[c][d].get<double>();
  return model;
}

}  // namespace lsr
