#include "lsr/apn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lsr/io_util.hpp"
#include "lsr/metric.hpp"
#include "lsr/rng.hpp"

namespace lsr {

using nlohmann::json;

namespace {

int cell_index(const GridCell& c) { return c.row * 3 + c.col; }

GridCell cell_from_index(int idx) { return GridCell{idx / 3, idx % 3}; }

}  // namespace

ApnDataset augment_pairs(std::span<const TransitionTuple> action_tuples,
                         int s_samples, double posterior_sigma, std::uint64_t seed) {
  if (s_samples < 0) throw std::invalid_argument("augment_pairs: negative S");
  ApnDataset ds;
  if (action_tuples.empty()) return ds;
  const Eigen::Index dim = action_tuples.front().z1.size();
  ds.latent_dim = static_cast<int>(dim);
  const Eigen::Index total =
      static_cast<Eigen::Index>(action_tuples.size()) * (s_samples + 1);
  ds.inputs.resize(2 * dim, total);
  ds.pick_cells.reserve(total);
  ds.release_cells.reserve(total);

  Rng rng(seed);
  Eigen::Index col = 0;
  for (const auto& t : action_tuples) {
    if (!t.action || !t.u)
      throw std::invalid_argument("augment_pairs: input contains a no-action tuple");
    const int pick = cell_index(t.u->pick);
    const int release = cell_index(t.u->release);
    if (pick < 0 || pick > 8 || release < 0 || release > 8 || pick == release)
      throw std::invalid_argument("augment_pairs: action cells out of range");
    ds.inputs.col(col).head(dim) = t.z1;
    ds.inputs.col(col).tail(dim) = t.z2;
    ds.pick_cells.push_back(static_cast<std::int8_t>(pick));
    ds.release_cells.push_back(static_cast<std::int8_t>(release));
    ++col;
    for (int s = 0; s < s_samples; ++s) {
      for (Eigen::Index d = 0; d < dim; ++d)
        ds.inputs(d, col) = t.z1[d] + posterior_sigma * rng.normal();
      for (Eigen::Index d = 0; d < dim; ++d)
        ds.inputs(dim + d, col) = t.z2[d] + posterior_sigma * rng.normal();
      ds.pick_cells.push_back(static_cast<std::int8_t>(pick));
      ds.release_cells.push_back(static_cast<std::int8_t>(release));
      ++col;
    }
  }
  return ds;
}

ApnModel make_apn(int latent_dim, std::uint64_t seed, std::span<const int> hidden_widths) {
  if (latent_dim < 1) throw std::invalid_argument("make_apn: latent_dim < 1");
  ApnModel model;
  model.latent_dim = latent_dim;
  std::vector<int> widths{2 * latent_dim};
  widths.insert(widths.end(), hidden_widths.begin(), hidden_widths.end());
  widths.push_back(kApnOutputs);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    Matrix w(out, in);
    const double scale = std::sqrt(2.0 / in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = scale * rng.normal();
    model.weights.push_back(std::move(w));
    model.biases.push_back(Vector::Zero(out));
  }
  return model;
}

namespace {

// Forward pass keeping pre-activations for backprop. The last layer is
// linear; hidden layers are rectified.
std::vector<Matrix> forward_activations(const ApnModel& model, const Matrix& inputs) {
  std::vector<Matrix> acts;
  acts.reserve(model.weights.size() + 1);
  acts.push_back(inputs);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Matrix a = (model.weights[l] * acts.back()).colwise() + model.biases[l];
    if (l + 1 < model.weights.size()) a = a.cwiseMax(0.0);
    acts.push_back(std::move(a));
  }
  return acts;
}

// Mean summed two-head cross-entropy and, optionally, dLoss/dLogits.
double heads_loss(const Matrix& logits, std::span<const std::int8_t> pick,
                  std::span<const std::int8_t> release, Matrix* dlogits) {
  const Eigen::Index batch = logits.cols();
  if (dlogits) dlogits->setZero(logits.rows(), batch);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i) {
    for (int head = 0; head < 2; ++head) {
      const Eigen::Index off = head * 9;
      const auto l = logits.col(i).segment(off, 9);
      const double lmax = l.maxCoeff();
      const Eigen::ArrayXd ex = (l.array() - lmax).exp();
      const double sum = ex.sum();
      const int target = head == 0 ? pick[i] : release[i];
      loss += std::log(sum) + lmax - l[target];
      if (dlogits) {
        dlogits->col(i).segment(off, 9) = (ex / sum).matrix() / static_cast<double>(batch);
        (*dlogits)(off + target, i) -= 1.0 / static_cast<double>(batch);
      }
    }
  }
  return loss / static_cast<double>(batch);
}

}  // namespace

Matrix apn_logits(const ApnModel& model, const Matrix& inputs) {
  return forward_activations(model, inputs).back();
}

double apn_batch_loss(const ApnModel& model, const Matrix& inputs,
                      std::span<const std::int8_t> pick,
                      std::span<const std::int8_t> release) {
  return heads_loss(apn_logits(model, inputs), pick, release, nullptr);
}

ApnGradients apn_batch_gradients(const ApnModel& model, const Matrix& inputs,
                                 std::span<const std::int8_t> pick,
                                 std::span<const std::int8_t> release,
                                 double* loss_out) {
  const auto acts = forward_activations(model, inputs);
  Matrix delta;
  const double loss = heads_loss(acts.back(), pick, release, &delta);
  if (loss_out) *loss_out = loss;

  ApnGradients grads;
  grads.weights.resize(model.weights.size());
  grads.biases.resize(model.biases.size());
  for (int l = static_cast<int>(model.weights.size()) - 1; l >= 0; --l) {
    grads.weights[l] = delta * acts[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = model.weights[l].transpose() * delta;
      delta = (acts[l].array() > 0.0).cast<double>() * delta.array();
    }
  }
  return grads;
}

namespace {

int argmax_head(const Vector& logits, int offset) {
  int best = 0;
  for (int i = 1; i < 9; ++i)
    if (logits[offset + i] > logits[offset + best]) best = i;
  return best;
}

int correct_predictions(const Matrix& logits, std::span<const std::int8_t> pick,
                        std::span<const std::int8_t> release) {
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.cols(); ++i) {
    const Vector col = logits.col(i);
    correct += argmax_head(col, 0) == pick[i];
    correct += argmax_head(col, 9) == release[i];
  }
  return correct;
}

}  // namespace

ApnModel train_apn(const ApnDataset& ds, const ApnTrainOptions& options,
                   std::uint64_t seed, ApnTrainStats* stats) {
  const int n = ds.size();
  if (n == 0) throw std::invalid_argument("train_apn: empty dataset");
  if (options.epochs < 1) throw std::invalid_argument("train_apn: epochs must be >= 1");

  Rng rng(seed);
  const std::span<const int> hidden =
      options.hidden_widths.empty() ? std::span<const int>(kApnHiddenWidths)
                                    : std::span<const int>(options.hidden_widths);
  ApnModel model = make_apn(ds.latent_dim, rng.next(), hidden);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const int n_val = static_cast<int>(std::llround(options.validation_fraction * n));
  const int n_train = n - n_val;
  if (n_train < 1) throw std::invalid_argument("train_apn: validation split leaves no training data");
  std::vector<int> train_idx(order.begin(), order.begin() + n_train);
  std::vector<int> val_idx(order.begin() + n_train, order.end());

  auto gather = [&](std::span<const int> idx) {
    Matrix inputs(ds.inputs.rows(), idx.size());
    std::vector<std::int8_t> pick(idx.size()), release(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      inputs.col(static_cast<Eigen::Index>(i)) = ds.inputs.col(idx[i]);
      pick[i] = ds.pick_cells[idx[i]];
      release[i] = ds.release_cells[idx[i]];
    }
    return std::tuple{std::move(inputs), std::move(pick), std::move(release)};
  };
  const auto [val_inputs, val_pick, val_release] = gather(val_idx);

  int best_correct = -1;
  double first_val_loss = 0.0;
  double selected_val_loss = 0.0;
  int selected_epoch = 0;
  const int batch = std::max(1, options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (int i = n_train - 1; i > 0; --i) std::swap(train_idx[i], train_idx[rng.below(i + 1)]);
    for (int start = 0; start < n_train; start += batch) {
      const int count = std::min(batch, n_train - start);
      const auto [inputs, pick, release] =
          gather(std::span<const int>(train_idx).subspan(start, count));
      double loss = 0.0;
      const ApnGradients grads = apn_batch_gradients(model, inputs, pick, release, &loss);
      if (!std::isfinite(loss)) throw std::runtime_error("train_apn: loss diverged");
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        model.weights[l] -= options.step_size * grads.weights[l];
        model.biases[l] -= options.step_size * grads.biases[l];
      }
    }
    if (n_val > 0) {
      const Matrix logits = apn_logits(model, val_inputs);
      const double val_loss = heads_loss(logits, val_pick, val_release, nullptr);
      if (!std::isfinite(val_loss)) throw std::runtime_error("train_apn: loss diverged");
      if (epoch == 0) first_val_loss = val_loss;
      // best performing epoch by validation accuracy; ties go to the later
      // epoch, whose margins keep growing
      const int correct = correct_predictions(logits, val_pick, val_release);
      if (correct >= best_correct) {
        best_correct = correct;
        selected_epoch = epoch + 1;
        selected_val_loss = val_loss;
      }
    }
  }
  if (stats) {
    stats->selected_epoch = n_val > 0 ? selected_epoch : options.epochs;
    stats->val_loss_first = first_val_loss;
    stats->val_loss_selected = selected_val_loss;
    stats->val_accuracy_selected =
        n_val > 0 ? static_cast<double>(best_correct) / (2.0 * n_val) : 0.0;
  }
  if (n_val == 0) return model;

  // The split's job is done once it has selected the epoch count; the
  // returned weights come from a refit on the full dataset, so rare pairs
  // that fell into the validation slice still shape the final model.
  Rng refit_rng(seed);
  ApnModel refit = make_apn(ds.latent_dim, refit_rng.next(), hidden);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (int epoch = 0; epoch < selected_epoch; ++epoch) {
    for (int i = n - 1; i > 0; --i) std::swap(all[i], all[refit_rng.below(i + 1)]);
    for (int start = 0; start < n; start += batch) {
      const int count = std::min(batch, n - start);
      const auto [inputs, pick, release] =
          gather(std::span<const int>(all).subspan(start, count));
      double loss = 0.0;
      const ApnGradients grads = apn_batch_gradients(refit, inputs, pick, release, &loss);
      if (!std::isfinite(loss)) throw std::runtime_error("train_apn: loss diverged");
      for (std::size_t l = 0; l < refit.weights.size(); ++l) {
        refit.weights[l] -= options.step_size * grads.weights[l];
        refit.biases[l] -= options.step_size * grads.biases[l];
      }
    }
  }
  return refit;
}

ActionSpec propose_action(const ApnModel& model, const Vector& z1, const Vector& z2) {
  if (z1.size() != model.latent_dim || z2.size() != model.latent_dim)
    throw std::invalid_argument("propose_action: dimension mismatch");
  Matrix input(model.input_dim(), 1);
  input.col(0).head(z1.size()) = z1;
  input.col(0).tail(z2.size()) = z2;
  const Vector logits = apn_logits(model, input).col(0);
  return ActionSpec{cell_from_index(argmax_head(logits, 0)),
                    cell_from_index(argmax_head(logits, 9))};
}

ApnAccuracy apn_accuracy(const ApnModel& model, const ApnDataset& ds) {
  ApnAccuracy acc;
  if (ds.size() == 0) return acc;
  const Matrix logits = apn_logits(model, ds.inputs);
  int pick_ok = 0, release_ok = 0, both_ok = 0;
  for (int i = 0; i < ds.size(); ++i) {
    const Vector col = logits.col(i);
    const bool p = argmax_head(col, 0) == ds.pick_cells[i];
    const bool r = argmax_head(col, 9) == ds.release_cells[i];
    pick_ok += p;
    release_ok += r;
    both_ok += p && r;
  }
  const double n = ds.size();
  return ApnAccuracy{pick_ok / n, release_ok / n, both_ok / n};
}

void save_accuracy_csv(std::span<const std::pair<std::uint64_t, ApnAccuracy>> rows,
                       const std::filesystem::path& file) {
  std::ostringstream out;
  out << "seed,pick_acc,release_acc,both_acc\n";
  out.precision(17);
  for (const auto& [seed, acc] : rows)
    out << seed << ',' << acc.pick << ',' << acc.release << ',' << acc.both << '\n';
  write_file_atomic(file, out.str());
}

ActionSpec knn_propose(const ApnDataset& train, const Vector& z1, const Vector& z2,
                       int k, Metric m) {
  if (train.size() == 0) throw std::invalid_argument("knn_propose: empty training set");
  if (k < 1) throw std::invalid_argument("knn_propose: k must be >= 1");
  Vector query(2 * z1.size());
  query.head(z1.size()) = z1;
  query.tail(z2.size()) = z2;

  std::vector<std::pair<double, int>> by_dist(train.size());
  for (int i = 0; i < train.size(); ++i)
    by_dist[i] = {distance(query, Vector(train.inputs.col(i)), m), i};
  const int kk = std::min<int>(k, train.size());
  std::partial_sort(by_dist.begin(), by_dist.begin() + kk, by_dist.end());

  std::map<std::pair<int, int>, int> votes;
  for (int i = 0; i < kk; ++i) {
    const int idx = by_dist[i].second;
    ++votes[{train.pick_cells[idx], train.release_cells[idx]}];
  }
  std::pair<int, int> best = votes.begin()->first;
  int best_count = votes.begin()->second;
  for (const auto& [action, count] : votes)
    if (count > best_count) {  // map order makes ties pick the smallest cells
      best = action;
      best_count = count;
    }
  return ActionSpec{cell_from_index(best.first), cell_from_index(best.second)};
}

void save_apn(const ApnModel& model, const std::filesystem::path& file) {
  json j;
  j["latent_dim"] = model.latent_dim;
  json layers = json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const Matrix& w = model.weights[l];
    json weights = json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) weights.push_back(w(r, c));
    json biases = json::array();
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r)
      biases.push_back(model.biases[l][r]);
    layers.push_back(json{{"rows", w.rows()},
                          {"cols", w.cols()},
                          {"weights", std::move(weights)},
                          {"biases", std::move(biases)}});
  }
  j["layers"] = std::move(layers);
  write_file_atomic(file, j.dump() + "\n");
}

ApnModel load_apn(const std::filesystem::path& file) {
  const json j = json::parse(read_file(file));
  ApnModel model;
  model.latent_dim = j.at("latent_dim").get<int>();
  for (const auto& layer : j.at("layers")) {
    const Eigen::Index rows = layer.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = layer.at("cols").get<Eigen::Index>();
    Matrix w(rows, cols);
    const auto& weights = layer.at("weights");
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        w(r, c) = weights[static_cast<std::size_t>(r * cols + c)].get<double>();
    Vector b(rows);
    const auto& biases = layer.at("biases");
    for (Eigen::Index r = 0; r < rows; ++r) b[r] = biases[static_cast<std::size_t>(r)].get<double>();
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

}  // namespace lsr
