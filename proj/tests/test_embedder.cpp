#include <doctest.h>

#include <filesystem>

#include "lsr/embedder.hpp"
#include "lsr/metric.hpp"

using namespace lsr;

TEST_SUITE("embedder") {

TEST_CASE("a single class trivially satisfies separation") {
  const auto model = fit_centroids(1, 8, Metric::L2, EmbedderMode::Separated, 5.0, 1);
  CHECK(model.num_classes() == 1);
  CHECK(model.latent_dim == 8);
}

TEST_CASE("separated mode reaches the pairwise separation target") {
  for (auto [m, d_m] : {std::pair{Metric::L1, 20.0},
                        std::pair{Metric::L2, 5.0},
                        std::pair{Metric::Linf, 2.5}}) {
    const auto model = fit_centroids(288, 64, m, EmbedderMode::Separated, d_m, 7);
    CHECK(min_centroid_separation(model) >= d_m);
  }
}

TEST_CASE("overlapping mode leaves at least one pair below d_m") {
  const auto model =
      fit_centroids(288, 64, Metric::L1, EmbedderMode::Overlapping, 20.0, 7);
  CHECK(min_centroid_separation(model) < 20.0);
}

TEST_CASE("encode with zero noise returns the centroid exactly") {
  auto model = fit_centroids(16, 8, Metric::L2, EmbedderMode::Separated, 5.0, 3);
  model.noise_sigma = 0.0;
  for (int label : {0, 7, 15}) {
    const Vector z = encode(model, label, 42u);
    CHECK((z - model.centroids.col(label)).norm() == 0.0);
    CHECK(decode(model, z) == label);
  }
  // repeated encodes coincide
  CHECK((encode(model, 3, 1u) - encode(model, 3, 2u)).norm() == 0.0);
}

TEST_CASE("encode rejects out-of-range labels") {
  const auto model = fit_centroids(4, 8, Metric::L2, EmbedderMode::Separated, 5.0, 3);
  CHECK_THROWS_AS(encode(model, -1, 0u), std::out_of_range);
  CHECK_THROWS_AS(encode(model, 4, 0u), std::out_of_range);
}

TEST_CASE("decode ties break to the smaller label") {
  EmbedderModel model;
  model.latent_dim = 1;
  model.metric = Metric::L2;
  model.noise_sigma = 0.0;
  model.d_m = 1.0;
  model.centroids.resize(1, 3);
  model.centroids << 0.0, 2.0, 50.0;
  Vector mid(1);
  mid << 1.0;  // equidistant from labels 0 and 1
  CHECK(decode(model, mid) == 0);
  Vector far(1);
  far << 1000.0;  // far from everything, still a total function
  CHECK(decode(model, far) == 2);
}

TEST_CASE("decode tolerates noise below half the minimum separation") {
  const auto model = fit_centroids(32, 16, Metric::L2, EmbedderMode::Separated, 4.0, 9);
  const double sep = min_centroid_separation(model);
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const int label = rng.below(32);
    Vector z = model.centroids.col(label);
    Vector dir(16);
    for (int d = 0; d < 16; ++d) dir[d] = rng.normal();
    dir *= (0.49 * sep) / dir.norm();
    CHECK(decode(model, Vector(z + dir)) == label);
  }
}

TEST_CASE("default noise scale hits the expected pair distance") {
  for (auto [m, d_m] : {std::pair{Metric::L1, 20.0},
                        std::pair{Metric::L2, 5.0},
                        std::pair{Metric::Linf, 2.5}}) {
    const auto model = fit_centroids(8, 64, m, EmbedderMode::Separated, d_m, 5);
    Rng rng(123);
    double mean = 0.0;
    const int reps = 10000;
    for (int rep = 0; rep < reps; ++rep) {
      const Vector a = encode(model, 0, rng);
      const Vector b = encode(model, 0, rng);
      mean += distance(a, b, m);
    }
    mean /= reps;
    CHECK(mean == doctest::Approx(0.1 * d_m).epsilon(0.05));
  }
}

TEST_CASE("decode-encode identity holds under default noise") {
  const auto model = fit_centroids(288, 64, Metric::L1, EmbedderMode::Separated, 20.0, 7);
  Rng rng(77);
  int hits = 0;
  const int reps = 10000;
  for (int rep = 0; rep < reps; ++rep) {
    const int label = rng.below(288);
    hits += decode(model, encode(model, label, rng)) == label;
  }
  CHECK(hits >= 9990);
}

TEST_CASE("save/load round trip is exact") {
  const auto model = fit_centroids(12, 6, Metric::Linf, EmbedderMode::Overlapping, 2.5, 31);
  const auto file = std::filesystem::temp_directory_path() / "lsr_test_embedder.json";
  save_embedder(model, file);
  const auto loaded = load_embedder(file);
  CHECK(loaded.latent_dim == model.latent_dim);
  CHECK(loaded.metric == model.metric);
  CHECK(loaded.mode == model.mode);
  CHECK(loaded.d_m == model.d_m);
  CHECK(loaded.noise_sigma == model.noise_sigma);
  CHECK(loaded.seed == model.seed);
  CHECK((loaded.centroids - model.centroids).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(file);
}

TEST_CASE("embed_dataset carries labels and composition over") {
  SymbolicDataset sym;
  sym.header.generator = "test";
  for (int i = 0; i < 10; ++i) {
    SymbolicTuple t;
    t.class1 = i % 4;
    t.class2 = (i + 1) % 4;
    t.action = true;
    t.u = ActionSpec{GridCell{0, 0}, GridCell{0, 1}};
    sym.tuples.push_back(t);
  }
  const auto model = fit_centroids(4, 8, Metric::L2, EmbedderMode::Separated, 5.0, 3);
  const auto latent = embed_dataset(sym, model, 17);
  CHECK(latent.header.latent_dim == 8);
  CHECK(latent.tuples.size() == 10);
  for (std::size_t i = 0; i < latent.tuples.size(); ++i) {
    CHECK(latent.tuples[i].class1 == sym.tuples[i].class1);
    CHECK(latent.tuples[i].action);
    CHECK(decode(model, latent.tuples[i].z1) == sym.tuples[i].class1);
  }
}

}  // TEST_SUITE
