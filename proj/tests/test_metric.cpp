#include <doctest.h>

#include <stdexcept>

#include "lsr/metric.hpp"
#include "lsr/rng.hpp"

using namespace lsr;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector random_vector(Rng& rng, int dim, double scale = 1.0) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace

TEST_SUITE("metric") {

TEST_CASE("distance matches hand arithmetic on (0,0)-(3,4)") {
  const Vector a = vec2(0, 0);
  const Vector b = vec2(3, 4);
  CHECK(distance(a, b, Metric::L1) == doctest::Approx(7.0));
  CHECK(distance(a, b, Metric::L2) == doctest::Approx(5.0));
  CHECK(distance(a, b, Metric::Linf) == doctest::Approx(4.0));
}

TEST_CASE("distance of a point to itself is zero") {
  Rng rng(3);
  const Vector a = random_vector(rng, 16);
  for (Metric m : {Metric::L1, Metric::L2, Metric::Linf})
    CHECK(distance(a, a, m) == 0.0);
}

TEST_CASE("distance rejects dimension mismatch") {
  Vector a(2), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(distance(a, b, Metric::L2), std::invalid_argument);
}

TEST_CASE("metric axioms hold on random vectors") {
  Rng rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const int dim = 1 + rng.below(12);
    const Vector a = random_vector(rng, dim, 3.0);
    const Vector b = random_vector(rng, dim, 3.0);
    const Vector c = random_vector(rng, dim, 3.0);
    for (Metric m : {Metric::L1, Metric::L2, Metric::Linf}) {
      const double ab = distance(a, b, m);
      const double ba = distance(b, a, m);
      CHECK(ab == doctest::Approx(ba));
      CHECK(ab >= 0.0);
      CHECK(distance(a, b, m) + distance(b, c, m) >=
            distance(a, c, m) - 1e-12);
    }
    // zero iff equal
    CHECK(distance(a, a, Metric::L1) == 0.0);
    if (!(a - b).isZero()) CHECK(distance(a, b, Metric::L1) > 0.0);
  }
}

TEST_CASE("norm ordering Linf <= L2 <= L1") {
  Rng rng(23);
  for (int rep = 0; rep < 300; ++rep) {
    const int dim = 1 + rng.below(16);
    const Vector a = random_vector(rng, dim, 2.0);
    const Vector b = random_vector(rng, dim, 2.0);
    const double l1 = distance(a, b, Metric::L1);
    const double l2 = distance(a, b, Metric::L2);
    const double li = distance(a, b, Metric::Linf);
    CHECK(li <= l2 + 1e-12);
    CHECK(l2 <= l1 + 1e-12);
  }
}

TEST_CASE("within_epsilon agrees with distance and is strict") {
  Rng rng(29);
  for (int rep = 0; rep < 500; ++rep) {
    const int dim = 1 + rng.below(8);
    const Vector a = random_vector(rng, dim);
    const Vector b = random_vector(rng, dim);
    const double eps = 0.2 + 2.0 * rng.uniform();
    for (Metric m : {Metric::L1, Metric::L2, Metric::Linf})
      CHECK(within_epsilon(a, b, m, eps) == (distance(a, b, m) < eps));
  }
  // exact boundary is excluded
  CHECK_FALSE(within_epsilon(vec2(0, 0), vec2(1, 0), Metric::L2, 1.0));
}

TEST_CASE("estimate_epsilon on distances {1,2,3}") {
  std::vector<TransitionTuple> pairs;
  for (double d : {1.0, 2.0, 3.0}) {
    TransitionTuple t;
    t.z1 = vec2(0, 0);
    t.z2 = vec2(d, 0);
    pairs.push_back(t);
  }
  CHECK(estimate_epsilon(pairs, Metric::L1, 0.0) == doctest::Approx(2.0));
  // population sigma of {1,2,3} is sqrt(2/3)
  CHECK(estimate_epsilon(pairs, Metric::L1, 0.5) ==
        doctest::Approx(2.0 + 0.5 * std::sqrt(2.0 / 3.0)));
}

TEST_CASE("estimate_epsilon with zero deviation returns the common distance") {
  std::vector<TransitionTuple> pairs;
  for (int i = 0; i < 3; ++i) {
    TransitionTuple t;
    t.z1 = vec2(0, 0);
    t.z2 = vec2(2, 0);
    pairs.push_back(t);
  }
  for (double w : {-5.0, 0.0, 1.0, 7.0})
    CHECK(estimate_epsilon(pairs, Metric::L1, w) == doctest::Approx(2.0));
}

TEST_CASE("estimate_epsilon error paths") {
  CHECK_THROWS_AS(estimate_epsilon({}, Metric::L1, 0.0), std::invalid_argument);

  std::vector<TransitionTuple> with_action(1);
  with_action[0].z1 = vec2(0, 0);
  with_action[0].z2 = vec2(1, 0);
  with_action[0].action = true;
  with_action[0].u = ActionSpec{};
  CHECK_THROWS_AS(estimate_epsilon(with_action, Metric::L1, 0.0), std::invalid_argument);

  std::vector<TransitionTuple> pairs(2);
  pairs[0].z1 = vec2(0, 0);
  pairs[0].z2 = vec2(1, 0);
  pairs[1].z1 = vec2(0, 0);
  pairs[1].z2 = vec2(3, 0);
  // mean 2, sigma 1; w = -3 drives the estimate negative
  CHECK_THROWS_AS(estimate_epsilon(pairs, Metric::L1, -3.0), std::runtime_error);
}

TEST_CASE("estimate_epsilon is nondecreasing in w_eps") {
  Rng rng(31);
  std::vector<double> d(40);
  for (auto& x : d) x = 0.5 + rng.uniform();
  double prev = 0.0;
  for (double w : {-0.5, -0.1, 0.0, 0.3, 0.5, 1.0, 2.0}) {
    const double eps = estimate_epsilon_from_distances(d, w);
    CHECK(eps >= prev);
    prev = eps;
  }
}

TEST_CASE("tuple validation") {
  TransitionTuple t;
  t.z1 = vec2(0, 0);
  t.z2 = vec2(1, 1);
  CHECK_NOTHROW(validate_tuple(t));
  t.action = true;
  CHECK_THROWS_AS(validate_tuple(t), std::invalid_argument);  // a=1 without u
  t.u = ActionSpec{};
  CHECK_NOTHROW(validate_tuple(t));
  t.action = false;
  CHECK_THROWS_AS(validate_tuple(t), std::invalid_argument);  // a=0 with u
  t.u.reset();
  t.z2 = Vector(3);
  CHECK_THROWS_AS(validate_tuple(t), std::invalid_argument);  // dim mismatch
}

}  // TEST_SUITE
