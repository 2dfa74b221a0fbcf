#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "chaoslab/empirical.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/random_stream.hpp"
#include "chaoslab/serialize.hpp"

using namespace chaoslab;

namespace {

Configuration scalar_config(std::initializer_list<double> vs) {
  std::vector<Point> pts;
  for (double v : vs) pts.push_back(Point::scalar(v));
  return Configuration(std::move(pts));
}

Configuration symbol_config(std::initializer_list<int> ss) {
  std::vector<Point> pts;
  for (int s : ss) pts.push_back(Point::symbol(s));
  return Configuration(std::move(pts));
}

double weight_of(const AtomicMeasure& mu, const Atom& a) {
  for (int i = 0; i < mu.support_size(); ++i)
    if (mu.atom(i) == a) return mu.weight(i);
  return 0.0;
}

// Reference enumeration of all length-n symbol configurations over {0..k-1}.
void for_each_symbol_config(int n, int alphabet, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> sym(static_cast<std::size_t>(n), 0);
  for (;;) {
    fn(sym);
    int pos = n - 1;
    while (pos >= 0 && ++sym[static_cast<std::size_t>(pos)] == alphabet) {
      sym[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

}  // namespace

TEST_CASE("point metric axioms on random triples") {
  RandomStream rng(7, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Point a = Point::scalar(rng.normal());
    const Point b = Point::scalar(rng.normal());
    const Point c = Point::scalar(rng.normal());
    CHECK(distance(a, a) == 0.0);
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-15);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Point a = Point::velocity3({rng.normal(), rng.normal(), rng.normal()});
    const Point b = Point::velocity3({rng.normal(), rng.normal(), rng.normal()});
    const Point c = Point::velocity3({rng.normal(), rng.normal(), rng.normal()});
    CHECK(distance(a, b) >= 0.0);
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
  }
  CHECK(distance(Point::symbol(2), Point::symbol(2)) == 0.0);
  CHECK(distance(Point::symbol(0), Point::symbol(1)) == 1.0);
  CHECK_THROWS_AS(distance(Point::scalar(0), Point::symbol(0)), InvalidInputError);
}

TEST_CASE("empirical_measure counts multiplicities") {
  const AtomicMeasure mu = empirical_measure(scalar_config({1.0, 2.0, 2.0}));
  REQUIRE(mu.support_size() == 2);
  CHECK(mu.point_at(0).scalar_value() == 1.0);
  CHECK(mu.weight(0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(mu.point_at(1).scalar_value() == 2.0);
  CHECK(mu.weight(1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("empirical_measure degenerate forms") {
  const AtomicMeasure single = empirical_measure(scalar_config({4.5}));
  CHECK(single == AtomicMeasure::dirac(Point::scalar(4.5)));
  const AtomicMeasure repeated = empirical_measure(scalar_config({4.5, 4.5, 4.5, 4.5}));
  CHECK(repeated == AtomicMeasure::dirac(Point::scalar(4.5)));
}

TEST_CASE("empirical_measure is permutation invariant") {
  RandomStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(6));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back(Point::scalar(std::round(rng.normal() * 2.0) / 2.0));
    const Configuration config(pts);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[rng.uniform_below(static_cast<std::uint64_t>(i + 1))]);
    CHECK(empirical_measure(permute(config, perm)) == empirical_measure(config));
  }
}

TEST_CASE("permute applies the coordinate action") {
  const Configuration config = scalar_config({10.0, 20.0, 30.0});
  // out[i] = in[perm[i]]: perm (1,2,0) sends (a,b,c) to (b,c,a).
  const Configuration out = permute(config, {1, 2, 0});
  CHECK(out[0].scalar_value() == 20.0);
  CHECK(out[1].scalar_value() == 30.0);
  CHECK(out[2].scalar_value() == 10.0);
  const Configuration same = permute(config, {0, 1, 2});
  CHECK(same[0].scalar_value() == 10.0);
  CHECK(same[2].scalar_value() == 30.0);
  CHECK_THROWS_AS(permute(config, {0, 1}), InvalidInputError);
  CHECK_THROWS_AS(permute(config, {0, 1, 1}), InvalidInputError);
}

TEST_CASE("k-tuple measures match the small closed forms") {
  const Configuration ab = scalar_config({1.0, 2.0});
  const Point a = Point::scalar(1.0), b = Point::scalar(2.0);

  const KSampleResult without = empirical_k_without_replacement(ab, 2);
  REQUIRE(without.exact);
  CHECK(without.measure.support_size() == 2);
  CHECK(weight_of(without.measure, Atom({a, b})) == doctest::Approx(0.5));
  CHECK(weight_of(without.measure, Atom({b, a})) == doctest::Approx(0.5));

  const AtomicMeasure with = empirical_k_with_replacement(ab, 2);
  CHECK(with.support_size() == 4);
  CHECK(weight_of(with, Atom({a, a})) == doctest::Approx(0.25));
  CHECK(weight_of(with, Atom({a, b})) == doctest::Approx(0.25));
  CHECK(weight_of(with, Atom({b, a})) == doctest::Approx(0.25));
  CHECK(weight_of(with, Atom({b, b})) == doctest::Approx(0.25));

  const Configuration aa = scalar_config({3.0, 3.0});
  const KSampleResult rep = empirical_k_without_replacement(aa, 2);
  CHECK(rep.measure == AtomicMeasure::dirac(Atom({Point::scalar(3.0), Point::scalar(3.0)})));

  const Configuration single = scalar_config({7.0});
  CHECK(empirical_k_with_replacement(single, 1) ==
        AtomicMeasure::dirac(Point::scalar(7.0)));
}

TEST_CASE("k=1 tuple measures collapse to the empirical measure") {
  RandomStream rng(13, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(6));
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back(Point::scalar(std::round(rng.normal())));
    const Configuration config(pts);
    const AtomicMeasure eps = empirical_measure(config);
    const KSampleResult without = empirical_k_without_replacement(config, 1);
    const AtomicMeasure with = empirical_k_with_replacement(config, 1);
    // Compare supports and weights; tuple width is 1 in all three.
    REQUIRE(without.measure.support_size() == eps.support_size());
    REQUIRE(with.support_size() == eps.support_size());
    for (int i = 0; i < eps.support_size(); ++i) {
      CHECK(without.measure.point_at(i) == eps.point_at(i));
      CHECK(without.measure.weight(i) == doctest::Approx(eps.weight(i)).epsilon(1e-14));
      CHECK(with.point_at(i) == eps.point_at(i));
      CHECK(with.weight(i) == doctest::Approx(eps.weight(i)).epsilon(1e-14));
    }
  }
}

TEST_CASE("k-tuple measures are symmetric under slot permutation") {
  // Exchanging the k slots of every atom leaves both constructions unchanged.
  for_each_symbol_config(4, 2, [&](const std::vector<int>& sym) {
    const Configuration config = Configuration::from_symbols(sym);
    for (int k = 2; k <= 3; ++k) {
      for (const AtomicMeasure& mu :
           {empirical_k_without_replacement(config, k).measure,
            empirical_k_with_replacement(config, k)}) {
        std::vector<Atom> swapped;
        for (const Atom& atom : mu.atoms()) {
          Atom s = atom;
          std::rotate(s.slots.begin(), s.slots.begin() + 1, s.slots.end());
          swapped.push_back(std::move(s));
        }
        CHECK(AtomicMeasure(std::move(swapped), mu.weights()) == mu);
      }
    }
  });
}

TEST_CASE("without-replacement enumeration cap falls back to Monte Carlo") {
  std::vector<Point> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(Point::scalar(i % 4));
  const Configuration config(pts);

  KSampleOptions tight;
  tight.enumeration_cap = 100;  // 60*59 = 3540 > 100
  CHECK_THROWS_AS(empirical_k_without_replacement(config, 2, tight), CapacityError);

  tight.mc_budget = 5000;
  RandomStream rng(17, 0);
  const KSampleResult mc = empirical_k_without_replacement(config, 2, tight, &rng);
  CHECK_FALSE(mc.exact);
  // The MC estimate concentrates near the exact measure: compare the weight
  // of one atom class against its closed form 15*14/(60*59) for (0,0) pairs
  // with distinct indices... there are 15 copies of each value, so
  // P((0,0)) = 15*14/3540 = 210/3540.
  const double exact_w = 210.0 / 3540.0;
  const double got = weight_of(mc.measure, Atom({Point::scalar(0), Point::scalar(0)}));
  CHECK(std::abs(got - exact_w) < 5.0 * std::sqrt(exact_w * (1 - exact_w) / 5000.0));
}

TEST_CASE("with-replacement cap is a hard error") {
  std::vector<Point> pts;
  for (int i = 0; i < 101; ++i) pts.push_back(Point::scalar(i));
  const Configuration config(pts);
  CHECK_THROWS_AS(empirical_k_with_replacement(config, 3), CapacityError);
}

TEST_CASE("random_preimage reproduces the measure and randomizes order") {
  RandomStream rng(23, 0);
  const AtomicMeasure mu = AtomicMeasure::from_points(
      {Point::scalar(0.0), Point::scalar(1.0)}, {0.5, 0.5});

  const Configuration single = random_preimage(AtomicMeasure::dirac(Point::scalar(2.0)), 3, rng);
  CHECK(single.n() == 3);
  for (int i = 0; i < 3; ++i) CHECK(single[i].scalar_value() == 2.0);

  int ab = 0, ba = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Configuration c = random_preimage(mu, 2, rng);
    CHECK(empirical_measure(c) == mu);
    if (c[0].scalar_value() == 0.0) ++ab; else ++ba;
  }
  // Both orderings occur with probability 1/2; 5 sigma band around 1000.
  CHECK(std::abs(ab - 1000) < 5 * std::sqrt(2000 * 0.25));
  CHECK(ab + ba == 2000);
}

TEST_CASE("random_preimage round-trips random valid measures") {
  RandomStream rng(29, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(12));
    // Random composition of n into up to 4 parts -> weights multiples of 1/n.
    std::vector<int> counts;
    int left = n;
    while (left > 0) {
      const int c = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(left)));
      counts.push_back(c);
      left -= c;
    }
    std::vector<Point> atoms;
    std::vector<double> weights;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      atoms.push_back(Point::scalar(static_cast<double>(i)));
      weights.push_back(static_cast<double>(counts[i]) / n);
    }
    const AtomicMeasure mu = AtomicMeasure::from_points(atoms, weights);
    CHECK(empirical_measure(random_preimage(mu, n, rng)) == mu);
  }
}

TEST_CASE("random_preimage rejects invalid weights") {
  RandomStream rng(31, 0);
  const AtomicMeasure bad = AtomicMeasure::from_points(
      {Point::scalar(0.0), Point::scalar(1.0)}, {0.3, 0.7});
  CHECK_THROWS_AS(random_preimage(bad, 2, rng), InvalidInputError);
  // But weights that are off by less than 1e-9/n pass.
  const double eps = 2.5e-11;
  const AtomicMeasure near = AtomicMeasure::from_points(
      {Point::scalar(0.0), Point::scalar(1.0)}, {0.5 + eps, 0.5 - eps});
  CHECK(random_preimage(near, 2, rng).n() == 2);
}

TEST_CASE("atomic measure validates and canonicalizes") {
  CHECK_THROWS_AS(AtomicMeasure::from_points({Point::scalar(0)}, {0.9}), InvalidInputError);
  CHECK_THROWS_AS(AtomicMeasure::from_points({Point::scalar(0), Point::scalar(1)}, {1.5, -0.5}),
                  InvalidInputError);
  // Duplicates merge, order is sorted, zero weights drop.
  const AtomicMeasure mu = AtomicMeasure::from_points(
      {Point::scalar(2.0), Point::scalar(1.0), Point::scalar(2.0), Point::scalar(5.0)},
      {0.25, 0.5, 0.25, 0.0});
  REQUIRE(mu.support_size() == 2);
  CHECK(mu.point_at(0).scalar_value() == 1.0);
  CHECK(mu.weight(0) == 0.5);
  CHECK(mu.point_at(1).scalar_value() == 2.0);
  CHECK(mu.weight(1) == 0.5);
}

TEST_CASE("large equal-weight supports pass the compensated sum check") {
  const int n = 100000;
  std::vector<Point> atoms;
  std::vector<double> weights(static_cast<std::size_t>(n), 1.0 / n);
  atoms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) atoms.push_back(Point::scalar(i));
  CHECK(AtomicMeasure::from_points(atoms, weights).support_size() == n);
}

TEST_CASE("measure JSON round-trips across all variants") {
  RandomStream rng(37, 0);
  const AtomicMeasure scalar_mu = AtomicMeasure::from_points(
      {Point::scalar(-1.25), Point::scalar(0.5)}, {0.375, 0.625});
  const AtomicMeasure sym_mu = AtomicMeasure::from_points(
      {Point::symbol(0), Point::symbol(3)}, {0.5, 0.5});
  const AtomicMeasure vel_mu = AtomicMeasure::from_points(
      {Point::velocity3({0.1, -0.2, 0.3}), Point::velocity3({1, 2, 3})}, {0.25, 0.75});
  Eigen::VectorXd x(2), v(2);
  x << 0.5, -0.5;
  v << 1.5, 2.5;
  const AtomicMeasure phase_mu = AtomicMeasure::dirac(Point::phase(x, v));
  const AtomicMeasure tuple_mu(
      {Atom({Point::scalar(0.0), Point::scalar(1.0)}),
       Atom({Point::scalar(1.0), Point::scalar(0.0)})},
      {0.5, 0.5});

  for (const AtomicMeasure& mu : {scalar_mu, sym_mu, vel_mu, phase_mu, tuple_mu}) {
    const std::string text = to_json_string(mu);
    const AtomicMeasure back = atomic_measure_from_json_string(text);
    CHECK(back == mu);
    // Canonical serialization: write -> read -> write is a fixed point.
    CHECK(to_json_string(back) == text);
  }
}
