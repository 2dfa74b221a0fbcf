#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "chaoslab/empirical.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/meanfield.hpp"
#include "chaoslab/metrics.hpp"
#include "chaoslab/processes.hpp"
#include "chaoslab/random_stream.hpp"

using namespace chaoslab;

namespace {

double l1_gap(const GridLaw1D& a, const GridLaw1D& b) {
  return (a.masses() - b.masses()).cwiseAbs().sum();
}

double measure_mass(const AtomicMeasure& mu) {
  return stable_sum(mu.weights());
}

// Mean of the first coordinate of the first slot; enough to witness the
// mean-preservation of midpoint merges on every space the quantizer accepts.
double first_coordinate_mean(const AtomicMeasure& mu) {
  return mu.integrate([](const Atom& a) { return a.slots[0].coords()(0); });
}

double scalar_second_moment(const AtomicMeasure& mu) {
  return mu.integrate([](const Atom& a) {
    const double v = a.slots[0].scalar_value();
    return v * v;
  });
}

}  // namespace

TEST_CASE("grid law construction validates its inputs") {
  Eigen::VectorXd ok(3);
  ok << 0.25, 0.5, 0.25;
  CHECK_THROWS_AS(GridLaw1D(0.0, ok), InvalidInputError);
  CHECK_THROWS_AS(GridLaw1D(-1.0, ok), InvalidInputError);

  Eigen::VectorXd two(2);
  two << 0.5, 0.5;
  CHECK_THROWS_AS(GridLaw1D(1.0, two), InvalidInputError);

  Eigen::VectorXd negative(3);
  negative << 0.5, 0.75, -0.25;
  CHECK_THROWS_AS(GridLaw1D(1.0, negative), InvalidInputError);

  Eigen::VectorXd short_mass(3);
  short_mass << 0.25, 0.5, 0.2;
  CHECK_THROWS_AS(GridLaw1D(1.0, short_mass), InvalidInputError);

  const GridLaw1D f(1.5, ok);
  CHECK(f.cells() == 3);
  CHECK(f.half_width() == 1.5);
  CHECK(f.dx() == doctest::Approx(1.0));
  CHECK(f.center(0) == doctest::Approx(-1.0));
  CHECK(f.center(2) == doctest::Approx(1.0));
  const Eigen::VectorXd centers = f.centers();
  REQUIRE(centers.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(centers(i) == f.center(i));
  CHECK(f.second_moment() == doctest::Approx(0.5));
}

TEST_CASE("gaussian and uniform grid factories reproduce their moments") {
  const GridLaw1D g = GridLaw1D::gaussian(6.0, 256, 1.0);
  CHECK(g.cells() == 256);
  CHECK(std::abs(g.masses().sum() - 1.0) <= 1e-12);
  CHECK(g.second_moment() == doctest::Approx(1.0).epsilon(1e-3));
  for (int i = 0; i < 128; ++i) {
    CHECK(std::abs(g.masses()(i) - g.masses()(255 - i)) <= 1e-14);
  }

  // Support edges at +-2 line up with cell boundaries, so every covered cell
  // carries the same mass and the discrete second moment is the midpoint
  // quadrature of w^2/3.
  const GridLaw1D u = GridLaw1D::uniform(6.0, 240, 2.0);
  CHECK(std::abs(u.masses().sum() - 1.0) <= 1e-12);
  CHECK(u.second_moment() == doctest::Approx(4.0 / 3.0).epsilon(2e-3));
  CHECK(u.masses()(120) == doctest::Approx(1.0 / 80.0));
  CHECK(u.masses()(0) == 0.0);

  CHECK_THROWS_AS(GridLaw1D::gaussian(6.0, 256, 0.0), InvalidInputError);
  CHECK_THROWS_AS(GridLaw1D::gaussian(6.0, 2, 1.0), InvalidInputError);
  CHECK_THROWS_AS(GridLaw1D::uniform(1.0, 64, 2.0), InvalidInputError);
}

TEST_CASE("grid carrier for a law matches its spread") {
  const GridLaw1D g = grid_from_law(SingleParticleLaw::parse("gaussian"), 256);
  CHECK(g.half_width() == doctest::Approx(6.0));
  CHECK(g.second_moment() == doctest::Approx(1.0).epsilon(1e-3));

  const GridLaw1D u = grid_from_law(SingleParticleLaw::parse("uniform(2)"), 240);
  CHECK(u.half_width() == doctest::Approx(12.0 / std::sqrt(3.0)));
  CHECK(u.second_moment() == doctest::Approx(4.0 / 3.0).epsilon(2e-3));

  CHECK_THROWS_AS(grid_from_law(SingleParticleLaw::parse("bernoulli(0.5)"), 64),
                  InvalidInputError);
}

TEST_CASE("grid csv prints one center and mass row per cell") {
  Eigen::VectorXd masses(3);
  masses << 0.25, 0.5, 0.25;
  const GridLaw1D f(1.5, masses);
  CHECK(grid_csv(f) == "center,mass\n-1,0.25\n0,0.5\n1,0.25\n");
}

TEST_CASE("atomize keeps cell centers and drops empty cells") {
  Eigen::VectorXd masses(3);
  masses << 0.5, 0.0, 0.5;
  const AtomicMeasure mu = atomize(GridLaw1D(1.5, masses));
  REQUIRE(mu.support_size() == 2);
  CHECK(mu.kind() == SpaceKind::Scalar);
  CHECK(mu.point_at(0).scalar_value() == doctest::Approx(-1.0));
  CHECK(mu.point_at(1).scalar_value() == doctest::Approx(1.0));
  CHECK(mu.weight(0) == 0.5);
  CHECK(mu.weight(1) == 0.5);

  // A gaussian grid has no exact zeros, so nothing is dropped.
  CHECK(atomize(GridLaw1D::gaussian(6.0, 64, 1.0)).support_size() == 64);
}

TEST_CASE("velocity exchange solver fixes the gaussian and conserves invariants") {
  const GridLaw1D f0 = GridLaw1D::gaussian(6.0, 256, 1.0);

  const GridLaw1D same = solve_kac_caricature(f0, 0.0, 1.0, 0.05);
  CHECK((same.masses() - f0.masses()).cwiseAbs().maxCoeff() == 0.0);

  const GridLaw1D f1 = solve_kac_caricature(f0, 1.0, 1.0, 0.05);
  CHECK(std::abs(f1.masses().sum() - 1.0) <= 1e-12);
  CHECK(std::abs(f1.second_moment() - f0.second_moment()) <= 1e-4 * f0.second_moment());
  // The standard gaussian is the stationary profile at unit energy.
  CHECK(l1_gap(f1, f0) <= 1e-3);
}

TEST_CASE("velocity exchange drives a flat start toward the matched gaussian") {
  const GridLaw1D f0 = GridLaw1D::uniform(6.0, 128, 2.0);
  const double energy = f0.second_moment();
  const GridLaw1D target = GridLaw1D::gaussian(6.0, 128, std::sqrt(energy));

  const double gap0 = l1_gap(f0, target);
  const GridLaw1D f = solve_kac_caricature(f0, 4.0, 1.0, 0.05);
  const double gap4 = l1_gap(f, target);

  CHECK(std::abs(f.masses().sum() - 1.0) <= 1e-12);
  CHECK(std::abs(f.second_moment() - energy) <= 1e-3 * energy);
  CHECK(gap4 < 0.1 * gap0);
  CHECK(gap4 < 0.05);
}

TEST_CASE("velocity exchange rejects bad steps and escaping mass") {
  const GridLaw1D flat = GridLaw1D::uniform(6.0, 64, 2.0);
  CHECK_THROWS_AS(solve_kac_caricature(flat, 1.0, 0.0, 0.05), InvalidInputError);
  CHECK_THROWS_AS(solve_kac_caricature(flat, 1.0, -1.0, 0.05), InvalidInputError);
  CHECK_THROWS_AS(solve_kac_caricature(flat, -1.0, 1.0, 0.05), InvalidInputError);
  CHECK_THROWS_AS(solve_kac_caricature(flat, 1.0, 0.3, 1.0), StepSizeError);

  // One huge Euler step sends cells negative.
  CHECK_THROWS_WITH_AS(solve_kac_caricature(flat, 10.0, 1.0, 10.0),
                       doctest::Contains("step"), StepSizeError);

  // A domain clipped at two standard deviations loses mass over the edge.
  const GridLaw1D clipped = GridLaw1D::gaussian(2.0, 64, 1.0);
  try {
    solve_kac_caricature(clipped, 0.1, 1.0, 0.05);
    FAIL("expected the boundary check to fire");
  } catch (const NumericBlowupError& e) {
    CHECK(std::string(e.what()).find("cutoff") != std::string::npos);
    CHECK(e.step_index >= 1);
  }
}

TEST_CASE("fokker planck solver is inert without drift or diffusion") {
  const GridLaw1D f0 = GridLaw1D::gaussian(6.0, 100, 1.0);
  const GridLaw1D f = solve_mckean_vlasov_fp1d(f0, 1.0, DriftKernel::parse("zero"),
                                               SigmaKernel::parse("zero"), 0.01);
  CHECK((f.masses() - f0.masses()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fokker planck relaxation sharpens on finer grids") {
  const DriftKernel pull = DriftKernel::parse("ou");
  const SigmaKernel noise = SigmaKernel::parse("constant(1.4142135623730951)");

  std::vector<double> errs;
  for (int m : {100, 200, 400}) {
    const GridLaw1D f0 = GridLaw1D::uniform(6.0, m, 2.0);
    const double dx = f0.dx();
    // Snap the largest stable step to a whole divisor of t = 10.
    const int steps = static_cast<int>(std::ceil(10.0 / (0.18 * dx * dx)));
    const GridLaw1D f =
        solve_mckean_vlasov_fp1d(f0, 10.0, pull, noise, 10.0 / steps);
    CHECK(std::abs(f.masses().sum() - 1.0) <= 1e-12);
    errs.push_back(l1_gap(f, GridLaw1D::gaussian(6.0, m, 1.0)));
    if (m == 400) {
      CHECK(f.second_moment() > 1.0);
      CHECK(f.second_moment() < 1.05);
    }
  }
  // First-order transport: the gap to the n(0,1) equilibrium roughly halves
  // with the cell size.
  CHECK(errs[2] < errs[1]);
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < 0.55 * errs[1]);
  CHECK(errs[1] < 0.55 * errs[0]);
  CHECK(errs[2] <= 1.2e-2);
}

TEST_CASE("fokker planck stability guard rejects oversized diffusion steps") {
  const GridLaw1D f0 = GridLaw1D::uniform(6.0, 100, 2.0);  // dx = 0.12
  const DriftKernel none = DriftKernel::parse("zero");
  const SigmaKernel unit = SigmaKernel::parse("constant(1)");

  CHECK_THROWS_AS(solve_mckean_vlasov_fp1d(f0, 1.0, none, unit, 0.01), ConfigError);
  CHECK_NOTHROW(solve_mckean_vlasov_fp1d(f0, 0.04, none, unit, 0.004));

  // No diffusion, no bound: the guard only watches sigma.
  CHECK_NOTHROW(
      solve_mckean_vlasov_fp1d(f0, 0.05, none, SigmaKernel::parse("zero"), 0.01));

  CHECK_THROWS_AS(solve_mckean_vlasov_fp1d(f0, 1.0, none, SigmaKernel::parse("zero"), 0.3),
                  StepSizeError);
}

TEST_CASE("fokker planck pure attraction contracts the spread") {
  const GridLaw1D f0 = GridLaw1D::uniform(6.0, 200, 2.0);
  const GridLaw1D f = solve_mckean_vlasov_fp1d(f0, 1.0, DriftKernel::parse("linear-attraction"),
                                               SigmaKernel::parse("zero"), 0.005);
  CHECK(std::abs(f.masses().sum() - 1.0) <= 1e-12);
  // Exact contraction is var * e^{-2t} = 0.18; upwind transport smears a bit.
  CHECK(f.second_moment() > 0.15);
  CHECK(f.second_moment() < 0.27);
  CHECK(f.second_moment() < 0.25 * f0.second_moment());
}

TEST_CASE("fokker planck keeps symmetry under an odd pair kernel") {
  const GridLaw1D f0 = GridLaw1D::gaussian(6.0, 64, 1.0);
  const GridLaw1D f = solve_mckean_vlasov_fp1d(f0, 0.1, DriftKernel::parse("smoothed-coulomb(0.5)"),
                                               SigmaKernel::parse("constant(1)"), 0.01);
  CHECK(std::abs(f.masses().sum() - 1.0) <= 1e-12);
  CHECK((f.masses() - f0.masses()).cwiseAbs().maxCoeff() > 0.0);
  for (int i = 0; i < 32; ++i) {
    CHECK(std::abs(f.masses()(i) - f.masses()(63 - i)) <= 1e-12);
  }
}

TEST_CASE("support quantizer merges nearest atoms with mass weighting") {
  const AtomicMeasure mu = AtomicMeasure::from_points(
      {Point::scalar(0.0), Point::scalar(0.1), Point::scalar(0.5), Point::scalar(1.0)},
      {0.25, 0.25, 0.25, 0.25});

  CHECK(quantize_measure(mu, 4) == mu);
  CHECK(quantize_measure(mu, 10) == mu);

  const AtomicMeasure three = quantize_measure(mu, 3);
  CHECK(three == AtomicMeasure::from_points(
                     {Point::scalar(0.05), Point::scalar(0.5), Point::scalar(1.0)},
                     {0.5, 0.25, 0.25}));

  const AtomicMeasure two = quantize_measure(mu, 2);
  REQUIRE(two.support_size() == 2);
  CHECK(two.point_at(0).scalar_value() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(two.point_at(1).scalar_value() == 1.0);
  CHECK(two.weight(0) == 0.75);
  CHECK(two.weight(1) == 0.25);

  // Equidistant pairs: the one holding the lowest atom merges first.
  const AtomicMeasure ladder = AtomicMeasure::from_points(
      {Point::scalar(0.0), Point::scalar(1.0), Point::scalar(2.0)},
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  CHECK(quantize_measure(ladder, 2) ==
        AtomicMeasure::from_points({Point::scalar(0.5), Point::scalar(2.0)},
                                   {2.0 / 3.0, 1.0 / 3.0}));

  CHECK_THROWS_AS(quantize_measure(mu, 0), InvalidInputError);

  // Mass and mean survive arbitrary cascades of merges.
  RandomStream rng(314, 0);
  std::vector<Point> pts;
  std::vector<double> ws;
  for (int i = 0; i < 50; ++i) {
    pts.push_back(Point::scalar(rng.normal()));
    ws.push_back(0.02);
  }
  const AtomicMeasure big = AtomicMeasure::from_points(pts, ws);
  const AtomicMeasure small = quantize_measure(big, 7);
  REQUIRE(small.support_size() == 7);
  CHECK(std::abs(measure_mass(small) - 1.0) <= 1e-12);
  CHECK(std::abs(first_coordinate_mean(small) - first_coordinate_mean(big)) <= 1e-12);
  CHECK(quantize_measure(big, 7) == small);
}

TEST_CASE("support quantizer handles vectors, tuples and symbol limits") {
  const AtomicMeasure v3 = AtomicMeasure::from_points(
      {Point::velocity3({0.0, 0.0, 0.0}), Point::velocity3({0.1, 0.0, 0.0}),
       Point::velocity3({5.0, 5.0, 5.0}), Point::velocity3({5.0, 5.0, 5.1})},
      {0.25, 0.25, 0.25, 0.25});
  const AtomicMeasure v3two = quantize_measure(v3, 2);
  REQUIRE(v3two.support_size() == 2);
  CHECK(v3two.point_at(0).velocity3_value().isApprox(Eigen::Vector3d(0.05, 0.0, 0.0), 1e-14));
  CHECK(v3two.point_at(1).velocity3_value().isApprox(Eigen::Vector3d(5.0, 5.0, 5.05), 1e-14));
  CHECK(v3two.weight(0) == 0.5);
  CHECK(v3two.weight(1) == 0.5);

  // Width-2 tuples merge slot by slot under the max metric.
  const AtomicMeasure coin =
      AtomicMeasure::from_points({Point::scalar(0.0), Point::scalar(1.0)}, {0.5, 0.5});
  const AtomicMeasure pair = product_power(coin, 2);
  const AtomicMeasure squeezed = quantize_measure(pair, 3);
  REQUIRE(squeezed.support_size() == 3);
  CHECK(squeezed.atom(0) ==
        Atom(std::vector<Point>{Point::scalar(0.0), Point::scalar(0.5)}));
  CHECK(squeezed.atom(1) == Atom(std::vector<Point>{Point::scalar(1.0), Point::scalar(0.0)}));
  CHECK(squeezed.atom(2) == Atom(std::vector<Point>{Point::scalar(1.0), Point::scalar(1.0)}));
  CHECK(squeezed.weight(0) == 0.5);
  CHECK(std::abs(first_coordinate_mean(squeezed) - first_coordinate_mean(pair)) <= 1e-12);

  // Symbols have no midpoints: passing through is fine, merging is not.
  const AtomicMeasure sym = AtomicMeasure::from_points(
      {Point::symbol(0), Point::symbol(1), Point::symbol(2)}, {0.25, 0.5, 0.25});
  CHECK(quantize_measure(sym, 3) == sym);
  CHECK_THROWS_AS(quantize_measure(sym, 2), InvalidInputError);
}

TEST_CASE("support quantizer reduces large scalar supports") {
  RandomStream rng(2718, 0);
  std::vector<Point> pts;
  std::vector<double> ws;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    pts.push_back(Point::scalar(rng.normal()));
    ws.push_back(1.0 / n);
  }
  const AtomicMeasure big = AtomicMeasure::from_points(pts, ws);
  const AtomicMeasure reduced = quantize_measure(big, 400);
  REQUIRE(reduced.support_size() == 400);
  CHECK(std::abs(measure_mass(reduced) - 1.0) <= 1e-9);
  CHECK(std::abs(first_coordinate_mean(reduced) - first_coordinate_mean(big)) <= 1e-9);
  // Midpoint merges only shave variance, and barely so at this resolution.
  const double before = scalar_second_moment(big);
  const double after = scalar_second_moment(reduced);
  CHECK(after <= before + 1e-12);
  CHECK(after > 0.99 * before);
}

TEST_CASE("large run reference is seed independent for deterministic dynamics") {
  TransitionKernel drift;
  drift.kind = TransitionKernel::Kind::Vlasov;
  drift.force = ForceKernel::parse("zero");
  drift.dt = 0.05;

  Eigen::VectorXd x(1), v(1);
  x << 1.0;
  v << 2.0;
  const AtomicMeasure start = AtomicMeasure::dirac(Point::phase(x, v));

  const AtomicMeasure moved = reference_limit_by_large_n(drift, start, 0.5, 64, 9);
  REQUIRE(moved.support_size() == 1);
  CHECK(moved.point_at(0).phase_position()(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(moved.point_at(0).phase_velocity()(0) == 2.0);
  CHECK(moved == reference_limit_by_large_n(drift, start, 0.5, 64, 123456789));
}

TEST_CASE("large run reference conserves collision invariants and honors its cap") {
  TransitionKernel kac;
  kac.kind = TransitionKernel::Kind::Kac;
  kac.tau = 1.0;
  const AtomicMeasure init = SingleParticleLaw::parse("gaussian").quantized(400, 0);

  // The same fixed initial draws back both runs, so exchange events move
  // velocities around without touching the empirical energy.
  const AtomicMeasure before = reference_limit_by_large_n(kac, init, 0.0, 300, 5);
  const AtomicMeasure after = reference_limit_by_large_n(kac, init, 1.0, 300, 5);
  CHECK(before.support_size() <= 300);
  CHECK(std::abs(scalar_second_moment(after) - scalar_second_moment(before)) <= 1e-9);

  const AtomicMeasure capped = reference_limit_by_large_n(kac, init, 0.5, 1000, 5);
  CHECK(capped.support_size() == 400);
  CHECK(std::abs(measure_mass(capped) - 1.0) <= 1e-12);
}

TEST_CASE("large run references tighten toward an anchor as n grows") {
  TransitionKernel kac;
  kac.kind = TransitionKernel::Kind::Kac;
  kac.tau = 1.0;
  const AtomicMeasure init = SingleParticleLaw::parse("gaussian").quantized(400, 0);

  const AtomicMeasure anchor = reference_limit_by_large_n(kac, init, 0.5, 16000, 11);
  std::vector<double> gaps;
  for (int n : {100, 400, 1600}) {
    const AtomicMeasure ref = reference_limit_by_large_n(kac, init, 0.5, n, 11);
    gaps.push_back(bl_distance(anchor, ref).value);
  }
  CHECK(gaps[0] > gaps[1]);
  CHECK(gaps[1] > gaps[2]);
  CHECK(gaps[2] < 0.5 * gaps[0]);
  CHECK(gaps[0] < 0.1);
}

TEST_CASE("large run reference rejects tiny runs and tuple inputs") {
  TransitionKernel kac;
  kac.kind = TransitionKernel::Kind::Kac;
  const AtomicMeasure init = SingleParticleLaw::parse("gaussian").quantized(50, 0);
  CHECK_THROWS_AS(reference_limit_by_large_n(kac, init, 0.5, 1, 5), InvalidInputError);

  const AtomicMeasure coin =
      AtomicMeasure::from_points({Point::scalar(0.0), Point::scalar(1.0)}, {0.5, 0.5});
  CHECK_THROWS_AS(reference_limit_by_large_n(kac, product_power(coin, 2), 0.5, 10, 5),
                  InvalidInputError);
}
