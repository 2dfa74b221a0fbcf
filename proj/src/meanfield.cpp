#include "chaoslab/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "chaoslab/empirical.hpp"
#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

constexpr int kThetaNodes = 64;
// Negative cell masses below this magnitude are rounding residue and get
// clamped; anything larger means the step size was too big.
constexpr double kNegativeMassSlack = 1e-13;
// Initial draws in reference_limit_by_large_n come from this fixed stream,
// not from the caller's seed, so deterministic kernels produce the same
// reference for every seed.
constexpr std::uint64_t kReferenceDrawSeed = 0xd1b54a32d192ed03ull;

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_step_health(const char* who, Eigen::VectorXd& masses, int step) {
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    if (masses(i) < -kNegativeMassSlack)
      throw StepSizeError(std::string(who) + ": negative mass, the time step is too large (step " +
                          std::to_string(step) + ")");
    if (masses(i) < 0.0) masses(i) = 0.0;
  }
  if (std::abs(masses.sum() - 1.0) > 1e-10)
    throw NumericBlowupError(std::string(who) + ": mass drifted away from 1", step);
}

// Cubic Lagrange interpolation of the cell-center density samples (zero
// outside the grid), clamped at zero since overshoot below zero would feed
// negative mass into the collision gain. Fourth-order accuracy keeps the
// discrete energy drift of the collision operator well under the linear
// rule's O(dx^2).
double interpolate_density(const Eigen::VectorXd& density, double half_width, double dx,
                           double x) {
  const double u = (x + half_width) / dx - 0.5;
  const double base = std::floor(u);
  const int i0 = static_cast<int>(base);
  const double s = u - base;
  const int m = static_cast<int>(density.size());
  const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
  const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
  const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
  double value = 0.0;
  if (i0 - 1 >= 0 && i0 - 1 < m) value += w0 * density(i0 - 1);
  if (i0 >= 0 && i0 < m) value += w1 * density(i0);
  if (i0 + 1 >= 0 && i0 + 1 < m) value += w2 * density(i0 + 1);
  if (i0 + 2 >= 0 && i0 + 2 < m) value += w3 * density(i0 + 2);
  return std::max(0.0, value);
}

Point merged_point(const Point& a, const Point& b, double wa, double wb) {
  const Eigen::VectorXd c = (wa * a.coords() + wb * b.coords()) / (wa + wb);
  switch (a.kind()) {
    case SpaceKind::Scalar:
      return Point::scalar(c(0));
    case SpaceKind::Velocity3:
      return Point::velocity3(Eigen::Vector3d(c));
    case SpaceKind::Phase: {
      const int d = a.phase_dim();
      return Point::phase(c.head(d), c.tail(d));
    }
    case SpaceKind::Symbol:
      break;
  }
  throw InvalidInputError("quantize_measure: symbol atoms have no midpoint to merge into");
}

// Scalar width-1 measures: the closest pair is always adjacent in canonical
// (ascending) order, so a heap over neighbor gaps gives the exact greedy
// merge sequence in O(n log n).
AtomicMeasure quantize_sorted_line(const AtomicMeasure& mu, int max_atoms) {
  const int n = mu.support_size();
  std::vector<double> coord(static_cast<std::size_t>(n)), weight(static_cast<std::size_t>(n));
  std::vector<int> prev(static_cast<std::size_t>(n)), next(static_cast<std::size_t>(n)),
      version(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    coord[static_cast<std::size_t>(i)] = mu.point_at(i).scalar_value();
    weight[static_cast<std::size_t>(i)] = mu.weight(i);
    prev[static_cast<std::size_t>(i)] = i - 1;
    next[static_cast<std::size_t>(i)] = i + 1 < n ? i + 1 : -1;
  }

  struct Gap {
    double size;
    double left_coord;
    int left;
    int right;
    int vl;
    int vr;
    bool operator>(const Gap& o) const {
      if (size != o.size) return size > o.size;
      if (left_coord != o.left_coord) return left_coord > o.left_coord;
      return left > o.left;
    }
  };
  std::priority_queue<Gap, std::vector<Gap>, std::greater<Gap>> heap;
  const auto push_gap = [&](int l) {
    const int r = next[static_cast<std::size_t>(l)];
    if (l < 0 || r < 0) return;
    heap.push({coord[static_cast<std::size_t>(r)] - coord[static_cast<std::size_t>(l)],
               coord[static_cast<std::size_t>(l)], l, r, version[static_cast<std::size_t>(l)],
               version[static_cast<std::size_t>(r)]});
  };
  for (int i = 0; i < n; ++i) push_gap(i);

  int alive = n;
  while (alive > max_atoms) {
    const Gap g = heap.top();
    heap.pop();
    if (g.vl != version[static_cast<std::size_t>(g.left)] ||
        g.vr != version[static_cast<std::size_t>(g.right)] ||
        next[static_cast<std::size_t>(g.left)] != g.right)
      continue;
    const double wl = weight[static_cast<std::size_t>(g.left)];
    const double wr = weight[static_cast<std::size_t>(g.right)];
    coord[static_cast<std::size_t>(g.left)] =
        (wl * coord[static_cast<std::size_t>(g.left)] +
         wr * coord[static_cast<std::size_t>(g.right)]) /
        (wl + wr);
    weight[static_cast<std::size_t>(g.left)] = wl + wr;
    ++version[static_cast<std::size_t>(g.left)];
    ++version[static_cast<std::size_t>(g.right)];
    const int after = next[static_cast<std::size_t>(g.right)];
    next[static_cast<std::size_t>(g.left)] = after;
    if (after >= 0) prev[static_cast<std::size_t>(after)] = g.left;
    --alive;
    push_gap(prev[static_cast<std::size_t>(g.left)]);
    push_gap(g.left);
  }

  std::vector<Point> points;
  std::vector<double> weights;
  points.reserve(static_cast<std::size_t>(alive));
  weights.reserve(static_cast<std::size_t>(alive));
  int head = 0;
  while (prev[static_cast<std::size_t>(head)] >= 0) head = prev[static_cast<std::size_t>(head)];
  for (int i = head; i >= 0; i = next[static_cast<std::size_t>(i)]) {
    points.push_back(Point::scalar(coord[static_cast<std::size_t>(i)]));
    weights.push_back(weight[static_cast<std::size_t>(i)]);
  }
  return AtomicMeasure::from_points(points, weights);
}

}  // namespace

GridLaw1D::GridLaw1D(double half_width, Eigen::VectorXd masses)
    : half_width_(half_width), masses_(std::move(masses)) {
  if (!(half_width_ > 0.0)) throw InvalidInputError("grid law needs a positive half width");
  if (masses_.size() < 3) throw InvalidInputError("grid law needs at least 3 cells");
  if ((masses_.array() < 0.0).any()) throw InvalidInputError("grid law masses must be nonnegative");
  if (std::abs(masses_.sum() - 1.0) > 1e-10)
    throw InvalidInputError("grid law masses must sum to 1");
}

Eigen::VectorXd GridLaw1D::centers() const {
  Eigen::VectorXd c(cells());
  for (int i = 0; i < cells(); ++i) c(i) = center(i);
  return c;
}

double GridLaw1D::second_moment() const { return centers().cwiseAbs2().dot(masses_); }

GridLaw1D GridLaw1D::gaussian(double half_width, int m, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInputError("grid gaussian needs sigma > 0");
  if (m < 3) throw InvalidInputError("grid law needs at least 3 cells");
  Eigen::VectorXd masses(m);
  const double dx = 2.0 * half_width / m;
  for (int i = 0; i < m; ++i) {
    const double lo = -half_width + i * dx;
    masses(i) = standard_normal_cdf((lo + dx) / sigma) - standard_normal_cdf(lo / sigma);
  }
  masses /= masses.sum();
  return GridLaw1D(half_width, std::move(masses));
}

GridLaw1D GridLaw1D::uniform(double half_width, int m, double support_half_width) {
  if (!(support_half_width > 0.0) || support_half_width > half_width)
    throw InvalidInputError("uniform support must fit inside the grid");
  if (m < 3) throw InvalidInputError("grid law needs at least 3 cells");
  Eigen::VectorXd masses(m);
  const double dx = 2.0 * half_width / m;
  for (int i = 0; i < m; ++i) {
    const double lo = -half_width + i * dx;
    const double overlap =
        std::max(0.0, std::min(lo + dx, support_half_width) - std::max(lo, -support_half_width));
    masses(i) = overlap;
  }
  masses /= masses.sum();
  return GridLaw1D(half_width, std::move(masses));
}

GridLaw1D grid_from_law(const SingleParticleLaw& law, int m) {
  switch (law.kind) {
    case SingleParticleLaw::Kind::Gaussian:
      return GridLaw1D::gaussian(6.0, m, 1.0);
    case SingleParticleLaw::Kind::Uniform: {
      const double sd = law.param / std::sqrt(3.0);
      return GridLaw1D::uniform(6.0 * sd, m, law.param);
    }
    default:
      break;
  }
  throw InvalidInputError("no grid form for " + law.describe());
}

std::string grid_csv(const GridLaw1D& f) {
  std::ostringstream os;
  os << "center,mass\n";
  char buf[40];
  for (int i = 0; i < f.cells(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", f.center(i));
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.12g", f.masses()(i));
    os << buf << '\n';
  }
  return os.str();
}

AtomicMeasure atomize(const GridLaw1D& f) {
  std::vector<Point> points;
  std::vector<double> weights;
  for (int i = 0; i < f.cells(); ++i) {
    if (f.masses()(i) <= 0.0) continue;
    points.push_back(Point::scalar(f.center(i)));
    weights.push_back(f.masses()(i));
  }
  return AtomicMeasure::from_points(points, weights);
}

GridLaw1D solve_kac_caricature(const GridLaw1D& f0, double t, double tau, double dt) {
  if (!(tau > 0.0)) throw InvalidInputError("solve_kac_caricature: tau must be > 0");
  const int steps = t == 0.0 ? 0 : checked_step_count("solve_kac_caricature", t, dt);
  const int m = f0.cells();
  const double dx = f0.dx();
  const double half_width = f0.half_width();
  const Eigen::VectorXd centers = f0.centers();

  Eigen::VectorXd cos_t(kThetaNodes), sin_t(kThetaNodes);
  for (int k = 0; k < kThetaNodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / kThetaNodes;
    cos_t(k) = std::cos(theta);
    sin_t(k) = std::sin(theta);
  }

  Eigen::VectorXd mass = f0.masses();
  Eigen::VectorXd density(m), gain(m);
  for (int step = 1; step <= steps; ++step) {
    density = mass / dx;
    gain.setZero();
    for (int k = 0; k < kThetaNodes; ++k) {
      const double c = cos_t(k), s = sin_t(k);
      for (int i = 0; i < m; ++i) {
        const double v = centers(i);
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
          const double w = centers(j);
          acc += interpolate_density(density, half_width, dx, v * c - w * s) *
                 interpolate_density(density, half_width, dx, v * s + w * c);
        }
        gain(i) += acc;
      }
    }
    // Units: gain is now density (the dx from the w integral and the 1/dx
    // turning it back into cell mass cancel) and the theta average
    // contributes 1/kThetaNodes. Rescale so the gain mass matches the loss
    // mass exactly, then relax.
    gain *= dx / kThetaNodes;
    const double gain_mass = gain.sum();
    if (!(gain_mass > 0.0))
      throw NumericBlowupError("solve_kac_caricature: collision gain lost all mass", step);
    gain *= mass.sum() / gain_mass;
    mass += (2.0 * dt / tau) * (gain - mass);

    check_step_health("solve_kac_caricature", mass, step);
    const double edge = mass.head(3).sum() + mass.tail(3).sum();
    if (edge > 1e-6)
      throw NumericBlowupError("solve_kac_caricature: mass reached the velocity cutoff", step);
  }
  return GridLaw1D(half_width, std::move(mass));
}

GridLaw1D solve_mckean_vlasov_fp1d(const GridLaw1D& f0, double t, const DriftKernel& b,
                                   const SigmaKernel& sigma, double dt) {
  const int m = f0.cells();
  const double dx = f0.dx();
  const double sigma_max = sigma.kind == SigmaKernel::Kind::Constant ? sigma.value : 0.0;
  if (sigma_max * sigma_max * dt > 0.4 * dx * dx + 1e-15)
    throw ConfigError({"diffusion step bound violated: sigma_max^2 dt = " +
                       std::to_string(sigma_max * sigma_max * dt) + " exceeds 0.4 dx^2 = " +
                       std::to_string(0.4 * dx * dx)});
  const int steps = t == 0.0 ? 0 : checked_step_count("solve_mckean_vlasov_fp1d", t, dt);
  const Eigen::VectorXd centers = f0.centers();

  Eigen::VectorXd mass = f0.masses();
  Eigen::VectorXd drift(m), diff_coef(m), density(m), flux(m > 1 ? m - 1 : 0);
  Eigen::VectorXd lhs(1), rhs(1), out(1);
  for (int step = 1; step <= steps; ++step) {
    // V_f(x) = sum_y b(x, y) mass_y, with closed forms where the kernel
    // allows (the generic pair loop is O(m^2)).
    switch (b.kind) {
      case DriftKernel::Kind::Zero:
        drift.setZero();
        break;
      case DriftKernel::Kind::Ou:
        drift = -centers * mass.sum();
        break;
      case DriftKernel::Kind::LinearAttraction:
        drift = Eigen::VectorXd::Constant(m, centers.dot(mass)) - centers * mass.sum();
        break;
      default:
        for (int i = 0; i < m; ++i) {
          double acc = 0.0;
          lhs(0) = centers(i);
          for (int j = 0; j < m; ++j) {
            rhs(0) = centers(j);
            b.eval(lhs, rhs, out);
            acc += out(0) * mass(j);
          }
          drift(i) = acc;
        }
    }
    const double sigma_bar = sigma_max * mass.sum();
    diff_coef.setConstant(sigma_bar * sigma_bar);

    density = mass / dx;
    for (int i = 0; i + 1 < m; ++i) {
      const double v_half = 0.5 * (drift(i) + drift(i + 1));
      const double upwind = v_half >= 0.0 ? density(i) : density(i + 1);
      flux(i) = v_half * upwind -
                0.5 * (diff_coef(i + 1) * density(i + 1) - diff_coef(i) * density(i)) / dx;
    }
    for (int i = 0; i < m; ++i) {
      const double out_flux = i + 1 < m ? flux(i) : 0.0;
      const double in_flux = i > 0 ? flux(i - 1) : 0.0;
      mass(i) -= dt * (out_flux - in_flux);
    }
    check_step_health("solve_mckean_vlasov_fp1d", mass, step);
  }
  return GridLaw1D(f0.half_width(), std::move(mass));
}

AtomicMeasure quantize_measure(const AtomicMeasure& mu, int max_atoms) {
  if (max_atoms < 1) throw InvalidInputError("quantize_measure: need room for at least one atom");
  if (mu.support_size() <= max_atoms) return mu;
  if (mu.kind() == SpaceKind::Scalar && mu.tuple_width() == 1)
    return quantize_sorted_line(mu, max_atoms);

  std::vector<Atom> atoms = mu.atoms();
  std::vector<double> weights = mu.weights();
  while (static_cast<int>(atoms.size()) > max_atoms) {
    int best_a = 0, best_b = 1;
    double best = distance(atoms[0], atoms[1]);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j) {
        const double d = distance(atoms[i], atoms[j]);
        if (d < best) {
          best = d;
          best_a = static_cast<int>(i);
          best_b = static_cast<int>(j);
        }
      }
    const std::size_t a = static_cast<std::size_t>(best_a), bb = static_cast<std::size_t>(best_b);
    const double wa = weights[a], wb = weights[bb];
    Atom merged;
    merged.slots.reserve(atoms[a].slots.size());
    for (std::size_t s = 0; s < atoms[a].slots.size(); ++s)
      merged.slots.push_back(merged_point(atoms[a].slots[s], atoms[bb].slots[s], wa, wb));
    atoms.erase(atoms.begin() + best_b);
    weights.erase(weights.begin() + best_b);
    atoms[a] = std::move(merged);
    weights[a] = wa + wb;
    // Restore canonical order so the lowest-pair tie rule stays meaningful.
    std::vector<std::size_t> order(atoms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return atom_less(atoms[x], atoms[y]); });
    std::vector<Atom> sorted_atoms;
    std::vector<double> sorted_weights;
    sorted_atoms.reserve(atoms.size());
    sorted_weights.reserve(atoms.size());
    for (std::size_t idx : order) {
      sorted_atoms.push_back(std::move(atoms[idx]));
      sorted_weights.push_back(weights[idx]);
    }
    atoms = std::move(sorted_atoms);
    weights = std::move(sorted_weights);
  }
  return AtomicMeasure(std::move(atoms), std::move(weights));
}

AtomicMeasure reference_limit_by_large_n(const TransitionKernel& kernel,
                                         const AtomicMeasure& initial, double t, int big_n,
                                         std::uint64_t seed, int support_cap) {
  if (big_n < 2) throw InvalidInputError("reference_limit_by_large_n: need at least 2 particles");
  if (initial.tuple_width() != 1)
    throw InvalidInputError("reference_limit_by_large_n: initial law must be a plain measure");
  RandomStream draw_rng(kReferenceDrawSeed, 0);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(big_n));
  for (int i = 0; i < big_n; ++i) points.push_back(initial.point_at(initial.sample_index(draw_rng)));
  Configuration config(std::move(points));
  RandomStream run_rng(seed, 0);
  const RunResult result = kernel.run(config, t, run_rng);
  return quantize_measure(empirical_measure(result.config), support_cap);
}

}  // namespace chaoslab
