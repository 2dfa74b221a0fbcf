#include "chaoslab/processes.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

// Uniform unordered pair {i, j} from the n(n-1)/2 candidates, returned with
// i != j (order carries no information).
std::pair<int, int> uniform_pair(int n, RandomStream& rng) {
  const int i = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
  int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
  if (j >= i) ++j;
  return {i, j};
}

bool same_velocity(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return a.x() == b.x() && a.y() == b.y() && a.z() == b.z();
}

double pair_wait_mean(const GrunbaumOptions& options, double relative_speed, int n) {
  const double scale = static_cast<double>(n - 1);
  return options.inverse_rate ? 1.0 / (relative_speed * scale) : relative_speed / scale;
}

}  // namespace

int checked_step_count(const char* who, double t, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError(std::string(who) + ": time step must be > 0");
  if (t < 0.0) throw InvalidInputError(std::string(who) + ": duration must be >= 0");
  const long long steps = std::llround(t / dt);
  if (std::abs(static_cast<double>(steps) * dt - t) > 1e-9)
    throw StepSizeError(std::string(who) + ": duration " + format_number(t) +
                        " is not a multiple of the step " + format_number(dt));
  return static_cast<int>(steps);
}

Eigen::Vector3d sample_collision_direction(const Eigen::Vector3d& u, RandomStream& rng) {
  if (u.norm() == 0.0)
    throw InvalidInputError("sample_collision_direction: relative velocity must be nonzero");
  const Eigen::Vector3d e = u.normalized();
  const Eigen::Vector3d pick = std::abs(e.x()) < 0.5 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = e.cross(pick).normalized();
  const Eigen::Vector3d e2 = e.cross(e1);
  const double c = std::sqrt(1.0 - rng.uniform01());  // in (0, 1]: strictly admissible
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double alpha = kTwoPi * rng.uniform01();
  return -c * e + s * (std::cos(alpha) * e1 + std::sin(alpha) * e2);
}

std::pair<double, double> kac_rotation(double v, double w, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {v * c - w * s, v * s + w * c};
}

RunResult simulate_kac(const Configuration& config, double t, double tau, RandomStream& rng) {
  if (config.kind() != SpaceKind::Scalar)
    throw InvalidInputError("simulate_kac: scalar velocity configurations only");
  const int n = config.n();
  if (n < 2) throw InvalidInputError("simulate_kac: need at least 2 particles");
  if (t < 0.0) throw InvalidInputError("simulate_kac: duration must be >= 0");
  if (!(tau > 0.0)) throw InvalidInputError("simulate_kac: timescale must be > 0");
  if (t == 0.0) return {config, 0, false};

  Eigen::VectorXd v = config.scalars();
  const double mean_wait = tau / static_cast<double>(n);
  std::int64_t events = 0;
  for (double now = rng.exponential(mean_wait); now <= t; now += rng.exponential(mean_wait)) {
    const auto [i, j] = uniform_pair(n, rng);
    const double theta = kTwoPi * rng.uniform01();
    std::tie(v(i), v(j)) = kac_rotation(v(i), v(j), theta);
    ++events;
  }
  return {Configuration::from_scalars(v), events, false};
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> hard_sphere_collision(const Eigen::Vector3d& v,
                                                                  const Eigen::Vector3d& w,
                                                                  const Eigen::Vector3d& l) {
  if (std::abs(l.norm() - 1.0) > 1e-12)
    throw InvalidInputError("hard_sphere_collision: direction must be a unit vector");
  const double a = (w - v).dot(l);
  return {v + a * l, w - a * l};
}

std::string grunbaum_mode_string(const GrunbaumOptions& options) {
  return std::string("rate=") + (options.inverse_rate ? "inverse" : "text") +
         ",scheme=" + (options.gillespie ? "gillespie" : "stagewise");
}

RunResult simulate_grunbaum(const Configuration& config, double t, RandomStream& rng,
                            const GrunbaumOptions& options) {
  if (config.kind() != SpaceKind::Velocity3)
    throw InvalidInputError("simulate_grunbaum: velocity3 configurations only");
  const int n = config.n();
  if (n < 2) throw InvalidInputError("simulate_grunbaum: need at least 2 particles");
  if (t < 0.0) throw InvalidInputError("simulate_grunbaum: duration must be >= 0");

  std::vector<Eigen::Vector3d> vel = config.velocities3();
  bool all_equal = true;
  for (int i = 1; i < n && all_equal; ++i) all_equal = same_velocity(vel[0], vel[static_cast<std::size_t>(i)]);
  if (all_equal) return {config, 0, true};
  if (t == 0.0) return {config, 0, false};

  // Collisions preserve the colliding pair's relative speed, and energy plus
  // momentum conservation rule out ever reaching the all-equal state from
  // here, so the reselect stage below always terminates.
  std::int64_t events = 0;
  double now = 0.0;
  if (!options.gillespie) {
    for (;;) {
      int i, j;
      do {
        std::tie(i, j) = uniform_pair(n, rng);
      } while (same_velocity(vel[static_cast<std::size_t>(i)], vel[static_cast<std::size_t>(j)]));
      const Eigen::Vector3d u = vel[static_cast<std::size_t>(j)] - vel[static_cast<std::size_t>(i)];
      now += rng.exponential(pair_wait_mean(options, u.norm(), n));
      if (now > t) break;
      const Eigen::Vector3d l = sample_collision_direction(u, rng);
      std::tie(vel[static_cast<std::size_t>(i)], vel[static_cast<std::size_t>(j)]) =
          hard_sphere_collision(vel[static_cast<std::size_t>(i)], vel[static_cast<std::size_t>(j)], l);
      ++events;
    }
  } else {
    std::vector<double> rates(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (;;) {
      double total = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const auto a = static_cast<std::size_t>(i);
          const auto b = static_cast<std::size_t>(j);
          const double q = (vel[b] - vel[a]).norm();
          const double r = q == 0.0 ? 0.0 : 1.0 / pair_wait_mean(options, q, n);
          rates[a * static_cast<std::size_t>(n) + b] = r;
          total += r;
        }
      if (!(total > 0.0)) return {Configuration::from_velocities3(vel), events, true};
      now += rng.exponential(1.0 / total);
      if (now > t) break;
      double target = rng.uniform01() * total;
      int pi = 0, pj = 1;
      for (int i = 0; i < n && target >= 0.0; ++i)
        for (int j = i + 1; j < n; ++j) {
          target -= rates[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
          if (target < 0.0) {
            pi = i;
            pj = j;
            i = n;  // break both loops
            break;
          }
        }
      const auto a = static_cast<std::size_t>(pi);
      const auto b = static_cast<std::size_t>(pj);
      const Eigen::Vector3d l = sample_collision_direction(vel[b] - vel[a], rng);
      std::tie(vel[a], vel[b]) = hard_sphere_collision(vel[a], vel[b], l);
      ++events;
    }
  }
  return {Configuration::from_velocities3(vel), events, false};
}

Eigen::MatrixXd mckean_vlasov_step(const Eigen::MatrixXd& state, const DriftKernel& b,
                                   const SigmaKernel& sigma, double dt,
                                   const Eigen::MatrixXd& noise) {
  if (noise.rows() != state.rows() || noise.cols() != state.cols())
    throw InvalidInputError("mckean_vlasov_step: noise shape must match the state");
  if (!(dt > 0.0)) throw InvalidInputError("mckean_vlasov_step: time step must be > 0");
  Eigen::MatrixXd drift;
  mean_field_drift(b, state, drift);
  const Eigen::VectorXd sig = mean_field_sigma(sigma, state);
  Eigen::MatrixXd next = state + dt * drift;
  next.noalias() += std::sqrt(dt) * (noise * sig.asDiagonal());
  return next;
}

RunResult simulate_mckean_vlasov(const Configuration& config, double t, double dt,
                                 const DriftKernel& b, const SigmaKernel& sigma,
                                 RandomStream& rng) {
  const SpaceKind kind = config.kind();
  if (kind != SpaceKind::Scalar && kind != SpaceKind::Phase)
    throw InvalidInputError("simulate_mckean_vlasov: scalar or phase configurations only");
  const int steps = checked_step_count("simulate_mckean_vlasov", t, dt);
  if (steps == 0) return {config, 0, false};

  Eigen::MatrixXd state;
  if (kind == SpaceKind::Scalar) {
    state = config.scalars().transpose();
  } else {
    state = config.phase_matrix();
  }
  const Eigen::Index rows = state.rows();
  const Eigen::Index n = state.cols();
  Eigen::MatrixXd noise(rows, n);
  for (int step = 0; step < steps; ++step) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index r = 0; r < rows; ++r) noise(r, i) = rng.normal();
    state = mckean_vlasov_step(state, b, sigma, dt, noise);
    if (!state.allFinite())
      throw NumericBlowupError("simulate_mckean_vlasov: state left IEEE range", step);
  }
  Configuration out = kind == SpaceKind::Scalar
                          ? Configuration::from_scalars(state.transpose())
                          : Configuration::from_phase_matrix(state, config.phase_dim());
  return {std::move(out), 0, false};
}

RunResult simulate_vlasov(const Configuration& config, double t, double dt, const ForceKernel& f) {
  if (config.kind() != SpaceKind::Phase)
    throw InvalidInputError("simulate_vlasov: phase configurations only");
  const int steps = checked_step_count("simulate_vlasov", t, dt);
  if (steps == 0) return {config, 0, false};

  const int d = config.phase_dim();
  Eigen::MatrixXd m = config.phase_matrix();
  auto x = m.topRows(d);
  auto v = m.bottomRows(d);
  Eigen::MatrixXd acc;
  mean_field_force(f, x, acc);
  for (int step = 0; step < steps; ++step) {
    v += (0.5 * dt) * acc;
    x += dt * v;
    mean_field_force(f, x, acc);
    v += (0.5 * dt) * acc;
    if (!m.allFinite()) throw NumericBlowupError("simulate_vlasov: state left IEEE range", step);
  }
  return {Configuration::from_phase_matrix(m, d), 0, false};
}

Configuration counterexample_step(const Configuration& config) {
  const std::vector<int> syms = config.symbols();
  bool any_one = false;
  for (int s : syms) {
    if (s != 0 && s != 1)
      throw InvalidInputError("counterexample_step: binary symbol configurations only");
    any_one = any_one || s == 1;
  }
  return Configuration::from_symbols(std::vector<int>(syms.size(), any_one ? 1 : 0));
}

std::string TransitionKernel::kind_name() const {
  switch (kind) {
    case Kind::Kac:
      return "kac";
    case Kind::Grunbaum:
      return "grunbaum";
    case Kind::McKeanVlasov:
      return "mckean-vlasov";
    case Kind::Vlasov:
      return "vlasov";
    case Kind::Counterexample:
      return "counterexample";
  }
  return "kac";
}

std::string TransitionKernel::mode_string() const {
  switch (kind) {
    case Kind::Kac:
      return "kac(tau=" + format_number(tau) + ")";
    case Kind::Grunbaum:
      return "grunbaum(" + grunbaum_mode_string(grunbaum) + ")";
    case Kind::McKeanVlasov:
      return "mckean-vlasov(b=" + drift.describe() + ",sigma=" + sigma.describe() +
             ",dt=" + format_number(dt) + ")";
    case Kind::Vlasov:
      return "vlasov(F=" + force.describe() + ",dt=" + format_number(dt) + ")";
    case Kind::Counterexample:
      return "counterexample";
  }
  return kind_name();
}

bool TransitionKernel::accepts(SpaceKind k) const {
  switch (kind) {
    case Kind::Kac:
      return k == SpaceKind::Scalar;
    case Kind::Grunbaum:
      return k == SpaceKind::Velocity3;
    case Kind::McKeanVlasov:
      return k == SpaceKind::Scalar || k == SpaceKind::Phase;
    case Kind::Vlasov:
      return k == SpaceKind::Phase;
    case Kind::Counterexample:
      return k == SpaceKind::Symbol;
  }
  return false;
}

RunResult TransitionKernel::run(const Configuration& config, double t, RandomStream& rng) const {
  switch (kind) {
    case Kind::Kac:
      return simulate_kac(config, t, tau, rng);
    case Kind::Grunbaum:
      return simulate_grunbaum(config, t, rng, grunbaum);
    case Kind::McKeanVlasov:
      return simulate_mckean_vlasov(config, t, dt, drift, sigma, rng);
    case Kind::Vlasov:
      return simulate_vlasov(config, t, dt, force);
    case Kind::Counterexample: {
      if (t < 0.0) throw InvalidInputError("counterexample kernel: duration must be >= 0");
      if (t == 0.0) return {config, 0, false};
      return {counterexample_step(config), 1, false};
    }
  }
  throw InvalidInputError("unknown kernel kind");
}

}  // namespace chaoslab
