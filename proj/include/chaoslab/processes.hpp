#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

#include "chaoslab/configuration.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/random_stream.hpp"

namespace chaoslab {

// Outcome of one kernel run. `events` counts applied jump events (0 for the
// continuous and deterministic dynamics); `frozen` marks a jump process that
// had no admissible pair to collide (all velocities equal) and returned its
// input unchanged.
struct RunResult {
  Configuration config;
  std::int64_t events = 0;
  bool frozen = false;
};

// Number of explicit steps covering [0, t]: t / dt rounded, rejected unless
// t is a whole multiple of dt (within 1e-9). `who` names the caller in error
// messages.
int checked_step_count(const char* who, double t, double dt);

// Planar rotation of a velocity pair:
// (v cos t - w sin t, v sin t + w cos t); preserves v^2 + w^2.
std::pair<double, double> kac_rotation(double v, double w, double theta);

// Velocity-exchange jump process on n scalar velocities: waits are
// exponential with mean tau/n, each event rotates a uniformly random
// unordered pair by a uniform angle. Total kinetic energy is invariant.
// Requires n >= 2, t >= 0, tau > 0; scalar configurations only.
RunResult simulate_kac(const Configuration& config, double t, double tau, RandomStream& rng);

// Specular collision along the unit vector l:
// v' = v + [(w - v).l] l, w' = w - [(w - v).l] l.
// Conserves v + w and |v|^2 + |w|^2. Throws unless |l| = 1 within 1e-12.
std::pair<Eigen::Vector3d, Eigen::Vector3d> hard_sphere_collision(const Eigen::Vector3d& v,
                                                                  const Eigen::Vector3d& w,
                                                                  const Eigen::Vector3d& l);

// Unit collision direction on the admissible hemisphere u.l < 0, where
// u = w - v is the relative velocity, drawn with density proportional to
// |u.l|: the cosine of the angle from -u/|u| follows 2c dc on (0, 1]
// (inverse CDF), the azimuth is uniform. The zero vector is rejected.
Eigen::Vector3d sample_collision_direction(const Eigen::Vector3d& u, RandomStream& rng);

struct GrunbaumOptions {
  // Wait mean per selected pair (q = relative speed, n particles):
  //   text mode     q / (n - 1)          (as stated: mean grows with q)
  //   inverse mode  1 / (q (n - 1))      (physical reading: rate grows with q)
  bool inverse_rate = false;
  // Event scheduling:
  //   stagewise  select a uniform pair, reselect while equal, wait its
  //              exponential, collide (the literal three-stage mechanism)
  //   gillespie  global rate = sum of pair rates; wait one exponential and
  //              pick the pair in proportion to its rate
  bool gillespie = false;
};

std::string grunbaum_mode_string(const GrunbaumOptions& options);

// Hard-sphere velocity jump process on n velocity3 points. Collision
// directions are drawn on the admissible hemisphere (w - v).l < 0 with
// density proportional to |(w - v).l|. Momentum and energy are conserved
// event by event. All-equal velocities freeze the process (no admissible
// pair; the reselect stage would never terminate).
RunResult simulate_grunbaum(const Configuration& config, double t, RandomStream& rng,
                            const GrunbaumOptions& options = {});

// One Euler-Maruyama step for the interacting diffusion
//   X_i <- X_i + mean_j b(X_i, X_j) dt + mean_j sigma(X_i, X_j) sqrt(dt) xi_i
// with `noise` holding xi_i in column i. Pure function of its arguments;
// exposed so equivariance and scheme identities can be tested exactly.
Eigen::MatrixXd mckean_vlasov_step(const Eigen::MatrixXd& state, const DriftKernel& b,
                                   const SigmaKernel& sigma, double dt,
                                   const Eigen::MatrixXd& noise);

// Runs round(t / dt) Euler-Maruyama steps; t must be a multiple of dt within
// 1e-9. Scalar or phase configurations. Noise is drawn one standard normal
// per coordinate per particle per step, in particle order. Throws
// NumericBlowupError (with the step index) if the state leaves IEEE range.
RunResult simulate_mckean_vlasov(const Configuration& config, double t, double dt,
                                 const DriftKernel& b, const SigmaKernel& sigma,
                                 RandomStream& rng);

// Deterministic velocity-Verlet integration of
//   dx_i/dt = v_i,  dv_i/dt = mean_j F(x_i - x_j)
// on phase configurations; t must be a multiple of dt within 1e-9.
RunResult simulate_vlasov(const Configuration& config, double t, double dt, const ForceKernel& f);

// All-zeros maps to all-zeros, anything else to all-ones. Binary symbol
// configurations only; deterministic and idempotent.
Configuration counterexample_step(const Configuration& config);

// Dispatcher bundling one dynamic plus its parameters, as named in configs.
struct TransitionKernel {
  enum class Kind { Kac, Grunbaum, McKeanVlasov, Vlasov, Counterexample };
  Kind kind = Kind::Kac;
  double tau = 1.0;            // kac
  GrunbaumOptions grunbaum;    // grunbaum
  DriftKernel drift;           // mckean-vlasov
  SigmaKernel sigma;           // mckean-vlasov
  ForceKernel force;           // vlasov
  double dt = 0.01;            // mckean-vlasov, vlasov

  std::string kind_name() const;
  // Human-readable parameter record for reports, e.g.
  // "grunbaum(rate=text,scheme=stagewise)".
  std::string mode_string() const;
  bool accepts(SpaceKind k) const;

  // Runs the dynamic to time t. The counterexample kernel is discrete-time:
  // any t > 0 applies the map once (it is idempotent), t = 0 is the identity.
  RunResult run(const Configuration& config, double t, RandomStream& rng) const;
};

}  // namespace chaoslab
