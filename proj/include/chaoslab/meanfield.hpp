#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "chaoslab/atomic_measure.hpp"
#include "chaoslab/initial_laws.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/metrics.hpp"
#include "chaoslab/processes.hpp"

namespace chaoslab {

// Probability law on a uniform velocity grid over [-half_width, half_width]:
// cell i covers [x_{i-1/2}, x_{i+1/2}] and carries mass masses(i). Masses are
// nonnegative and sum to 1 within 1e-10, re-checked by the solvers after
// every step.
class GridLaw1D {
 public:
  GridLaw1D(double half_width, Eigen::VectorXd masses);

  int cells() const { return static_cast<int>(masses_.size()); }
  double half_width() const { return half_width_; }
  double dx() const { return 2.0 * half_width_ / cells(); }
  double center(int i) const { return -half_width_ + (i + 0.5) * dx(); }
  Eigen::VectorXd centers() const;
  const Eigen::VectorXd& masses() const { return masses_; }
  // Discrete second moment sum_i center(i)^2 masses(i).
  double second_moment() const;

  // Cell masses from exact CDF differences, renormalized to total 1.
  static GridLaw1D gaussian(double half_width, int m, double sigma);
  static GridLaw1D uniform(double half_width, int m, double support_half_width);

 private:
  double half_width_;
  Eigen::VectorXd masses_;
};

// Grid carrier for a scalar single-particle law: width 6 standard deviations,
// masses from the law's CDF. Gaussian and uniform laws only.
GridLaw1D grid_from_law(const SingleParticleLaw& law, int m);

// "center,mass" rows, one cell per line.
std::string grid_csv(const GridLaw1D& f);

// The grid law as an atomic measure on the cell centers (zero cells dropped).
AtomicMeasure atomize(const GridLaw1D& f);

// Explicit solver for the velocity-exchange limit equation
//   df/dt = (2/tau) [ c * gain(f, f) - f ],
//   gain(v) = (1/2pi) Int Int f(v cos h - w sin h) f(v sin h + w cos h) dw dh,
// with the angle integral on 64 uniform nodes (the periodic trapezoid rule),
// the w integral on the grid, and cubic interpolation for off-grid densities
// (clamped at zero; overshoot must not feed negative mass into the gain).
// The factor c rescales the gain so its total mass matches the loss term
// exactly; the continuous operator conserves mass and energy, and the
// discrete one then conserves mass by construction. A negative cell mass
// raises step-size error; mass within three cells of either boundary above
// 1e-6 raises numeric-blowup (the domain truncation stopped being harmless).
GridLaw1D solve_kac_caricature(const GridLaw1D& f0, double t, double tau, double dt);

// Conservative finite-difference solver for the nonlinear Fokker-Planck
// equation
//   df/dt = -d/dx (V_f f) + 1/2 d2/dx2 (D_f f),
//   V_f(x) = Int b(x, y) f(y) dy,  D_f(x) = (Int sigma(x, y) f(y) dy)^2,
// with upwind advection and centered diffusion in flux form (zero boundary
// flux, so mass is conserved to rounding). The diffusion stability bound
// sigma_max^2 dt <= 0.4 dx^2 is checked before stepping and violations raise
// configuration error.
GridLaw1D solve_mckean_vlasov_fp1d(const GridLaw1D& f0, double t, const DriftKernel& b,
                                   const SigmaKernel& sigma, double dt);

// Greedy support reduction: repeatedly merge the closest pair of atoms into
// their mass-weighted midpoint until at most max_atoms remain. Distance ties
// break toward the pair containing the lowest atom in canonical order, so
// the result is deterministic. Total mass and mean are preserved; the merge
// midpoint needs coordinates, so symbol measures beyond the cap are
// rejected.
AtomicMeasure quantize_measure(const AtomicMeasure& mu, int max_atoms);

// Empirical stand-in for the mean-field law at time t: run the kernel once
// with big_n particles drawn i.i.d. from `initial` and return the empirical
// measure of the result, quantized to support_cap atoms. The initial draw
// uses a fixed internal stream, so deterministic kernels give
// seed-independent output; `seed` drives only the kernel run.
AtomicMeasure reference_limit_by_large_n(const TransitionKernel& kernel,
                                         const AtomicMeasure& initial, double t, int big_n,
                                         std::uint64_t seed,
                                         int support_cap = MetricOptions{}.bl_exact_cap);

}  // namespace chaoslab
