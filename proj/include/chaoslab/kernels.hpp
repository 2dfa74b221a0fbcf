#pragma once

#include <Eigen/Dense>
#include <string>

namespace chaoslab {

// Named interaction kernels selected by config strings such as "zero",
// "linear-attraction" or "smoothed-coulomb(0.5)". Built-ins only; every
// kernel has a documented closed form, and all except the plain linear pulls
// are bounded with a global Lipschitz constant.

// Pair drift b(x, y): the velocity felt by a particle at x from a particle
// at y. Closed forms (d-dimensional, acting coordinatewise where scalar):
//   zero               b = 0
//   ou                 b = -x                      (no interaction)
//   linear-attraction  b = y - x                   (pull toward the crowd)
//   smoothed-coulomb   b = (x-y) / (|x-y|^2 + eps^2)^{3/2}
struct DriftKernel {
  enum class Kind { Zero, Ou, LinearAttraction, SmoothedCoulomb };
  Kind kind = Kind::Zero;
  double epsilon = 0.5;  // smoothed-coulomb softening length

  // True when b(x, y) actually reads y; false lets callers skip the pair sum.
  bool depends_on_partner() const;
  void eval(const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& y,
            Eigen::Ref<Eigen::VectorXd> out) const;
  std::string describe() const;
  static DriftKernel parse(const std::string& text);
};

// Pair diffusion coefficient sigma(x, y), scalar-valued.
//   zero       sigma = 0
//   constant   sigma = s
struct SigmaKernel {
  enum class Kind { Zero, Constant };
  Kind kind = Kind::Zero;
  double value = 1.0;  // constant level

  bool depends_on_state() const;
  double eval(const Eigen::Ref<const Eigen::VectorXd>& x,
              const Eigen::Ref<const Eigen::VectorXd>& y) const;
  std::string describe() const;
  static SigmaKernel parse(const std::string& text);
};

// Pair force F(u) on a position difference u = x_i - x_j. All built-ins are
// odd (F(-u) = -F(u)), so pairwise contributions cancel and total momentum
// is conserved by the deterministic dynamics.
//   zero              F = 0
//   sine              F = -sin(u) coordinatewise
//   smoothed-coulomb  F = u / (|u|^2 + eps^2)^{3/2}
struct ForceKernel {
  enum class Kind { Zero, Sine, SmoothedCoulomb };
  Kind kind = Kind::Zero;
  double epsilon = 0.5;

  void eval(const Eigen::Ref<const Eigen::VectorXd>& u,
            Eigen::Ref<Eigen::VectorXd> out) const;
  std::string describe() const;
  static ForceKernel parse(const std::string& text);
};

// Mean-field averages over the columns of `state` (one particle per column):
// out.col(i) = (1/n) sum_j b(state.col(i), state.col(j)). Kernels that do not
// read the partner or the state shortcut the pair sum; the shortcut agrees
// with the literal sum to rounding and is covered by tests against eval().
void mean_field_drift(const DriftKernel& b, const Eigen::MatrixXd& state, Eigen::MatrixXd& out);
Eigen::VectorXd mean_field_sigma(const SigmaKernel& s, const Eigen::MatrixXd& state);
// acc.col(i) = (1/n) sum_j F(pos.col(i) - pos.col(j)); the i = j term is
// F(0) = 0 for every built-in.
void mean_field_force(const ForceKernel& f, const Eigen::MatrixXd& positions, Eigen::MatrixXd& acc);

}  // namespace chaoslab
