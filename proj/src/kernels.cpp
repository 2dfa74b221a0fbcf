#include "chaoslab/kernels.hpp"

#include <cmath>
#include <cstdio>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

// Splits "name" or "name(arg)" into the name and an optional numeric arg.
void split_call(const std::string& text, std::string& name, double& arg, bool& has_arg) {
  const auto open = text.find('(');
  if (open == std::string::npos) {
    name = text;
    has_arg = false;
    return;
  }
  if (text.back() != ')') throw InvalidInputError("kernel spec '" + text + "': missing ')'");
  name = text.substr(0, open);
  const std::string inner = text.substr(open + 1, text.size() - open - 2);
  try {
    std::size_t used = 0;
    arg = std::stod(inner, &used);
    if (used != inner.size()) throw std::invalid_argument(inner);
  } catch (const std::exception&) {
    throw InvalidInputError("kernel spec '" + text + "': bad numeric argument '" + inner + "'");
  }
  has_arg = true;
}

}  // namespace

bool DriftKernel::depends_on_partner() const {
  return kind == Kind::LinearAttraction || kind == Kind::SmoothedCoulomb;
}

void DriftKernel::eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y,
                       Eigen::Ref<Eigen::VectorXd> out) const {
  switch (kind) {
    case Kind::Zero:
      out.setZero();
      return;
    case Kind::Ou:
      out = -x;
      return;
    case Kind::LinearAttraction:
      out = y - x;
      return;
    case Kind::SmoothedCoulomb: {
      const Eigen::VectorXd u = x - y;
      const double r2 = u.squaredNorm() + epsilon * epsilon;
      out = u / (r2 * std::sqrt(r2));
      return;
    }
  }
}

std::string DriftKernel::describe() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Ou:
      return "ou";
    case Kind::LinearAttraction:
      return "linear-attraction";
    case Kind::SmoothedCoulomb:
      return "smoothed-coulomb(" + format_number(epsilon) + ")";
  }
  return "zero";
}

DriftKernel DriftKernel::parse(const std::string& text) {
  std::string name;
  double arg = 0.0;
  bool has_arg = false;
  split_call(text, name, arg, has_arg);
  DriftKernel k;
  if (name == "zero") {
    k.kind = Kind::Zero;
  } else if (name == "ou") {
    k.kind = Kind::Ou;
  } else if (name == "linear-attraction") {
    k.kind = Kind::LinearAttraction;
  } else if (name == "smoothed-coulomb") {
    k.kind = Kind::SmoothedCoulomb;
    if (has_arg) {
      if (arg <= 0.0) throw InvalidInputError("drift kernel '" + text + "': softening must be > 0");
      k.epsilon = arg;
      has_arg = false;
    }
  } else {
    throw InvalidInputError("unknown drift kernel '" + text + "'");
  }
  if (has_arg) throw InvalidInputError("drift kernel '" + name + "' takes no argument");
  return k;
}

bool SigmaKernel::depends_on_state() const { return false; }

double SigmaKernel::eval(const Eigen::Ref<const Eigen::VectorXd>&,
                         const Eigen::Ref<const Eigen::VectorXd>&) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return value;
  }
  return 0.0;
}

std::string SigmaKernel::describe() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Constant:
      return "constant(" + format_number(value) + ")";
  }
  return "zero";
}

SigmaKernel SigmaKernel::parse(const std::string& text) {
  std::string name;
  double arg = 0.0;
  bool has_arg = false;
  split_call(text, name, arg, has_arg);
  SigmaKernel k;
  if (name == "zero") {
    k.kind = Kind::Zero;
  } else if (name == "constant") {
    if (!has_arg) throw InvalidInputError("sigma kernel 'constant' needs a level, e.g. constant(1.0)");
    if (arg < 0.0) throw InvalidInputError("sigma kernel '" + text + "': level must be >= 0");
    k.kind = Kind::Constant;
    k.value = arg;
    has_arg = false;
  } else {
    throw InvalidInputError("unknown sigma kernel '" + text + "'");
  }
  if (has_arg) throw InvalidInputError("sigma kernel '" + name + "' takes no argument");
  return k;
}

void ForceKernel::eval(const Eigen::Ref<const Eigen::VectorXd>& u,
                       Eigen::Ref<Eigen::VectorXd> out) const {
  switch (kind) {
    case Kind::Zero:
      out.setZero();
      return;
    case Kind::Sine:
      out = -u.array().sin();
      return;
    case Kind::SmoothedCoulomb: {
      const double r2 = u.squaredNorm() + epsilon * epsilon;
      out = u / (r2 * std::sqrt(r2));
      return;
    }
  }
}

std::string ForceKernel::describe() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Sine:
      return "sine";
    case Kind::SmoothedCoulomb:
      return "smoothed-coulomb(" + format_number(epsilon) + ")";
  }
  return "zero";
}

ForceKernel ForceKernel::parse(const std::string& text) {
  std::string name;
  double arg = 0.0;
  bool has_arg = false;
  split_call(text, name, arg, has_arg);
  ForceKernel k;
  if (name == "zero") {
    k.kind = Kind::Zero;
  } else if (name == "sine") {
    k.kind = Kind::Sine;
  } else if (name == "smoothed-coulomb") {
    k.kind = Kind::SmoothedCoulomb;
    if (has_arg) {
      if (arg <= 0.0) throw InvalidInputError("force kernel '" + text + "': softening must be > 0");
      k.epsilon = arg;
      has_arg = false;
    }
  } else {
    throw InvalidInputError("unknown force kernel '" + text + "'");
  }
  if (has_arg) throw InvalidInputError("force kernel '" + name + "' takes no argument");
  return k;
}

void mean_field_drift(const DriftKernel& b, const Eigen::MatrixXd& state, Eigen::MatrixXd& out) {
  const Eigen::Index n = state.cols();
  out.resize(state.rows(), n);
  switch (b.kind) {
    case DriftKernel::Kind::Zero:
      out.setZero();
      return;
    case DriftKernel::Kind::Ou:
      out = -state;
      return;
    case DriftKernel::Kind::LinearAttraction: {
      // (1/n) sum_j (x_j - x_i) = mean - x_i.
      const Eigen::VectorXd mean = state.rowwise().mean();
      out = mean.replicate(1, n) - state;
      return;
    }
    case DriftKernel::Kind::SmoothedCoulomb: {
      out.setZero();
      const double eps2 = b.epsilon * b.epsilon;
      Eigen::VectorXd u(state.rows());
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
          u = state.col(i) - state.col(j);
          const double r2 = u.squaredNorm() + eps2;
          u /= r2 * std::sqrt(r2);
          out.col(i) += u;
          out.col(j) -= u;
        }
      out /= static_cast<double>(n);
      return;
    }
  }
}

Eigen::VectorXd mean_field_sigma(const SigmaKernel& s, const Eigen::MatrixXd& state) {
  const Eigen::Index n = state.cols();
  switch (s.kind) {
    case SigmaKernel::Kind::Zero:
      return Eigen::VectorXd::Zero(n);
    case SigmaKernel::Kind::Constant:
      return Eigen::VectorXd::Constant(n, s.value);
  }
  return Eigen::VectorXd::Zero(n);
}

void mean_field_force(const ForceKernel& f, const Eigen::MatrixXd& positions, Eigen::MatrixXd& acc) {
  const Eigen::Index n = positions.cols();
  acc.resize(positions.rows(), n);
  acc.setZero();
  if (f.kind == ForceKernel::Kind::Zero) return;
  // Antisymmetric accumulation: each unordered pair contributes +F and -F,
  // so the total momentum change is exactly zero in floating point too.
  Eigen::VectorXd u(positions.rows());
  Eigen::VectorXd g(positions.rows());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      u = positions.col(i) - positions.col(j);
      f.eval(u, g);
      acc.col(i) += g;
      acc.col(j) -= g;
    }
  acc /= static_cast<double>(n);
}

}  // namespace chaoslab
