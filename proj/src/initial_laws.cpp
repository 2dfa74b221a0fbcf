#include "chaoslab/initial_laws.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "chaoslab/empirical.hpp"
#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

// Deterministic source for the i.i.d.-prefix configuration ladders: one
// fixed stream, so s_n is always the first n draws of the same sequence.
constexpr std::uint64_t kPrefixSeed = 0x9e3779b97f4a7c15ull;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

void split_call(const std::string& text, std::string& name, std::string& inner, bool& has_inner) {
  const auto open = text.find('(');
  if (open == std::string::npos) {
    name = text;
    has_inner = false;
    return;
  }
  if (text.back() != ')') throw InvalidInputError("law spec '" + text + "': missing ')'");
  name = text.substr(0, open);
  inner = text.substr(open + 1, text.size() - open - 2);
  has_inner = true;
}

double parse_number(const std::string& owner, const std::string& text) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw InvalidInputError("law spec '" + owner + "': bad numeric argument '" + text + "'");
  }
}

// Splits on commas at parenthesis depth zero.
std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
      continue;
    }
    cur += ch;
  }
  parts.push_back(cur);
  return parts;
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (ch != ' ' && ch != '\t') out += ch;
  return out;
}

}  // namespace

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidInputError("normal_quantile: need 0 < u < 1");
  // Rational approximation (central region and tails), then one Halley step
  // against the exact CDF expressed through erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (u < p_low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - p_low) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - g / (1.0 + 0.5 * x * g);
}

SpaceKind SingleParticleLaw::space() const {
  switch (kind) {
    case Kind::Gaussian:
    case Kind::Uniform:
      return SpaceKind::Scalar;
    case Kind::Bernoulli:
    case Kind::BernoulliOverN:
      return SpaceKind::Symbol;
    case Kind::Gaussian3:
      return SpaceKind::Velocity3;
    case Kind::PhaseGaussian:
      return SpaceKind::Phase;
  }
  return SpaceKind::Scalar;
}

Point SingleParticleLaw::sample(RandomStream& rng, int n) const {
  switch (kind) {
    case Kind::Gaussian:
      return Point::scalar(rng.normal());
    case Kind::Uniform:
      return Point::scalar(param * (2.0 * rng.uniform01() - 1.0));
    case Kind::Bernoulli:
      return Point::symbol(rng.uniform01() < param ? 1 : 0);
    case Kind::BernoulliOverN:
      return Point::symbol(rng.uniform01() * static_cast<double>(n) < 1.0 ? 1 : 0);
    case Kind::Gaussian3:
      return Point::velocity3(Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
    case Kind::PhaseGaussian: {
      Eigen::VectorXd pos(dim), vel(dim);
      for (int i = 0; i < dim; ++i) pos(i) = rng.normal();
      for (int i = 0; i < dim; ++i) vel(i) = rng.normal();
      return Point::phase(pos, vel);
    }
  }
  return Point::scalar(0.0);
}

double SingleParticleLaw::quantile(double u) const {
  switch (kind) {
    case Kind::Gaussian:
      return normal_quantile(u);
    case Kind::Uniform:
      return param * (2.0 * u - 1.0);
    default:
      throw InvalidInputError("quantile: defined for scalar laws only");
  }
}

AtomicMeasure SingleParticleLaw::quantized(int m, int n) const {
  if (m < 1) throw InvalidInputError("quantized: need at least one atom");
  switch (kind) {
    case Kind::Bernoulli:
    case Kind::BernoulliOverN: {
      const double p = kind == Kind::Bernoulli ? param : 1.0 / static_cast<double>(n);
      return AtomicMeasure({Atom(Point::symbol(0)), Atom(Point::symbol(1))}, {1.0 - p, p});
    }
    case Kind::Gaussian:
    case Kind::Uniform: {
      std::vector<Point> pts;
      pts.reserve(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i)
        pts.push_back(Point::scalar(quantile((static_cast<double>(i) + 0.5) / m)));
      return empirical_measure(Configuration(std::move(pts)));
    }
    case Kind::Gaussian3:
    case Kind::PhaseGaussian: {
      RandomStream prefix(kPrefixSeed, 0);
      std::vector<Point> pts;
      pts.reserve(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) pts.push_back(sample(prefix, n));
      return empirical_measure(Configuration(std::move(pts)));
    }
  }
  throw InvalidInputError("quantized: unknown law");
}

std::string SingleParticleLaw::describe() const {
  switch (kind) {
    case Kind::Gaussian:
      return "gaussian";
    case Kind::Uniform:
      return "uniform(" + format_number(param) + ")";
    case Kind::Bernoulli:
      return "bernoulli(" + format_number(param) + ")";
    case Kind::BernoulliOverN:
      return "bernoulli-1-over-n";
    case Kind::Gaussian3:
      return "gaussian3";
    case Kind::PhaseGaussian:
      return "phase-gaussian(" + std::to_string(dim) + ")";
  }
  return "gaussian";
}

SingleParticleLaw SingleParticleLaw::parse(const std::string& raw) {
  const std::string text = strip_spaces(raw);
  std::string name, inner;
  bool has_inner = false;
  split_call(text, name, inner, has_inner);
  SingleParticleLaw law;
  if (name == "gaussian") {
    law.kind = Kind::Gaussian;
  } else if (name == "uniform") {
    law.kind = Kind::Uniform;
    if (has_inner) {
      law.param = parse_number(text, inner);
      if (!(law.param > 0.0)) throw InvalidInputError("law spec '" + text + "': half-width must be > 0");
      has_inner = false;
    }
  } else if (name == "bernoulli") {
    law.kind = Kind::Bernoulli;
    if (!has_inner) throw InvalidInputError("law spec 'bernoulli' needs p, e.g. bernoulli(0.5)");
    law.param = parse_number(text, inner);
    if (law.param < 0.0 || law.param > 1.0)
      throw InvalidInputError("law spec '" + text + "': p must lie in [0, 1]");
    has_inner = false;
  } else if (name == "bernoulli-1-over-n") {
    law.kind = Kind::BernoulliOverN;
  } else if (name == "gaussian3") {
    law.kind = Kind::Gaussian3;
  } else if (name == "phase-gaussian") {
    law.kind = Kind::PhaseGaussian;
    if (has_inner) {
      const double d = parse_number(text, inner);
      law.dim = static_cast<int>(d);
      if (law.dim < 1 || static_cast<double>(law.dim) != d)
        throw InvalidInputError("law spec '" + text + "': dimension must be a positive integer");
      has_inner = false;
    }
  } else {
    throw InvalidInputError("unknown single-particle law '" + text + "'");
  }
  if (has_inner) throw InvalidInputError("law '" + name + "' takes no argument");
  return law;
}

SpaceKind InitialLaw::space() const {
  return family == Family::Mixture ? components.front().space() : marginal.space();
}

Configuration InitialLaw::draw(int n, RandomStream& rng) const {
  if (n < 1) throw InvalidInputError("initial law: need n >= 1");
  switch (family) {
    case Family::Product: {
      std::vector<Point> pts;
      pts.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) pts.push_back(marginal.sample(rng, n));
      return Configuration(std::move(pts));
    }
    case Family::PureAtomic: {
      switch (marginal.kind) {
        case SingleParticleLaw::Kind::Gaussian:
        case SingleParticleLaw::Kind::Uniform: {
          Eigen::VectorXd xs(n);
          for (int i = 0; i < n; ++i)
            xs(i) = marginal.quantile((static_cast<double>(i) + 0.5) / n);
          return Configuration::from_scalars(xs);
        }
        case SingleParticleLaw::Kind::Bernoulli:
        case SingleParticleLaw::Kind::BernoulliOverN: {
          const double p = marginal.kind == SingleParticleLaw::Kind::Bernoulli
                               ? marginal.param
                               : 1.0 / static_cast<double>(n);
          const int ones = static_cast<int>(std::llround(p * n));
          std::vector<int> syms(static_cast<std::size_t>(n), 0);
          for (int i = n - ones; i < n; ++i) syms[static_cast<std::size_t>(i)] = 1;
          return Configuration::from_symbols(syms);
        }
        case SingleParticleLaw::Kind::Gaussian3:
        case SingleParticleLaw::Kind::PhaseGaussian: {
          RandomStream prefix(kPrefixSeed, 0);
          std::vector<Point> pts;
          pts.reserve(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) pts.push_back(marginal.sample(prefix, n));
          return Configuration(std::move(pts));
        }
      }
      throw InvalidInputError("initial law: unknown marginal");
    }
    case Family::Mixture: {
      double target = rng.uniform01();
      std::size_t pick = components.size() - 1;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        target -= weights[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      std::vector<Point> pts;
      pts.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) pts.push_back(components[pick].sample(rng, n));
      return Configuration(std::move(pts));
    }
  }
  throw InvalidInputError("initial law: unknown family");
}

std::string InitialLaw::describe() const {
  switch (family) {
    case Family::Product:
      return "product(" + marginal.describe() + ")";
    case Family::PureAtomic:
      return "pure-atomic(" + marginal.describe() + ")";
    case Family::Mixture: {
      std::string out = "mixture(";
      for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) out += ",";
        out += components[i].describe() + ":" + format_number(weights[i]);
      }
      return out + ")";
    }
  }
  return "product(gaussian)";
}

InitialLaw InitialLaw::parse(const std::string& raw) {
  const std::string text = strip_spaces(raw);
  std::string name, inner;
  bool has_inner = false;
  split_call(text, name, inner, has_inner);
  InitialLaw law;
  if (name == "product" || name == "pure-atomic") {
    if (!has_inner)
      throw InvalidInputError("initial law '" + text + "' needs a marginal, e.g. product(gaussian)");
    law.family = name == "product" ? Family::Product : Family::PureAtomic;
    law.marginal = SingleParticleLaw::parse(inner);
    return law;
  }
  if (name != "mixture")
    throw InvalidInputError("unknown initial law family '" + text + "'");
  if (!has_inner) throw InvalidInputError("mixture needs components, e.g. mixture(gaussian:0.5,uniform:0.5)");
  law.family = Family::Mixture;
  double total = 0.0;
  for (const std::string& part : split_top_level(inner)) {
    const auto colon = part.rfind(':');
    if (colon == std::string::npos)
      throw InvalidInputError("mixture component '" + part + "' needs a weight after ':'");
    law.components.push_back(SingleParticleLaw::parse(part.substr(0, colon)));
    const double w = parse_number(text, part.substr(colon + 1));
    if (!(w > 0.0)) throw InvalidInputError("mixture weight in '" + part + "' must be > 0");
    law.weights.push_back(w);
    total += w;
  }
  for (double& w : law.weights) w /= total;
  for (std::size_t i = 1; i < law.components.size(); ++i)
    if (law.components[i].space() != law.components[0].space())
      throw InvalidInputError("mixture components must share one space variant");
  return law;
}

}  // namespace chaoslab
