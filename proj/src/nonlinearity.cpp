#include "fracsym/nonlinearity.hpp"

#include <cmath>

namespace fracsym {

namespace {
double signed_pow(double t, double p) {
  if (t == 0.0) return 0.0;
  return t > 0.0 ? std::pow(t, p) : -std::pow(-t, p);
}
}  // namespace

Nonlinearity Nonlinearity::power(double m) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("Nonlinearity::power: m must be positive");
  Nonlinearity n;
  n.is_power_ = true;
  n.m_ = m;
  n.A_ = [m](double t) { return signed_pow(t, m); };
  n.A_prime_ = [m](double t) { return m * std::pow(std::abs(t), m - 1.0); };
  const double inv = 1.0 / m;
  n.B_ = [inv](double t) { return signed_pow(t, inv); };
  n.B_prime_ = [inv](double t) {
    return inv * std::pow(std::abs(t), inv - 1.0);
  };
  // B(v) = v^(1/m): concave for m > 1, convex for m < 1
  n.b_convexity_ = m == 1.0 ? Convexity::Linear
                   : m > 1.0 ? Convexity::Concave
                             : Convexity::Convex;
  n.validate();
  return n;
}

Nonlinearity Nonlinearity::custom(ScalarMap A, ScalarMap A_prime, ScalarMap B,
                                  ScalarMap B_prime, Convexity b_convexity) {
  Nonlinearity n;
  n.A_ = std::move(A);
  n.A_prime_ = std::move(A_prime);
  n.B_ = std::move(B);
  n.B_prime_ = std::move(B_prime);
  n.b_convexity_ = b_convexity;
  n.validate();
  return n;
}

double Nonlinearity::exponent() const {
  if (!is_power_)
    throw std::logic_error("Nonlinearity::exponent: not a power nonlinearity");
  return m_;
}

void Nonlinearity::validate() const {
  if (A_(0.0) != 0.0) throw std::invalid_argument("Nonlinearity: A(0) != 0");
  if (B_(0.0) != 0.0) throw std::invalid_argument("Nonlinearity: B(0) != 0");
  // log-spaced probe set over twelve decades
  for (int k = -6; k <= 6; ++k) {
    const double t = std::pow(10.0, k);
    if (!(A_prime_(t) > 0.0))
      throw std::invalid_argument("Nonlinearity: A' not positive at probe");
    if (!(B_prime_(t) > 0.0))
      throw std::invalid_argument("Nonlinearity: B' not positive at probe");
    const double r = B_(A_(t));
    if (std::abs(r - t) > 1e-10 * std::abs(t))
      throw std::invalid_argument("Nonlinearity: B(A(t)) != t at probe");
  }
}

const char* to_string(Convexity c) {
  switch (c) {
    case Convexity::Concave: return "concave";
    case Convexity::Convex: return "convex";
    case Convexity::Linear: return "linear";
    default: return "unknown";
  }
}

}  // namespace fracsym
