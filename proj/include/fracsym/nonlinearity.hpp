#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fracsym {

enum class Convexity { Concave, Convex, Linear, Unknown };

/// The pair A (parabolic form) and B = A^{-1} (elliptic form) with
/// derivatives. Power nonlinearities evaluate as sign(t)|t|^m so the odd
/// extension is available; the convexity tag refers to B on (0, inf).
class Nonlinearity {
public:
  using ScalarMap = std::function<double(double)>;

  static Nonlinearity power(double m);
  static Nonlinearity custom(ScalarMap A, ScalarMap A_prime, ScalarMap B,
                             ScalarMap B_prime, Convexity b_convexity);

  double A(double t) const { return A_(t); }
  double A_prime(double t) const { return A_prime_(t); }
  double B(double t) const { return B_(t); }
  double B_prime(double t) const { return B_prime_(t); }

  Convexity b_convexity() const { return b_convexity_; }
  bool is_power() const { return is_power_; }
  /// Exponent m of A(u) = u^m; throws for custom nonlinearities.
  double exponent() const;

private:
  Nonlinearity() = default;
  void validate() const;  // probe-set checks: A(0)=B(0)=0, A'>0, B'>0, B(A(t))=t

  ScalarMap A_, A_prime_, B_, B_prime_;
  Convexity b_convexity_ = Convexity::Unknown;
  bool is_power_ = false;
  double m_ = 0.0;
};

const char* to_string(Convexity c);

}  // namespace fracsym
