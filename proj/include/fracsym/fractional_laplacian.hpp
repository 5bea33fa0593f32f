#pragma once

#include <Eigen/Dense>

#include "fracsym/grid.hpp"

namespace fracsym {

enum class OperatorMethod { SpectralPeriodic, SingularIntegralTruncated };

/// Functions are extended by zero outside (-L, L) (ZeroOutside); the
/// truncated singular integral carries a closed-form exterior correction.
struct OperatorSpec {
  double sigma = 1.0;
  OperatorMethod method = OperatorMethod::SingularIntegralTruncated;
  Grid1D grid;

  OperatorSpec(double sigma_, OperatorMethod method_, Grid1D grid_)
      : sigma(sigma_), method(method_), grid(grid_) {}
};

/// c_{1,sigma} = 2^sigma Gamma((1+sigma)/2) / (sqrt(pi) |Gamma(-sigma/2)|)
double normalization_constant(double sigma);

/// Discrete realization of (-Delta)^{sigma/2} on a Grid1D.
///
/// SingularIntegralTruncated rows:
///   (Lu)_i = c [ u_i (S_i + e_i) - sum_{j != i} W_{|i-j|} u_j ] + (Cu)_i
/// with W_k the exact kernel integral over the cell at distance k dx,
/// e_i the exterior integral, and C = -c G^T Theta G a symmetric PSD
/// second-difference correction that makes the scheme exact on quadratics
/// truncated to the grid (G = forward difference, Theta from per-row
/// quadratic defects). Apply runs in O(n log n) via FFT convolution; a dense
/// matrix view is materialized on demand for tests, dumps and fallbacks.
class DiscreteOperator {
public:
  const OperatorSpec& spec() const { return spec_; }
  const Grid1D& grid() const { return spec_.grid; }
  double sigma() const { return spec_.sigma; }
  double constant() const { return c_; }

  GridFunction apply(const GridFunction& f) const;
  Array apply(const Array& u) const;

  /// Row sums of the assembled matrix (equals the exterior correction for
  /// the singular-integral method, zero for the periodic method).
  Array row_sums() const;
  /// c * e_i, the exterior-tail correction entering the diagonal.
  const Array& exterior_correction() const { return exterior_; }
  /// Fourier multiplier |xi_j|^sigma (SpectralPeriodic only).
  const Array& multiplier() const;

  Eigen::MatrixXd dense_matrix() const;
  Array diagonal() const;  // exact matrix diagonal, for preconditioning

private:
  friend DiscreteOperator assemble(const OperatorSpec&);
  explicit DiscreteOperator(OperatorSpec spec) : spec_(std::move(spec)) {}

  Array apply_singular(const Array& u) const;
  Array apply_spectral(const Array& u) const;

  OperatorSpec spec_;
  double c_ = 0.0;

  // singular-integral pieces
  Array kernel_;        // W_k, k = 0..n-1 (W_0 = 0)
  Array row_scale_;     // S_i + e_i
  Array exterior_;      // c * e_i
  Array theta_;         // edge conductances of the correction (size n-1)
  std::vector<std::complex<double>> kernel_fft_;  // length 2n spectrum of W

  // spectral pieces
  Array multiplier_;
};

DiscreteOperator assemble(const OperatorSpec& spec);

/// g(x) = (1/2)(1 - |x|^2)_+^{sigma/2}; its fractional Laplacian is a
/// positive constant on the unit ball (the operator-accuracy oracle).
GridFunction getoor_profile(double sigma, const Grid1D& grid);

/// P_t(x) = t / (pi (t^2 + x^2)); requires t > 0.
GridFunction poisson_kernel(double t, const Grid1D& grid);

/// Closed form of (-Delta)^{1/2} P_1, used as the sigma = 1 oracle.
GridFunction poisson_kernel_half_laplacian(const Grid1D& grid);

}  // namespace fracsym
