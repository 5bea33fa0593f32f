#include "fracsym/fractional_laplacian.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <vector>

namespace fracsym {

namespace {

Eigen::FFT<double>& fft_plan() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

double normalization_constant(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 2.0))
    throw std::invalid_argument("normalization_constant: sigma must be in (0,2)");
  return std::pow(2.0, sigma) * std::tgamma(0.5 * (1.0 + sigma)) /
         (std::sqrt(M_PI) * std::abs(std::tgamma(-0.5 * sigma)));
}

DiscreteOperator assemble(const OperatorSpec& spec) {
  if (!(spec.sigma > 0.0) || !(spec.sigma < 2.0))
    throw std::invalid_argument("assemble: sigma must be in (0,2)");
  const int n = spec.grid.n_cells();
  if (n < 8) throw std::invalid_argument("assemble: need n_cells >= 8");

  DiscreteOperator op(spec);
  const double sigma = spec.sigma;
  const double L = spec.grid.half_width();
  const double dx = spec.grid.spacing();

  if (spec.method == OperatorMethod::SpectralPeriodic) {
    op.multiplier_.resize(n);
    for (int j = 0; j < n; ++j) {
      const int jj = j <= n / 2 ? j : j - n;
      op.multiplier_[j] = std::pow(std::abs(M_PI * jj / L), sigma);
    }
    op.multiplier_[0] = 0.0;
    op.exterior_ = Array::Zero(n);
    return op;
  }

  op.c_ = normalization_constant(sigma);

  // W_k = integral of |x_i - y|^{-1-sigma} over the cell at distance k dx
  op.kernel_ = Array::Zero(n);
  for (int k = 1; k < n; ++k) {
    const double a = (k - 0.5) * dx, b = (k + 0.5) * dx;
    op.kernel_[k] =
        (std::pow(a, -sigma) - std::pow(b, -sigma)) / sigma;
  }

  // prefix sums of W_k and k^2 W_k
  std::vector<long double> cw(n, 0.0L), cw2(n, 0.0L);
  for (int k = 1; k < n; ++k) {
    cw[k] = cw[k - 1] + static_cast<long double>(op.kernel_[k]);
    cw2[k] = cw2[k - 1] +
             static_cast<long double>(op.kernel_[k]) * k * k;
  }

  op.row_scale_.resize(n);
  op.exterior_.resize(n);
  Array defect(n);
  for (int i = 0; i < n; ++i) {
    const double x = spec.grid.node(i);
    const double dl = L - x, dr = L + x;  // distances to the truncation edges
    const double e = (std::pow(dl, -sigma) + std::pow(dr, -sigma)) / sigma;
    const double S =
        static_cast<double>(cw[i] + cw[n - 1 - i]);
    op.row_scale_[i] = S + e;
    op.exterior_[i] = op.c_ * e;
    // quadratic defect: exact PV value minus midpoint-scheme value on
    // phi(y) = (y - x_i)^2 / 2 truncated to (-L, L)
    const double true_q =
        -(std::pow(dl, 2.0 - sigma) + std::pow(dr, 2.0 - sigma)) /
        (2.0 * (2.0 - sigma));
    const double scheme_q =
        -0.5 * dx * dx * static_cast<double>(cw2[i] + cw2[n - 1 - i]);
    defect[i] = true_q - scheme_q;
  }

  op.theta_.resize(n - 1);
  for (int k = 0; k + 1 < n; ++k)
    op.theta_[k] = (defect[k] + defect[k + 1]) / (2.0 * dx * dx);

  // circular embedding of W for the O(n log n) Toeplitz apply
  const int M = 2 * n;
  std::vector<double> ker(M, 0.0);
  for (int k = 1; k < n; ++k) {
    ker[k] = op.kernel_[k];
    ker[M - k] = op.kernel_[k];
  }
  fft_plan().fwd(op.kernel_fft_, ker);
  return op;
}

Array DiscreteOperator::apply_singular(const Array& u) const {
  const int n = static_cast<int>(u.size());
  const int M = 2 * n;

  std::vector<double> pad(M, 0.0);
  for (int i = 0; i < n; ++i) pad[i] = u[i];
  std::vector<std::complex<double>> uf;
  fft_plan().fwd(uf, pad);
  for (int j = 0; j < M; ++j) uf[j] *= kernel_fft_[j];
  std::vector<double> conv;
  fft_plan().inv(conv, uf);

  Array out(n);
  for (int i = 0; i < n; ++i)
    out[i] = c_ * (u[i] * row_scale_[i] - conv[i]);

  // correction C = -c G^T Theta G
  Array w(n - 1);
  for (int k = 0; k + 1 < n; ++k) w[k] = theta_[k] * (u[k + 1] - u[k]);
  for (int i = 0; i < n; ++i) {
    double gtw = 0.0;
    if (i > 0) gtw += w[i - 1];
    if (i < n - 1) gtw -= w[i];
    out[i] -= c_ * gtw;
  }
  return out;
}

Array DiscreteOperator::apply_spectral(const Array& u) const {
  const int n = static_cast<int>(u.size());
  std::vector<double> in(u.data(), u.data() + n);
  std::vector<std::complex<double>> uf;
  fft_plan().fwd(uf, in);
  for (int j = 0; j < n; ++j) uf[j] *= multiplier_[j];
  std::vector<double> back;
  fft_plan().inv(back, uf);
  return Eigen::Map<const Array>(back.data(), n);
}

Array DiscreteOperator::apply(const Array& u) const {
  if (u.size() != spec_.grid.n_cells())
    throw std::invalid_argument("DiscreteOperator::apply: size mismatch");
  return spec_.method == OperatorMethod::SingularIntegralTruncated
             ? apply_singular(u)
             : apply_spectral(u);
}

GridFunction DiscreteOperator::apply(const GridFunction& f) const {
  if (!(f.grid() == spec_.grid))
    throw std::invalid_argument("DiscreteOperator::apply: grid mismatch");
  return GridFunction(spec_.grid, apply(f.values()));
}

const Array& DiscreteOperator::multiplier() const {
  if (spec_.method != OperatorMethod::SpectralPeriodic)
    throw std::logic_error("multiplier(): not a spectral operator");
  return multiplier_;
}

Array DiscreteOperator::row_sums() const {
  const int n = spec_.grid.n_cells();
  if (spec_.method == OperatorMethod::SpectralPeriodic)
    return Array::Zero(n);
  // The Toeplitz+diagonal part sums to c*e_i per row and the correction
  // annihilates constants, so this is exact by construction.
  return apply(Array::Ones(n));
}

Array DiscreteOperator::diagonal() const {
  const int n = spec_.grid.n_cells();
  if (spec_.method == OperatorMethod::SpectralPeriodic)
    return Array::Constant(n, multiplier_.sum() / n);
  Array d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = c_ * row_scale_[i];
    if (i > 0) d[i] -= c_ * theta_[i - 1];
    if (i < n - 1) d[i] -= c_ * theta_[i];
  }
  return d;
}

Eigen::MatrixXd DiscreteOperator::dense_matrix() const {
  const int n = spec_.grid.n_cells();
  Eigen::MatrixXd K(n, n);
  if (spec_.method == OperatorMethod::SpectralPeriodic) {
    // circulant: first column is the inverse transform of the multiplier
    std::vector<std::complex<double>> mf(n);
    for (int j = 0; j < n; ++j) mf[j] = multiplier_[j];
    std::vector<std::complex<double>> col;
    fft_plan().inv(col, mf);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) K(i, j) = col[(i - j + n) % n].real();
    return K;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      K(i, j) = i == j ? c_ * row_scale_[i] : -c_ * kernel_[std::abs(i - j)];
  }
  for (int k = 0; k + 1 < n; ++k) {
    const double t = c_ * theta_[k];  // theta < 0: adds to the diagonal
    K(k, k) -= t;
    K(k + 1, k + 1) -= t;
    K(k, k + 1) += t;
    K(k + 1, k) += t;
  }
  return K;
}

GridFunction getoor_profile(double sigma, const Grid1D& grid) {
  if (!(sigma > 0.0) || !(sigma < 2.0))
    throw std::invalid_argument("getoor_profile: sigma must be in (0,2)");
  if (grid.half_width() < 1.0)
    throw std::invalid_argument("getoor_profile: grid must cover (-1,1)");
  return GridFunction(grid, [sigma](double x) {
    const double t = 1.0 - x * x;
    return t > 0.0 ? 0.5 * std::pow(t, 0.5 * sigma) : 0.0;
  });
}

GridFunction poisson_kernel(double t, const Grid1D& grid) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_kernel: t must be > 0");
  return GridFunction(
      grid, [t](double x) { return t / (M_PI * (t * t + x * x)); });
}

GridFunction poisson_kernel_half_laplacian(const Grid1D& grid) {
  return GridFunction(grid, [](double x) {
    const double q = 1.0 + x * x;
    return (1.0 - x * x) / (M_PI * q * q);
  });
}

}  // namespace fracsym
