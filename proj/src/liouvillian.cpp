#include "cqed/liouvillian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cqed {

OperatorMatrix steady_state(const OperatorMatrix& h_hz,
                            const std::vector<CollapseChannel>& channels) {
  const auto d = h_hz.rows();
  OperatorMatrix l = liouvillian(h_hz, channels);
  // Replace the first equation by tr(ρ) = 1.
  l.row(0).setZero();
  for (Eigen::Index i = 0; i < d; ++i) l(0, i * d + i) = 1.0;
  StateVector rhs = StateVector::Zero(d * d);
  rhs(0) = 1.0;
  const StateVector x = l.partialPivLu().solve(rhs);
  OperatorMatrix rho = unvectorize(x, d);
  rho = 0.5 * (rho + rho.adjoint());
  return rho / rho.trace();
}

ResolventSpectrum::ResolventSpectrum(const OperatorMatrix& generator, const OperatorMatrix& rho_ss,
                                     const OperatorMatrix& lower, const OperatorMatrix& raise) {
  const auto d = rho_ss.rows();
  if (generator.rows() != d * d || lower.rows() != d || raise.rows() != d) {
    throw DimensionError("ResolventSpectrum: dimension mismatch");
  }
  Eigen::HessenbergDecomposition<OperatorMatrix> hess(generator);
  hessenberg_ = hess.matrixH();
  const OperatorMatrix q = hess.matrixQ();
  const OperatorMatrix commutator = raise * rho_ss - rho_ss * raise;
  projected_rhs_ = q.adjoint() * vectorize(commutator);
  // tr(lower · Y) = vec(lowerᵀ)ᵀ vec(Y), and vec(Y) = Q z.
  projected_observable_ = q.transpose() * vectorize(lower.transpose());
}

Complex ResolventSpectrum::at(double frequency) const {
  const Complex shift(0.0, 6.28318530717958647692 * frequency);
  const StateVector z = solve_shifted_hessenberg(hessenberg_, shift, projected_rhs_);
  // ∫₀^∞ e^{(L + i2πf)t} dt = −(L + i2πf)⁻¹
  return -projected_observable_.transpose() * z;
}

std::vector<Complex> ResolventSpectrum::sweep(const std::vector<double>& frequencies) const {
  std::vector<Complex> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) out.push_back(at(f));
  return out;
}

StateVector solve_shifted_hessenberg(const RowMajorOperator& hessenberg, Complex shift,
                                     const StateVector& rhs) {
  const auto n = hessenberg.rows();
  RowMajorOperator r = hessenberg;
  r.diagonal().array() += shift;
  StateVector b = rhs;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Complex a = r(k, k);
    const Complex c = r(k + 1, k);
    if (c == Complex(0.0)) continue;
    // Unitary G = [ā, c̄; −c, a] / ρ maps (a, c) to (ρ, 0).
    const double rho = std::hypot(std::abs(a), std::abs(c));
    const Complex g11 = std::conj(a) / rho, g12 = std::conj(c) / rho;
    const Complex g21 = -c / rho, g22 = a / rho;
    for (Eigen::Index j = k; j < n; ++j) {
      const Complex x = r(k, j);
      const Complex y = r(k + 1, j);
      r(k, j) = g11 * x + g12 * y;
      r(k + 1, j) = g21 * x + g22 * y;
    }
    const Complex x = b(k);
    const Complex y = b(k + 1);
    b(k) = g11 * x + g12 * y;
    b(k + 1) = g21 * x + g22 * y;
  }
  return r.triangularView<Eigen::Upper>().solve(b);
}

}  // namespace cqed
