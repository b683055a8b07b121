#pragma once

// Superoperator form of the Lindblad generator, its steady state, and the
// linear-response (weak probe) spectrum obtained from the resolvent.
//
// vec() is column stacking, so vec(A X B) = (Bᵀ ⊗ A) vec(X).

#include <vector>

#include "cqed/quantum.hpp"

namespace cqed {

/// L with rate in angular units (1/s).
template <typename Mat>
struct CollapseOperator {
  Mat op;
  double rate = 0.0;
};

using CollapseChannel = CollapseOperator<OperatorMatrix>;
using RowMajorOperator =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Generator for H given in Hz; angular factors applied here.
template <typename Mat>
OperatorMatrix liouvillian(const Mat& h_hz, const std::vector<CollapseOperator<Mat>>& channels) {
  const auto d = h_hz.rows();
  const OperatorMatrix h = h_hz;
  const OperatorMatrix id = OperatorMatrix::Identity(d, d);
  const Complex minus_i(0.0, -1.0);
  const double two_pi = 6.28318530717958647692;
  OperatorMatrix l = minus_i * two_pi * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : channels) {
    const OperatorMatrix op = c.op;
    const OperatorMatrix ldl = op.adjoint() * op;
    l += c.rate * (kron(op.conjugate(), op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return l;
}

inline StateVector vectorize(const OperatorMatrix& m) {
  return Eigen::Map<const StateVector>(m.data(), m.size());
}

inline OperatorMatrix unvectorize(const StateVector& v, Eigen::Index dim) {
  return Eigen::Map<const OperatorMatrix>(v.data(), dim, dim);
}

/// Steady state of a time-independent generator, normalized to unit trace.
OperatorMatrix steady_state(const OperatorMatrix& h_hz, const std::vector<CollapseChannel>& channels);

/// Weak-probe response S(f) = ∫₀^∞ e^{i2πft} tr(lower · e^{Lt}[raise, ρ_ss]) dt for many f.
/// The generator is reduced to Hessenberg form once; each frequency then costs O(n²).
/// The resolvent is singular on undamped modes of the generator, f = 0 among them.
class ResolventSpectrum {
 public:
  ResolventSpectrum(const OperatorMatrix& generator, const OperatorMatrix& rho_ss,
                    const OperatorMatrix& lower, const OperatorMatrix& raise);

  Complex at(double frequency) const;
  std::vector<Complex> sweep(const std::vector<double>& frequencies) const;

 private:
  RowMajorOperator hessenberg_;
  StateVector projected_rhs_;
  StateVector projected_observable_;
};

/// Solves (H + shift·I) z = b for upper-Hessenberg H with Givens rotations.
StateVector solve_shifted_hessenberg(const RowMajorOperator& hessenberg, Complex shift,
                                     const StateVector& rhs);

}  // namespace cqed
