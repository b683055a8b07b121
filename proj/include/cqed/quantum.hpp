#pragma once

// Dense complex linear algebra on the qubit ⊗ truncated-cavity space.
//
// Basis ordering: qubit index major, so |q, n> has flat index q * N + n with
// q = 0 for |g> and q = 1 for |e>.

#include <Eigen/Dense>

#include <complex>
#include <string>

#include "cqed/errors.hpp"

namespace cqed {

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using OperatorMatrix = ComplexMatrix<double>;
using StateVector = ComplexVector<double>;

inline constexpr int kDefaultMaxDimension = 64;

struct HilbertSpec {
  static constexpr int qubit_levels = 2;
  int fock_cutoff = 10;

  int dim() const { return qubit_levels * fock_cutoff; }
  int index(int qubit, int fock) const { return qubit * fock_cutoff + fock; }
  void validate() const;
};

/// Kronecker product without a dimension cap; (A⊗B)(i*nb+k, j*nb+l) = A(i,j) B(k,l).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                       typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                             a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Tensor product of two square operators. Throws DimensionError when the
/// result would exceed `max_dim`, which usually means a mis-set Fock cutoff.
template <typename DerivedA, typename DerivedB>
auto tensor_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                    int max_dim = kDefaultMaxDimension) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw DimensionError("tensor_product: operands must be square");
  }
  if (a.rows() * b.rows() > max_dim) {
    throw DimensionError("tensor_product: dimension " + std::to_string(a.rows() * b.rows()) +
                         " exceeds configured maximum " + std::to_string(max_dim));
  }
  return kron(a, b);
}

template <typename Real = double>
ComplexMatrix<Real> identity(int n) {
  return ComplexMatrix<Real>::Identity(n, n);
}

/// Bosonic lowering operator truncated to N levels: a(n-1, n) = sqrt(n).
template <typename Real = double>
ComplexMatrix<Real> annihilation(int n) {
  if (n < 2) throw DimensionError("annihilation: Fock cutoff must be >= 2");
  ComplexMatrix<Real> a = ComplexMatrix<Real>::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<Real>(k));
  return a;
}

template <typename Real = double>
ComplexMatrix<Real> creation(int n) {
  return annihilation<Real>(n).adjoint();
}

template <typename Real = double>
ComplexMatrix<Real> number_operator(int n) {
  ComplexMatrix<Real> num = ComplexMatrix<Real>::Zero(n, n);
  for (int k = 0; k < n; ++k) num(k, k) = static_cast<Real>(k);
  return num;
}

namespace qubit {

// sigma_z = |e><e| - |g><g| with |g> = index 0.
OperatorMatrix sigma_z();
OperatorMatrix sigma_x();
OperatorMatrix sigma_y();
/// |e><g|
OperatorMatrix sigma_plus();
/// |g><e|
OperatorMatrix sigma_minus();
OperatorMatrix excited_projector();

}  // namespace qubit

/// op ⊗ I_N on the composite space.
OperatorMatrix qubit_operator(const OperatorMatrix& op, const HilbertSpec& spec);
/// I_2 ⊗ op on the composite space.
OperatorMatrix cavity_operator(const OperatorMatrix& op, const HilbertSpec& spec);

StateVector basis_state(const HilbertSpec& spec, int qubit, int fock);
/// Truncated coherent state, renormalized after truncation.
StateVector coherent_state(Complex alpha, int fock_cutoff);

class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-10;
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kPositivityTolerance = -1e-8;

  /// Validates Hermiticity, unit trace and positivity; throws ParameterError.
  explicit DensityMatrix(OperatorMatrix entries);

  static DensityMatrix pure(const StateVector& psi);
  /// Product state rho_q ⊗ rho_c.
  static DensityMatrix product(const OperatorMatrix& qubit, const OperatorMatrix& cavity);

  const OperatorMatrix& matrix() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double min_eigenvalue() const;

 private:
  OperatorMatrix entries_;
};

double trace_error(const OperatorMatrix& rho);
double hermiticity_error(const OperatorMatrix& rho);
double min_eigenvalue(const OperatorMatrix& rho);

DensityMatrix partial_trace_qubit(const DensityMatrix& rho, const HilbertSpec& spec);
/// Reduced cavity state; the counterpart of partial_trace_qubit.
OperatorMatrix partial_trace_cavity(const OperatorMatrix& rho, const HilbertSpec& spec);

/// tr(rho A).
Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);

}  // namespace cqed
