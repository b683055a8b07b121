#include "cqed/quantum.hpp"

#include <cmath>

namespace cqed {

void HilbertSpec::validate() const {
  if (fock_cutoff < 2) {
    throw DimensionError("HilbertSpec: fock_cutoff must be >= 2, got " +
                         std::to_string(fock_cutoff));
  }
}

namespace qubit {

OperatorMatrix sigma_z() {
  OperatorMatrix s = OperatorMatrix::Zero(2, 2);
  s(0, 0) = -1.0;
  s(1, 1) = 1.0;
  return s;
}

OperatorMatrix sigma_plus() {
  OperatorMatrix s = OperatorMatrix::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}

OperatorMatrix sigma_minus() { return sigma_plus().adjoint(); }

OperatorMatrix sigma_x() { return sigma_plus() + sigma_minus(); }

OperatorMatrix sigma_y() {
  const Complex i(0.0, 1.0);
  return -i * sigma_plus() + i * sigma_minus();
}

OperatorMatrix excited_projector() {
  OperatorMatrix p = OperatorMatrix::Zero(2, 2);
  p(1, 1) = 1.0;
  return p;
}

}  // namespace qubit

OperatorMatrix qubit_operator(const OperatorMatrix& op, const HilbertSpec& spec) {
  spec.validate();
  if (op.rows() != 2 || op.cols() != 2) throw DimensionError("qubit_operator: expected 2x2");
  return kron(op, identity(spec.fock_cutoff));
}

OperatorMatrix cavity_operator(const OperatorMatrix& op, const HilbertSpec& spec) {
  spec.validate();
  if (op.rows() != spec.fock_cutoff || op.cols() != spec.fock_cutoff) {
    throw DimensionError("cavity_operator: operator does not match Fock cutoff");
  }
  return kron(identity(2), op);
}

StateVector basis_state(const HilbertSpec& spec, int qubit, int fock) {
  spec.validate();
  if (qubit < 0 || qubit > 1 || fock < 0 || fock >= spec.fock_cutoff) {
    throw DimensionError("basis_state: index out of range");
  }
  StateVector psi = StateVector::Zero(spec.dim());
  psi(spec.index(qubit, fock)) = 1.0;
  return psi;
}

StateVector coherent_state(Complex alpha, int fock_cutoff) {
  if (fock_cutoff < 2) throw DimensionError("coherent_state: Fock cutoff must be >= 2");
  StateVector psi(fock_cutoff);
  Complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < fock_cutoff; ++n) {
    psi(n) = term;
    term *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return psi / psi.norm();
}

double trace_error(const OperatorMatrix& rho) { return std::abs(rho.trace() - 1.0); }

double hermiticity_error(const OperatorMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const OperatorMatrix& rho) {
  const OperatorMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix::DensityMatrix(OperatorMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DimensionError("DensityMatrix: must be square and non-empty");
  }
  if (!entries_.allFinite()) throw ParameterError("DensityMatrix: non-finite entries");
  if (hermiticity_error(entries_) > kHermitianTolerance) {
    throw ParameterError("DensityMatrix: not Hermitian");
  }
  if (trace_error(entries_) > kTraceTolerance) {
    throw ParameterError("DensityMatrix: trace differs from 1");
  }
  if (cqed::min_eigenvalue(entries_) < kPositivityTolerance) {
    throw ParameterError("DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const StateVector normalized = psi / psi.norm();
  return DensityMatrix(normalized * normalized.adjoint());
}

DensityMatrix DensityMatrix::product(const OperatorMatrix& qubit, const OperatorMatrix& cavity) {
  return DensityMatrix(kron(qubit, cavity));
}

double DensityMatrix::min_eigenvalue() const { return cqed::min_eigenvalue(entries_); }

DensityMatrix partial_trace_qubit(const DensityMatrix& rho, const HilbertSpec& spec) {
  spec.validate();
  if (rho.dim() != spec.dim()) throw DimensionError("partial_trace_qubit: dimension mismatch");
  const int n = spec.fock_cutoff;
  OperatorMatrix reduced = OperatorMatrix::Zero(2, 2);
  for (int q = 0; q < 2; ++q) {
    for (int p = 0; p < 2; ++p) {
      reduced(q, p) = rho.matrix().block(q * n, p * n, n, n).trace();
    }
  }
  return DensityMatrix(0.5 * (reduced + reduced.adjoint()));
}

OperatorMatrix partial_trace_cavity(const OperatorMatrix& rho, const HilbertSpec& spec) {
  spec.validate();
  if (rho.rows() != spec.dim()) throw DimensionError("partial_trace_cavity: dimension mismatch");
  const int n = spec.fock_cutoff;
  return rho.block(0, 0, n, n) + rho.block(n, n, n, n);
}

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw DimensionError("expectation: dimension mismatch");
  }
  // tr(rho A) without forming the product.
  return (rho.matrix().transpose().cwiseProduct(op)).sum();
}

}  // namespace cqed
