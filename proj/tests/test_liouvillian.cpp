#include <doctest.h>

#include <random>

#include "cqed/dynamics.hpp"
#include "cqed/liouvillian.hpp"

using namespace cqed;

namespace {

OperatorMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  OperatorMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

OperatorMatrix two_level_hamiltonian(double detuning, double rabi) {
  return 0.5 * detuning * qubit::sigma_z() + 0.5 * rabi * qubit::sigma_x();
}

}  // namespace

TEST_CASE("superoperator matches the matrix right-hand side") {
  std::mt19937_64 rng(17);
  const int d = 6;
  OperatorMatrix h = random_matrix(d, rng);
  h = 1e7 * (h + h.adjoint());
  std::vector<CollapseChannel> channels{{random_matrix(d, rng), 3e6}, {random_matrix(d, rng), 1e5}};
  OperatorMatrix rho = random_matrix(d, rng);
  rho = rho * rho.adjoint();
  rho /= rho.trace();
  const OperatorMatrix l = liouvillian(h, channels);
  const OperatorMatrix direct = lindblad_rhs<OperatorMatrix>(rho, h, channels);
  const OperatorMatrix via_super = unvectorize(l * vectorize(rho), d);
  CHECK((direct - via_super).norm() / direct.norm() < 1e-12);

  // Trace preservation: vec(I)† L = 0.
  const StateVector id = vectorize(identity(d));
  CHECK((id.adjoint() * l).norm() / l.norm() < 1e-14);
}

TEST_CASE("steady state of a driven two-level system") {
  const DecoherenceParams dec{3.0e6, 1.8e6};
  std::vector<CollapseChannel> channels{{qubit::sigma_minus(), kTwoPi * dec.gamma1},
                                        {qubit::sigma_z(), kTwoPi * 0.5 * dec.gamma_phi}};
  for (double detuning : {0.0, 2e6, -5e6}) {
    for (double rabi : {1e5, 3e6, 2e7}) {
      const OperatorMatrix rho = steady_state(two_level_hamiltonian(detuning, rabi), channels);
      const double expected = steady_state_spectroscopy({detuning}, rabi, dec)[0];
      CHECK(rho(1, 1).real() == doctest::Approx(expected).epsilon(1e-9));
      CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
      CHECK(hermiticity_error(rho) < 1e-15);
    }
  }
}

TEST_CASE("weak-probe spectrum of a two-level system") {
  const double detuning = 4e6, gamma2 = 2.5e6;
  std::vector<CollapseChannel> channels{{qubit::sigma_minus(), kTwoPi * 2.0 * gamma2}};
  const OperatorMatrix h = two_level_hamiltonian(detuning, 0.0);
  const OperatorMatrix rho = steady_state(h, channels);
  CHECK(rho(0, 0).real() == doctest::Approx(1.0));
  const ResolventSpectrum spectrum(liouvillian(h, channels), rho, qubit::sigma_minus(), qubit::sigma_plus());
  for (double f : {-3e6, 0.0, 4e6, 6.5e6}) {
    const Complex expected = 1.0 / Complex(kTwoPi * gamma2, -kTwoPi * (f - detuning));
    CHECK(std::abs(spectrum.at(f) - expected) / std::abs(expected) < 1e-9);
  }
  const auto swept = spectrum.sweep({-1e6, 4e6});
  REQUIRE(swept.size() == 2);
  CHECK(swept[1].real() > swept[0].real());
  CHECK_THROWS_AS(ResolventSpectrum(liouvillian(h, channels), rho, identity(3), qubit::sigma_plus()),
                  DimensionError);
}

TEST_CASE("shifted Hessenberg solve") {
  std::mt19937_64 rng(23);
  const int n = 12;
  const OperatorMatrix a = random_matrix(n, rng);
  Eigen::HessenbergDecomposition<OperatorMatrix> hess(a);
  const RowMajorOperator h = hess.matrixH();
  StateVector b(n);
  for (int i = 0; i < n; ++i) b(i) = Complex(i + 1.0, -0.5 * i);
  const Complex shift(0.3, 2.0);
  const StateVector z = solve_shifted_hessenberg(h, shift, b);
  const OperatorMatrix shifted = OperatorMatrix(h) + shift * identity(n);
  CHECK((shifted * z - b).norm() / b.norm() < 1e-12);
}
