#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cqed/dynamics.hpp"
#include "cqed/fitting.hpp"
#include "cqed/noise.hpp"

using namespace cqed;

namespace {

SequenceConfig sequence_config() {
  SequenceConfig cfg;
  cfg.qubit_frequency = 4.0e9;
  cfg.sigma = 0.5e-9;
  cfg.pi_amplitude = amplitude_for_angle(kPi, cfg.sigma);
  return cfg;
}

MonteCarloOptions options(std::uint64_t seed = 7) {
  MonteCarloOptions o;
  o.seed = seed;
  o.dt = 5e-12;
  o.qubit_frequency = 4.0e9;
  return o;
}

}  // namespace

TEST_CASE("OU samples have the stationary variance") {
  const OuNoiseModel model{2e6, 50e-9, 1};
  double sum = 0.0, sum_sq = 0.0;
  const int n = 10000;
  for (int r = 0; r < n; ++r) {
    const auto x = sample_ou_detuning(model, 1e-9, 1, realization_seed(1, r));
    sum += x[0];
    sum_sq += x[0] * x[0];
  }
  const double var = (sum_sq - sum * sum / n) / (n - 1);
  CHECK(var == doctest::Approx(4e12).epsilon(0.05));
}

TEST_CASE("OU autocovariance at one correlation time") {
  const OuNoiseModel model{1.0, 20e-9, 1};
  const double dt = 1e-9;
  const int lag = 20;
  double cov = 0.0, var = 0.0;
  const int n = 10000;
  for (int r = 0; r < n; ++r) {
    const auto x = sample_ou_detuning(model, dt, lag + 1, realization_seed(99, r));
    cov += x[0] * x[lag];
    var += x[0] * x[0];
  }
  CHECK(cov / n == doctest::Approx(std::exp(-1.0)).epsilon(0.05));
  CHECK(var / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("quasi-static limit keeps each trace constant") {
  const OuNoiseModel model{3e6, 1e6, 1};
  const auto x = sample_ou_detuning(model, 1e-9, 200, 5);
  for (double v : x) CHECK(v == doctest::Approx(x.front()).epsilon(1e-4));
}

TEST_CASE("noise streams are reproducible and distinct") {
  const OuNoiseModel model{1e6, 1e-6, 1};
  CHECK(sample_ou_detuning(model, 1e-9, 50, 42) == sample_ou_detuning(model, 1e-9, 50, 42));
  CHECK(sample_ou_detuning(model, 1e-9, 50, 42) != sample_ou_detuning(model, 1e-9, 50, 43));
  CHECK(realization_seed(1, 0) != realization_seed(1, 1));
  CHECK(realization_seed(1, 0) != realization_seed(2, 0));
  CHECK_THROWS_AS(sample_ou_detuning({-1.0, 1e-6, 1}, 1e-9, 5, 1), ParameterError);
  CHECK_THROWS_AS(sample_ou_detuning({1.0, 0.0, 1}, 1e-9, 5, 1), ParameterError);
  CHECK_THROWS_AS(sample_ou_detuning(model, 0.0, 5, 1), ParameterError);
}

TEST_CASE("zero noise reduces to a single Lindblad evolution") {
  const SequenceConfig cfg = sequence_config();
  const DecoherenceParams dec = DecoherenceParams::from_times(42.3e-9, 23.4e-9);
  const auto seq = build_ramsey_sequence(13e-9, 30e6, cfg);
  const auto mc = monte_carlo_dephasing(seq, OuNoiseModel{0.0, 1e-6, 500}, dec, options());
  CHECK(mc.realizations == 1);
  CHECK(mc.standard_error == 0.0);

  using Qubit = Eigen::Matrix2cd;
  TimeDependentOperator<Qubit> h;
  h.at = [&](double t) -> Qubit {
    const Complex omega = seq.drive(t, cfg.qubit_frequency);
    return 0.5 * (std::conj(omega) * Qubit(qubit::sigma_plus()) + omega * Qubit(qubit::sigma_minus()));
  };
  h.varying = pulse_support(seq);
  SimulationGrid grid;
  grid.t_end = seq.readout_window.start;
  grid.dt = 5e-12;
  grid.store_every = 1 << 30;
  Qubit rho0 = Qubit::Zero();
  rho0(0, 0) = 1.0;
  const auto direct = evolve<Qubit>(rho0, h, qubit_channels(dec), grid);
  CHECK((direct.final_state - mc.mean_state).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("echo refocuses quasi-static detuning") {
  const SequenceConfig cfg = sequence_config();
  const double tau = 40e-9;
  const auto echo = build_echo_sequence(tau, cfg);
  const auto ramsey = build_ramsey_sequence(tau, 0.0, cfg);
  const DecoherenceParams none{};
  const auto reference = monte_carlo_dephasing(echo, OuNoiseModel{0.0, 1.0, 1}, none, options());
  for (double sigma : {2e6, 5e6}) {
    const OuNoiseModel quasi_static{sigma, 1.0, 200};
    const auto e = monte_carlo_dephasing(echo, quasi_static, none, options());
    CHECK(e.excited_population == doctest::Approx(reference.excited_population).epsilon(1e-3));
    const auto r = monte_carlo_dephasing(ramsey, quasi_static, none, options());
    // Ramsey with a Gaussian-distributed static detuning: P_e = ½(1 + e^{−(2πστ)²/2}).
    const double phase_var = std::pow(kTwoPi * sigma * tau, 2);
    const double expected = 0.5 * (1.0 + std::exp(-0.5 * phase_var));
    CHECK(r.excited_population == doctest::Approx(expected).epsilon(0.1));
    CHECK(r.excited_population < e.excited_population);
  }
}

TEST_CASE("white-limit noise decays Ramsey and echo at the same rate") {
  const SequenceConfig cfg = sequence_config();
  const DecoherenceParams dec = DecoherenceParams::from_times(42.3e-9, 46.8e-9);
  const double t2 = 46.8e-9, tau_max = 80e-9;
  // Correlation time far below the delays; (2πσ)² τc = 1/T2 doubles the Ramsey decay rate.
  const double tau_c = tau_max / 100.0;
  const OuNoiseModel white{1.0 / (kTwoPi * std::sqrt(t2 * tau_c)), tau_c, 600};
  MonteCarloOptions o = options(3);
  o.dt = 20e-12;
  std::vector<double> taus, pr, pe;
  for (int i = 0; i <= 20; ++i) {
    const double tau = tau_max * i / 20.0;
    taus.push_back(tau);
    pr.push_back(monte_carlo_dephasing(build_ramsey_sequence(tau, 0.0, cfg), white, dec, o).excited_population);
    pe.push_back(monte_carlo_dephasing(build_echo_sequence(tau, cfg), white, dec, o).excited_population);
  }
  const auto fr = fit_exponential_decay(taus, pr);
  const auto fe = fit_exponential_decay(taus, pe);
  CHECK(fe.param("decay_time") / fr.param("decay_time") == doctest::Approx(1.0).epsilon(0.1));
  CHECK(fr.param("decay_time") == doctest::Approx(0.5 * t2).epsilon(0.15));
}

TEST_CASE("Ramsey fringes follow the drive detuning") {
  const SequenceConfig cfg = sequence_config();
  const DecoherenceParams dec = DecoherenceParams::from_times(42.3e-9, 23.4e-9);
  std::vector<double> taus, pe;
  for (int i = 0; i <= 60; ++i) {
    taus.push_back(1e-9 * i);
    pe.push_back(monte_carlo_dephasing(build_ramsey_sequence(taus.back(), 100e6, cfg), {0.0, 1e-6, 1}, dec,
                                       options())
                     .excited_population);
  }
  const auto fit = fit_damped_cosine(taus, pe);
  CHECK(fit.param("frequency") == doctest::Approx(100e6).epsilon(0.02));
  CHECK(fit.param("decay_time") == doctest::Approx(23.4e-9).epsilon(0.05));
}

TEST_CASE("Monte-Carlo averages are independent of the thread count") {
  const SequenceConfig cfg = sequence_config();
  const auto seq = build_ramsey_sequence(20e-9, 0.0, cfg);
  const OuNoiseModel model{4e6, 100e-9, 16};
  MonteCarloOptions one = options(11), four = options(11);
  one.threads = 1;
  four.threads = 4;
  const auto a = monte_carlo_dephasing(seq, model, {}, one);
  const auto b = monte_carlo_dephasing(seq, model, {}, four);
  CHECK(a.excited_population == b.excited_population);
  CHECK(a.realizations == 16);
  CHECK(a.standard_error > 0.0);
}
