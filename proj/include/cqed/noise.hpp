#pragma once

// Slow charge noise as an Ornstein–Uhlenbeck detuning process, and the
// Monte-Carlo average of a pulse sequence over noise realizations.

#include <cstdint>
#include <vector>

#include "cqed/device.hpp"
#include "cqed/pulses.hpp"

namespace cqed {

struct OuNoiseModel {
  double sigma_delta = 0.0;  // stationary standard deviation of δ(t), Hz
  double tau_c = 1e-6;       // correlation time, s
  int n_realizations = 1000;

  void validate() const;
};

/// Independent, reproducible stream for realization `index` of a run seeded with `seed`.
std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index);

/// δ(t_k) at t_k = k·dt, k = 0..samples−1, started from the stationary distribution and
/// advanced with the exact update x ← x e^{−dt/τ} + σ sqrt(1 − e^{−2dt/τ}) ξ.
std::vector<double> sample_ou_detuning(const OuNoiseModel& model, double dt, std::size_t samples,
                                       std::uint64_t seed);

struct MonteCarloOptions {
  std::uint64_t seed = 1;
  /// Integration step inside pulses; also the spacing of the noise samples.
  double dt = 5e-12;
  /// Qubit frequency ν_q; the simulation frame. Defaults to the sequence reference.
  double qubit_frequency = 0.0;
  unsigned threads = 0;  // 0 selects hardware concurrency
};

struct MonteCarloResult {
  double excited_population = 0.0;
  double standard_error = 0.0;
  int realizations = 0;
  Eigen::Matrix2cd mean_state = Eigen::Matrix2cd::Zero();
};

/// Qubit-only Lindblad evolution of `seq` up to the start of its readout window with
/// detuning noise δ(t) added to the qubit splitting. Pulses are integrated with RK4;
/// idle gaps are propagated exactly. A zero noise amplitude runs a single realization.
MonteCarloResult monte_carlo_dephasing(const PulseSequence& seq, const OuNoiseModel& noise,
                                       const DecoherenceParams& dec,
                                       const MonteCarloOptions& options = {});

}  // namespace cqed
