#pragma once

// End-to-end experiment pipelines: pulse sequence, dynamics, readout chain and
// fits, plus the building blocks they share.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cqed/config.hpp"

namespace cqed {

// Control stage -------------------------------------------------------------

/// Qubit ⊗ cavity model for pulsed control. The frame and the pulse carriers sit at
/// the resonator-dressed qubit frequency; cavity decay is left out so there is no
/// Purcell contribution beyond the configured γ1.
struct ControlModel {
  DeviceParams device;
  ResonatorParams resonator;  // with the effective (flux-tuned) frequency
  HilbertSpec spec;
  double frame_frequency = 0.0;
  SimulationConfig simulation;
  std::vector<CollapseChannel> channels;
};

ControlModel make_control_model(const DeviceParams& device, const SimulationConfig& simulation);

SequenceConfig make_sequence_config(const ControlModel& model, const PulseConfig& pulse);

struct ControlOutcome {
  double excited_population = 0.0;
  TrajectoryDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Lindblad evolution from |g, 0⟩ to the start of the readout window.
ControlOutcome simulate_control(const ControlModel& model, const PulseSequence& seq);

// Readout stage ---------------------------------------------------------------

/// Dispersive readout with simulated ground/excited references. A state with
/// excited population p reflects the mixture p·α_e + (1 − p)·α_g.
struct ReadoutModel {
  ReadoutConfig config;
  DetectorNoise noise;
  double chi = 0.0;
  double probe_frequency = 0.0;
  Complex probe_amplitude{0.0, 0.0};
  CavityResponse ground;
  CavityResponse excited;
  double theta = 0.0;
  IqTrace reference_ground;   // rotated, noiseless
  IqTrace reference_excited;  // rotated, noiseless
  ReadoutWindow window;
};

/// Semiclassical ring-up of duration `duration` for both qubit states.
ReadoutModel make_readout_model(const DeviceParams& device, const ReadoutConfig& config,
                                const DetectorNoise& noise, double duration, double readout_dt);

/// Rotated IQ trace for excited population p; noise drawn from `seed`.
IqTrace readout_trace(const ReadoutModel& model, double p, std::uint64_t seed);

PopulationEstimate read_population(const ReadoutModel& model, double p, std::uint64_t seed);

/// Input amplitude a_in that gives `photons` in the resonator when probed on resonance.
double input_amplitude_for_photons(const ResonatorParams& res, double photons);

// Pipelines -------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::Rabi;
  /// File name → table, written as CSV.
  std::map<std::string, CsvTable> tables;
  std::map<std::string, FitResult> fits;
  /// Scalar outcomes addressable by name in reference comparisons.
  std::map<std::string, double> quantities;
  TrajectoryDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

/// Runs the configured pipeline. Outputs depend only on (config, seed).
ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Evaluates f(0..n−1) on a worker pool; results keep index order. The first
/// exception thrown by any task is rethrown after all workers stop.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace cqed
