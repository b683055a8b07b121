#pragma once

// JSON experiment configuration. SI units throughout; frequencies and rates in Hz.
// Unknown keys are rejected so that typos surface as field-level errors.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/device.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/fitting.hpp"
#include "cqed/noise.hpp"
#include "cqed/readout.hpp"

namespace cqed {

enum class ExperimentKind { Spectroscopy, Stark, Rabi, Ramsey, T1, Echo, ReadoutTrace, S11Sweep };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError for names outside the recognized set.
ExperimentKind parse_experiment_kind(const std::string& name);
const std::vector<std::string>& experiment_names();

struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  int points = 2;

  std::vector<double> values() const;
};

struct PulseConfig {
  double sigma = 0.5e-9;
  double truncation_k = 2.0;
  double drag_beta = 0.0;
  /// Peak Rabi rate of a π pulse; computed from sigma when absent.
  std::optional<double> pi_amplitude;
  std::optional<AmplitudeCalibration> calibration;
  double readout_duration = 400e-9;
  double lead_time = 0.0;
};

struct SimulationConfig {
  int fock_cutoff = 4;
  double dt = 1e-12;
  IntegrationMethod method = IntegrationMethod::FixedRk4;
  double tolerance = 1e-9;
  /// Step of the semiclassical cavity integration during readout.
  double readout_dt = 0.1e-9;
  /// Integration step of the Monte-Carlo pulses.
  double monte_carlo_dt = 5e-12;
  unsigned threads = 0;
};

struct ReadoutConfig {
  HeterodyneConfig heterodyne;
  /// Probe frequency; the bare resonator frequency when absent.
  std::optional<double> probe_frequency;
  /// Steady-state intra-cavity photons of the probe on the bare resonance.
  double probe_photons = 1.0;
  IntegrationWeights weights = IntegrationWeights::Matched;
  int shots = 1;
};

struct SpectroscopyConfig {
  std::vector<double> powers{1e-15, 2e-15, 4e-15, 6e-15, 8e-15, 10e-15};
  /// Ω = rabi_per_sqrt_watt · sqrt(P).
  double rabi_per_sqrt_watt = 2.5e13;
  LinewidthMode mode = LinewidthMode::Linear;
};

struct StarkConfig {
  /// Synthetic calibration used to map the power sweep onto cavity drive strength.
  double photons_per_watt = 1e15;
  /// Half-width of the qubit probe sweep around the undriven transition.
  double probe_span = 40e6;
  int probe_points = 801;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Rabi;
  DeviceParams device;
  SweepSpec sweep;
  PulseConfig pulse;
  double drive_detuning = 0.0;
  ReadoutConfig readout;
  DetectorNoise detector_noise;
  OuNoiseModel ou_noise{0.0, 1e-6, 1000};
  SimulationConfig simulation;
  SpectroscopyConfig spectroscopy;
  StarkConfig stark;
  /// The parsed document, kept for hashing.
  nlohmann::json source;
};

/// Parses and validates a configuration. `kind` overrides or must agree with the
/// document's "experiment" field.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              std::optional<ExperimentKind> kind = std::nullopt);

/// Reads a JSON file; I/O and syntax errors become ConfigError.
nlohmann::json load_json_file(const std::string& path);

}  // namespace cqed
