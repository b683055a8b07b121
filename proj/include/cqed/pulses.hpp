#pragma once

// Gaussian / DRAG control envelopes and the Rabi, Ramsey, T1 and echo
// sequences. Envelope amplitudes are Rabi rates in Hz.

#include <iosfwd>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/quantum.hpp"

namespace cqed {

struct GaussianPulse {
  double amplitude_A = 0.0;
  double center_t0 = 0.0;
  double sigma = 1e-9;
  double truncation_k = 2.0;

  double start() const { return center_t0 - truncation_k * sigma; }
  double end() const { return center_t0 + truncation_k * sigma; }
  double duration() const { return 2.0 * truncation_k * sigma; }
};

struct DragPulse {
  GaussianPulse base;
  double drag_beta = 0.0;
};

struct ScheduledPulse {
  DragPulse pulse;
  double carrier_frequency = 0.0;
  double carrier_phase = 0.0;
};

struct ReadoutWindow {
  double start = 0.0;
  double duration = 400e-9;
};

struct PulseSequence {
  std::vector<ScheduledPulse> pulses;
  ReadoutWindow readout_window;
  double total_duration = 0.0;
  /// Qubit frequency the sequence was designed for; the natural rotating frame.
  double reference_frequency = 0.0;

  double control_duration() const;
  /// Complex Rabi rate Ω(t) in a frame rotating at `frame_frequency`.
  Complex drive(double t, double frame_frequency) const;
  /// Throws ParameterError if any two pulse supports overlap.
  void check_disjoint() const;
};

struct AmplitudeCalibration {
  double volts_to_rabi = 0.0;
  double A0_volts = 0.0;

  double max_rabi() const { return volts_to_rabi * A0_volts; }
  double to_volts(double rabi) const { return rabi / volts_to_rabi; }
};

double envelope_value(const GaussianPulse& p, double t);

/// β · d/dt envelope inside the truncation window.
double drag_quadrature_value(const DragPulse& p, double t);

/// ∫ envelope dt over the truncation window.
double envelope_area(const GaussianPulse& p);

/// θ = 2π ∫ Ω(t) dt.
double rabi_angle(const GaussianPulse& p);

/// Peak Rabi rate giving a rotation `angle` at width sigma; no hardware check.
double amplitude_for_angle(double angle, double sigma, double truncation_k = 2.0);

/// Peak amplitude for a π rotation. Throws ParameterError above cal.max_rabi().
double calibrate_pi_amplitude(double sigma, const AmplitudeCalibration& cal,
                              double truncation_k = 2.0);

struct SequenceConfig {
  double qubit_frequency = 0.0;
  double sigma = 0.5e-9;
  double truncation_k = 2.0;
  double pi_amplitude = 0.0;
  double drag_beta = 0.0;
  double readout_duration = 400e-9;
  /// Carrier phase of π/2 pulses (+x).
  double half_pi_phase = 0.0;
  /// Carrier phase of the refocusing pulse (+y).
  double echo_pi_phase = 0.5 * kPi;
  /// Idle time before the first pulse.
  double lead_time = 0.0;
};

PulseSequence build_rabi_sequence(double amplitude, double sigma, const SequenceConfig& cfg);
PulseSequence build_ramsey_sequence(double delta_tau, double drive_detuning,
                                    const SequenceConfig& cfg);
PulseSequence build_t1_sequence(double delta_tau_w, const SequenceConfig& cfg);
PulseSequence build_echo_sequence(double delta_tau, const SequenceConfig& cfg);

/// CSV columns time, in_phase, quadrature, carrier_frequency at `sample_rate`.
void write_sequence_csv(std::ostream& out, const PulseSequence& seq, double sample_rate = 25e9);

}  // namespace cqed
