#include "cqed/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cqed/device.hpp"

namespace cqed {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

ScheduledPulse make_pulse(double amplitude, double start, double phase, double carrier,
                          const SequenceConfig& cfg, double sigma) {
  ScheduledPulse sp;
  sp.pulse.base.amplitude_A = amplitude;
  sp.pulse.base.sigma = sigma;
  sp.pulse.base.truncation_k = cfg.truncation_k;
  sp.pulse.base.center_t0 = start + cfg.truncation_k * sigma;
  sp.pulse.drag_beta = cfg.drag_beta;
  sp.carrier_frequency = carrier;
  sp.carrier_phase = phase;
  return sp;
}

void finish(PulseSequence& seq, double readout_start, const SequenceConfig& cfg) {
  require(cfg.readout_duration > 0.0, "sequence: readout duration must be > 0");
  seq.readout_window = ReadoutWindow{readout_start, cfg.readout_duration};
  seq.total_duration = readout_start + cfg.readout_duration;
  seq.reference_frequency = cfg.qubit_frequency;
  seq.check_disjoint();
}

void check_config(const SequenceConfig& cfg) {
  require(cfg.sigma > 0.0, "sequence: sigma must be > 0");
  require(cfg.truncation_k > 0.0, "sequence: truncation_k must be > 0");
  require(cfg.lead_time >= 0.0, "sequence: lead_time must be >= 0");
}

}  // namespace

double envelope_value(const GaussianPulse& p, double t) {
  const double x = t - p.center_t0;
  if (std::abs(x) > p.truncation_k * p.sigma) return 0.0;
  return p.amplitude_A * std::exp(-x * x / (2.0 * p.sigma * p.sigma));
}

double drag_quadrature_value(const DragPulse& p, double t) {
  if (p.drag_beta == 0.0) return 0.0;
  const double x = t - p.base.center_t0;
  return p.drag_beta * (-x / (p.base.sigma * p.base.sigma)) * envelope_value(p.base, t);
}

double envelope_area(const GaussianPulse& p) {
  return p.amplitude_A * p.sigma * std::sqrt(kTwoPi) * std::erf(p.truncation_k / std::sqrt(2.0));
}

double rabi_angle(const GaussianPulse& p) { return kTwoPi * envelope_area(p); }

double amplitude_for_angle(double angle, double sigma, double truncation_k) {
  require(sigma > 0.0, "amplitude_for_angle: sigma must be > 0");
  GaussianPulse unit{1.0, 0.0, sigma, truncation_k};
  return angle / rabi_angle(unit);
}

double calibrate_pi_amplitude(double sigma, const AmplitudeCalibration& cal, double truncation_k) {
  require(cal.volts_to_rabi > 0.0 && cal.A0_volts > 0.0,
          "calibrate_pi_amplitude: calibration must be positive");
  const double amplitude = amplitude_for_angle(kPi, sigma, truncation_k);
  if (amplitude > cal.max_rabi()) {
    throw ParameterError("calibrate_pi_amplitude: required amplitude " +
                         std::to_string(amplitude) + " Hz exceeds hardware maximum " +
                         std::to_string(cal.max_rabi()) + " Hz");
  }
  return amplitude;
}

double PulseSequence::control_duration() const {
  double end = 0.0;
  for (const auto& p : pulses) end = std::max(end, p.pulse.base.end());
  return end;
}

Complex PulseSequence::drive(double t, double frame_frequency) const {
  Complex omega(0.0);
  for (const auto& sp : pulses) {
    const double env = envelope_value(sp.pulse.base, t);
    if (env == 0.0) continue;
    const double quad = drag_quadrature_value(sp.pulse, t);
    const double phase =
        sp.carrier_phase + kTwoPi * (sp.carrier_frequency - frame_frequency) * t;
    omega += Complex(env, quad) * std::polar(1.0, phase);
  }
  return omega;
}

void PulseSequence::check_disjoint() const {
  std::vector<std::pair<double, double>> spans;
  for (const auto& p : pulses) spans.emplace_back(p.pulse.base.start(), p.pulse.base.end());
  std::sort(spans.begin(), spans.end());
  // Touching supports are allowed; tolerance covers rounding of start + 2kσ.
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second - 1e-18) {
      throw ParameterError("pulse sequence: overlapping pulses");
    }
  }
}

PulseSequence build_rabi_sequence(double amplitude, double sigma, const SequenceConfig& cfg) {
  check_config(cfg);
  require(sigma > 0.0, "rabi sequence: sigma must be > 0");
  PulseSequence seq;
  seq.pulses.push_back(
      make_pulse(amplitude, cfg.lead_time, cfg.half_pi_phase, cfg.qubit_frequency, cfg, sigma));
  finish(seq, seq.control_duration(), cfg);
  return seq;
}

PulseSequence build_ramsey_sequence(double delta_tau, double drive_detuning,
                                    const SequenceConfig& cfg) {
  check_config(cfg);
  require(delta_tau >= 0.0, "ramsey sequence: delta_tau must be >= 0");
  const double half_pi = 0.5 * cfg.pi_amplitude;
  const double width = 2.0 * cfg.truncation_k * cfg.sigma;
  const double carrier = cfg.qubit_frequency - drive_detuning;
  PulseSequence seq;
  seq.pulses.push_back(
      make_pulse(half_pi, cfg.lead_time, cfg.half_pi_phase, carrier, cfg, cfg.sigma));
  seq.pulses.push_back(make_pulse(half_pi, cfg.lead_time + width + delta_tau, cfg.half_pi_phase,
                                  carrier, cfg, cfg.sigma));
  finish(seq, seq.control_duration(), cfg);
  return seq;
}

PulseSequence build_t1_sequence(double delta_tau_w, const SequenceConfig& cfg) {
  check_config(cfg);
  require(delta_tau_w >= 0.0, "t1 sequence: delay must be >= 0");
  PulseSequence seq;
  seq.pulses.push_back(make_pulse(cfg.pi_amplitude, cfg.lead_time, cfg.half_pi_phase,
                                  cfg.qubit_frequency, cfg, cfg.sigma));
  finish(seq, seq.control_duration() + delta_tau_w, cfg);
  return seq;
}

PulseSequence build_echo_sequence(double delta_tau, const SequenceConfig& cfg) {
  check_config(cfg);
  require(delta_tau >= 0.0, "echo sequence: delta_tau must be >= 0");
  const double width = 2.0 * cfg.truncation_k * cfg.sigma;
  const double half_pi = 0.5 * cfg.pi_amplitude;
  const double f = cfg.qubit_frequency;
  double t = cfg.lead_time;
  PulseSequence seq;
  seq.pulses.push_back(make_pulse(half_pi, t, cfg.half_pi_phase, f, cfg, cfg.sigma));
  t += width + 0.5 * delta_tau;
  seq.pulses.push_back(make_pulse(cfg.pi_amplitude, t, cfg.echo_pi_phase, f, cfg, cfg.sigma));
  t += width + 0.5 * delta_tau;
  seq.pulses.push_back(make_pulse(half_pi, t, cfg.half_pi_phase, f, cfg, cfg.sigma));
  finish(seq, seq.control_duration(), cfg);
  return seq;
}

void write_sequence_csv(std::ostream& out, const PulseSequence& seq, double sample_rate) {
  require(sample_rate > 0.0, "write_sequence_csv: sample rate must be > 0");
  out << "time,in_phase,quadrature,carrier_frequency\n";
  const auto samples = static_cast<long>(std::floor(seq.total_duration * sample_rate)) + 1;
  char line[160];
  for (long i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    Complex omega(0.0);
    double carrier = seq.reference_frequency;
    for (const auto& sp : seq.pulses) {
      const double env = envelope_value(sp.pulse.base, t);
      if (env == 0.0) continue;
      omega += Complex(env, drag_quadrature_value(sp.pulse, t)) *
               std::polar(1.0, sp.carrier_phase);
      carrier = sp.carrier_frequency;
    }
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g\n", t, omega.real(), omega.imag(),
                  carrier);
    out << line;
  }
}

}  // namespace cqed
