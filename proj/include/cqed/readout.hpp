#pragma once

// Reflection off the resonator and the heterodyne detection chain:
// amplification with added noise, digitization, digital down-conversion,
// low-pass filtering, and estimation of the excited-state population.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cqed/cavity.hpp"
#include "cqed/device.hpp"
#include "cqed/pulses.hpp"

namespace cqed {

/// S11(ν_p) = [i2π(ν_r − ν_p) + π(κ_int − κ_ext)] / [i2π(ν_r − ν_p) + π κ_tot],
/// the ratio a_out / a_in for a_out = a_in − i sqrt(2π κ_ext) α. `shift` offsets ν_r.
Complex reflection_coefficient(const ResonatorParams& res, double probe_freq, double shift = 0.0);

std::vector<Complex> reflection_spectrum(const ResonatorParams& res,
                                         const std::vector<double>& probe_freqs, double shift = 0.0);

/// arg() of each sample with 2π jumps removed.
std::vector<double> unwrapped_phase(const std::vector<Complex>& values);

/// Columns freq_hz, re_s11, im_s11.
void write_spectrum_csv(std::ostream& out, const std::vector<double>& freqs,
                        const std::vector<Complex>& s11);

struct HeterodyneConfig {
  double intermediate_frequency = 250e6;
  double sample_rate = 2e9;
  double lp_filter_cutoff = 100e6;
  double integration_window = 400e-9;
  int filter_taps = 0;  // odd; 0 picks a length from sample_rate / cutoff

  /// Throws ParameterError if the IF or its 2·IF mixing image cannot be separated.
  void validate() const;
  int taps() const;
};

struct DetectorNoise {
  double noise_temperature = 6.0;  // K, referred to the amplifier input
  double system_gain = 1.0;        // power gain
  std::uint64_t rng_seed = 1;
  double signal_frequency = 5.07e9;
  bool enabled = true;

  /// Added noise photons k_B T / (h f).
  double added_photons() const;
  void validate() const;
};

struct IqTrace {
  std::vector<double> times;
  std::vector<double> i_vals;
  std::vector<double> q_vals;

  std::size_t size() const { return times.size(); }
  Complex at(std::size_t k) const { return {i_vals[k], q_vals[k]}; }
};

/// Columns time_s, I, Q.
void write_iq_csv(std::ostream& out, const IqTrace& trace);

struct RawWaveform {
  std::vector<double> times;
  std::vector<double> volts;
};

/// v(t_k) = sqrt(G) [sqrt(2) Re(a_out(t_k) e^{−i2π f_IF t_k}) + n_k] at the ADC rate,
/// averaged over `shots` records. Each shot draws white noise of variance n_add f_s / 2
/// from its own seed, so the average is independent of the thread count.
RawWaveform synthesize_if_waveform(const CavityResponse& response, const HeterodyneConfig& cfg,
                                   const DetectorNoise& noise, int shots = 1);

/// Mixes with sqrt(2) e^{+i2π f_IF t}, low-pass filters, and removes the gain.
IqTrace demodulate(const RawWaveform& raw, const HeterodyneConfig& cfg, double system_gain);

/// Zero-phase Blackman windowed-sinc FIR; weights renormalized at the edges.
std::vector<double> lowpass_filter(const std::vector<double>& x, double cutoff, double sample_rate,
                                   int taps);

/// Full chain: IF synthesis, shot averaging, down-conversion and filtering.
IqTrace synthesize_readout_waveform(const CavityResponse& response, const HeterodyneConfig& cfg,
                                    const DetectorNoise& noise, int shots = 1);

IqTrace rotate_trace(const IqTrace& trace, double theta);

struct PhaseReference {
  double theta = 0.0;  // applied as (I + iQ) e^{iθ}
  IqTrace ground;
  IqTrace excited;
};

/// Rotation that puts the integrated excited − ground difference on +Q.
PhaseReference rotate_reference_phase(const IqTrace& ground, const IqTrace& excited);

enum class IntegrationWeights { Matched, Flat };

struct PopulationEstimate {
  double value = 0.0;  // clipped to [0, 1]
  double raw = 0.0;
};

/// Matched: ∫w (Q − Q_g) / ∫w (Q_e − Q_g) with w = Q_e − Q_g over the window.
/// Flat: ∫(Q − Q_g) / ∫(Q_e − Q_g). Traces are expected in the rotated frame.
PopulationEstimate estimate_population(const IqTrace& trace, const IqTrace& ground,
                                       const IqTrace& excited, const ReadoutWindow& window,
                                       IntegrationWeights weights = IntegrationWeights::Matched);

}  // namespace cqed
