#include "cqed/readout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

#include "cqed/noise.hpp"

namespace cqed {

double dressed_resonance_shift(QubitState state, double chi) {
  switch (state) {
    case QubitState::Ground: return -chi;
    case QubitState::Excited: return chi;
    case QubitState::Mixed: return 0.0;
  }
  return 0.0;
}

Complex CavityResponse::output(std::size_t k) const {
  return a_in[k] - Complex(0.0, std::sqrt(kTwoPi * kappa_ext)) * alpha[k];
}

CavityResponse mix_responses(const CavityResponse& ground, const CavityResponse& excited,
                             double p) {
  if (ground.times.size() != excited.times.size()) {
    throw DimensionError("mix_responses: traces have different lengths");
  }
  if (p < 0.0 || p > 1.0) throw ParameterError("mix_responses: fraction must lie in [0, 1]");
  CavityResponse out = ground;
  for (std::size_t k = 0; k < out.alpha.size(); ++k) {
    out.alpha[k] = (1.0 - p) * ground.alpha[k] + p * excited.alpha[k];
    out.a_in[k] = (1.0 - p) * ground.a_in[k] + p * excited.a_in[k];
  }
  return out;
}

Complex reflection_coefficient(const ResonatorParams& res, double probe_freq, double shift) {
  res.validate();
  const double d = kTwoPi * (res.bare_frequency_nu_r + shift - probe_freq);
  return Complex(kPi * (res.kappa_int - res.kappa_ext), d) / Complex(kPi * res.kappa_tot(), d);
}

std::vector<Complex> reflection_spectrum(const ResonatorParams& res,
                                         const std::vector<double>& probe_freqs, double shift) {
  std::vector<Complex> out;
  out.reserve(probe_freqs.size());
  for (double f : probe_freqs) out.push_back(reflection_coefficient(res, f, shift));
  return out;
}

std::vector<double> unwrapped_phase(const std::vector<Complex>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  double offset = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double p = std::arg(values[k]);
    if (k > 0) {
      const double jump = p + offset - out.back();
      offset -= kTwoPi * std::round(jump / kTwoPi);
    }
    out.push_back(p + offset);
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const std::vector<double>& freqs,
                        const std::vector<Complex>& s11) {
  if (freqs.size() != s11.size()) throw DimensionError("write_spectrum_csv: length mismatch");
  out << "freq_hz,re_s11,im_s11\n";
  char line[128];
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", freqs[k], s11[k].real(), s11[k].imag());
    out << line;
  }
}

void HeterodyneConfig::validate() const {
  if (!(sample_rate > 0.0)) throw ParameterError("heterodyne: sample_rate must be > 0");
  if (!(intermediate_frequency > 0.0) || intermediate_frequency >= 0.5 * sample_rate) {
    throw ParameterError("heterodyne: intermediate frequency must lie in (0, sample_rate/2)");
  }
  if (!(lp_filter_cutoff > 0.0) || lp_filter_cutoff >= intermediate_frequency) {
    throw ParameterError("heterodyne: low-pass cutoff must lie in (0, IF)");
  }
  // The 2·IF product of the down-conversion, folded into the first Nyquist zone.
  const double image = std::abs(2.0 * intermediate_frequency -
                                sample_rate * std::round(2.0 * intermediate_frequency / sample_rate));
  if (image <= lp_filter_cutoff) {
    throw ParameterError("heterodyne: 2*IF image aliases into the low-pass band");
  }
  if (!(integration_window > 0.0)) throw ParameterError("heterodyne: integration window must be > 0");
  if (filter_taps < 0 || (filter_taps > 0 && filter_taps % 2 == 0)) {
    throw ParameterError("heterodyne: filter_taps must be odd");
  }
}

int HeterodyneConfig::taps() const {
  if (filter_taps > 0) return filter_taps;
  return 2 * static_cast<int>(std::ceil(2.0 * sample_rate / lp_filter_cutoff)) + 1;
}

double DetectorNoise::added_photons() const {
  return kBoltzmann * noise_temperature / (kPlanck * signal_frequency);
}

void DetectorNoise::validate() const {
  if (noise_temperature < 0.0) throw ParameterError("detector noise: temperature must be >= 0");
  if (!(system_gain > 0.0)) throw ParameterError("detector noise: gain must be > 0");
  if (!(signal_frequency > 0.0)) throw ParameterError("detector noise: signal frequency must be > 0");
}

void write_iq_csv(std::ostream& out, const IqTrace& trace) {
  out << "time_s,I,Q\n";
  char line[128];
  for (std::size_t k = 0; k < trace.size(); ++k) {
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", trace.times[k], trace.i_vals[k],
                  trace.q_vals[k]);
    out << line;
  }
}

RawWaveform synthesize_if_waveform(const CavityResponse& response, const HeterodyneConfig& cfg,
                                   const DetectorNoise& noise, int shots) {
  cfg.validate();
  noise.validate();
  if (shots < 1) throw ParameterError("readout waveform: shots must be >= 1");
  if (response.times.size() < 2) throw ParameterError("readout waveform: response too short");
  const double t0 = response.times.front();
  const double t1 = response.times.back();
  const double span = response.times[1] - response.times[0];
  // Linear interpolation of a_out needs several points per IF period.
  if (span > 0.5 / cfg.intermediate_frequency) {
    throw ParameterError("readout waveform: response grid coarser than 1/(2 IF)");
  }
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * cfg.sample_rate + 1e-9)) + 1;
  RawWaveform raw;
  raw.times.resize(n);
  raw.volts.resize(n);
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) / cfg.sample_rate;
    while (j + 2 < response.times.size() && response.times[j + 1] <= t) ++j;
    const double w =
        std::clamp((t - response.times[j]) / (response.times[j + 1] - response.times[j]), 0.0, 1.0);
    const Complex a_out = (1.0 - w) * response.output(j) + w * response.output(j + 1);
    raw.times[k] = t;
    raw.volts[k] =
        std::sqrt(2.0) * (a_out * std::polar(1.0, -kTwoPi * cfg.intermediate_frequency * t)).real();
  }

  const double sigma = noise.enabled ? std::sqrt(noise.added_photons() * cfg.sample_rate / 2.0) : 0.0;
  if (sigma > 0.0) {
    // Fixed blocks of shots are summed independently and combined in block order.
    constexpr int kBlock = 64;
    const int blocks = (shots + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(blocks));
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(blocks));
    auto work = [&](unsigned w) {
      for (int b = static_cast<int>(w); b < blocks; b += static_cast<int>(workers)) {
        auto& acc = partial[static_cast<std::size_t>(b)];
        acc.assign(n, 0.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int s = b * kBlock; s < std::min(shots, (b + 1) * kBlock); ++s) {
          std::mt19937_64 rng(realization_seed(noise.rng_seed, static_cast<std::uint64_t>(s)));
          normal.reset();
          for (std::size_t k = 0; k < n; ++k) acc[k] += normal(rng);
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& th : pool) th.join();
    for (const auto& acc : partial) {
      for (std::size_t k = 0; k < n; ++k) raw.volts[k] += sigma * acc[k] / shots;
    }
  }
  const double gain = std::sqrt(noise.system_gain);
  for (double& v : raw.volts) v *= gain;
  return raw;
}

std::vector<double> lowpass_filter(const std::vector<double>& x, double cutoff, double sample_rate,
                                   int taps) {
  if (taps < 1 || taps % 2 == 0) throw ParameterError("lowpass_filter: taps must be odd");
  const int half = taps / 2;
  const double fc = cutoff / sample_rate;
  std::vector<double> h(static_cast<std::size_t>(taps));
  for (int k = -half; k <= half; ++k) {
    const double sinc = k == 0 ? 2.0 * fc : std::sin(kTwoPi * fc * k) / (kPi * k);
    const double m = static_cast<double>(k + half) / std::max(1, taps - 1);
    const double window = taps == 1 ? 1.0 : 0.42 - 0.5 * std::cos(kTwoPi * m) + 0.08 * std::cos(2.0 * kTwoPi * m);
    h[static_cast<std::size_t>(k + half)] = sinc * window;
  }
  double total = 0.0;
  for (double v : h) total += v;
  for (double& v : h) v /= total;

  const auto n = static_cast<long>(x.size());
  std::vector<double> y(x.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0, norm = 0.0;
    const long lo = std::max(-static_cast<long>(half), -i);
    const long hi = std::min(static_cast<long>(half), n - 1 - i);
    for (long k = lo; k <= hi; ++k) {
      const double w = h[static_cast<std::size_t>(k + half)];
      acc += w * x[static_cast<std::size_t>(i + k)];
      norm += w;
    }
    y[static_cast<std::size_t>(i)] = acc / norm;
  }
  return y;
}

IqTrace demodulate(const RawWaveform& raw, const HeterodyneConfig& cfg, double system_gain) {
  cfg.validate();
  if (!(system_gain > 0.0)) throw ParameterError("demodulate: gain must be > 0");
  const std::size_t n = raw.volts.size();
  std::vector<double> re(n), im(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex m = std::sqrt(2.0) * raw.volts[k] *
                      std::polar(1.0, kTwoPi * cfg.intermediate_frequency * raw.times[k]);
    re[k] = m.real();
    im[k] = m.imag();
  }
  const int taps = cfg.taps();
  IqTrace out;
  out.times = raw.times;
  out.i_vals = lowpass_filter(re, cfg.lp_filter_cutoff, cfg.sample_rate, taps);
  out.q_vals = lowpass_filter(im, cfg.lp_filter_cutoff, cfg.sample_rate, taps);
  const double scale = 1.0 / std::sqrt(system_gain);
  for (std::size_t k = 0; k < n; ++k) {
    out.i_vals[k] *= scale;
    out.q_vals[k] *= scale;
  }
  return out;
}

IqTrace synthesize_readout_waveform(const CavityResponse& response, const HeterodyneConfig& cfg,
                                    const DetectorNoise& noise, int shots) {
  return demodulate(synthesize_if_waveform(response, cfg, noise, shots), cfg, noise.system_gain);
}

IqTrace rotate_trace(const IqTrace& trace, double theta) {
  IqTrace out = trace;
  const Complex r = std::polar(1.0, theta);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const Complex z = trace.at(k) * r;
    out.i_vals[k] = z.real();
    out.q_vals[k] = z.imag();
  }
  return out;
}

PhaseReference rotate_reference_phase(const IqTrace& ground, const IqTrace& excited) {
  if (ground.size() != excited.size()) throw DimensionError("rotate_reference_phase: length mismatch");
  Complex diff(0.0);
  for (std::size_t k = 0; k < ground.size(); ++k) diff += excited.at(k) - ground.at(k);
  if (std::abs(diff) == 0.0) {
    throw ParameterError("rotate_reference_phase: ground and excited references coincide");
  }
  PhaseReference out;
  out.theta = 0.5 * kPi - std::arg(diff);
  out.ground = rotate_trace(ground, out.theta);
  out.excited = rotate_trace(excited, out.theta);
  return out;
}

PopulationEstimate estimate_population(const IqTrace& trace, const IqTrace& ground,
                                       const IqTrace& excited, const ReadoutWindow& window,
                                       IntegrationWeights weights) {
  if (trace.size() != ground.size() || trace.size() != excited.size()) {
    throw DimensionError("estimate_population: traces have different lengths");
  }
  const double t_end = window.start + window.duration;
  double num = 0.0, den = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.times[k];
    if (t < window.start || t > t_end) continue;
    const double ref = excited.q_vals[k] - ground.q_vals[k];
    const double sig = trace.q_vals[k] - ground.q_vals[k];
    const double w = weights == IntegrationWeights::Matched ? ref : 1.0;
    num += w * sig;
    den += w * ref;
    ++used;
  }
  if (used == 0) throw ParameterError("estimate_population: readout window contains no samples");
  if (den == 0.0) throw ParameterError("estimate_population: references coincide");
  const double raw = num / den;
  return {std::clamp(raw, 0.0, 1.0), raw};
}

}  // namespace cqed
