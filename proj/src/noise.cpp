#include "cqed/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "cqed/dynamics.hpp"

namespace cqed {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Trapezoidal ∫δ dt over [t0, t1] on samples spaced dt from zero.
double integrate_samples(const std::vector<double>& delta, double dt, double t0, double t1) {
  auto value = [&](double t) {
    const double x = t / dt;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(x), delta.size() - 2);
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * delta[k] + w * delta[k + 1];
  };
  const auto k0 = static_cast<std::size_t>(std::ceil(t0 / dt));
  const auto k1 = static_cast<std::size_t>(std::floor(t1 / dt));
  if (k1 < k0) return 0.5 * (value(t0) + value(t1)) * (t1 - t0);
  double sum = 0.5 * (value(t0) + delta[k0]) * (static_cast<double>(k0) * dt - t0);
  for (std::size_t k = k0; k < k1; ++k) sum += 0.5 * (delta[k] + delta[k + 1]) * dt;
  sum += 0.5 * (delta[k1] + value(t1)) * (t1 - static_cast<double>(k1) * dt);
  return sum;
}

struct Stage {
  double start;
  double end;
  bool pulse;
};

std::vector<Stage> stages(const PulseSequence& seq, double t_end) {
  std::vector<Interval> support = pulse_support(seq);
  std::sort(support.begin(), support.end(), [](auto& a, auto& b) { return a.start < b.start; });
  std::vector<Stage> out;
  double t = 0.0;
  for (const auto& s : support) {
    if (s.start > t) out.push_back({t, s.start, false});
    out.push_back({s.start, s.end, true});
    t = s.end;
  }
  if (t_end > t) out.push_back({t, t_end, false});
  return out;
}

Eigen::Matrix2cd run_realization(const PulseSequence& seq, const std::vector<Stage>& plan,
                                 const std::vector<double>& delta, double noise_dt,
                                 const DecoherenceParams& dec, double frame, double dt) {
  const auto channels = qubit_channels(dec);
  const Eigen::Matrix2cd sz = qubit::sigma_z();
  const Eigen::Matrix2cd sp = qubit::sigma_plus();
  const Eigen::Matrix2cd sm = qubit::sigma_minus();
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  rho(0, 0) = 1.0;
  auto detuning = [&](double t) {
    if (delta.empty()) return 0.0;
    const double x = t / noise_dt;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(x), delta.size() - 2);
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * delta[k] + w * delta[k + 1];
  };
  for (const auto& st : plan) {
    const double span = st.end - st.start;
    if (span <= 0.0) continue;
    if (st.pulse) {
      TimeDependentOperator<Eigen::Matrix2cd> h;
      h.at = [&](double t) -> Eigen::Matrix2cd {
        const Complex omega = seq.drive(t, frame);
        return (0.5 * detuning(t)) * sz + 0.5 * (std::conj(omega) * sp + omega * sm);
      };
      SimulationGrid grid;
      grid.t_start = st.start;
      grid.t_end = st.end;
      grid.dt = dt;
      grid.store_every = 1 << 30;
      rho = evolve<Eigen::Matrix2cd>(rho, h, channels, grid).final_state;
    } else {
      // Free precession in the frame of ν_q with accumulated noise phase.
      const double phi = kTwoPi * (delta.empty() ? 0.0 : integrate_samples(delta, noise_dt, st.start, st.end));
      const double pe = rho(1, 1).real() * std::exp(-kTwoPi * dec.gamma1 * span);
      const Complex coh = rho(1, 0) * std::exp(-kTwoPi * dec.gamma2() * span) * std::polar(1.0, -phi);
      rho(1, 1) = pe;
      rho(0, 0) = 1.0 - pe;
      rho(1, 0) = coh;
      rho(0, 1) = std::conj(coh);
    }
  }
  return rho;
}

}  // namespace

void OuNoiseModel::validate() const {
  if (sigma_delta < 0.0) throw ParameterError("ou noise: sigma_delta must be >= 0");
  if (!(tau_c > 0.0)) throw ParameterError("ou noise: tau_c must be > 0");
  if (n_realizations < 1) throw ParameterError("ou noise: n_realizations must be >= 1");
}

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::vector<double> sample_ou_detuning(const OuNoiseModel& model, double dt, std::size_t samples,
                                       std::uint64_t seed) {
  model.validate();
  if (!(dt > 0.0)) throw ParameterError("sample_ou_detuning: dt must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double decay = std::exp(-dt / model.tau_c);
  const double kick = model.sigma_delta * std::sqrt(-std::expm1(-2.0 * dt / model.tau_c));
  std::vector<double> out(samples);
  double x = model.sigma_delta * normal(rng);
  for (std::size_t k = 0; k < samples; ++k) {
    out[k] = x;
    x = x * decay + kick * normal(rng);
  }
  return out;
}

MonteCarloResult monte_carlo_dephasing(const PulseSequence& seq, const OuNoiseModel& noise,
                                       const DecoherenceParams& dec,
                                       const MonteCarloOptions& options) {
  noise.validate();
  dec.validate();
  if (!(options.dt > 0.0)) throw ParameterError("monte_carlo_dephasing: dt must be > 0");
  const double frame = options.qubit_frequency > 0.0 ? options.qubit_frequency : seq.reference_frequency;
  const double t_end = seq.readout_window.start;
  const auto plan = stages(seq, t_end);
  const int n = noise.sigma_delta == 0.0 ? 1 : noise.n_realizations;
  const auto samples = static_cast<std::size_t>(std::ceil(t_end / options.dt)) + 2;

  std::vector<Eigen::Matrix2cd> finals(static_cast<std::size_t>(n));
  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  auto work = [&](unsigned w) {
    for (int r = static_cast<int>(w); r < n; r += static_cast<int>(workers)) {
      std::vector<double> delta;
      if (noise.sigma_delta > 0.0) {
        delta = sample_ou_detuning(noise, options.dt, samples,
                                   realization_seed(options.seed, static_cast<std::uint64_t>(r)));
      }
      finals[static_cast<std::size_t>(r)] =
          run_realization(seq, plan, delta, options.dt, dec, frame, options.dt);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();

  MonteCarloResult out;
  out.realizations = n;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& rho : finals) {
    out.mean_state += rho;
    sum += rho(1, 1).real();
    sum_sq += rho(1, 1).real() * rho(1, 1).real();
  }
  out.mean_state /= static_cast<double>(n);
  out.excited_population = sum / n;
  if (n > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
    out.standard_error = std::sqrt(var / n);
  }
  return out;
}

}  // namespace cqed
