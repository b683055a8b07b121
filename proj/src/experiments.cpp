#include "cqed/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/liouvillian.hpp"

namespace cqed {

namespace {

constexpr int kNoStore = 1 << 30;

struct DeviceView {
  double nu_r = 0.0;
  double nu_q = 0.0;
  double g = 0.0;
  double delta = 0.0;  // ν_q − ν_r
  double chi = 0.0;
  ResonatorParams resonator;
};

DeviceView view(const DeviceParams& d) {
  DeviceView v;
  v.nu_r = effective_resonator_frequency(d);
  v.nu_q = qubit_frequency(d.dqd);
  v.g = coupling_at_detuning(d.coupling, d.dqd);
  v.delta = v.nu_q - v.nu_r;
  v.chi = v.delta != 0.0 ? dispersive_shift(v.g, v.delta) : 0.0;
  v.resonator = d.resonator;
  v.resonator.bare_frequency_nu_r = v.nu_r;
  return v;
}

constexpr const char* kTruncationPrefix = "Fock truncation";

void merge_warnings(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

void add_fit(ExperimentResult& r, const std::string& name, const FitResult& fit) {
  r.fits[name] = fit;
  if (!fit.converged) r.warnings.push_back("fit '" + name + "' did not converge");
}

// Control + readout for every delay or amplitude of a sweep.
struct SweepPoint {
  double x = 0.0;
  double pe_true = 0.0;
  double pe_estimate = 0.0;
  double pe_raw = 0.0;
  TrajectoryDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

using SequenceBuilder = std::function<PulseSequence(double)>;

std::vector<SweepPoint> run_sequence_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                                           const SequenceBuilder& build, const ControlModel& control,
                                           const ReadoutModel& readout) {
  const auto xs = cfg.sweep.values();
  std::vector<SweepPoint> points(xs.size());
  const bool monte_carlo = cfg.ou_noise.sigma_delta > 0.0;
  if (monte_carlo) {
    // Realizations are spread over threads inside each point; the same seed at every
    // point gives common random numbers along the sweep.
    MonteCarloOptions mc;
    mc.seed = seed;
    mc.dt = cfg.simulation.monte_carlo_dt;
    mc.qubit_frequency = control.frame_frequency;
    mc.threads = cfg.simulation.threads;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto res = monte_carlo_dephasing(build(xs[i]), cfg.ou_noise, cfg.device.decoherence, mc);
      points[i].x = xs[i];
      points[i].pe_true = res.excited_population;
      TrajectoryDiagnostics d;
      const Eigen::Matrix2cd m = res.mean_state;
      d.max_trace_error = trace_error(OperatorMatrix(m));
      d.max_hermiticity_error = hermiticity_error(OperatorMatrix(m));
      d.min_eigenvalue = min_eigenvalue(OperatorMatrix(m));
      points[i].diagnostics = d;
    }
  } else {
    points = parallel_map<SweepPoint>(xs.size(), cfg.simulation.threads, [&](std::size_t i) {
      SweepPoint p;
      p.x = xs[i];
      const auto out = simulate_control(control, build(xs[i]));
      p.pe_true = out.excited_population;
      p.diagnostics = out.diagnostics;
      p.warnings = out.warnings;
      return p;
    });
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto est = read_population(readout, std::clamp(points[i].pe_true, 0.0, 1.0),
                                     realization_seed(seed ^ 0x5eedULL, i));
    points[i].pe_estimate = est.value;
    points[i].pe_raw = est.raw;
  }
  return points;
}

void collect(ExperimentResult& r, const std::vector<SweepPoint>& points, const std::string& file,
             const std::string& x_name) {
  CsvTable t;
  t.header = {x_name, "pe_simulated", "pe_estimated", "pe_estimated_raw"};
  for (const auto& p : points) {
    t.rows.push_back({p.x, p.pe_true, p.pe_estimate, p.pe_raw});
    r.diagnostics.merge(p.diagnostics);
    std::vector<std::string> kept;
    for (const auto& w : p.warnings) {
      if (w.rfind(kTruncationPrefix, 0) != 0) kept.push_back(w);
    }
    merge_warnings(r.warnings, kept);
  }
  // One truncation warning for the whole sweep, carrying the worst point.
  if (r.diagnostics.max_top_fock_population > kTruncationWarningLevel) {
    std::ostringstream msg;
    msg << kTruncationPrefix << ": population in the top two levels reached "
        << r.diagnostics.max_top_fock_population << " over the sweep; increase fock_cutoff";
    r.warnings.push_back(msg.str());
  }
  r.tables[file] = std::move(t);
}

std::pair<std::vector<double>, std::vector<double>> xy(const std::vector<SweepPoint>& points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.x);
    y.push_back(p.pe_raw);
  }
  return {x, y};
}

ExperimentResult run_time_domain(const ExperimentConfig& cfg, std::uint64_t seed) {
  ExperimentResult r;
  r.kind = cfg.kind;
  const ControlModel control = make_control_model(cfg.device, cfg.simulation);
  const SequenceConfig seq_cfg = make_sequence_config(control, cfg.pulse);
  const ReadoutModel readout = make_readout_model(cfg.device, cfg.readout, cfg.detector_noise,
                                                  cfg.pulse.readout_duration, cfg.simulation.readout_dt);
  r.quantities["dressed_qubit_frequency"] = control.frame_frequency;
  r.quantities["pi_amplitude"] = seq_cfg.pi_amplitude;
  r.quantities["readout_rotation"] = readout.theta;

  switch (cfg.kind) {
    case ExperimentKind::Rabi: {
      const auto points = run_sequence_sweep(
          cfg, seed, [&](double a) { return build_rabi_sequence(a, seq_cfg.sigma, seq_cfg); }, control,
          readout);
      collect(r, points, "rabi.csv", "amplitude_hz");
      const auto [x, y] = xy(points);
      const FitResult fit = fit_rabi_sweep(x, y);
      add_fit(r, "rabi", fit);
      const double k = fit.param("angle_per_amplitude");
      r.quantities["angle_per_amplitude"] = k;
      r.quantities["expected_angle_per_amplitude"] =
          rabi_angle(GaussianPulse{1.0, 0.0, seq_cfg.sigma, seq_cfg.truncation_k});
      if (k > 0.0) r.quantities["fitted_pi_amplitude"] = kPi / k;
      break;
    }
    case ExperimentKind::Ramsey: {
      const auto points = run_sequence_sweep(
          cfg, seed, [&](double tau) { return build_ramsey_sequence(tau, cfg.drive_detuning, seq_cfg); },
          control, readout);
      collect(r, points, "ramsey.csv", "delay_s");
      const auto [x, y] = xy(points);
      const FitResult fit = fit_damped_cosine(x, y);
      add_fit(r, "ramsey", fit);
      r.quantities["frequency"] = fit.param("frequency");
      r.quantities["t2_ramsey"] = fit.param("decay_time");
      break;
    }
    case ExperimentKind::T1: {
      const auto points = run_sequence_sweep(
          cfg, seed, [&](double tau) { return build_t1_sequence(tau, seq_cfg); }, control, readout);
      collect(r, points, "t1.csv", "delay_s");
      const auto [x, y] = xy(points);
      const FitResult fit = fit_exponential_decay(x, y);
      add_fit(r, "t1", fit);
      r.quantities["t1"] = fit.param("decay_time");
      break;
    }
    case ExperimentKind::Echo: {
      const auto points = run_sequence_sweep(
          cfg, seed, [&](double tau) { return build_echo_sequence(tau, seq_cfg); }, control, readout);
      collect(r, points, "echo.csv", "delay_s");
      const auto [x, y] = xy(points);
      const FitResult fit = fit_exponential_decay(x, y);
      add_fit(r, "echo", fit);
      r.quantities["t2_echo"] = fit.param("decay_time");
      break;
    }
    default:
      throw ParameterError("run_time_domain: not a pulsed experiment");
  }
  return r;
}

ExperimentResult run_spectroscopy(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = cfg.kind;
  const auto& dec = cfg.device.decoherence;
  const auto detunings = cfg.sweep.values();
  const auto channels = qubit_channels(dec);
  const Eigen::Matrix2cd sz = qubit::sigma_z(), sx = qubit::sigma_x();

  CsvTable curves{{"power_w", "detuning_hz", "pe_simulated", "pe_analytic"}, {}};
  CsvTable widths{{"power_w", "rabi_hz", "saturation", "hwhm_hz", "hwhm_analytic_hz"}, {}};
  std::vector<double> powers, hwhm;
  double max_pe = 0.0;
  for (std::size_t k = 0; k < cfg.spectroscopy.powers.size(); ++k) {
    const double power = cfg.spectroscopy.powers[k];
    const double rabi = cfg.spectroscopy.rabi_per_sqrt_watt * std::sqrt(power);
    const auto analytic = steady_state_spectroscopy(detunings, rabi, dec);
    std::vector<double> simulated;
    for (std::size_t i = 0; i < detunings.size(); ++i) {
      // Qubit-only steady state in the frame of the drive.
      const Eigen::Matrix2cd h = 0.5 * detunings[i] * sz + 0.5 * rabi * sx;
      const OperatorMatrix rho = steady_state(OperatorMatrix(h), [&] {
        std::vector<CollapseChannel> c;
        for (const auto& ch : channels) c.push_back({OperatorMatrix(ch.op), ch.rate});
        return c;
      }());
      simulated.push_back(rho(1, 1).real());
      max_pe = std::max(max_pe, rho(1, 1).real());
      curves.rows.push_back({power, detunings[i], rho(1, 1).real(), analytic[i]});
    }
    const FitResult line = fit_lorentzian(detunings, simulated);
    add_fit(r, "lorentzian_" + std::to_string(k), line);
    const double s = rabi * rabi / (dec.gamma1 * dec.gamma2());
    widths.rows.push_back({power, rabi, s, line.param("hwhm"), spectroscopy_hwhm(rabi, dec)});
    powers.push_back(power);
    hwhm.push_back(line.param("hwhm"));
  }
  const FitResult extrap = extrapolate_zero_power_linewidth(powers, hwhm, cfg.spectroscopy.mode);
  add_fit(r, "linewidth_extrapolation", extrap);
  r.tables["spectroscopy.csv"] = std::move(curves);
  r.tables["linewidth.csv"] = std::move(widths);
  r.quantities["gamma2_over_2pi"] = extrap.param("gamma2_over_2pi");
  r.quantities["t2"] = extrap.param("t2");
  r.quantities["max_pe"] = max_pe;
  return r;
}

ExperimentResult run_stark(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = cfg.kind;
  const DeviceView v = view(cfg.device);
  if (v.resonator.kappa_ext <= 0.0) throw ParameterError("stark: kappa_ext must be > 0 to drive the resonator");
  // Cavity drive on the ground-state dressed resonance; this is also the frame.
  const double nu_drive = v.nu_r + dressed_resonance_shift(QubitState::Ground, v.chi);
  const double nu_q_dressed = dressed_qubit_frequency(cfg.device, HilbertSpec{cfg.simulation.fock_cutoff});
  const auto powers = cfg.sweep.values();
  const int probe_points = cfg.stark.probe_points;

  struct StarkPoint {
    double power, photons_target, photons, qubit_frequency, hwhm, top_fock;
    int fock;
    TrajectoryDiagnostics diag;
  };
  const auto points = parallel_map<StarkPoint>(powers.size(), cfg.simulation.threads, [&](std::size_t i) {
    StarkPoint p{};
    p.power = powers[i];
    p.photons_target = cfg.stark.photons_per_watt * p.power;
    // Coherent-state tail: keep Poisson weight beyond the cutoff negligible.
    const double n = p.photons_target;
    p.fock = std::max(cfg.simulation.fock_cutoff, static_cast<int>(std::ceil(n + 4.0 * std::sqrt(n) + 4.0)));
    const HilbertSpec spec{p.fock};
    const Complex a_in = input_amplitude_for_photons(v.resonator, n);
    const Complex eps = cavity_drive_from_input(a_in, v.resonator.kappa_ext);
    const auto h = build_rotating_frame_hamiltonian(
        cfg.device.dqd, v.resonator, cfg.device.coupling, nu_drive, nullptr, [eps](double) { return eps; },
        spec);
    const OperatorMatrix h0 = h.at(0.0);
    const auto channels = standard_channels(spec, v.resonator, cfg.device.decoherence);
    const OperatorMatrix rho = steady_state(h0, channels);
    const OperatorMatrix num = cavity_operator(number_operator<double>(p.fock), spec);
    p.photons = (rho * num).trace().real();
    p.diag.max_trace_error = trace_error(rho);
    p.diag.max_hermiticity_error = hermiticity_error(rho);
    p.diag.min_eigenvalue = min_eigenvalue(rho);
    const int N = p.fock;
    double top = 0.0;
    for (int q = 0; q < 2; ++q) top += rho(q * N + N - 1, q * N + N - 1).real() + rho(q * N + N - 2, q * N + N - 2).real();
    p.top_fock = top;
    p.diag.max_top_fock_population = top;

    // Weak qubit probe: linear response of σ− to a σ+ perturbation.
    const ResolventSpectrum spectrum(liouvillian(h0, channels), rho, qubit_operator(qubit::sigma_minus(), spec),
                                     qubit_operator(qubit::sigma_plus(), spec));
    const double center0 = nu_q_dressed - nu_drive + 2.0 * v.chi * n;
    std::vector<double> f(static_cast<std::size_t>(probe_points)), absorption;
    for (int k = 0; k < probe_points; ++k) {
      f[static_cast<std::size_t>(k)] =
          center0 - cfg.stark.probe_span + 2.0 * cfg.stark.probe_span * k / (probe_points - 1);
    }
    for (const auto& s : spectrum.sweep(f)) absorption.push_back(s.real());
    const FitResult line = fit_lorentzian(f, absorption);
    p.qubit_frequency = nu_drive + line.param("center");
    p.hwhm = line.param("hwhm");
    return p;
  });

  CsvTable t{{"power_w", "photons_target", "photons_simulated", "qubit_frequency_hz", "hwhm_hz", "fock_cutoff"}, {}};
  std::vector<double> p_axis, n_axis, f_axis;
  for (const auto& p : points) {
    t.rows.push_back({p.power, p.photons_target, p.photons, p.qubit_frequency, p.hwhm, static_cast<double>(p.fock)});
    r.diagnostics.merge(p.diag);
    if (p.top_fock > kTruncationWarningLevel) {
      r.warnings.push_back("Fock truncation: top-level population " + std::to_string(p.top_fock) + " at power " +
                           std::to_string(p.power) + " W");
    }
    p_axis.push_back(p.power);
    n_axis.push_back(p.photons);
    f_axis.push_back(p.qubit_frequency);
  }
  r.tables["stark.csv"] = std::move(t);
  const FitResult cal = calibrate_photon_number(p_axis, f_axis, v.g, v.delta);
  add_fit(r, "photon_calibration", cal);
  const FitResult per_photon = fit_linear(n_axis, f_axis);
  add_fit(r, "shift_per_photon", per_photon);
  r.quantities["photons_per_watt"] = cal.param("photons_per_watt");
  r.quantities["shift_per_photon"] = per_photon.param("slope");
  r.quantities["expected_shift_per_photon"] = 2.0 * v.g * v.g / v.delta;
  r.quantities["zero_photon_frequency"] = per_photon.param("intercept");
  return r;
}

ExperimentResult run_readout_trace(const ExperimentConfig& cfg, std::uint64_t seed) {
  ExperimentResult r;
  r.kind = cfg.kind;
  const ReadoutModel m = make_readout_model(cfg.device, cfg.readout, cfg.detector_noise,
                                            cfg.pulse.readout_duration, cfg.simulation.readout_dt);
  const IqTrace mixed = readout_trace(m, 0.5, realization_seed(seed, 0));
  const IqTrace ground = readout_trace(m, 0.0, realization_seed(seed, 1));
  const IqTrace excited = readout_trace(m, 1.0, realization_seed(seed, 2));
  CsvTable t{{"time_s", "I_ground", "Q_ground", "I_excited", "Q_excited", "I_mixed", "Q_mixed"}, {}};
  for (std::size_t k = 0; k < mixed.size(); ++k) {
    t.rows.push_back({mixed.times[k], ground.i_vals[k], ground.q_vals[k], excited.i_vals[k], excited.q_vals[k],
                      mixed.i_vals[k], mixed.q_vals[k]});
  }
  r.tables["readout_trace.csv"] = std::move(t);

  // Ring-up of the Q separation between the references.
  std::vector<double> x, y;
  for (std::size_t k = 0; k < m.reference_ground.size(); ++k) {
    x.push_back(m.reference_ground.times[k]);
    y.push_back(m.reference_excited.q_vals[k] - m.reference_ground.q_vals[k]);
  }
  add_fit(r, "ring_up", fit_exponential_decay(x, y));
  const auto matched = estimate_population(mixed, m.reference_ground, m.reference_excited, m.window,
                                           IntegrationWeights::Matched);
  const auto flat = estimate_population(mixed, m.reference_ground, m.reference_excited, m.window,
                                        IntegrationWeights::Flat);
  const DeviceView v = view(cfg.device);
  r.quantities["mixed_population_matched"] = matched.raw;
  r.quantities["mixed_population_flat"] = flat.raw;
  r.quantities["rotation_angle"] = m.theta;
  r.quantities["chi"] = v.chi;
  r.quantities["dispersive_phase_shift"] = dispersive_phase_shift(v.g, v.resonator.kappa_tot(), v.delta);
  r.quantities["ring_up_time"] = r.fits["ring_up"].param("decay_time");
  return r;
}

ExperimentResult run_s11(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = cfg.kind;
  const DeviceView v = view(cfg.device);
  const auto freqs = cfg.sweep.values();
  const auto s11 = reflection_spectrum(v.resonator, freqs);
  const auto phase = unwrapped_phase(s11);
  CsvTable t{{"freq_hz", "re_s11", "im_s11"}, {}};
  std::vector<double> power;
  double max_abs = 0.0;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    t.rows.push_back({freqs[k], s11[k].real(), s11[k].imag()});
    power.push_back(std::norm(s11[k]));
    max_abs = std::max(max_abs, std::abs(s11[k]));
  }
  r.tables["s11.csv"] = std::move(t);
  const FitResult line = fit_lorentzian(freqs, power);
  add_fit(r, "reflectance", line);
  r.quantities["kappa_tot"] = 2.0 * line.param("hwhm");
  r.quantities["resonance_frequency"] = line.param("center");
  r.quantities["phase_winding"] = std::abs(phase.back() - phase.front()) / kTwoPi;
  r.quantities["max_abs_s11"] = max_abs;
  r.quantities["on_resonance_s11"] = reflection_coefficient(v.resonator, v.nu_r).real();
  return r;
}

}  // namespace

ControlModel make_control_model(const DeviceParams& device, const SimulationConfig& simulation) {
  device.validate();
  ControlModel m;
  m.device = device;
  m.resonator = view(device).resonator;
  m.spec = HilbertSpec{simulation.fock_cutoff};
  m.spec.validate();
  m.simulation = simulation;
  m.frame_frequency = dressed_qubit_frequency(device, m.spec);
  m.channels = standard_channels(m.spec, m.resonator, device.decoherence, ChannelOptions{false, true, true});
  return m;
}

SequenceConfig make_sequence_config(const ControlModel& model, const PulseConfig& pulse) {
  SequenceConfig s;
  s.qubit_frequency = model.frame_frequency;
  s.sigma = pulse.sigma;
  s.truncation_k = pulse.truncation_k;
  s.drag_beta = pulse.drag_beta;
  s.readout_duration = pulse.readout_duration;
  s.lead_time = pulse.lead_time;
  if (pulse.pi_amplitude) {
    s.pi_amplitude = *pulse.pi_amplitude;
  } else if (pulse.calibration) {
    s.pi_amplitude = calibrate_pi_amplitude(pulse.sigma, *pulse.calibration, pulse.truncation_k);
  } else {
    s.pi_amplitude = amplitude_for_angle(kPi, pulse.sigma, pulse.truncation_k);
  }
  return s;
}

ControlOutcome simulate_control(const ControlModel& model, const PulseSequence& seq) {
  const double frame = model.frame_frequency;
  const auto h = build_rotating_frame_hamiltonian(
      model.device.dqd, model.resonator, model.device.coupling, frame,
      [&seq, frame](double t) { return seq.drive(t, frame); }, nullptr, model.spec);
  SimulationGrid grid;
  grid.t_start = 0.0;
  grid.t_end = seq.readout_window.start;
  grid.dt = model.simulation.dt;
  grid.method = model.simulation.method;
  grid.tolerance = model.simulation.tolerance;
  grid.store_every = kNoStore;
  ControlOutcome out;
  if (!(grid.t_end > 0.0)) {
    out.excited_population = 0.0;
    return out;
  }
  const auto rho0 = DensityMatrix::pure(basis_state(model.spec, 0, 0));
  const Trajectory traj = evolve(rho0, h, model.channels, grid, pulse_support(seq));
  out.excited_population = traj.qubit_pe.back();
  out.diagnostics = traj.diagnostics;
  out.warnings = traj.warnings;
  return out;
}

double input_amplitude_for_photons(const ResonatorParams& res, double photons) {
  if (!(res.kappa_ext > 0.0)) throw ParameterError("readout: kappa_ext must be > 0 to probe the resonator");
  if (photons < 0.0) throw ParameterError("readout: photon number must be >= 0");
  // |α| = sqrt(2π κ_ext) |a_in| / (π κ_tot) on resonance.
  return std::sqrt(photons) * kPi * res.kappa_tot() / std::sqrt(kTwoPi * res.kappa_ext);
}

ReadoutModel make_readout_model(const DeviceParams& device, const ReadoutConfig& config,
                                const DetectorNoise& noise, double duration, double readout_dt) {
  config.heterodyne.validate();
  const DeviceView v = view(device);
  ReadoutModel m;
  m.config = config;
  m.noise = noise;
  m.chi = v.chi;
  m.probe_frequency = config.probe_frequency.value_or(v.nu_r);
  m.probe_amplitude = input_amplitude_for_photons(v.resonator, config.probe_photons);
  SimulationGrid grid;
  grid.t_start = 0.0;
  grid.t_end = duration;
  grid.dt = readout_dt;
  m.ground = semiclassical_cavity_response(QubitState::Ground, v.resonator, v.chi, m.probe_frequency,
                                           m.probe_amplitude, grid);
  m.excited = semiclassical_cavity_response(QubitState::Excited, v.resonator, v.chi, m.probe_frequency,
                                            m.probe_amplitude, grid);
  DetectorNoise quiet = noise;
  quiet.enabled = false;
  const IqTrace g = synthesize_readout_waveform(m.ground, config.heterodyne, quiet);
  const IqTrace e = synthesize_readout_waveform(m.excited, config.heterodyne, quiet);
  const PhaseReference ref = rotate_reference_phase(g, e);
  m.theta = ref.theta;
  m.reference_ground = ref.ground;
  m.reference_excited = ref.excited;
  m.window = ReadoutWindow{0.0, std::min(config.heterodyne.integration_window, duration)};
  return m;
}

IqTrace readout_trace(const ReadoutModel& model, double p, std::uint64_t seed) {
  DetectorNoise noise = model.noise;
  noise.rng_seed = seed;
  const CavityResponse mixed = mix_responses(model.ground, model.excited, p);
  return rotate_trace(synthesize_readout_waveform(mixed, model.config.heterodyne, noise, model.config.shots),
                      model.theta);
}

PopulationEstimate read_population(const ReadoutModel& model, double p, std::uint64_t seed) {
  return estimate_population(readout_trace(model, p, seed), model.reference_ground, model.reference_excited,
                             model.window, model.config.weights);
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  ExperimentResult r;
  switch (config.kind) {
    case ExperimentKind::Spectroscopy: r = run_spectroscopy(config); break;
    case ExperimentKind::Stark: r = run_stark(config); break;
    case ExperimentKind::Rabi:
    case ExperimentKind::Ramsey:
    case ExperimentKind::T1:
    case ExperimentKind::Echo: r = run_time_domain(config, seed); break;
    case ExperimentKind::ReadoutTrace: r = run_readout_trace(config, seed); break;
    case ExperimentKind::S11Sweep: r = run_s11(config); break;
  }
  r.kind = config.kind;
  return r;
}

}  // namespace cqed
