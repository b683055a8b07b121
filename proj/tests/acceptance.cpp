// Acceptance suite: one PASS/FAIL line per criterion with its wall-clock runtime.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/config.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/experiments.hpp"
#include "cqed/fitting.hpp"
#include "cqed/liouvillian.hpp"
#include "cqed/noise.hpp"

using namespace cqed;

namespace {

const std::filesystem::path kConfigs = CQED_CONFIG_DIR;

struct Outcome {
  bool passed = false;
  std::string detail;
};

// Invariants gathered from every simulation the suite runs.
TrajectoryDiagnostics g_hygiene;

void record(const TrajectoryDiagnostics& d) { g_hygiene.merge(d); }

void record(const OperatorMatrix& rho) {
  TrajectoryDiagnostics d;
  d.max_trace_error = trace_error(rho);
  d.max_hermiticity_error = hermiticity_error(rho);
  d.min_eigenvalue = min_eigenvalue(rho);
  record(d);
}

ExperimentConfig load(const std::string& file) { return parse_config(load_json_file((kConfigs / file).string())); }

double rel(double actual, double expected) { return std::abs(actual - expected) / std::abs(expected); }

ResonatorParams resonator(double nu_r) {
  ResonatorParams r;
  r.bare_frequency_nu_r = nu_r;
  r.kappa_ext = 23e6;
  r.kappa_int = 7e6;
  return r;
}

SimulationGrid grid(double t_end, double dt) {
  SimulationGrid g;
  g.t_end = t_end;
  g.dt = dt;
  return g;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Weak-probe cavity response S(f) of the full Lindblad generator for the qubit in |g⟩ and
// in an equal mixture of |g⟩ and the dressed excited state. The mixed line sits between
// the two qubit-state pulls, so the ground-to-mixed offset is χ.
Outcome dispersive_shift_criterion() {
  const double g = 55e6, nu_q = 5.68e9, nu_r = 5.07e9;
  const HilbertSpec spec{6};
  const auto res = resonator(nu_r);
  const auto h = build_rotating_frame_hamiltonian({nu_q, 0.0}, res, {g}, nu_r, nullptr, nullptr, spec);
  // Weak qubit damping makes the dressed states the only stationary ones.
  const auto channels = standard_channels(spec, res, DecoherenceParams{1e5, 1e5});
  const OperatorMatrix generator = liouvillian(h.static_part, channels);

  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h.static_part);
  Eigen::Index dressed_e = 0;
  es.eigenvectors().row(spec.index(1, 0)).cwiseAbs().maxCoeff(&dressed_e);
  const StateVector e = es.eigenvectors().col(dressed_e);
  const OperatorMatrix ground = DensityMatrix::pure(basis_state(spec, 0, 0)).matrix();
  const OperatorMatrix mixed = 0.5 * ground + 0.5 * e * e.adjoint();
  record(mixed);

  const OperatorMatrix a = cavity_operator(annihilation(spec.fock_cutoff), spec);
  // Half-step offset keeps the grid off the generator's zero mode at f = 0.
  std::vector<double> f;
  for (int i = 0; i < 600; ++i) f.push_back(-29.95e6 + 0.1e6 * i);
  auto line_center = [&](const OperatorMatrix& rho) {
    std::vector<double> response;
    for (const auto& s : ResolventSpectrum(generator, rho, a, a.adjoint()).sweep(f)) response.push_back(s.real());
    return fit_lorentzian(f, response).param("center");
  };
  const double f_ground = line_center(ground), f_mixed = line_center(mixed);
  const double chi = f_mixed - f_ground;
  const double expected = dispersive_shift(g, nu_q - nu_r);
  return {rel(chi, expected) <= 0.10,
          fmt("ground line %.4g MHz, mixed line %.4g MHz, chi/2pi = %.4g MHz", f_ground / 1e6, f_mixed / 1e6,
              chi / 1e6) +
              fmt(", g^2/Delta = %.4g MHz", expected / 1e6)};
}

Outcome vacuum_rabi_criterion() {
  const HilbertSpec spec{4};
  const auto res = resonator(5.07e9);
  const auto h = build_rotating_frame_hamiltonian({5.07e9, 0.0}, res, {37.5e6}, 5.07e9, nullptr, nullptr, spec);
  const double split = vacuum_rabi_splitting(h.at(0.0), spec);
  return {rel(split, 75e6) <= 1e-6, fmt("splitting = %.9g MHz", split / 1e6)};
}

Outcome stark_criterion() {
  const ExperimentConfig cfg = load("stark.json");
  const auto r = run_experiment(cfg, 1);
  record(r.diagnostics);
  const double slope = r.quantities.at("shift_per_photon");
  const double expected = r.quantities.at("expected_shift_per_photon");
  const FitResult& fit = r.fits.at("shift_per_photon");
  // Linearity: residuals small against the total shift across n = 0..4.
  const double span = std::abs(slope) * 4.0;
  const bool linear = fit.residual_rms < 0.02 * span;
  return {rel(slope, expected) <= 0.10 && linear,
          fmt("slope = %.4g MHz/photon, 2g^2/Delta = %.4g MHz/photon, rms residual %.3g kHz", slope / 1e6,
              expected / 1e6, fit.residual_rms / 1e3)};
}

Outcome coherence_criterion() {
  ExperimentConfig ramsey = load("ramsey.json");
  ExperimentConfig t1 = load("t1.json");
  ramsey.detector_noise.enabled = false;
  t1.detector_noise.enabled = false;
  const auto rr = run_experiment(ramsey, 1);
  const auto rt = run_experiment(t1, 1);
  record(rr.diagnostics);
  record(rt.diagnostics);
  const double t1_fit = rt.quantities.at("t1");
  const double t2_fit = rr.quantities.at("t2_ramsey");
  const double freq = rr.quantities.at("frequency");
  const bool ok = rel(t1_fit, 42.3e-9) <= 0.05 && rel(t2_fit, 23.4e-9) <= 0.05 && rel(freq, 100e6) <= 0.02;
  return {ok, fmt("T1 = %.4g ns, T2 = %.4g ns, fringe = %.5g MHz", t1_fit * 1e9, t2_fit * 1e9, freq / 1e6)};
}

Outcome echo_criterion() {
  const ExperimentConfig cfg = load("echo.json");
  const ControlModel control = make_control_model(cfg.device, cfg.simulation);
  const SequenceConfig seq = make_sequence_config(control, cfg.pulse);
  const auto& dec = cfg.device.decoherence;
  const double t2 = 1.0 / (kTwoPi * dec.gamma2());
  const auto taus = cfg.sweep.values();
  const double tau_max = taus.back();
  const int realizations = 1000;

  MonteCarloOptions mc;
  mc.seed = 2024;
  mc.dt = cfg.simulation.monte_carlo_dt;
  mc.qubit_frequency = control.frame_frequency;

  auto decay_times = [&](const OuNoiseModel& noise) {
    std::vector<double> pr, pe;
    for (double tau : taus) {
      const auto a = monte_carlo_dephasing(build_ramsey_sequence(tau, 0.0, seq), noise, dec, mc);
      const auto b = monte_carlo_dephasing(build_echo_sequence(tau, seq), noise, dec, mc);
      record(OperatorMatrix(a.mean_state));
      record(OperatorMatrix(b.mean_state));
      pr.push_back(a.excited_population);
      pe.push_back(b.excited_population);
    }
    return std::pair{fit_exponential_decay(taus, pr).param("decay_time"),
                     fit_exponential_decay(taus, pe).param("decay_time")};
  };

  // Quasi-static: a static Gaussian detuning e^{−(2πστ)²/2} on top of e^{−τ/T2} puts the
  // 1/e point at T2/2 when σ = 1/(π T2).
  const OuNoiseModel quasi{1.0 / (kPi * t2), 100.0 * tau_max, realizations};
  const auto [qs_ramsey, qs_echo] = decay_times(quasi);
  // White limit: (2πσ)² τc equal to the intrinsic 1/T2 doubles the Ramsey decay rate.
  const double tau_c = tau_max / 100.0;
  const OuNoiseModel white{1.0 / (kTwoPi * std::sqrt(t2 * tau_c)), tau_c, realizations};
  const auto [w_ramsey, w_echo] = decay_times(white);

  const double qs_ratio = qs_echo / qs_ramsey, w_ratio = w_echo / w_ramsey;
  std::ostringstream detail;
  detail << fmt("quasi-static T2R = %.4g ns, T2E = %.4g ns, ratio %.3f; ", qs_ramsey * 1e9, qs_echo * 1e9, qs_ratio)
         << fmt("white T2R = %.4g ns, T2E = %.4g ns, ratio %.3f", w_ramsey * 1e9, w_echo * 1e9, w_ratio);
  return {qs_ratio >= 1.8 && std::abs(w_ratio - 1.0) <= 0.10, detail.str()};
}

Outcome spectroscopy_criterion() {
  const ExperimentConfig cfg = load("spectroscopy.json");
  const auto r = run_experiment(cfg, 1);
  const double gamma2 = r.quantities.at("gamma2_over_2pi");
  const double t2 = r.quantities.at("t2");

  // Saturation: resonant steady state at s = Ω²/(γ1 γ2) = 100.
  const auto& dec = cfg.device.decoherence;
  const double rabi = std::sqrt(100.0 * dec.gamma1 * dec.gamma2());
  std::vector<CollapseChannel> channels;
  for (const auto& ch : qubit_channels(dec)) channels.push_back({OperatorMatrix(ch.op), ch.rate});
  const OperatorMatrix rho = steady_state(OperatorMatrix(0.5 * rabi * qubit::sigma_x()), channels);
  record(rho);
  const double pe = rho(1, 1).real();
  const bool ok = rel(pe, 0.5) <= 0.01 && rel(gamma2, 3.3e6) <= 0.03 && rel(t2, 48.2e-9) <= 0.03;
  return {ok, fmt("P_e(s=100) = %.5f, gamma2/2pi = %.4g MHz, T2 = %.4g ns", pe, gamma2 / 1e6, t2 * 1e9)};
}

Outcome reflectometry_criterion() {
  const auto r = run_experiment(load("s11.json"), 1);
  const double max_abs = r.quantities.at("max_abs_s11");
  const double winding = r.quantities.at("phase_winding");
  const double kappa = r.quantities.at("kappa_tot");
  const bool ok = max_abs <= 1.0 && std::abs(winding - 1.0) <= 0.01 && rel(kappa, 30e6) <= 0.02;
  return {ok, fmt("max|S11| = %.6f, winding = %.4f turns, kappa_tot = %.5g MHz", max_abs, winding, kappa / 1e6)};
}

double std_dev(const std::vector<double>& v) {
  double s = 0.0, ss = 0.0;
  for (double x : v) {
    s += x;
    ss += x * x;
  }
  const double n = static_cast<double>(v.size());
  return std::sqrt((ss - s * s / n) / (n - 1.0));
}

Outcome readout_criterion() {
  ExperimentConfig cfg = load("readout_trace.json");
  DetectorNoise quiet = cfg.detector_noise;
  quiet.enabled = false;
  const ReadoutModel clean =
      make_readout_model(cfg.device, cfg.readout, quiet, cfg.pulse.readout_duration, cfg.simulation.readout_dt);
  const double midpoint = read_population(clean, 0.5, 1).raw;

  // Estimator spread over independent repetitions, single shots against 10^4-shot averages.
  // A 1 GS/s digitizer keeps the 2·IF image clear of the filter band.
  cfg.readout.heterodyne.sample_rate = 1e9;
  auto spread = [&](int shots, int repetitions) {
    ReadoutConfig rc = cfg.readout;
    rc.shots = shots;
    const ReadoutModel m =
        make_readout_model(cfg.device, rc, cfg.detector_noise, cfg.pulse.readout_duration, cfg.simulation.readout_dt);
    std::vector<double> est;
    for (int k = 0; k < repetitions; ++k) {
      est.push_back(read_population(m, 0.5, realization_seed(shots, static_cast<std::uint64_t>(k))).raw);
    }
    return std_dev(est);
  };
  const double single = spread(1, 4000);
  const double averaged = spread(10000, 500);
  const double ratio = single / averaged;
  const bool ok = std::abs(midpoint - 0.5) <= 1e-6 && std::abs(ratio / 100.0 - 1.0) <= 0.10;
  return {ok, fmt("midpoint = %.9f, std(1 shot) = %.4g, std(1e4 shots) = %.4g", midpoint, single, averaged) +
                  fmt(", ratio %.2f", ratio)};
}

Outcome hygiene_criterion() {
  // Dispersive cross-check at Δ = 11 g with the qubit in |g⟩, probed on the pulled resonance.
  const double g = 55e6, nu_q = 5.68e9, nu_r = 5.07e9;
  const HilbertSpec spec{8};
  const auto res = resonator(nu_r);
  const double chi = dispersive_shift(g, nu_q - nu_r);
  const double probe = nu_r - chi;
  const double a_in = input_amplitude_for_photons(res, 0.5);
  const Complex eps = cavity_drive_from_input(a_in, res.kappa_ext);
  const auto h = build_rotating_frame_hamiltonian(
      {nu_q, 0.0}, res, {g}, probe, nullptr, [eps](double) { return eps; }, spec);
  const auto full = evolve(DensityMatrix::pure(basis_state(spec, 0, 0)), h,
                           standard_channels(spec, res, DecoherenceParams{}), grid(200e-9, 0.5e-9),
                           std::vector<Interval>{});
  record(full.diagnostics);
  const auto semi = semiclassical_cavity_response(QubitState::Ground, res, chi, probe, a_in, grid(200e-9, 0.5e-9));
  double worst = 0.0;
  for (std::size_t i = 0; i < full.times.size() && i < semi.times.size(); ++i) {
    if (full.times[i] < 60e-9) continue;
    worst = std::max(worst, std::abs(full.cavity_alpha[i] - semi.alpha[i]) / std::abs(semi.alpha[i]));
  }
  const bool ok = worst <= 0.02 && full.times.size() == semi.times.size() && g_hygiene.max_trace_error < 1e-7 &&
                  g_hygiene.max_hermiticity_error < 1e-9 && g_hygiene.min_eigenvalue > -1e-6;
  std::ostringstream detail;
  detail << fmt("max |tr-1| = %.2g, max herm = %.2g, min eig = %.2g", g_hygiene.max_trace_error,
                g_hygiene.max_hermiticity_error, g_hygiene.min_eigenvalue)
         << fmt("; Lindblad vs semiclassical max deviation %.3g%%", 100.0 * worst);
  return {ok, detail.str()};
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // runtime limit; 0 when none applies
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria{
      {1, "dispersive shift", 60.0, dispersive_shift_criterion},
      {2, "vacuum Rabi splitting", 1.0, vacuum_rabi_criterion},
      {3, "AC-Stark linearity", 300.0, stark_criterion},
      {4, "closed-loop coherence extraction", 600.0, coherence_criterion},
      {5, "echo refocusing", 900.0, echo_criterion},
      {6, "spectroscopy saturation and linewidth", 0.0, spectroscopy_criterion},
      {7, "resonator reflectometry", 0.0, reflectometry_criterion},
      {8, "readout-chain fidelity", 0.0, readout_criterion},
      {9, "numerical hygiene", 0.0, hygiene_criterion},
  };
  int failures = 0;
  int selected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++selected;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && seconds > c.budget_s) {
      out.passed = false;
      out.detail += fmt(" (over the %.0f s budget)", c.budget_s);
    }
    if (!out.passed) ++failures;
    std::printf("AC%d %s  %-38s %8.2f s  %s\n", c.id, out.passed ? "PASS" : "FAIL", c.name.c_str(), seconds,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", selected - failures, selected);
  return failures == 0 ? 0 : 1;
}
