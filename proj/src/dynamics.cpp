#include "cqed/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cqed {

namespace {

// Splits [t0, t1] into alternating free / varying segments.
struct Segment {
  double start;
  double end;
  bool varying;
};

std::vector<Segment> split_segments(double t0, double t1,
                                    const std::optional<std::vector<Interval>>& varying) {
  if (!varying) return {{t0, t1, true}};
  std::vector<Interval> iv;
  for (const auto& v : *varying) {
    const double a = std::max(v.start, t0);
    const double b = std::min(v.end, t1);
    if (b > a) iv.push_back({a, b});
  }
  std::sort(iv.begin(), iv.end(), [](const Interval& x, const Interval& y) { return x.start < y.start; });
  std::vector<Interval> merged;
  for (const auto& v : iv) {
    if (!merged.empty() && v.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, v.end);
    } else {
      merged.push_back(v);
    }
  }
  std::vector<Segment> out;
  double t = t0;
  for (const auto& v : merged) {
    if (v.start > t) out.push_back({t, v.start, false});
    out.push_back({v.start, v.end, true});
    t = v.end;
  }
  if (t1 > t) out.push_back({t, t1, false});
  return out;
}

long step_count(double span, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
}

template <typename Mat>
class Integrator {
 public:
  Integrator(const TimeDependentOperator<Mat>& h, const std::vector<CollapseOperator<Mat>>& channels,
             const SimulationGrid& grid)
      : h_(h), channels_(channels), grid_(grid) {
    const auto d = dimension();
    damping_ = Mat::Zero(d, d);
    for (const auto& c : channels_) damping_ += 0.5 * c.rate * (c.op.adjoint() * c.op);
    for (const auto& c : channels_) {
      jumps_.push_back(c.op);
      jump_adjoints_.push_back(c.op.adjoint());
    }
    fock_ = std::max<Eigen::Index>(1, d / 2);
  }

  Trajectory run(const Mat& rho0) {
    Mat rho = rho0;
    record(grid_.t_start, rho);
    for (const auto& seg : split_segments(grid_.t_start, grid_.t_end, h_.varying)) {
      if (seg.varying) {
        if (grid_.method == IntegrationMethod::AdaptiveRk45) {
          adaptive(seg.start, seg.end, rho);
        } else {
          fixed(seg.start, seg.end, rho);
        }
      } else {
        exact(seg.start, seg.end, rho);
      }
    }
    if (traj_.times.empty() || traj_.times.back() < grid_.t_end - 1e-6 * grid_.dt) record(grid_.t_end, rho);
    traj_.final_state = rho;
    if (fock_ >= 3 && traj_.diagnostics.max_top_fock_population > kTruncationWarningLevel) {
      std::ostringstream msg;
      msg << "Fock truncation: population in the top two levels reached "
          << traj_.diagnostics.max_top_fock_population << "; increase fock_cutoff";
      traj_.warnings.push_back(msg.str());
    }
    return std::move(traj_);
  }

 private:
  Eigen::Index dimension() const { return h_.at(grid_.t_start).rows(); }

  // K = −i2πH − ½ΣγL†L, so dρ = Kρ + ρK† + ΣγLρL†.
  Mat effective(double t) const {
    return Complex(0.0, -kTwoPi) * h_.at(t) - damping_;
  }

  Mat rhs(const Mat& k, const Mat& rho) const {
    Mat out = k * rho;
    out += out.adjoint().eval();
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      out += channels_[i].rate * (jumps_[i] * rho * jump_adjoints_[i]);
    }
    return out;
  }

  void fixed(double t0, double t1, Mat& rho) {
    const long n = step_count(t1 - t0, grid_.dt);
    const double h = (t1 - t0) / static_cast<double>(n);
    Mat k_start = effective(t0);
    for (long i = 0; i < n; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      const Mat k_mid = effective(t + 0.5 * h);
      const Mat k_end = effective(t + h);
      const Mat r1 = rhs(k_start, rho);
      const Mat r2 = rhs(k_mid, rho + 0.5 * h * r1);
      const Mat r3 = rhs(k_mid, rho + 0.5 * h * r2);
      const Mat r4 = rhs(k_end, rho + h * r3);
      rho += (h / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
      k_start = k_end;
      if ((i + 1) % grid_.store_every == 0 || i + 1 == n) record(t0 + static_cast<double>(i + 1) * h, rho);
    }
  }

  // Dormand–Prince 5(4) with step control on the max-norm error.
  void adaptive(double t0, double t1, Mat& rho) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double stride = grid_.dt * grid_.store_every;
    double next_store = t0 + stride;
    double t = t0;
    double h = grid_.dt;
    const double h_min = 1e-12 * std::max(t1 - t0, grid_.dt);
    Mat k1 = rhs(effective(t), rho);
    while (t < t1) {
      const double target = std::min(next_store, t1);
      const bool clipped = h >= target - t;
      const double hs = clipped ? target - t : h;
      if (hs < h_min && !clipped) throw SimulationError("adaptive integrator: step size underflow");
      const Mat k2 = rhs(effective(t + c2 * hs), rho + hs * (a21 * k1));
      const Mat k3 = rhs(effective(t + c3 * hs), rho + hs * (a31 * k1 + a32 * k2));
      const Mat k4 = rhs(effective(t + c4 * hs), rho + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const Mat k5 =
          rhs(effective(t + c5 * hs), rho + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Mat k6 = rhs(effective(t + hs),
                         rho + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Mat next = rho + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Mat k7 = rhs(effective(t + hs), next);
      const Mat err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = grid_.tolerance * (1.0 + next.cwiseAbs().maxCoeff());
      const double ratio = err.cwiseAbs().maxCoeff() / scale;
      if (!std::isfinite(ratio)) throw SimulationError("adaptive integrator: non-finite state");
      const double factor = std::clamp(ratio == 0.0 ? 5.0 : 0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
      if (ratio <= 1.0) {
        t = clipped ? target : t + hs;
        rho = next;
        k1 = k7;
        if (clipped) {
          record(t, rho);
          next_store = target + stride;
        }
        // A step shortened to land on a storage time says nothing against h.
        h = clipped ? std::max(h, hs * factor) : hs * factor;
      } else {
        h = hs * factor;
      }
    }
  }

  // Constant H: apply exp(L Δt) to vec(ρ). Chunks are at most kMaxChunk long so the
  // scaling-and-squaring exponential stays accurate; states are stored per stride.
  void exact(double t0, double t1, Mat& rho) {
    static constexpr double kMaxChunk = 2e-9;
    const auto d = rho.rows();
    const OperatorMatrix l = liouvillian(Mat(h_.at(0.5 * (t0 + t1))), channels_);
    const double stride = grid_.dt * grid_.store_every;
    const long n = step_count(t1 - t0, std::min(stride, kMaxChunk));
    const double chunk = (t1 - t0) / static_cast<double>(n);
    const long per_store = std::max(1L, std::lround(stride / chunk));
    const OperatorMatrix prop = (l * chunk).exp();
    StateVector v = vectorize(OperatorMatrix(rho));
    for (long i = 0; i < n; ++i) {
      v = prop * v;
      if ((i + 1) % per_store == 0 || i + 1 == n) {
        rho = unvectorize(v, d);
        record(i + 1 == n ? t1 : t0 + static_cast<double>(i + 1) * chunk, rho);
      }
    }
    rho = unvectorize(v, d);
  }

  void record(double t, const Mat& rho) {
    const auto d = rho.rows();
    const auto n = fock_;
    double pe = 0.0;
    Complex alpha(0.0);
    if (d == 2) {
      pe = rho(1, 1).real();
    } else {
      for (Eigen::Index k = 0; k < n; ++k) pe += rho(n + k, n + k).real();
      for (Eigen::Index q = 0; q < 2; ++q) {
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
          alpha += std::sqrt(static_cast<double>(k + 1)) * rho(q * n + k + 1, q * n + k);
        }
      }
    }
    traj_.times.push_back(t);
    traj_.qubit_pe.push_back(pe);
    traj_.cavity_alpha.push_back(alpha);
    const OperatorMatrix full = rho;
    auto& diag = traj_.diagnostics;
    diag.max_trace_error = std::max(diag.max_trace_error, trace_error(full));
    diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, hermiticity_error(full));
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, min_eigenvalue(full));
    if (n >= 3) {
      double top = 0.0;
      for (Eigen::Index q = 0; q < 2; ++q) {
        top += full(q * n + n - 1, q * n + n - 1).real() + full(q * n + n - 2, q * n + n - 2).real();
      }
      diag.max_top_fock_population = std::max(diag.max_top_fock_population, top);
    }
    if (grid_.keep_states) traj_.full_states.push_back(full);
  }

  const TimeDependentOperator<Mat>& h_;
  const std::vector<CollapseOperator<Mat>>& channels_;
  SimulationGrid grid_;
  Mat damping_;
  std::vector<Mat> jumps_;
  std::vector<Mat> jump_adjoints_;
  Eigen::Index fock_ = 1;
  Trajectory traj_;
};

}  // namespace

void SimulationGrid::validate() const {
  if (!(t_end > t_start)) throw ParameterError("simulation grid: t_end must exceed t_start");
  if (!(dt > 0.0)) throw ParameterError("simulation grid: dt must be > 0");
  if (store_every < 1) throw ParameterError("simulation grid: store_every must be >= 1");
  if (!(tolerance > 0.0)) throw ParameterError("simulation grid: tolerance must be > 0");
}

void TrajectoryDiagnostics::merge(const TrajectoryDiagnostics& o) {
  max_trace_error = std::max(max_trace_error, o.max_trace_error);
  max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
  min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
  max_top_fock_population = std::max(max_top_fock_population, o.max_top_fock_population);
}

template <typename Mat>
Mat lindblad_rhs(const Mat& rho, const Mat& h_hz, const std::vector<CollapseOperator<Mat>>& channels) {
  if (rho.rows() != h_hz.rows()) throw DimensionError("lindblad_rhs: state and Hamiltonian differ in size");
  const Complex minus_i_two_pi(0.0, -kTwoPi);
  Mat out = minus_i_two_pi * (h_hz * rho - rho * h_hz);
  for (const auto& c : channels) {
    const Mat ldl = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

OperatorMatrix lindblad_rhs(const DensityMatrix& rho, const OperatorMatrix& h_hz,
                            const std::vector<CollapseChannel>& channels) {
  return lindblad_rhs<OperatorMatrix>(rho.matrix(), h_hz, channels);
}

template <typename Mat>
Trajectory evolve(const Mat& rho0, const TimeDependentOperator<Mat>& hamiltonian,
                  const std::vector<CollapseOperator<Mat>>& channels, const SimulationGrid& grid) {
  grid.validate();
  if (!hamiltonian.at) throw ParameterError("evolve: Hamiltonian callback is empty");
  const auto d = rho0.rows();
  if (hamiltonian.at(grid.t_start).rows() != d) {
    throw DimensionError("evolve: state and Hamiltonian differ in size");
  }
  for (const auto& c : channels) {
    if (c.op.rows() != d) throw DimensionError("evolve: collapse operator has wrong size");
    if (c.rate < 0.0) throw ParameterError("evolve: collapse rates must be >= 0");
  }
  Integrator<Mat> integrator(hamiltonian, channels, grid);
  return integrator.run(rho0);
}

template Trajectory evolve<OperatorMatrix>(const OperatorMatrix&, const TimeDependentOperator<OperatorMatrix>&,
                                           const std::vector<CollapseOperator<OperatorMatrix>>&,
                                           const SimulationGrid&);
template Trajectory evolve<Eigen::Matrix2cd>(const Eigen::Matrix2cd&,
                                             const TimeDependentOperator<Eigen::Matrix2cd>&,
                                             const std::vector<CollapseOperator<Eigen::Matrix2cd>>&,
                                             const SimulationGrid&);
template OperatorMatrix lindblad_rhs<OperatorMatrix>(const OperatorMatrix&, const OperatorMatrix&,
                                                     const std::vector<CollapseChannel>&);
template Eigen::Matrix2cd lindblad_rhs<Eigen::Matrix2cd>(
    const Eigen::Matrix2cd&, const Eigen::Matrix2cd&,
    const std::vector<CollapseOperator<Eigen::Matrix2cd>>&);

Trajectory evolve(const DensityMatrix& rho0, const DrivenHamiltonian& hamiltonian,
                  const std::vector<CollapseChannel>& channels, const SimulationGrid& grid,
                  std::optional<std::vector<Interval>> varying) {
  if (rho0.dim() != hamiltonian.spec.dim()) throw DimensionError("evolve: state/Hilbert space mismatch");
  TimeDependentOperator<OperatorMatrix> h{[&hamiltonian](double t) { return hamiltonian.at(t); },
                                          std::move(varying)};
  Trajectory traj = evolve<OperatorMatrix>(rho0.matrix(), h, channels, grid);
  traj.warnings.insert(traj.warnings.begin(), hamiltonian.warnings.begin(), hamiltonian.warnings.end());
  return traj;
}

std::vector<CollapseChannel> standard_channels(const HilbertSpec& spec, const ResonatorParams& res,
                                               const DecoherenceParams& dec, ChannelOptions options) {
  spec.validate();
  dec.validate();
  std::vector<CollapseChannel> out;
  if (options.cavity_decay && spec.fock_cutoff > 1 && res.kappa_tot() > 0.0) {
    out.push_back({cavity_operator(annihilation<double>(spec.fock_cutoff), spec), kTwoPi * res.kappa_tot()});
  }
  if (options.qubit_relaxation && dec.gamma1 > 0.0) {
    out.push_back({qubit_operator(qubit::sigma_minus(), spec), kTwoPi * dec.gamma1});
  }
  if (options.qubit_dephasing && dec.gamma_phi > 0.0) {
    out.push_back({qubit_operator(qubit::sigma_z(), spec), kTwoPi * 0.5 * dec.gamma_phi});
  }
  return out;
}

std::vector<CollapseOperator<Eigen::Matrix2cd>> qubit_channels(const DecoherenceParams& dec) {
  dec.validate();
  std::vector<CollapseOperator<Eigen::Matrix2cd>> out;
  if (dec.gamma1 > 0.0) out.push_back({Eigen::Matrix2cd(qubit::sigma_minus()), kTwoPi * dec.gamma1});
  if (dec.gamma_phi > 0.0) out.push_back({Eigen::Matrix2cd(qubit::sigma_z()), kTwoPi * 0.5 * dec.gamma_phi});
  return out;
}

std::vector<Interval> pulse_support(const PulseSequence& seq) {
  std::vector<Interval> out;
  for (const auto& p : seq.pulses) out.push_back({p.pulse.base.start(), p.pulse.base.end()});
  return out;
}

CavityResponse semiclassical_cavity_response(QubitState state, const ResonatorParams& res,
                                             double chi, double probe_freq,
                                             const std::function<Complex(double)>& probe_amp,
                                             const SimulationGrid& grid) {
  grid.validate();
  res.validate();
  const double detuning = res.bare_frequency_nu_r + dressed_resonance_shift(state, chi) - probe_freq;
  const Complex decay(kPi * res.kappa_tot(), kTwoPi * detuning);
  const Complex coupling(0.0, -std::sqrt(kTwoPi * res.kappa_ext));
  auto f = [&](double t, Complex a) { return -decay * a + coupling * probe_amp(t); };

  CavityResponse out;
  out.kappa_ext = res.kappa_ext;
  out.probe_frequency = probe_freq;
  const long n = step_count(grid.t_end - grid.t_start, grid.dt);
  const double h = (grid.t_end - grid.t_start) / static_cast<double>(n);
  Complex alpha(0.0);
  auto store = [&](double t) {
    out.times.push_back(t);
    out.alpha.push_back(alpha);
    out.a_in.push_back(probe_amp(t));
  };
  store(grid.t_start);
  for (long i = 0; i < n; ++i) {
    const double t = grid.t_start + static_cast<double>(i) * h;
    const Complex k1 = f(t, alpha);
    const Complex k2 = f(t + 0.5 * h, alpha + 0.5 * h * k1);
    const Complex k3 = f(t + 0.5 * h, alpha + 0.5 * h * k2);
    const Complex k4 = f(t + h, alpha + h * k3);
    alpha += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((i + 1) % grid.store_every == 0 || i + 1 == n) store(t + h);
  }
  return out;
}

CavityResponse semiclassical_cavity_response(QubitState state, const ResonatorParams& res,
                                             double chi, double probe_freq, Complex probe_amp,
                                             const SimulationGrid& grid) {
  return semiclassical_cavity_response(
      state, res, chi, probe_freq, [probe_amp](double) { return probe_amp; }, grid);
}

Complex semiclassical_steady_state(QubitState state, const ResonatorParams& res, double chi,
                                   double probe_freq, Complex probe_amp) {
  res.validate();
  const double detuning = res.bare_frequency_nu_r + dressed_resonance_shift(state, chi) - probe_freq;
  const Complex decay(kPi * res.kappa_tot(), kTwoPi * detuning);
  return Complex(0.0, -std::sqrt(kTwoPi * res.kappa_ext)) * probe_amp / decay;
}

Complex cavity_drive_from_input(Complex a_in, double kappa_ext) {
  if (kappa_ext < 0.0) throw ParameterError("cavity_drive_from_input: kappa_ext must be >= 0");
  return std::sqrt(kTwoPi * kappa_ext) * a_in / kTwoPi;
}

std::vector<double> steady_state_spectroscopy(const std::vector<double>& detunings,
                                              double rabi_rate, const DecoherenceParams& dec) {
  dec.validate();
  if (dec.gamma1 <= 0.0) throw ParameterError("spectroscopy: gamma1 must be > 0 for a steady state");
  const double g2 = dec.gamma2();
  const double s = rabi_rate * rabi_rate / (dec.gamma1 * g2);
  std::vector<double> out;
  out.reserve(detunings.size());
  for (double d : detunings) out.push_back(0.5 * s / (1.0 + (d / g2) * (d / g2) + s));
  return out;
}

double spectroscopy_hwhm(double rabi_rate, const DecoherenceParams& dec) {
  dec.validate();
  if (dec.gamma1 <= 0.0) throw ParameterError("spectroscopy: gamma1 must be > 0 for a steady state");
  const double s = rabi_rate * rabi_rate / (dec.gamma1 * dec.gamma2());
  return dec.gamma2() * std::sqrt(1.0 + s);
}

double field_rotation_frequency(const Trajectory& traj, double t_from, double t_to) {
  std::vector<double> ts, phases;
  double prev = 0.0, offset = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_from || t > t_to) continue;
    const double p = std::arg(traj.cavity_alpha[i]);
    if (!phases.empty()) {
      double jump = p - prev;
      if (jump > kPi) offset -= kTwoPi;
      if (jump < -kPi) offset += kTwoPi;
    }
    prev = p;
    ts.push_back(t);
    phases.push_back(p + offset);
  }
  if (ts.size() < 3) throw ParameterError("field_rotation_frequency: fewer than 3 samples in window");
  const double n = static_cast<double>(ts.size());
  double st = 0, sp = 0, stt = 0, stp = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sp += phases[i];
    stt += ts[i] * ts[i];
    stp += ts[i] * phases[i];
  }
  const double slope = (n * stp - st * sp) / (n * stt - st * st);
  return -slope / kTwoPi;
}

}  // namespace cqed
