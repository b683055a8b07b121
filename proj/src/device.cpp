#include "cqed/device.hpp"

#include <cmath>

namespace cqed {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void DqdParams::validate() const {
  require(finite(tunnel_splitting_2t) && tunnel_splitting_2t > 0.0,
          "DqdParams: tunnel_splitting_2t must be > 0");
  require(finite(detuning_delta), "DqdParams: detuning_delta must be finite");
}

void ResonatorParams::validate() const {
  require(finite(bare_frequency_nu_r) && bare_frequency_nu_r > 0.0,
          "ResonatorParams: bare_frequency_nu_r must be > 0");
  require(finite(kappa_ext) && kappa_ext > 0.0, "ResonatorParams: kappa_ext must be > 0");
  require(finite(kappa_int) && kappa_int >= 0.0, "ResonatorParams: kappa_int must be >= 0");
  require(line_impedance_Ztl > 0.0, "ResonatorParams: line_impedance_Ztl must be > 0");
}

void CouplingParams::validate() const {
  require(finite(g0) && g0 > 0.0, "CouplingParams: g0 must be > 0");
}

void DecoherenceParams::validate() const {
  require(finite(gamma1) && gamma1 >= 0.0, "DecoherenceParams: gamma1 must be >= 0");
  require(finite(gamma_phi) && gamma_phi >= 0.0, "DecoherenceParams: gamma_phi must be >= 0");
}

DecoherenceParams DecoherenceParams::from_times(double t1, double t2) {
  require(t1 > 0.0 && t2 > 0.0 && t2 <= 2.0 * t1, "from_times: need 0 < T2 <= 2 T1");
  DecoherenceParams d;
  d.gamma1 = 1.0 / (kTwoPi * t1);
  d.gamma_phi = 1.0 / (kTwoPi * t2) - 0.5 * d.gamma1;
  return d;
}

void DeviceParams::validate() const {
  dqd.validate();
  resonator.validate();
  coupling.validate();
  decoherence.validate();
}

double qubit_frequency(const DqdParams& p) {
  p.validate();
  return std::hypot(p.tunnel_splitting_2t, p.detuning_delta);
}

double coupling_at_detuning(const CouplingParams& c, const DqdParams& p) {
  c.validate();
  return c.g0 * p.tunnel_splitting_2t / qubit_frequency(p);
}

double dispersive_shift(double g, double delta_rq) {
  require(delta_rq != 0.0, "dispersive_shift: undefined at resonance (delta_rq = 0)");
  return g * g / delta_rq;
}

double ac_stark_frequency(double omega_q, double n_r, double g, double delta_rq) {
  require(n_r >= 0.0, "ac_stark_frequency: photon number must be >= 0");
  return omega_q + (1.0 + 2.0 * n_r) * dispersive_shift(g, delta_rq);
}

double dispersive_phase_shift(double g, double kappa_tot, double delta_rq) {
  require(kappa_tot > 0.0, "dispersive_phase_shift: kappa_tot must be > 0");
  require(delta_rq != 0.0, "dispersive_phase_shift: delta_rq must be nonzero");
  return std::atan(2.0 * g * g / (kappa_tot * delta_rq));
}

double external_linewidth(double cc, double omega_r, double z_tl, double z_r) {
  require(cc > 0.0 && omega_r > 0.0 && z_tl > 0.0, "external_linewidth: inputs must be positive");
  require(z_r >= 0.0, "external_linewidth: Zr must be >= 0");
  return cc * cc * omega_r * omega_r * omega_r * z_tl * z_r / 4.0;
}

double impedance_for_external_linewidth(double kappa_ext_angular, double cc, double omega_r,
                                        double z_tl) {
  require(kappa_ext_angular > 0.0, "impedance_for_external_linewidth: kappa must be > 0");
  return kappa_ext_angular / external_linewidth(cc, omega_r, z_tl, 1.0);
}

double sqrt_abs_cos_response(double flux) {
  const double c = std::abs(std::cos(kPi * flux));
  require(c > 0.01, "squid_resonator_frequency: flux too close to half a flux quantum");
  return std::sqrt(c);
}

double squid_resonator_frequency(const FluxMap& m, const FluxResponse& response) {
  require(m.max_frequency_nu_r0 > 0.0, "FluxMap: max_frequency_nu_r0 must be > 0");
  return m.max_frequency_nu_r0 * response(m.flux);
}

FluxMap calibrate_flux_map(double nu_at_flux, double flux, const FluxResponse& response) {
  require(nu_at_flux > 0.0, "calibrate_flux_map: frequency must be > 0");
  return FluxMap{nu_at_flux / response(flux), flux};
}

double effective_resonator_frequency(const DeviceParams& device) {
  if (device.flux_map) return squid_resonator_frequency(*device.flux_map);
  return device.resonator.bare_frequency_nu_r;
}

OperatorMatrix DrivenHamiltonian::with_drives(Complex omega, Complex epsilon) const {
  OperatorMatrix h = static_part;
  if (omega != Complex(0.0)) h += 0.5 * (std::conj(omega) * sigma_plus + omega * sigma_minus);
  if (epsilon != Complex(0.0)) h += std::conj(epsilon) * a + epsilon * a_dag;
  return h;
}

OperatorMatrix DrivenHamiltonian::at(double t) const {
  const Complex omega = qubit_rabi ? qubit_rabi(t) : Complex(0.0);
  const Complex epsilon = cavity_drive ? cavity_drive(t) : Complex(0.0);
  return with_drives(omega, epsilon);
}

DrivenHamiltonian build_rotating_frame_hamiltonian(const DqdParams& dqd,
                                                   const ResonatorParams& res,
                                                   const CouplingParams& cpl, double drive_freq,
                                                   DrivenHamiltonian::Drive qubit_rabi,
                                                   DrivenHamiltonian::Drive cavity_drive,
                                                   const HilbertSpec& spec) {
  spec.validate();
  res.validate();
  const double nu_q = qubit_frequency(dqd);
  const double g = coupling_at_detuning(cpl, dqd);
  const double nu_r = res.bare_frequency_nu_r;

  DrivenHamiltonian h;
  h.spec = spec;
  h.sigma_plus = qubit_operator(qubit::sigma_plus(), spec);
  h.sigma_minus = qubit_operator(qubit::sigma_minus(), spec);
  h.a = cavity_operator(annihilation(spec.fock_cutoff), spec);
  h.a_dag = h.a.adjoint();
  h.static_part = 0.5 * (nu_q - drive_freq) * qubit_operator(qubit::sigma_z(), spec) +
                  (nu_r - drive_freq) * (h.a_dag * h.a) +
                  g * (h.sigma_plus * h.a + h.sigma_minus * h.a_dag);
  h.qubit_rabi = std::move(qubit_rabi);
  h.cavity_drive = std::move(cavity_drive);

  // Rotating-wave validity: detunings and coupling small compared with ν_q + ν_r.
  const double scale = nu_q + nu_r;
  constexpr double kRwaFraction = 0.1;
  if (std::abs(nu_q - drive_freq) > kRwaFraction * scale ||
      std::abs(nu_r - drive_freq) > kRwaFraction * scale) {
    h.warnings.push_back("rotating-wave approximation: drive detuning is not small compared "
                         "with nu_q + nu_r");
  }
  if (g > kRwaFraction * scale) {
    h.warnings.push_back("rotating-wave approximation: coupling is not small compared with "
                         "nu_q + nu_r");
  }
  return h;
}

OperatorMatrix excitation_number(const HilbertSpec& spec) {
  return cavity_operator(number_operator(spec.fock_cutoff), spec) +
         qubit_operator(qubit::excited_projector(), spec);
}

Eigen::VectorXd excitation_manifold_spectrum(const OperatorMatrix& h, const HilbertSpec& spec,
                                             int excitations) {
  spec.validate();
  if (h.rows() != spec.dim()) throw DimensionError("excitation_manifold_spectrum: dimension");
  std::vector<int> members;
  for (int q = 0; q < 2; ++q) {
    const int n = excitations - q;
    if (n >= 0 && n < spec.fock_cutoff) members.push_back(spec.index(q, n));
  }
  if (members.empty()) throw DimensionError("excitation manifold outside truncated space");
  OperatorMatrix block(members.size(), members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) block(i, j) = h(members[i], members[j]);
  }
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(block, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double vacuum_rabi_splitting(const OperatorMatrix& h, const HilbertSpec& spec) {
  const Eigen::VectorXd e = excitation_manifold_spectrum(h, spec, 1);
  if (e.size() != 2) throw DimensionError("vacuum_rabi_splitting: need a two-level manifold");
  return e(1) - e(0);
}

double dressed_qubit_frequency(const DeviceParams& device, const HilbertSpec& spec) {
  const double nu_q = qubit_frequency(device.dqd);
  ResonatorParams res = device.resonator;
  res.bare_frequency_nu_r = effective_resonator_frequency(device);
  const DrivenHamiltonian h = build_rotating_frame_hamiltonian(
      device.dqd, res, device.coupling, nu_q, nullptr, nullptr, spec);
  // Frame at ν_q; pick the one-excitation branch with the larger |e,0> weight.
  const int ie = spec.index(1, 0);
  const int ig = spec.index(0, 1);
  OperatorMatrix block(2, 2);
  block << h.static_part(ig, ig), h.static_part(ig, ie), h.static_part(ie, ig),
      h.static_part(ie, ie);
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(block);
  const auto& vecs = solver.eigenvectors();
  const int branch = std::norm(vecs(1, 0)) > std::norm(vecs(1, 1)) ? 0 : 1;
  const double ground = h.static_part(spec.index(0, 0), spec.index(0, 0)).real();
  return nu_q + solver.eigenvalues()(branch) - ground;
}

}  // namespace cqed
