#pragma once

// Charge-qubit / resonator parameters and the closed-form relations between
// them. All frequencies and rates are ordinary frequencies in Hz (rate / 2π)
// unless a name says "angular".

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/quantum.hpp"

namespace cqed {

struct DqdParams {
  double tunnel_splitting_2t = 0.0;
  double detuning_delta = 0.0;

  void validate() const;
};

struct ResonatorParams {
  double bare_frequency_nu_r = 0.0;
  double kappa_ext = 0.0;
  double kappa_int = 0.0;
  std::optional<double> coupling_capacitance_Cc;
  std::optional<double> impedance_Zr;
  double line_impedance_Ztl = 50.0;

  double kappa_tot() const { return kappa_ext + kappa_int; }
  void validate() const;
};

struct CouplingParams {
  double g0 = 0.0;

  void validate() const;
};

struct DecoherenceParams {
  double gamma1 = 0.0;
  double gamma_phi = 0.0;

  /// gamma2 = gamma1 / 2 + gamma_phi.
  double gamma2() const { return 0.5 * gamma1 + gamma_phi; }
  void validate() const;

  /// Rates that produce the given T1 and T2 (seconds).
  static DecoherenceParams from_times(double t1, double t2);
};

struct FluxMap {
  double max_frequency_nu_r0 = 0.0;
  double flux = 0.0;  // Φ/Φ0
};

struct DeviceParams {
  DqdParams dqd;
  ResonatorParams resonator;
  CouplingParams coupling;
  DecoherenceParams decoherence;
  std::optional<FluxMap> flux_map;

  void validate() const;
};

/// ν_q = sqrt((2t)² + δ²).
double qubit_frequency(const DqdParams& p);

/// g(δ) = g0 · 2t / ν_q(δ).
double coupling_at_detuning(const CouplingParams& c, const DqdParams& p);

/// χ = g²/Δ, signed with Δ = ν_q − ν_r.
double dispersive_shift(double g, double delta_rq);

/// ω̃_q = ω_q + (1 + 2 n_r) g²/Δ.
double ac_stark_frequency(double omega_q, double n_r, double g, double delta_rq);

/// |Δφ| = atan(2 g² / (κ_tot Δ)), signed with Δ.
double dispersive_phase_shift(double g, double kappa_tot, double delta_rq);

/// κ_ext = Cc² ω_r³ Z_TL Z_r / 4, angular rate in 1/s. Zr = 0 is allowed and gives 0.
double external_linewidth(double cc, double omega_r, double z_tl, double z_r);

/// Inverse of external_linewidth for the resonator impedance.
double impedance_for_external_linewidth(double kappa_ext_angular, double cc, double omega_r,
                                        double z_tl);

/// Normalized flux response f(Φ/Φ0) with ν_r(Φ) = ν_r0 · f(Φ/Φ0).
using FluxResponse = std::function<double(double)>;

/// sqrt(|cos(π Φ/Φ0)|); throws ParameterError when |cos| <= 0.01.
double sqrt_abs_cos_response(double flux);

double squid_resonator_frequency(const FluxMap& m,
                                 const FluxResponse& response = sqrt_abs_cos_response);

/// Flux map whose ν_r(flux) equals `nu_at_flux`.
FluxMap calibrate_flux_map(double nu_at_flux, double flux,
                           const FluxResponse& response = sqrt_abs_cos_response);

/// Resonator frequency used by the dynamics: flux map if present, bare value otherwise.
double effective_resonator_frequency(const DeviceParams& device);

/// Time-parameterized rotating-frame Hamiltonian (in Hz):
///   H(t) = (ν_q − ν_dr)/2 σz + (ν_r − ν_dr) a†a + g(δ)(σ+ a + σ− a†)
///          + ½(Ω*(t) σ+ + Ω(t) σ−) + ε*(t) a + ε(t) a†
/// A real Ω gives Ω/2 σx; a real ε gives ε (a + a†).
struct DrivenHamiltonian {
  using Drive = std::function<Complex(double)>;

  HilbertSpec spec;
  OperatorMatrix static_part;
  OperatorMatrix sigma_plus;
  OperatorMatrix sigma_minus;
  OperatorMatrix a;
  OperatorMatrix a_dag;
  Drive qubit_rabi;
  Drive cavity_drive;
  std::vector<std::string> warnings;

  OperatorMatrix at(double t) const;
  OperatorMatrix with_drives(Complex omega, Complex epsilon) const;
};

DrivenHamiltonian build_rotating_frame_hamiltonian(const DqdParams& dqd,
                                                   const ResonatorParams& res,
                                                   const CouplingParams& cpl, double drive_freq,
                                                   DrivenHamiltonian::Drive qubit_rabi,
                                                   DrivenHamiltonian::Drive cavity_drive,
                                                   const HilbertSpec& spec);

/// Number of excitations a†a + |e><e|; conserved by the undriven Hamiltonian.
OperatorMatrix excitation_number(const HilbertSpec& spec);

/// Eigenvalues (ascending) of a Hermitian H restricted to a fixed excitation number.
Eigen::VectorXd excitation_manifold_spectrum(const OperatorMatrix& h, const HilbertSpec& spec,
                                             int excitations);

/// Splitting of the one-excitation doublet of an undriven Hamiltonian.
double vacuum_rabi_splitting(const OperatorMatrix& h, const HilbertSpec& spec);

/// Qubit transition frequency dressed by the resonator (undriven, empty cavity),
/// from exact diagonalization in the one-excitation manifold.
double dressed_qubit_frequency(const DeviceParams& device, const HilbertSpec& spec);

}  // namespace cqed
