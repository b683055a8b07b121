#pragma once

// Time evolution of the driven, dissipative qubit–cavity system.
//
// Hamiltonians are in Hz; collapse rates are angular (1/s). The state layout is
// qubit ⊗ cavity with dim = 2·N; N = 1 denotes a bare qubit with no cavity.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqed/cavity.hpp"
#include "cqed/device.hpp"
#include "cqed/liouvillian.hpp"
#include "cqed/pulses.hpp"

namespace cqed {

struct Interval {
  double start = 0.0;
  double end = 0.0;
};

/// H(t) with an optional list of intervals where it changes. Outside those
/// intervals H is constant and evolution uses the exact propagator exp(L Δt).
template <typename Mat>
struct TimeDependentOperator {
  std::function<Mat(double)> at;
  std::optional<std::vector<Interval>> varying;
};

enum class IntegrationMethod { FixedRk4, AdaptiveRk45 };

struct SimulationGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 1e-12;
  IntegrationMethod method = IntegrationMethod::FixedRk4;
  /// Store every n-th step (fixed) or every n·dt (adaptive); the end point is always stored.
  int store_every = 1;
  double tolerance = 1e-9;
  bool keep_states = false;

  void validate() const;
};

struct TrajectoryDiagnostics {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 1.0;
  double max_top_fock_population = 0.0;

  void merge(const TrajectoryDiagnostics& other);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> qubit_pe;
  std::vector<Complex> cavity_alpha;
  std::vector<OperatorMatrix> full_states;
  OperatorMatrix final_state;
  TrajectoryDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

inline constexpr double kTruncationWarningLevel = 1e-4;

/// dρ/dt = −i 2π [H, ρ] + Σ γ (L ρ L† − ½{L†L, ρ}).
template <typename Mat>
Mat lindblad_rhs(const Mat& rho, const Mat& h_hz, const std::vector<CollapseOperator<Mat>>& channels);

OperatorMatrix lindblad_rhs(const DensityMatrix& rho, const OperatorMatrix& h_hz,
                            const std::vector<CollapseChannel>& channels);

template <typename Mat>
Trajectory evolve(const Mat& rho0, const TimeDependentOperator<Mat>& hamiltonian,
                  const std::vector<CollapseOperator<Mat>>& channels, const SimulationGrid& grid);

Trajectory evolve(const DensityMatrix& rho0, const DrivenHamiltonian& hamiltonian,
                  const std::vector<CollapseChannel>& channels, const SimulationGrid& grid,
                  std::optional<std::vector<Interval>> varying = std::nullopt);

struct ChannelOptions {
  bool cavity_decay = true;
  bool qubit_relaxation = true;
  bool qubit_dephasing = true;
};

/// κ_tot on a, γ1 on σ−, and sqrt(γφ/2) σz, all converted to angular rates.
std::vector<CollapseChannel> standard_channels(const HilbertSpec& spec, const ResonatorParams& res,
                                               const DecoherenceParams& dec,
                                               ChannelOptions options = {});

/// Qubit-only channels (2×2) with the same conventions.
std::vector<CollapseOperator<Eigen::Matrix2cd>> qubit_channels(const DecoherenceParams& dec);

/// Time support of every pulse in a sequence.
std::vector<Interval> pulse_support(const PulseSequence& seq);

// Semiclassical dispersive cavity ---------------------------------------------

/// Integrates dα/dt = −[i2π(ν_r + shift − ν_p) + πκ_tot] α − i sqrt(2πκ_ext) a_in(t)
/// from α = 0 with fixed-step RK4 on the grid.
CavityResponse semiclassical_cavity_response(QubitState state, const ResonatorParams& res,
                                             double chi, double probe_freq,
                                             const std::function<Complex(double)>& probe_amp,
                                             const SimulationGrid& grid);

CavityResponse semiclassical_cavity_response(QubitState state, const ResonatorParams& res,
                                             double chi, double probe_freq, Complex probe_amp,
                                             const SimulationGrid& grid);

/// α_ss = −i sqrt(2πκ_ext) a_in / (i2πΔ_rp + πκ_tot).
Complex semiclassical_steady_state(QubitState state, const ResonatorParams& res, double chi,
                                   double probe_freq, Complex probe_amp);

/// Cavity drive ε (Hz) equivalent to an input amplitude a_in: 2π ε = sqrt(2π κ_ext) a_in.
Complex cavity_drive_from_input(Complex a_in, double kappa_ext);

// Two-level spectroscopy --------------------------------------------------------

/// Steady-state P_e of a driven two-level system at drive detuning Δ (Hz) and
/// Rabi rate Ω (Hz): ½ s / (1 + (Δ/γ2)² + s) with s = Ω²/(γ1 γ2).
std::vector<double> steady_state_spectroscopy(const std::vector<double>& detunings,
                                              double rabi_rate, const DecoherenceParams& dec);

/// Power-broadened half width at half maximum, γ2 sqrt(1 + s), in Hz.
double spectroscopy_hwhm(double rabi_rate, const DecoherenceParams& dec);

// Ring-down frequency ---------------------------------------------------------

/// Mean rotation frequency of ⟨a⟩(t) in [t_from, t_to], from a linear fit to the
/// unwrapped phase. Positive when ⟨a⟩ ∝ e^{−i2πft}.
double field_rotation_frequency(const Trajectory& traj, double t_from, double t_to);

}  // namespace cqed
