#pragma once

// Least-squares fitting of simulated traces: decays, fringes, Lorentzian lines,
// linewidth extrapolation, photon-number calibration and Rabi sweeps.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cqed {

enum class FitModelKind { ExpDecay, GaussianDecay, DampedCosine, Lorentzian, Linear, RabiVsAmplitude };

std::string to_string(FitModelKind kind);

struct FitResult {
  FitModelKind model = FitModelKind::Linear;
  std::map<std::string, double> params;
  std::map<std::string, double> std_errors;
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> flags;
  /// Derived per-point quantities, e.g. the photon-number axis of a calibration.
  std::map<std::string, std::vector<double>> series;

  bool has_flag(const std::string& flag) const;
  double param(const std::string& name) const;
  double error(const std::string& name) const;
};

struct LmOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
};

/// y = f(x, p). Parameters are optimized in units of `scale` so that numeric
/// derivatives and the damping are well conditioned.
using ModelFunction = std::function<double(double x, const Eigen::VectorXd& p)>;

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd std_errors;  // sqrt(diag((JᵀJ)⁻¹) · RSS / (n − p))
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Gauss–Newton with central-difference Jacobian.
LmResult levenberg_marquardt(const ModelFunction& model, const std::vector<double>& x,
                             const std::vector<double>& y, const Eigen::VectorXd& initial,
                             const Eigen::VectorXd& scale, const LmOptions& options = {});

/// y = a e^{−x/T} + c, fitted in the rate 1/T. Flags `unbounded_decay_time` when the
/// decay cannot be resolved; decay_time is then +inf.
FitResult fit_exponential_decay(const std::vector<double>& x, const std::vector<double>& y);

/// y = a e^{−(x/T)²} + c.
FitResult fit_gaussian_decay(const std::vector<double>& x, const std::vector<double>& y);

/// y = a e^{−x/T} cos(2π f x + φ) + c. Throws FitError when the data carry no
/// oscillation or span less than one period of the spectral peak.
FitResult fit_damped_cosine(const std::vector<double>& x, const std::vector<double>& y);

/// y = c + b / (1 + ((f − f0)/w)²). Flat data flag `unidentifiable_center`.
FitResult fit_lorentzian(const std::vector<double>& freq, const std::vector<double>& y);

/// Ordinary least squares y = slope·x + intercept with standard errors.
FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y);

enum class LinewidthMode { Linear, Squared };

/// Linewidth (or its square) against power; the zero-power intercept is γ2/2π and
/// t2 = 1/(2π·γ2/2π). Flags `negative_intercept`.
FitResult extrapolate_zero_power_linewidth(const std::vector<double>& powers,
                                           const std::vector<double>& linewidths,
                                           LinewidthMode mode = LinewidthMode::Linear);

/// ν̃_q against power; photons_per_watt = slope / (2g²/Δ). Flags `slope_sign_inconsistent`.
FitResult calibrate_photon_number(const std::vector<double>& powers,
                                  const std::vector<double>& qubit_freqs, double g, double delta_rq);

/// P_e = ½(1 − cos(k·A)). Flags `unidentifiable` when k is indistinguishable from 0.
FitResult fit_rabi_sweep(const std::vector<double>& amplitudes, const std::vector<double>& pe);

}  // namespace cqed
