#include "cqed/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_points(const std::vector<double>& x, const std::vector<double>& y, std::size_t min,
                    const char* who) {
  if (x.size() != y.size()) throw FitError(std::string(who) + ": x and y differ in length");
  if (x.size() < min) {
    throw FitError(std::string(who) + ": needs at least " + std::to_string(min) + " points");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw FitError(std::string(who) + ": non-finite data");
  }
}

double span_of(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

bool is_flat(const std::vector<double>& y) { return span_of(y) <= 1e-12 * (1.0 + max_abs(y)); }

double residual_rms(const ModelFunction& f, const std::vector<double>& x, const std::vector<double>& y,
                    const Eigen::VectorXd& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = f(x[i], p) - y[i];
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Least squares over a fixed basis; returns coefficients and the residual sum of squares.
std::pair<Eigen::VectorXd, double> linear_basis_fit(const Eigen::MatrixXd& basis, const Eigen::VectorXd& y) {
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
  return {c, (basis * c - y).squaredNorm()};
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

FitResult finish(FitModelKind kind, const LmResult& lm, const std::vector<std::string>& names,
                 const ModelFunction& f, const std::vector<double>& x, const std::vector<double>& y) {
  FitResult r;
  r.model = kind;
  for (std::size_t i = 0; i < names.size(); ++i) {
    r.params[names[i]] = lm.params(static_cast<Eigen::Index>(i));
    r.std_errors[names[i]] = lm.std_errors(static_cast<Eigen::Index>(i));
  }
  r.residual_rms = residual_rms(f, x, y, lm.params);
  r.converged = lm.converged;
  r.iterations = lm.iterations;
  return r;
}

// Decay time and its error from a fitted rate; unresolvable decays become +inf.
void add_decay_time(FitResult& r, double span, const char* rate_name) {
  const double rate = r.params[rate_name];
  const double err = r.std_errors[rate_name];
  if (rate <= 0.0 || rate * span < 1e-3) {
    r.params["decay_time"] = kInf;
    r.std_errors["decay_time"] = kInf;
    r.flags.push_back("unbounded_decay_time");
  } else {
    r.params["decay_time"] = 1.0 / rate;
    r.std_errors["decay_time"] = err / (rate * rate);
  }
}

// Shared path for y = a·shape(r x) + c; `shape` is e^{−u} or e^{−u²}.
FitResult fit_decay(FitModelKind kind, double (*shape)(double), const std::vector<double>& x,
                    const std::vector<double>& y, const char* who) {
  require_points(x, y, 5, who);
  const double span = span_of(x);
  if (!(span > 0.0)) throw FitError(std::string(who) + ": x values do not span an interval");
  if (is_flat(y)) {
    FitResult r;
    r.model = kind;
    r.params = {{"amplitude", 0.0}, {"rate", 0.0}, {"offset", y.back()}};
    r.std_errors = {{"amplitude", 0.0}, {"rate", 0.0}, {"offset", 0.0}};
    r.converged = true;
    add_decay_time(r, span, "rate");
    return r;
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::VectorXd yv = to_vector(y);
  double best_rss = kInf, best_rate = 1.0 / span;
  Eigen::VectorXd best_c;
  for (double rate : log_grid(0.01 / span, 100.0 / span, 80)) {
    Eigen::MatrixXd basis(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      basis(i, 0) = shape(rate * x[static_cast<std::size_t>(i)]);
      basis(i, 1) = 1.0;
    }
    auto [c, rss] = linear_basis_fit(basis, yv);
    if (rss < best_rss) {
      best_rss = rss;
      best_rate = rate;
      best_c = c;
    }
  }
  const ModelFunction f = [shape](double xi, const Eigen::VectorXd& p) {
    return p(0) * shape(p(1) * xi) + p(2);
  };
  Eigen::VectorXd p0(3), scale(3);
  p0 << best_c(0), best_rate, best_c(1);
  const double range = span_of(y);
  scale << std::max(std::abs(best_c(0)), range), best_rate, std::max(std::abs(best_c(1)), range);
  const LmResult lm = levenberg_marquardt(f, x, y, p0, scale);
  FitResult r = finish(kind, lm, {"amplitude", "rate", "offset"}, f, x, y);
  add_decay_time(r, span, "rate");
  return r;
}

double exp_shape(double u) { return std::exp(-u); }
double gauss_shape(double u) { return std::exp(-u * u); }

}  // namespace

std::string to_string(FitModelKind kind) {
  switch (kind) {
    case FitModelKind::ExpDecay: return "exp_decay";
    case FitModelKind::GaussianDecay: return "gaussian_decay";
    case FitModelKind::DampedCosine: return "damped_cosine";
    case FitModelKind::Lorentzian: return "lorentzian";
    case FitModelKind::Linear: return "linear";
    case FitModelKind::RabiVsAmplitude: return "rabi_vs_amplitude";
  }
  return "unknown";
}

bool FitResult::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double FitResult::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) throw FitError("fit result has no parameter '" + name + "'");
  return it->second;
}

double FitResult::error(const std::string& name) const {
  const auto it = std_errors.find(name);
  if (it == std_errors.end()) throw FitError("fit result has no parameter '" + name + "'");
  return it->second;
}

LmResult levenberg_marquardt(const ModelFunction& model, const std::vector<double>& x,
                             const std::vector<double>& y, const Eigen::VectorXd& initial,
                             const Eigen::VectorXd& scale, const LmOptions& options) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto m = initial.size();
  if (scale.size() != m) throw FitError("levenberg_marquardt: scale has wrong length");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(scale(j) > 0.0) || !std::isfinite(scale(j))) throw FitError("levenberg_marquardt: bad scale");
  }
  auto residuals = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd p = u.cwiseProduct(scale);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = model(x[static_cast<std::size_t>(i)], p) - y[static_cast<std::size_t>(i)];
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& u) {
    Eigen::MatrixXd j(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(u(k)));
      Eigen::VectorXd up = u, dn = u;
      up(k) += h;
      dn(k) -= h;
      j.col(k) = (residuals(up) - residuals(dn)) / (2.0 * h);
    }
    return j;
  };

  Eigen::VectorXd u = initial.cwiseQuotient(scale);
  Eigen::VectorXd r = residuals(u);
  double rss = r.squaredNorm();
  if (!std::isfinite(rss)) throw FitError("levenberg_marquardt: model is not finite at the initial guess");
  double lambda = 1e-3;
  LmResult out;
  Eigen::MatrixXd j = jacobian(u);
  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::MatrixXd a = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    const double diag_floor = 1e-12 * std::max(a.diagonal().maxCoeff(), 1e-300);
    Eigen::MatrixXd damped = a;
    for (Eigen::Index k = 0; k < m; ++k) damped(k, k) += lambda * std::max(a(k, k), diag_floor);
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    if (!step.allFinite()) break;
    const bool small = step.norm() <= options.step_tolerance * (u.norm() + options.step_tolerance);
    const Eigen::VectorXd trial = u + step;
    const Eigen::VectorXd r_trial = residuals(trial);
    const double rss_trial = r_trial.squaredNorm();
    if (std::isfinite(rss_trial) && rss_trial <= rss) {
      u = trial;
      r = r_trial;
      rss = rss_trial;
      j = jacobian(u);
      lambda = std::max(lambda / 10.0, 1e-12);
    } else {
      lambda *= 10.0;
    }
    if (small || rss == 0.0) {
      out.converged = true;
      break;
    }
  }
  out.params = u.cwiseProduct(scale);
  out.rss = rss;
  out.std_errors = Eigen::VectorXd::Zero(m);
  if (n > m) {
    const Eigen::MatrixXd cov = (j.transpose() * j).completeOrthogonalDecomposition().pseudoInverse();
    const double sigma2 = rss / static_cast<double>(n - m);
    for (Eigen::Index k = 0; k < m; ++k) {
      out.std_errors(k) = std::sqrt(std::max(0.0, cov(k, k)) * sigma2) * scale(k);
    }
  }
  return out;
}

FitResult fit_exponential_decay(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_decay(FitModelKind::ExpDecay, exp_shape, x, y, "fit_exponential_decay");
}

FitResult fit_gaussian_decay(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_decay(FitModelKind::GaussianDecay, gauss_shape, x, y, "fit_gaussian_decay");
}

FitResult fit_damped_cosine(const std::vector<double>& x, const std::vector<double>& y) {
  require_points(x, y, 8, "fit_damped_cosine");
  const double span = span_of(x);
  if (!(span > 0.0)) throw FitError("fit_damped_cosine: x values do not span an interval");
  if (is_flat(y)) throw FitError("fit_damped_cosine: no oscillation, frequency unidentifiable");
  const auto n = static_cast<Eigen::Index>(x.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double nyquist = 0.5 * static_cast<double>(n - 1) / span;

  // Spectral peak of the mean-removed data on a zero-padded frequency grid.
  const double df = 1.0 / (8.0 * span);
  double peak_f = 0.0, peak_power = -1.0;
  for (double f = df; f <= nyquist; f += df) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ph = kTwoPi * f * x[static_cast<std::size_t>(i)];
      re += (y[static_cast<std::size_t>(i)] - mean) * std::cos(ph);
      im += (y[static_cast<std::size_t>(i)] - mean) * std::sin(ph);
    }
    const double power = re * re + im * im;
    if (power > peak_power) {
      peak_power = power;
      peak_f = f;
    }
  }
  if (peak_f * span < 1.0) {
    throw FitError("fit_damped_cosine: frequency unresolvable, data span less than one period");
  }

  // Joint grid over (f, rate) with the linear parameters solved exactly.
  const Eigen::VectorXd yv = to_vector(y);
  std::vector<double> rates{0.0};
  for (double r : log_grid(0.05 / span, 30.0 / span, 40)) rates.push_back(r);
  double best_rss = kInf, best_f = peak_f, best_rate = 0.0;
  Eigen::VectorXd best_c;
  for (int k = -16; k <= 16; ++k) {
    const double f = peak_f + k * df / 4.0;
    if (f <= 0.0) continue;
    for (double rate : rates) {
      Eigen::MatrixXd basis(n, 3);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        const double env = std::exp(-rate * xi);
        basis(i, 0) = env * std::cos(kTwoPi * f * xi);
        basis(i, 1) = env * std::sin(kTwoPi * f * xi);
        basis(i, 2) = 1.0;
      }
      auto [c, rss] = linear_basis_fit(basis, yv);
      if (rss < best_rss) {
        best_rss = rss;
        best_f = f;
        best_rate = rate;
        best_c = c;
      }
    }
  }
  // A cos θ + B sin θ = R cos(θ + φ) with φ = atan2(−B, A).
  const double amp = std::hypot(best_c(0), best_c(1));
  if (amp <= 1e-12 * (1.0 + max_abs(y))) {
    throw FitError("fit_damped_cosine: zero oscillation amplitude, frequency unidentifiable");
  }
  const double phase = std::atan2(-best_c(1), best_c(0));
  const ModelFunction f = [](double xi, const Eigen::VectorXd& p) {
    return p(0) * std::exp(-p(3) * xi) * std::cos(kTwoPi * p(1) * xi + p(2)) + p(4);
  };
  Eigen::VectorXd p0(5), scale(5);
  p0 << amp, best_f, phase, best_rate, best_c(2);
  scale << amp, best_f, 1.0, 1.0 / span, std::max(std::abs(best_c(2)), amp);
  const LmResult lm = levenberg_marquardt(f, x, y, p0, scale);
  FitResult r = finish(FitModelKind::DampedCosine, lm, {"amplitude", "frequency", "phase", "rate", "offset"},
                       f, x, y);
  if (r.params["amplitude"] < 0.0) {
    r.params["amplitude"] = -r.params["amplitude"];
    r.params["phase"] += kPi;
  }
  r.params["phase"] = std::remainder(r.params["phase"], kTwoPi);
  add_decay_time(r, span, "rate");
  return r;
}

FitResult fit_lorentzian(const std::vector<double>& freq, const std::vector<double>& y) {
  require_points(freq, y, 7, "fit_lorentzian");
  const double span = span_of(freq);
  if (!(span > 0.0)) throw FitError("fit_lorentzian: frequencies do not span an interval");
  const std::size_t n = freq.size();
  if (is_flat(y)) {
    FitResult r;
    r.model = FitModelKind::Lorentzian;
    r.params = {{"center", 0.5 * (freq.front() + freq.back())}, {"hwhm", 0.0}, {"amplitude", 0.0},
                {"offset", y.front()}};
    r.std_errors = {{"center", kInf}, {"hwhm", kInf}, {"amplitude", 0.0}, {"offset", 0.0}};
    r.converged = true;
    r.flags.push_back("unidentifiable_center");
    return r;
  }
  // Offset from the outer tenth of the sweep on each side.
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double offset = 0.0;
  for (std::size_t i = 0; i < edge; ++i) offset += y[i] + y[n - 1 - i];
  offset /= static_cast<double>(2 * edge);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(y[i] - offset) > std::abs(y[peak] - offset)) peak = i;
  }
  const double height = y[peak] - offset;
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && std::abs(y[lo] - offset) > 0.5 * std::abs(height)) --lo;
  while (hi + 1 < n && std::abs(y[hi] - offset) > 0.5 * std::abs(height)) ++hi;
  double width = 0.5 * std::abs(freq[hi] - freq[lo]);
  if (!(width > 0.0)) width = span / static_cast<double>(n);

  const ModelFunction f = [](double xi, const Eigen::VectorXd& p) {
    const double u = (xi - p(0)) / p(1);
    return p(3) + p(2) / (1.0 + u * u);
  };
  Eigen::VectorXd p0(4), scale(4);
  p0 << freq[peak], width, height, offset;
  scale << width, width, std::abs(height), std::max(std::abs(offset), std::abs(height));
  const LmResult lm = levenberg_marquardt(f, freq, y, p0, scale);
  FitResult r = finish(FitModelKind::Lorentzian, lm, {"center", "hwhm", "amplitude", "offset"}, f, freq, y);
  r.params["hwhm"] = std::abs(r.params["hwhm"]);
  return r;
}

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  require_points(x, y, 2, "fit_linear");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_linear: x values are all equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    rss += r * r;
  }
  FitResult out;
  out.model = FitModelKind::Linear;
  out.params = {{"slope", slope}, {"intercept", intercept}};
  const double s2 = x.size() > 2 ? rss / (n - 2.0) : 0.0;
  out.std_errors = {{"slope", std::sqrt(s2 / sxx)}, {"intercept", std::sqrt(s2 * (1.0 / n + mx * mx / sxx))}};
  out.residual_rms = std::sqrt(rss / n);
  out.converged = true;
  return out;
}

FitResult extrapolate_zero_power_linewidth(const std::vector<double>& powers,
                                           const std::vector<double>& linewidths, LinewidthMode mode) {
  require_points(powers, linewidths, 3, "extrapolate_zero_power_linewidth");
  std::vector<double> y = linewidths;
  if (mode == LinewidthMode::Squared) {
    for (double& v : y) v *= v;
  }
  const FitResult lin = fit_linear(powers, y);
  FitResult out = lin;
  const double intercept = lin.param("intercept");
  const double err = lin.error("intercept");
  double gamma2 = intercept, gamma2_err = err;
  if (mode == LinewidthMode::Squared) {
    gamma2 = intercept > 0.0 ? std::sqrt(intercept) : 0.0;
    gamma2_err = intercept > 0.0 ? err / (2.0 * gamma2) : kInf;
  }
  if (intercept <= 0.0) out.flags.push_back("negative_intercept");
  out.params["gamma2_over_2pi"] = gamma2;
  out.std_errors["gamma2_over_2pi"] = gamma2_err;
  if (gamma2 > 0.0) {
    out.params["t2"] = 1.0 / (kTwoPi * gamma2);
    out.std_errors["t2"] = gamma2_err / (kTwoPi * gamma2 * gamma2);
  } else {
    out.params["t2"] = kInf;
    out.std_errors["t2"] = kInf;
  }
  return out;
}

FitResult calibrate_photon_number(const std::vector<double>& powers,
                                  const std::vector<double>& qubit_freqs, double g, double delta_rq) {
  require_points(powers, qubit_freqs, 3, "calibrate_photon_number");
  if (delta_rq == 0.0) throw FitError("calibrate_photon_number: detuning must be nonzero");
  if (!(g > 0.0)) throw FitError("calibrate_photon_number: coupling must be > 0");
  const FitResult lin = fit_linear(powers, qubit_freqs);
  const double per_photon = 2.0 * g * g / delta_rq;
  FitResult out = lin;
  out.params["per_photon_shift"] = per_photon;
  out.std_errors["per_photon_shift"] = 0.0;
  out.params["photons_per_watt"] = lin.param("slope") / per_photon;
  out.std_errors["photons_per_watt"] = lin.error("slope") / std::abs(per_photon);
  out.params["frequency_intercept"] = lin.param("intercept");
  out.std_errors["frequency_intercept"] = lin.error("intercept");
  if (lin.param("slope") * delta_rq < 0.0) out.flags.push_back("slope_sign_inconsistent");
  std::vector<double> photons;
  for (double p : powers) photons.push_back(p * out.params["photons_per_watt"]);
  out.series["photon_number"] = photons;
  return out;
}

FitResult fit_rabi_sweep(const std::vector<double>& amplitudes, const std::vector<double>& pe) {
  require_points(amplitudes, pe, 5, "fit_rabi_sweep");
  const double a_max = max_abs(amplitudes);
  if (!(a_max > 0.0)) throw FitError("fit_rabi_sweep: amplitudes are all zero");
  const ModelFunction f = [](double a, const Eigen::VectorXd& p) { return 0.5 * (1.0 - std::cos(p(0) * a)); };
  FitResult out;
  out.model = FitModelKind::RabiVsAmplitude;
  if (max_abs(pe) < 1e-9) {
    out.params = {{"angle_per_amplitude", 0.0}};
    out.std_errors = {{"angle_per_amplitude", kInf}};
    out.converged = true;
    out.flags.push_back("unidentifiable");
    return out;
  }
  // Grid over k up to one π rotation per sample spacing.
  const double k_max = kPi * static_cast<double>(amplitudes.size()) / a_max;
  const int grid = 40 * static_cast<int>(amplitudes.size());
  double best_k = 0.0, best_rss = kInf;
  Eigen::VectorXd p(1);
  for (int i = 0; i <= grid; ++i) {
    p(0) = k_max * i / grid;
    double rss = 0.0;
    for (std::size_t j = 0; j < pe.size(); ++j) {
      const double r = f(amplitudes[j], p) - pe[j];
      rss += r * r;
    }
    if (rss < best_rss) {
      best_rss = rss;
      best_k = p(0);
    }
  }
  if (best_k * a_max < 1e-3) {
    out.params = {{"angle_per_amplitude", 0.0}};
    out.std_errors = {{"angle_per_amplitude", kInf}};
    out.converged = true;
    out.flags.push_back("unidentifiable");
    return out;
  }
  Eigen::VectorXd p0(1), scale(1);
  p0 << best_k;
  scale << best_k;
  const LmResult lm = levenberg_marquardt(f, amplitudes, pe, p0, scale);
  return finish(FitModelKind::RabiVsAmplitude, lm, {"angle_per_amplitude"}, f, amplitudes, pe);
}

}  // namespace cqed
