#include <doctest.h>

#include <cmath>
#include <random>

#include "cqed/constants.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/fitting.hpp"

using namespace cqed;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

template <typename F>
std::vector<double> sample(const std::vector<double>& x, F f) {
  std::vector<double> y;
  for (double v : x) y.push_back(f(v));
  return y;
}

void add_noise(std::vector<double>& y, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (double& v : y) v += normal(rng);
}

}  // namespace

TEST_CASE("exponential decay") {
  const auto x = linspace(0.0, 200e-9, 101);
  const auto clean = sample(x, [](double t) { return 0.9 * std::exp(-t / 42.3e-9) + 0.05; });
  const auto fit = fit_exponential_decay(x, clean);
  CHECK(fit.param("decay_time") == doctest::Approx(42.3e-9).epsilon(1e-3));
  CHECK(fit.converged);
  CHECK(fit.flags.empty());

  const auto x200 = linspace(0.0, 200e-9, 200);
  auto noisy = sample(x200, [](double t) { return std::exp(-t / 42.3e-9); });
  add_noise(noisy, 0.01, 4);
  CHECK(fit_exponential_decay(x200, noisy).param("decay_time") == doctest::Approx(42.3e-9).epsilon(0.02));

  const std::vector<double> flat(20, 0.3);
  const auto none = fit_exponential_decay(linspace(0.0, 1e-7, 20), flat);
  CHECK(none.has_flag("unbounded_decay_time"));
  CHECK(std::isinf(none.param("decay_time")));
}

TEST_CASE("Gaussian decay") {
  const auto x = linspace(0.0, 80e-9, 81);
  const auto y = sample(x, [](double t) { return 0.5 * std::exp(-std::pow(t / 30e-9, 2)) + 0.5; });
  CHECK(fit_gaussian_decay(x, y).param("decay_time") == doctest::Approx(30e-9).epsilon(1e-3));
}

TEST_CASE("damped cosine") {
  const auto x = linspace(0.0, 80e-9, 161);
  const auto y = sample(x, [](double t) {
    return 0.5 * std::exp(-t / 23.4e-9) * std::cos(kTwoPi * 100e6 * t + 0.3) + 0.5;
  });
  const auto fit = fit_damped_cosine(x, y);
  CHECK(fit.param("frequency") == doctest::Approx(100e6).epsilon(1e-3));
  CHECK(fit.param("decay_time") == doctest::Approx(23.4e-9).epsilon(1e-3));
  CHECK(fit.param("phase") == doctest::Approx(0.3).epsilon(1e-3));

  const std::vector<double> constant(x.size(), 0.5);
  CHECK_THROWS_AS(fit_damped_cosine(x, constant), FitError);

  const auto undamped = sample(x, [](double t) { return 0.5 * std::cos(kTwoPi * 100e6 * t) + 0.5; });
  const auto steady = fit_damped_cosine(x, undamped);
  CHECK(steady.has_flag("unbounded_decay_time"));
  CHECK(steady.param("frequency") == doctest::Approx(100e6).epsilon(0.01));
}

TEST_CASE("Lorentzian line") {
  const auto f = linspace(-30e6, 30e6, 241);
  const auto y = sample(f, [](double v) { return 0.02 + 0.3 / (1.0 + std::pow((v - 1e6) / 3.3e6, 2)); });
  const auto fit = fit_lorentzian(f, y);
  CHECK(fit.param("hwhm") == doctest::Approx(3.3e6).epsilon(0.01));
  CHECK(fit.param("center") == doctest::Approx(1e6).epsilon(1e-6));

  const std::vector<double> flat(f.size(), 0.1);
  CHECK(fit_lorentzian(f, flat).has_flag("unidentifiable_center"));

  // Steady-state qubit spectroscopy has a Lorentzian line of HWHM sqrt(γ2² + Ω²γ2/γ1).
  const DecoherenceParams dec{3e6, 1.8e6};
  const double rabi = 1e6;
  const auto pe = steady_state_spectroscopy(f, rabi, dec);
  CHECK(fit_lorentzian(f, pe).param("hwhm") == doctest::Approx(spectroscopy_hwhm(rabi, dec)).epsilon(0.02));
}

TEST_CASE("zero-power linewidth extrapolation") {
  const std::vector<double> powers{1e-15, 2e-15, 4e-15, 8e-15};
  const auto widths = sample(powers, [](double p) { return 3.3e6 + 2e20 * p; });
  const auto fit = extrapolate_zero_power_linewidth(powers, widths);
  CHECK(fit.param("gamma2_over_2pi") == doctest::Approx(3.3e6).epsilon(1e-9));
  CHECK(fit.param("t2") == doctest::Approx(48.2e-9).epsilon(1e-3));

  const std::vector<double> same(4, 3.3e6);
  const auto flat = extrapolate_zero_power_linewidth(powers, same);
  CHECK(flat.param("gamma2_over_2pi") == doctest::Approx(3.3e6));
  CHECK(flat.param("slope") == doctest::Approx(0.0).epsilon(1e-12).scale(1e20));

  // The saturation law is linear in the squared width; the Squared mode recovers γ2 exactly.
  const DecoherenceParams dec{3e6, 1.8e6};
  const double gamma2 = dec.gamma1 / 2.0 + dec.gamma_phi;
  std::vector<double> hwhm;
  for (double p : powers) hwhm.push_back(spectroscopy_hwhm(2.5e13 * std::sqrt(p), dec));
  CHECK(extrapolate_zero_power_linewidth(powers, hwhm, LinewidthMode::Squared).param("gamma2_over_2pi") ==
        doctest::Approx(gamma2).epsilon(1e-9));
  CHECK(extrapolate_zero_power_linewidth(powers, hwhm).param("gamma2_over_2pi") ==
        doctest::Approx(gamma2).epsilon(0.03));

  // Rescaling the power axis leaves the intercept unchanged.
  std::vector<double> scaled;
  for (double p : powers) scaled.push_back(1e3 * p);
  CHECK(extrapolate_zero_power_linewidth(scaled, widths).param("gamma2_over_2pi") ==
        doctest::Approx(fit.param("gamma2_over_2pi")).epsilon(1e-12));

  const auto rising = sample(powers, [](double p) { return -1e6 + 1e21 * p; });
  CHECK(extrapolate_zero_power_linewidth(powers, rising).has_flag("negative_intercept"));
}

TEST_CASE("photon number calibration") {
  const double g = 50e6, delta = -1e9;
  const std::vector<double> powers{0.0, 1e-15, 2e-15, 3e-15};
  const double per_photon = 2.0 * g * g / delta;
  const auto freqs = sample(powers, [&](double p) { return 3.7e9 + per_photon * 1e15 * p; });
  const auto fit = calibrate_photon_number(powers, freqs, g, delta);
  CHECK(fit.param("photons_per_watt") == doctest::Approx(1e15).epsilon(1e-9));
  CHECK(fit.series.at("photon_number")[2] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.flags.empty());
  CHECK(calibrate_photon_number(powers, freqs, g, -delta).has_flag("slope_sign_inconsistent"));
  CHECK_THROWS_AS(calibrate_photon_number(powers, freqs, g, 0.0), FitError);
}

TEST_CASE("Rabi sweep") {
  const auto amps = linspace(0.0, 1.25e9, 51);
  const double k = 2.0 * kPi / 0.836e9 * 0.5;
  const auto pe = sample(amps, [&](double a) { return 0.5 * (1.0 - std::cos(k * a)); });
  CHECK(fit_rabi_sweep(amps, pe).param("angle_per_amplitude") == doctest::Approx(k).epsilon(0.01));

  const std::vector<double> dark(amps.size(), 0.0);
  CHECK(fit_rabi_sweep(amps, dark).has_flag("unidentifiable"));
  CHECK_THROWS_AS(fit_rabi_sweep(std::vector<double>(10, 0.0), std::vector<double>(10, 0.5)), FitError);
}

TEST_CASE("fits reproduce the generating parameters") {
  const auto x = linspace(0.0, 150e-9, 120);
  const auto y = sample(x, [](double t) { return 0.7 * std::exp(-t / 31.7e-9) + 0.15; });
  const auto fit = fit_exponential_decay(x, y);
  CHECK(fit.param("decay_time") == doctest::Approx(31.7e-9).epsilon(1e-3));
  CHECK(fit.param("amplitude") == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(fit.param("offset") == doctest::Approx(0.15).epsilon(1e-3));
  CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("standard errors shrink as one over root N") {
  std::vector<double> errs;
  for (int n : {50, 200, 800}) {
    const auto x = linspace(0.0, 200e-9, n);
    auto y = sample(x, [](double t) { return std::exp(-t / 42.3e-9); });
    add_noise(y, 0.02, 17 + n);
    errs.push_back(fit_exponential_decay(x, y).error("decay_time"));
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.2));
}
