#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "cqed/noise.hpp"
#include "cqed/pulses.hpp"

using namespace cqed;

namespace {

// Midpoint rule; never samples the truncation edges.
double integrate(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

SequenceConfig base_config() {
  SequenceConfig cfg;
  cfg.qubit_frequency = 4.0e9;
  cfg.sigma = 0.5e-9;
  cfg.pi_amplitude = amplitude_for_angle(kPi, cfg.sigma);
  return cfg;
}

}  // namespace

TEST_CASE("Gaussian envelope") {
  const GaussianPulse p{2e8, 3e-9, 0.5e-9, 2.0};
  CHECK(envelope_value(p, 3e-9) == doctest::Approx(2e8));
  CHECK(envelope_value(p, 3.5e-9) == doctest::Approx(2e8 * std::exp(-0.5)));
  CHECK(envelope_value(p, 4.01e-9) == 0.0);
  CHECK(envelope_value(p, 1.99e-9) == 0.0);

  const double numeric = integrate([&](double t) { return envelope_value(p, t); }, p.start(), p.end(), 200000);
  const double closed = 2e8 * 0.5e-9 * std::sqrt(kTwoPi) * std::erf(2.0 / std::sqrt(2.0));
  CHECK(envelope_area(p) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(numeric == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("DRAG quadrature") {
  const DragPulse p{{2e8, 3e-9, 0.5e-9, 2.0}, 0.3e-9};
  CHECK(drag_quadrature_value(p, 3e-9) == 0.0);
  for (double x : {0.1e-9, 0.37e-9, 0.8e-9}) {
    CHECK(drag_quadrature_value(p, 3e-9 + x) == doctest::Approx(-drag_quadrature_value(p, 3e-9 - x)).epsilon(1e-12));
  }
  const double integral =
      integrate([&](double t) { return drag_quadrature_value(p, t); }, p.base.start(), p.base.end(), 20000);
  const double scale = 2e8 * 0.3e-9;
  CHECK(std::abs(integral) / scale < 1e-12);

  const DragPulse none{{2e8, 3e-9, 0.5e-9, 2.0}, 0.0};
  for (double t = 2e-9; t < 4e-9; t += 0.1e-9) CHECK(drag_quadrature_value(none, t) == 0.0);
}

TEST_CASE("Rabi angle and amplitude calibration") {
  const GaussianPulse p{3e8, 0.0, 0.5e-9, 2.0};
  GaussianPulse wide = p;
  wide.sigma *= 2.0;
  CHECK(rabi_angle(wide) == doctest::Approx(2.0 * rabi_angle(p)).epsilon(1e-14));
  CHECK(rabi_angle(GaussianPulse{0.0, 0.0, 0.5e-9, 2.0}) == 0.0);
  GaussianPulse area = p;
  area.amplitude_A *= 2.0;
  area.sigma *= 0.5;
  CHECK(rabi_angle(area) == doctest::Approx(rabi_angle(p)).epsilon(1e-15));

  const double a = amplitude_for_angle(kPi, 0.25e-9);
  CHECK(rabi_angle(GaussianPulse{a, 0.0, 0.25e-9, 2.0}) == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(amplitude_for_angle(kPi, 0.125e-9) == doctest::Approx(2.0 * a).epsilon(1e-14));
  // Closed form: π / (2π √(2π) σ erf(√2)).
  const double closed = kPi / (kTwoPi * std::sqrt(kTwoPi) * 0.25e-9 * std::erf(std::sqrt(2.0)));
  CHECK(a == doctest::Approx(closed).epsilon(1e-12));
  CHECK(a == doctest::Approx(0.836e9).epsilon(2e-3));
  // The mean rate over the 1 ns window is of order the ~800 MHz hardware ceiling.
  const double mean_rate = envelope_area(GaussianPulse{a, 0.0, 0.25e-9, 2.0}) / 1e-9;
  CHECK(mean_rate > 0.4e9);
  CHECK(mean_rate < 1.0e9);
  CHECK_THROWS_AS(amplitude_for_angle(kPi, 0.0), ParameterError);
}

TEST_CASE("hardware limit on the pi amplitude") {
  const AmplitudeCalibration cal{1e9, 0.9};
  CHECK(calibrate_pi_amplitude(0.25e-9, cal) == doctest::Approx(amplitude_for_angle(kPi, 0.25e-9)));
  const AmplitudeCalibration weak{1e9, 0.5};
  CHECK_THROWS_AS(calibrate_pi_amplitude(0.25e-9, weak), ParameterError);
  CHECK_THROWS_AS(calibrate_pi_amplitude(0.25e-9, AmplitudeCalibration{0.0, 1.0}), ParameterError);
}

TEST_CASE("sequence timing") {
  const SequenceConfig cfg = base_config();
  const double width = 4.0 * cfg.sigma;
  for (double tau : {0.0, 5e-9, 37e-9}) {
    const auto ramsey = build_ramsey_sequence(tau, 0.0, cfg);
    const auto echo = build_echo_sequence(tau, cfg);
    CHECK(echo.control_duration() - ramsey.control_duration() == doctest::Approx(width).epsilon(1e-12));
    CHECK(ramsey.readout_window.start == doctest::Approx(ramsey.control_duration()));
    CHECK(ramsey.readout_window.duration == 400e-9);
  }
  const auto t1 = build_t1_sequence(20e-9, cfg);
  CHECK(t1.readout_window.start == doctest::Approx(width + 20e-9));
  CHECK(t1.total_duration == doctest::Approx(width + 20e-9 + 400e-9));
  CHECK(ReadoutWindow{}.duration == 400e-9);
  CHECK_THROWS_AS(build_ramsey_sequence(-1e-9, 0.0, cfg), ParameterError);
  CHECK_THROWS_AS(build_echo_sequence(-1e-9, cfg), ParameterError);
}

TEST_CASE("sequence builders never overlap pulses") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 1000; ++draw) {
    SequenceConfig cfg;
    cfg.qubit_frequency = 3e9 + 2e9 * u(rng);
    cfg.sigma = (0.1 + 2.0 * u(rng)) * 1e-9;
    cfg.truncation_k = 1.0 + 3.0 * u(rng);
    cfg.pi_amplitude = amplitude_for_angle(kPi, cfg.sigma, cfg.truncation_k);
    cfg.lead_time = 10e-9 * u(rng);
    const double tau = 100e-9 * u(rng);
    for (const auto& seq : {build_rabi_sequence(cfg.pi_amplitude * 3.0 * u(rng), cfg.sigma, cfg),
                            build_ramsey_sequence(tau, 1e8 * u(rng), cfg), build_t1_sequence(tau, cfg),
                            build_echo_sequence(tau, cfg)}) {
      CHECK_NOTHROW(seq.check_disjoint());
      for (std::size_t i = 1; i < seq.pulses.size(); ++i) {
        CHECK(seq.pulses[i].pulse.base.start() >= seq.pulses[i - 1].pulse.base.end() - 1e-18);
      }
    }
  }
  PulseSequence bad;
  ScheduledPulse p;
  p.pulse.base = {1e8, 1e-9, 0.5e-9, 2.0};
  bad.pulses = {p, p};
  CHECK_THROWS_AS(bad.check_disjoint(), ParameterError);
}

TEST_CASE("Ramsey at zero delay acts as a pi rotation") {
  const SequenceConfig cfg = base_config();
  const auto seq = build_ramsey_sequence(0.0, 0.0, cfg);
  double angle = 0.0;
  for (const auto& p : seq.pulses) angle += rabi_angle(p.pulse.base);
  CHECK(angle == doctest::Approx(kPi).epsilon(1e-12));

  MonteCarloOptions opt;
  opt.qubit_frequency = cfg.qubit_frequency;
  opt.dt = 1e-12;
  const auto r = monte_carlo_dephasing(seq, OuNoiseModel{0.0, 1e-6, 1}, DecoherenceParams{}, opt);
  CHECK(r.excited_population == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("drive waveform in the rotating frame") {
  const SequenceConfig cfg = base_config();
  const auto seq = build_ramsey_sequence(10e-9, 100e6, cfg);
  const auto& second = seq.pulses[1].pulse.base;
  const double t = second.center_t0;
  const Complex in_frame = seq.drive(t, cfg.qubit_frequency);
  CHECK(std::abs(in_frame) == doctest::Approx(second.amplitude_A));
  CHECK(std::abs(std::remainder(std::arg(in_frame) + kTwoPi * 100e6 * t, kTwoPi)) < 1e-9);
  const Complex on_carrier = seq.drive(t, cfg.qubit_frequency - 100e6);
  CHECK(std::abs(on_carrier.imag()) < 1e-9 * std::abs(on_carrier));

  std::ostringstream csv;
  write_sequence_csv(csv, seq, 25e9);
  const std::string text = csv.str();
  CHECK(text.rfind("time,in_phase,quadrature,carrier_frequency\n", 0) == 0);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == static_cast<long>(std::floor(seq.total_duration * 25e9)) + 2);
}
