#include "cqed/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

using nlohmann::json;

// Reader for one JSON object that tracks the field path and rejects unknown keys.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const {
    used_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key) const {
    used_.insert(key);
    if (!node_.contains(key)) throw ConfigError(field(key), "is required");
    return as_number(node_.at(key), field(key));
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(field(key), "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  Section child(const std::string& key) const {
    used_.insert(key);
    return Section(node_.at(key), field(key));
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
    return x;
  }

  const json& node_;
  std::string path_;
  mutable std::set<std::string> used_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

// Wraps a domain validation so its message is attributed to a config field.
template <typename F>
void validate_as(const std::string& field, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

DeviceParams parse_device(const Section& s) {
  DeviceParams d;
  {
    const Section q = s.child("dqd");
    d.dqd.tunnel_splitting_2t = q.number("tunnel_splitting_2t");
    d.dqd.detuning_delta = q.number("detuning_delta", 0.0);
    q.finish();
    validate_as(q.field("tunnel_splitting_2t"), [&] { d.dqd.validate(); });
  }
  {
    const Section r = s.child("resonator");
    d.resonator.bare_frequency_nu_r = r.number("bare_frequency_nu_r");
    d.resonator.kappa_ext = r.number("kappa_ext");
    d.resonator.kappa_int = r.number("kappa_int");
    d.resonator.coupling_capacitance_Cc = r.optional_number("coupling_capacitance_Cc");
    d.resonator.impedance_Zr = r.optional_number("impedance_Zr");
    d.resonator.line_impedance_Ztl = r.number("line_impedance_Ztl", 50.0);
    r.finish();
    validate_as(s.field("resonator"), [&] { d.resonator.validate(); });
  }
  {
    const Section c = s.child("coupling");
    d.coupling.g0 = c.number("g0");
    c.finish();
    validate_as(c.field("g0"), [&] { d.coupling.validate(); });
  }
  if (s.has("decoherence")) {
    const Section k = s.child("decoherence");
    const bool rates = k.has("gamma1") || k.has("gamma_phi");
    const bool times = k.has("t1") || k.has("t2");
    check(!(rates && times), s.field("decoherence"), "give either gamma1/gamma_phi or t1/t2, not both");
    if (times) {
      const double t1 = k.number("t1");
      const double t2 = k.number("t2");
      validate_as(s.field("decoherence"), [&] { d.decoherence = DecoherenceParams::from_times(t1, t2); });
    } else {
      d.decoherence.gamma1 = k.number("gamma1", 0.0);
      d.decoherence.gamma_phi = k.number("gamma_phi", 0.0);
    }
    k.finish();
    validate_as(s.field("decoherence"), [&] { d.decoherence.validate(); });
  }
  if (s.has("flux_map")) {
    const Section f = s.child("flux_map");
    FluxMap m;
    m.max_frequency_nu_r0 = f.number("max_frequency_nu_r0");
    m.flux = f.number("flux", 0.0);
    f.finish();
    d.flux_map = m;
    validate_as(s.field("flux_map"), [&] { (void)effective_resonator_frequency(d); });
  }
  s.finish();
  return d;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  return experiment_names()[static_cast<std::size_t>(kind)];
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"spectroscopy", "stark", "rabi", "ramsey",
                                              "t1", "echo", "readout-trace", "s11-sweep"};
  return names;
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  const auto& names = experiment_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<ExperimentKind>(i);
  }
  throw ConfigError("experiment", "unrecognized experiment '" + name + "'");
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return out;
}

ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<ExperimentKind> kind) {
  const Section root(doc, "");
  ExperimentConfig cfg;
  cfg.source = doc;

  if (root.has("experiment")) {
    const auto named = parse_experiment_kind(root.text("experiment", ""));
    if (kind && *kind != named) {
      throw ConfigError("experiment", "config names '" + to_string(named) + "' but the subcommand is '" +
                                          to_string(*kind) + "'");
    }
    cfg.kind = named;
  } else if (kind) {
    cfg.kind = *kind;
  } else {
    throw ConfigError("experiment", "is required when no subcommand is given");
  }
  if (root.has("description")) (void)root.text("description", "");

  if (!root.has("device")) throw ConfigError("device", "is required");
  cfg.device = parse_device(root.child("device"));

  const bool needs_sweep = cfg.kind != ExperimentKind::ReadoutTrace;
  if (root.has("sweep")) {
    const Section s = root.child("sweep");
    cfg.sweep.start = s.number("start");
    cfg.sweep.stop = s.number("stop");
    cfg.sweep.points = static_cast<int>(s.integer("points", 2));
    s.finish();
    check(cfg.sweep.points >= 2, "sweep.points", "must be >= 2");
  } else if (needs_sweep) {
    throw ConfigError("sweep", "is required for experiment '" + to_string(cfg.kind) + "'");
  }

  if (root.has("pulse")) {
    const Section p = root.child("pulse");
    cfg.pulse.sigma = p.number("sigma", cfg.pulse.sigma);
    cfg.pulse.truncation_k = p.number("truncation_k", cfg.pulse.truncation_k);
    cfg.pulse.drag_beta = p.number("drag_beta", 0.0);
    cfg.pulse.pi_amplitude = p.optional_number("pi_amplitude");
    cfg.pulse.readout_duration = p.number("readout_duration", cfg.pulse.readout_duration);
    cfg.pulse.lead_time = p.number("lead_time", 0.0);
    if (p.has("calibration")) {
      const Section c = p.child("calibration");
      cfg.pulse.calibration = AmplitudeCalibration{c.number("volts_to_rabi"), c.number("A0_volts")};
      c.finish();
    }
    p.finish();
    check(cfg.pulse.sigma > 0.0, "pulse.sigma", "must be > 0");
    check(cfg.pulse.truncation_k > 0.0, "pulse.truncation_k", "must be > 0");
    check(cfg.pulse.readout_duration > 0.0, "pulse.readout_duration", "must be > 0");
    check(cfg.pulse.lead_time >= 0.0, "pulse.lead_time", "must be >= 0");
    check(!cfg.pulse.pi_amplitude || *cfg.pulse.pi_amplitude > 0.0, "pulse.pi_amplitude", "must be > 0");
  }
  cfg.drive_detuning = root.number("drive_detuning", 0.0);

  if (root.has("readout")) {
    const Section r = root.child("readout");
    auto& h = cfg.readout.heterodyne;
    h.intermediate_frequency = r.number("intermediate_frequency", h.intermediate_frequency);
    h.sample_rate = r.number("sample_rate", h.sample_rate);
    h.lp_filter_cutoff = r.number("lp_filter_cutoff", h.lp_filter_cutoff);
    h.integration_window = r.number("integration_window", h.integration_window);
    h.filter_taps = static_cast<int>(r.integer("filter_taps", 0));
    cfg.readout.probe_frequency = r.optional_number("probe_frequency");
    cfg.readout.probe_photons = r.number("probe_photons", cfg.readout.probe_photons);
    cfg.readout.shots = static_cast<int>(r.integer("shots", 1));
    const std::string w = r.text("weights", "matched");
    check(w == "matched" || w == "flat", r.field("weights"), "must be 'matched' or 'flat'");
    cfg.readout.weights = w == "flat" ? IntegrationWeights::Flat : IntegrationWeights::Matched;
    r.finish();
    validate_as("readout", [&] { h.validate(); });
    check(cfg.readout.probe_photons > 0.0, "readout.probe_photons", "must be > 0");
    check(cfg.readout.shots >= 1, "readout.shots", "must be >= 1");
  }

  if (root.has("detector_noise")) {
    const Section n = root.child("detector_noise");
    auto& d = cfg.detector_noise;
    d.noise_temperature = n.number("noise_temperature", d.noise_temperature);
    d.system_gain = n.number("system_gain", d.system_gain);
    d.enabled = n.boolean("enabled", true);
    d.signal_frequency = n.number("signal_frequency", cfg.device.resonator.bare_frequency_nu_r);
    if (n.has("rng_seed")) d.rng_seed = static_cast<std::uint64_t>(n.integer("rng_seed", 1));
    n.finish();
    validate_as("detector_noise", [&] { d.validate(); });
  } else {
    cfg.detector_noise.enabled = false;
    cfg.detector_noise.signal_frequency = cfg.device.resonator.bare_frequency_nu_r;
  }

  if (root.has("ou_noise")) {
    const Section o = root.child("ou_noise");
    cfg.ou_noise.sigma_delta = o.number("sigma_delta");
    cfg.ou_noise.tau_c = o.number("tau_c");
    cfg.ou_noise.n_realizations = static_cast<int>(o.integer("n_realizations", 1000));
    o.finish();
    validate_as("ou_noise", [&] { cfg.ou_noise.validate(); });
  }

  if (root.has("simulation")) {
    const Section s = root.child("simulation");
    auto& sim = cfg.simulation;
    sim.fock_cutoff = static_cast<int>(s.integer("fock_cutoff", sim.fock_cutoff));
    sim.dt = s.number("dt", sim.dt);
    const std::string m = s.text("method", "rk4");
    check(m == "rk4" || m == "rk45", s.field("method"), "must be 'rk4' or 'rk45'");
    sim.method = m == "rk45" ? IntegrationMethod::AdaptiveRk45 : IntegrationMethod::FixedRk4;
    sim.tolerance = s.number("tolerance", sim.tolerance);
    sim.readout_dt = s.number("readout_dt", sim.readout_dt);
    sim.monte_carlo_dt = s.number("monte_carlo_dt", sim.monte_carlo_dt);
    sim.threads = static_cast<unsigned>(s.integer("threads", 0));
    s.finish();
    check(sim.fock_cutoff >= 2 && sim.fock_cutoff <= kDefaultMaxDimension / 2, "simulation.fock_cutoff",
          "must lie in [2, " + std::to_string(kDefaultMaxDimension / 2) + "]");
    check(sim.dt > 0.0, "simulation.dt", "must be > 0");
    check(sim.tolerance > 0.0, "simulation.tolerance", "must be > 0");
    check(sim.readout_dt > 0.0, "simulation.readout_dt", "must be > 0");
    check(sim.monte_carlo_dt > 0.0, "simulation.monte_carlo_dt", "must be > 0");
  }

  if (root.has("spectroscopy")) {
    const Section s = root.child("spectroscopy");
    auto& sp = cfg.spectroscopy;
    sp.powers = s.numbers("powers", sp.powers);
    sp.rabi_per_sqrt_watt = s.number("rabi_per_sqrt_watt", sp.rabi_per_sqrt_watt);
    const std::string m = s.text("linewidth_mode", "linear");
    check(m == "linear" || m == "squared", s.field("linewidth_mode"), "must be 'linear' or 'squared'");
    sp.mode = m == "squared" ? LinewidthMode::Squared : LinewidthMode::Linear;
    s.finish();
    check(sp.powers.size() >= 3, "spectroscopy.powers", "needs at least 3 powers");
    for (double p : sp.powers) check(p > 0.0, "spectroscopy.powers", "must be > 0");
    check(sp.rabi_per_sqrt_watt > 0.0, "spectroscopy.rabi_per_sqrt_watt", "must be > 0");
  }

  if (root.has("stark")) {
    const Section s = root.child("stark");
    auto& st = cfg.stark;
    st.photons_per_watt = s.number("photons_per_watt", st.photons_per_watt);
    st.probe_span = s.number("probe_span", st.probe_span);
    st.probe_points = static_cast<int>(s.integer("probe_points", st.probe_points));
    s.finish();
    check(st.photons_per_watt > 0.0, "stark.photons_per_watt", "must be > 0");
    check(st.probe_span > 0.0, "stark.probe_span", "must be > 0");
    check(st.probe_points >= 7, "stark.probe_points", "must be >= 7");
  }
  root.finish();

  // Experiment-specific requirements.
  const auto& dec = cfg.device.decoherence;
  switch (cfg.kind) {
    case ExperimentKind::Spectroscopy:
      check(dec.gamma1 > 0.0, "device.decoherence.gamma1", "must be > 0 for a steady state");
      check(cfg.sweep.start < cfg.sweep.stop, "sweep", "start must be below stop");
      break;
    case ExperimentKind::Stark:
      check(cfg.sweep.start >= 0.0, "sweep.start", "powers must be >= 0");
      check(cfg.sweep.points >= 3, "sweep.points", "needs at least 3 powers");
      break;
    case ExperimentKind::Rabi:
      check(cfg.sweep.start >= 0.0 && cfg.sweep.stop >= 0.0, "sweep", "amplitudes must be >= 0");
      check(cfg.sweep.points >= 5, "sweep.points", "needs at least 5 amplitudes");
      break;
    case ExperimentKind::Ramsey:
    case ExperimentKind::T1:
    case ExperimentKind::Echo:
      check(cfg.sweep.start >= 0.0 && cfg.sweep.stop > cfg.sweep.start, "sweep",
            "delays must satisfy 0 <= start < stop");
      check(cfg.sweep.points >= 8, "sweep.points", "needs at least 8 delays");
      break;
    case ExperimentKind::ReadoutTrace:
      break;
    case ExperimentKind::S11Sweep:
      check(cfg.sweep.start > 0.0 && cfg.sweep.stop > cfg.sweep.start, "sweep",
            "probe frequencies must satisfy 0 < start < stop");
      check(cfg.sweep.points >= 7, "sweep.points", "needs at least 7 frequencies");
      check(cfg.device.resonator.kappa_tot() > 0.0, "device.resonator", "kappa_ext + kappa_int must be > 0");
      break;
  }
  return cfg;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace cqed
