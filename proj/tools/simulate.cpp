// simulate <experiment> --config <file> --seed <n> --out <dir>
// simulate check --run <manifest> --reference <file>
//
// Exit status: 0 success / reference passed, 1 failure, 2 configuration error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/experiments.hpp"
#include "cqed/io.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int run(const std::string& name, const std::string& config_path, std::uint64_t seed, const std::string& out) {
  const auto doc = cqed::load_json_file(config_path);
  const auto config = cqed::parse_config(doc, cqed::parse_experiment_kind(name));
  const auto result = cqed::run_experiment(config, seed);
  const auto manifest = cqed::write_run(config, result, seed, out);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << name << ": wrote " << manifest.at("outputs").size() << " files to " << out
            << " (manifest " << manifest.at("manifest_hash").get<std::string>() << ")\n";
  for (const auto& [k, v] : result.quantities) std::cout << "  " << k << " = " << v << "\n";
  return kExitPass;
}

int check(const std::string& run_path, const std::string& reference_path) {
  const auto manifest = cqed::load_json_file(run_path);
  const auto reference = cqed::load_json_file(reference_path);
  const auto report = cqed::compare_to_reference(manifest, reference);
  cqed::print_report(std::cout, report);
  return report.passed() ? kExitPass : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charge-qubit circuit QED experiment simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 1;
  for (const auto& name : cqed::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_dir, "output directory");
  }
  std::string run_path, reference_path;
  auto* chk = app.add_subcommand("check", "compare a run manifest against reference values");
  chk->add_option("--run", run_path, "manifest.json of a run")->required();
  chk->add_option("--reference", reference_path, "reference quantities (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (chk->parsed()) return check(run_path, reference_path);
    for (const auto* sub : app.get_subcommands()) return run(sub->get_name(), config_path, seed, out_dir);
  } catch (const cqed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
