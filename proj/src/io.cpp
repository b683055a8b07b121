#include "cqed/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json diagnostics_json(const TrajectoryDiagnostics& d) {
  return {{"max_trace_error", d.max_trace_error},
          {"max_hermiticity_error", d.max_hermiticity_error},
          {"min_eigenvalue", d.min_eigenvalue},
          {"max_top_fock_population", d.max_top_fock_population}};
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

nlohmann::json to_json(const FitResult& fit) {
  json params = json::object(), errors = json::object();
  for (const auto& [k, v] : fit.params) params[k] = number_or_null(v);
  for (const auto& [k, v] : fit.std_errors) errors[k] = number_or_null(v);
  json out = {{"model", to_string(fit.model)},
              {"params", params},
              {"std_errors", errors},
              {"residual_rms", number_or_null(fit.residual_rms)},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"flags", fit.flags}};
  if (!fit.series.empty()) out["series"] = fit.series;
  return out;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  char buf[32];
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DimensionError("format_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string manifest_hash(const nlohmann::json& manifest) {
  const json hashed = {{"config_hash", manifest.at("config_hash")},
                       {"seed", manifest.at("seed")},
                       {"version", manifest.at("version")},
                       {"outputs", manifest.at("outputs")},
                       {"results", manifest.at("results")}};
  return hex_digest(fnv1a(hashed.dump()));
}

nlohmann::json write_run(const ExperimentConfig& config, const ExperimentResult& result, std::uint64_t seed,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  json outputs = json::array();
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    outputs.push_back({{"file", name}, {"fnv1a", hex_digest(fnv1a(content))}});
  };
  for (const auto& [name, table] : result.tables) emit(name, format_csv(table));

  json fits = json::object();
  for (const auto& [name, fit] : result.fits) fits[name] = to_json(fit);
  json results = json::object();
  for (const auto& [name, value] : result.quantities) results[name] = number_or_null(value);
  const json report = {{"experiment", to_string(result.kind)}, {"fits", fits}, {"results", results}};
  emit("fit.json", report.dump(2) + "\n");

  json manifest = {{"experiment", to_string(result.kind)},
                   {"config_hash", hex_digest(fnv1a(config.source.dump()))},
                   {"seed", seed},
                   {"version", kArtifactVersion},
                   {"created_utc", utc_timestamp()},
                   {"outputs", outputs},
                   {"results", results},
                   {"diagnostics", diagnostics_json(result.diagnostics)},
                   {"warnings", result.warnings}};
  manifest["manifest_hash"] = manifest_hash(manifest);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

bool ReferenceReport::passed() const {
  for (const auto& r : rows) {
    if (!r.passed) return false;
  }
  return true;
}

ReferenceReport compare_to_reference(const nlohmann::json& manifest, const nlohmann::json& reference) {
  if (!manifest.is_object() || !manifest.contains("results") || !manifest.at("results").is_object()) {
    throw ConfigError("run", "manifest has no results object");
  }
  if (!reference.is_object() || !reference.contains("quantities") || !reference.at("quantities").is_array()) {
    throw ConfigError("reference", "expected an object with a 'quantities' array");
  }
  const json& list = reference.at("quantities");
  if (list.empty()) throw ConfigError("reference.quantities", "is empty; nothing to check");
  const json& results = manifest.at("results");
  ReferenceReport report;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "reference.quantities[" + std::to_string(i) + "]";
    const json& q = list[i];
    if (!q.is_object() || !q.contains("name") || !q.at("name").is_string()) {
      throw ConfigError(where + ".name", "is required");
    }
    if (!q.contains("expected") || !q.at("expected").is_number()) {
      throw ConfigError(where + ".expected", "must be a number");
    }
    const bool rel = q.contains("rel_tol");
    const bool abs = q.contains("abs_tol");
    if (rel == abs) throw ConfigError(where, "give exactly one of rel_tol or abs_tol");
    const json& tol = q.at(rel ? "rel_tol" : "abs_tol");
    if (!tol.is_number() || tol.get<double>() < 0.0) throw ConfigError(where, "tolerance must be a number >= 0");

    ReferenceRow row;
    row.name = q.at("name").get<std::string>();
    row.expected = q.at("expected").get<double>();
    row.tolerance = rel ? tol.get<double>() * std::abs(row.expected) : tol.get<double>();
    if (!results.contains(row.name)) throw ConfigError(where, "run has no quantity '" + row.name + "'");
    const json& actual = results.at(row.name);
    row.actual = actual.is_number() ? actual.get<double>() : std::nan("");
    row.passed = std::isfinite(row.actual) && std::abs(row.actual - row.expected) <= row.tolerance;
    report.rows.push_back(row);
  }
  return report;
}

void print_report(std::ostream& out, const ReferenceReport& report) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-32s %16s %16s %12s  %s\n", "quantity", "expected", "actual", "tolerance",
                "status");
  out << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-32s %16.8g %16.8g %12.4g  %s\n", r.name.c_str(), r.expected, r.actual,
                  r.tolerance, r.passed ? "PASS" : "FAIL");
    out << line;
  }
  out << (report.passed() ? "overall: PASS\n" : "overall: FAIL\n");
}

}  // namespace cqed
