#pragma once

// Persistence of experiment runs: CSV tables, the fit report, the run manifest,
// and comparison of a run against a reference file.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/experiments.hpp"

namespace cqed {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex_digest(std::uint64_t value);

/// Parameters, standard errors, residual, convergence and model kind. Infinite
/// values are written as null.
nlohmann::json to_json(const FitResult& fit);

std::string format_csv(const CsvTable& table);

/// Writes every table, fit.json and manifest.json into `out_dir` (created if needed)
/// and returns the manifest. The timestamp is recorded but excluded from the hash.
nlohmann::json write_run(const ExperimentConfig& config, const ExperimentResult& result, std::uint64_t seed,
                         const std::string& out_dir);

/// Hash over the canonical config, seed, version, output digests and results.
std::string manifest_hash(const nlohmann::json& manifest);

struct ReferenceRow {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;  // absolute, after converting a relative tolerance
  bool passed = false;
};

struct ReferenceReport {
  std::vector<ReferenceRow> rows;
  bool passed() const;
};

/// Reference format: {"quantities": [{"name", "expected", "rel_tol" | "abs_tol"}]}.
/// Throws ConfigError for an empty list, malformed entries, or quantities the run lacks.
ReferenceReport compare_to_reference(const nlohmann::json& manifest, const nlohmann::json& reference);

void print_report(std::ostream& out, const ReferenceReport& report);

}  // namespace cqed
