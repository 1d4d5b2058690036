#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rkl/error.hpp"
#include "rkl/kernel.hpp"
#include "rkl/measure.hpp"

namespace rkl {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Config or report that does not match the schema; path names the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(ErrorKind::schema, path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Kernel catalog: "example22", "cosine", "odd_harmonic(k)", "constant(c)", or an object
/// {"name": "table", "values": [...]} for an arc-length table.
HomogeneousKernel kernel_from_spec(const nlohmann::json& spec, int n);
/// Measure catalog: "disk_bump(radius, mass)", "gaussian(sigma, cutoff)",
/// "dipole(offset, radius, mass)", or the same as an object with named fields.
DensityMeasure measure_from_spec(const nlohmann::json& spec, int n);

struct ExperimentConfig {
  std::string experiment;  // dini | levelset | sweep | identity-checks | weak-type
  nlohmann::json kernel;
  int dimension = 2;
  double alpha = 0.0;
  nlohmann::json measure;  // null when unused
  std::vector<double> lambdas;
  std::vector<double> deltas;
  std::int64_t budget = 32768;
  int rotation_budget = 8;
  int translation_budget = 32;
  int pairs = 20;
  std::vector<double> ratio_window{1e-3, 0.5};
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  /// Normalized config, as echoed in reports; parses back to the same config.
  nlohmann::json to_json() const;
};

/// Validates and normalizes; throws SchemaError with the field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunOutput {
  nlohmann::json report;
  std::vector<OutputFile> files;  // report.json first
  std::string summary;
};

/// Runs the experiment; nothing touches the filesystem.
RunOutput run_experiment(const ExperimentConfig& cfg, int threads = 1);

/// Plot-data CSVs derived from a report; SchemaError for unknown or empty reports.
std::vector<OutputFile> plot_files(const nlohmann::json& report);

/// Writes each file via a temporary and a rename. Creates dir if needed.
void write_files_atomically(const std::string& dir, const std::vector<OutputFile>& files);

}  // namespace rkl
