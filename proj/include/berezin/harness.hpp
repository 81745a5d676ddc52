#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "berezin/berezin.hpp"

namespace berezin {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string series = "A";
  int rank = 1;
  std::vector<double> lambda{1.0};
  std::vector<int> k_values{4, 8, 16, 32, 64};
  std::vector<nlohmann::json> functions;  // OrbitFunction descriptors
  std::string quadrature_scheme = "auto";
  int quadrature_order = -1;              // -1: "auto"
  PoissonSign sign = PoissonSign::theorem;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out_dir = ".";
  std::string csv_name = "report.csv";
  std::string json_name = "report.json";
  std::string cache_dir;                  // empty: no irrep cache
  int samples = 3;                        // random x and psi per row
  long long xval_samples = 1000000;
  double tolerance = 1e-6;                // declared quadrature tolerance
};

/// Throws ConfigError on schema mismatch, empty or unsorted k_values, or a
/// weight that is not dominant integral.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Descriptor forms:
///   {"kind":"constant","value":c}
///   {"kind":"linear","x":[..]} or {"kind":"linear","basis":b}
///   {"kind":"product","xs":[[..],..],"coefficient":c}
///   {"kind":"polynomial","terms":[{"coefficient":c,"factors":[[..],..]}]}
///   {"kind":"group_coefficient","re":[[..]],"im":[[..]]}
OrbitFunction parse_function(const CartanWeylBasis& cw, const nlohmann::json& j);

struct DefectRow {
  int k = 0;
  long long dim = 0;
  double dirac_defect = 0.0;
  double jordan_defect = 0.0;
  double product_defect = 0.0;
  double norm_gap = 0.0;
  double equivariance_defect = 0.0;
  double normalization_residual = 0.0;
  double gilmore_residual = 0.0;
  double duffield_gap = 0.0;
  double runtime_ms = 0.0;
  bool valid = true;
};

/// CSV column order.
const std::vector<std::string>& report_columns();

struct SlopeFit {
  bool fitted = false;
  std::string flag;  // "", "insufficient-points", "below-noise-floor"
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double ci_low = 0.0;   // 95% interval for the slope
  double ci_high = 0.0;
  int points = 0;
};

/// OLS of log value on log k.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct DefectReport {
  ExperimentConfig config;
  std::vector<DefectRow> rows;
  std::vector<std::pair<std::string, SlopeFit>> fits;
  std::vector<Check> checks;

  bool all_pass() const;
  std::string csv() const;
  nlohmann::json json() const;
  const SlopeFit* fit(const std::string& column) const;
};

DefectReport run_sweep(const ExperimentConfig& cfg);
/// Writes <out_dir>/<csv_name> and <out_dir>/<json_name>.
void write_report(const DefectReport& report);

struct CrossValidationEntry {
  int k = 0;
  long long dim = 0;
  std::string function;
  double max_deviation = 0.0;
  double max_sigma_ratio = 0.0;  // max |dev| / sigma
  bool pass = false;
};

struct CrossValidationReport {
  long long samples = 0;
  std::uint64_t seed = 0;
  std::vector<CrossValidationEntry> entries;
  std::vector<int> skipped_k;

  bool all_pass() const;
  nlohmann::json json() const;
};

/// Q(f) by Monte Carlo Haar integration against the quadrature path, for
/// each configured k with k <= 4 and d <= 16.  The constant 1 is always
/// included.
CrossValidationReport cross_validate(const ExperimentConfig& cfg);

/// Builds, verifies and caches the irreps of every configured level.
nlohmann::json irrep_report(const ExperimentConfig& cfg, bool& pass);

/// d_{k lambda} for every configured level plus the growth fit.
nlohmann::json dims_report(const ExperimentConfig& cfg, bool& pass);

/// Irrep with an on-disk cache keyed by (series, rank, labels, k).
Irrep cached_irrep(std::shared_ptr<const CartanWeylBasis> cw, const Weight& lambda, int k,
                   const std::string& cache_dir, bool* hit = nullptr);

}  // namespace berezin
