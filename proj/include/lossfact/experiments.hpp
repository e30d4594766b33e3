#ifndef LOSSFACT_EXPERIMENTS_HPP
#define LOSSFACT_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lossfact/sample.hpp"
#include "lossfact/solver.hpp"

namespace lossfact {

/// Metric columns in output order. A record may leave any of them unset.
const std::vector<std::string>& metric_names();

struct ExperimentRecord {
  std::string experiment_id;
  std::string dataset;
  NoiseSpec noise;
  std::string loss;
  double lambda = 0.0;
  std::int64_t T = 0;
  std::uint64_t seed = 0;
  std::int64_t index = 0;
  std::map<std::string, double> metrics;

  std::optional<double> metric(const std::string& name) const;
  bool operator==(const ExperimentRecord&) const = default;
};

/// Throws std::invalid_argument for unknown metric names, non-finite values,
/// d_models outside [-1, 1] or error rates outside [0, 1].
void validate_record(const ExperimentRecord& r);

enum class RecordFormat { csv, jsonl };

/// Writes records as CSV (fixed header, empty cells for unset metrics) or
/// JSON lines. Throws on an empty list or an unwritable path.
void emit(const std::vector<ExperimentRecord>& records, RecordFormat format,
          const std::string& path);
std::vector<ExperimentRecord> load_records(RecordFormat format, const std::string& path);

/// CSV header line emitted by emit(..., csv).
std::string csv_header();

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ToyDataset {
  Sample sample;
  double mu_norm = 0.0;
};

/// Planar toy set: the negative (0, 1) repeated neg_weight times and the
/// positive (phi/3, 1/3) repeated 3 times.
ToyDataset toy_dataset(double phi, int neg_weight = 5);

struct SurrogateSpec {
  std::string name;
  std::int64_t m = 0;
  std::int64_t d = 0;
  double pi_plus = 0.5;
  double separation = 1.0;  // norm of the class shift c
  double offset = 1.0;      // norm of the common offset b
};

/// x | y ~ N(b + y c, I) with label prior pi_plus; b and c drawn once per spec.
Sample make_surrogate(const SurrogateSpec& spec, std::uint64_t seed);

/// Surrogates sized like australian, heart and ionosphere.
std::vector<SurrogateSpec> surrogate_catalog();

struct NamedSample {
  std::string name;
  Sample sample;
};

/// Catalog surrogates generated from `seed`.
std::vector<NamedSample> surrogate_datasets(std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  bool invariant = true;  // false for trend checks that do not set the exit code
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  std::vector<CheckResult> checks;
  std::map<std::string, double> summary;
  /// Named plot tables: header + rows of numbers.
  struct Plot {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
  };
  std::vector<Plot> plots;

  bool invariants_hold() const;
};

struct Figure2Config {
  std::vector<double> phi_grid;  // defaults to 1e-4 .. 1 in half decades
  std::vector<double> p_grid;    // defaults to 0 .. 0.45 by 0.05
  double p_fixed = 0.2;
  double phi_fixed = 1e-4;
  double lambda = 1e-6;
  int neg_weight = 5;
  std::uint64_t seed = 0;
};

/// Exact square-loss study on the toy set: phi sweep at p_fixed, then noise
/// sweep at phi_fixed, symmetric noise.
ExperimentResult run_figure2(const Figure2Config& cfg = {});

struct Figure3Config {
  std::vector<double> p_grid;  // defaults to 0 .. 0.40 by 0.05
  double lambda = 1e-6;
  int trials = 25;
  std::uint64_t seed = 0;
};

/// Logistic full-batch minimisers on clean and symmetrically noisy samples.
ExperimentResult run_figure3(const std::vector<NamedSample>& datasets,
                             const Figure3Config& cfg = {});

struct Table2Config {
  std::vector<NoiseSpec> noise_grid;  // defaults to the (p-, p+) columns
  int trials = 25;
  int folds = 5;
  std::vector<double> lambda_grid;  // defaults to 10^-3 .. 10^3
  double test_fraction = 0.2;
  int epochs = 4;
  UpdateMode update_mode = UpdateMode::risk_consistent;
  std::uint64_t seed = 0;
};

/// The (p-, p+) grid (0,0), (.2,0), (.2,.1), (.2,.2), (.2,.3), (.2,.4), (.2,.49).
std::vector<NoiseSpec> default_table2_noise();

/// SGD vs mean-operator SGD with cross-validated lambda on noisy training
/// labels, scored on a clean test split.
ExperimentResult run_table2(const std::vector<NamedSample>& datasets,
                            const Table2Config& cfg = {});

/// Seed for run `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace lossfact

#endif  // LOSSFACT_EXPERIMENTS_HPP
