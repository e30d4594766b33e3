#ifndef LOSSFACT_SAMPLE_HPP
#define LOSSFACT_SAMPLE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace lossfact {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Labelled binary sample: m x d observations and labels in {-1, +1}.
class Sample {
 public:
  Sample(Matrix observations, Vector labels);

  const Matrix& observations() const { return observations_; }
  const Vector& labels() const { return labels_; }
  Eigen::Index size() const { return observations_.rows(); }
  Eigen::Index dim() const { return observations_.cols(); }

  /// X = max_i ||x_i||_2.
  double feature_bound() const { return feature_bound_; }

  /// Fraction of +1 labels.
  double positive_fraction() const;

  /// Rows selected by index, in the given order.
  Sample subset(const std::vector<Eigen::Index>& rows) const;

  /// Same observations, every label negated.
  Sample flipped() const;

  /// Only the +1 rows. Throws when there are none.
  Sample positives() const;

 private:
  Matrix observations_;
  Vector labels_;
  double feature_bound_ = 0.0;
};

/// Label-free doubled sample: rows i and m+i share x_i with signs +1 and -1.
class DoubledSample {
 public:
  explicit DoubledSample(const Matrix& observations);

  const Matrix& observations() const { return observations_; }
  const Vector& signs() const { return signs_; }
  Eigen::Index size() const { return observations_.rows(); }
  Eigen::Index dim() const { return observations_.cols(); }

  /// Number of source observations (half the row count).
  Eigen::Index source_size() const { return observations_.rows() / 2; }

  double feature_bound() const { return feature_bound_; }

 private:
  Matrix observations_;
  Vector signs_;
  double feature_bound_ = 0.0;
};

/// Class-conditional flip rates (p_plus for positives, p_minus for
/// negatives), each in [0, 1/2).
struct NoiseSpec {
  double p_plus = 0.0;
  double p_minus = 0.0;

  NoiseSpec() = default;
  NoiseSpec(double p_plus, double p_minus);

  double max_rate() const { return p_plus > p_minus ? p_plus : p_minus; }
  double rate_for(double label) const { return label > 0 ? p_plus : p_minus; }
  bool noiseless() const { return p_plus == 0.0 && p_minus == 0.0; }
  bool operator==(const NoiseSpec&) const = default;
};

DoubledSample double_sample(const Sample& s);

/// Flips each positive label with probability p_plus and each negative one
/// with probability p_minus. Observations are copied unchanged.
Sample inject_noise(const Sample& s, const NoiseSpec& noise, std::uint64_t seed);

/// Per-feature standardization fitted on one sample and applied to others.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Sample& s);
  Sample apply(const Sample& s) const;
};

struct CsvOptions {
  /// Column holding the labels: a header name or a zero-based index
  /// (negative counts from the end).
  std::variant<std::string, int> label_column = -1;
  bool standardize = false;
};

class CsvError : public std::runtime_error {
 public:
  enum class Kind { io, empty, non_numeric, missing_label_column, bad_label, ragged };

  CsvError(Kind kind, std::string message, std::size_t line = 0)
      : std::runtime_error(std::move(message)), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  /// One-based line number in the file, 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Reads a numeric CSV. A first row with any non-numeric cell is a header.
/// Labels may be {-1, +1} or {0, 1}; 0 maps to -1.
Sample load_csv(const std::string& path, const CsvOptions& options = {});

/// Random disjoint (train, test) split with round(test_fraction * m) test rows.
std::pair<Sample, Sample> split(const Sample& s, double test_fraction,
                                std::uint64_t seed);

struct Fold {
  Sample train;
  Sample validation;
};

/// k disjoint validation blocks covering the sample; each paired with the
/// complementary training rows.
std::vector<Fold> k_folds(const Sample& s, int k, std::uint64_t seed);

}  // namespace lossfact

#endif  // LOSSFACT_SAMPLE_HPP
