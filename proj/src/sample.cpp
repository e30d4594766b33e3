#include "lossfact/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lossfact/rng.hpp"

namespace lossfact {

namespace {

double max_row_norm(const Matrix& x) {
  return x.rows() == 0 ? 0.0 : x.rowwise().norm().maxCoeff();
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index m, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

Sample::Sample(Matrix observations, Vector labels)
    : observations_(std::move(observations)), labels_(std::move(labels)) {
  if (observations_.rows() < 1 || observations_.cols() < 1) {
    throw SampleError("sample needs m >= 1 and d >= 1");
  }
  if (labels_.size() != observations_.rows()) {
    throw SampleError("label count does not match observation rows");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw SampleError("labels must be -1 or +1 (row " + std::to_string(i) + ")");
    }
  }
  if (!observations_.allFinite()) {
    throw SampleError("observations must be finite");
  }
  feature_bound_ = max_row_norm(observations_);
}

double Sample::positive_fraction() const {
  return (labels_.array() > 0.0).cast<double>().mean();
}

Sample Sample::subset(const std::vector<Eigen::Index>& rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), dim());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    if (r < 0 || r >= size()) throw SampleError("subset index out of range");
    x.row(static_cast<Eigen::Index>(k)) = observations_.row(r);
    y[static_cast<Eigen::Index>(k)] = labels_[r];
  }
  return Sample(std::move(x), std::move(y));
}

Sample Sample::flipped() const { return Sample(observations_, -labels_); }

Sample Sample::positives() const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (labels_[i] > 0) rows.push_back(i);
  }
  if (rows.empty()) throw SampleError("sample has no positive example");
  return subset(rows);
}

DoubledSample::DoubledSample(const Matrix& observations) {
  const auto m = observations.rows();
  if (m < 1 || observations.cols() < 1) {
    throw SampleError("doubled sample needs m >= 1 and d >= 1");
  }
  observations_.resize(2 * m, observations.cols());
  observations_.topRows(m) = observations;
  observations_.bottomRows(m) = observations;
  signs_.resize(2 * m);
  signs_.head(m).setOnes();
  signs_.tail(m).setConstant(-1.0);
  feature_bound_ = max_row_norm(observations);
}

NoiseSpec::NoiseSpec(double p_plus_, double p_minus_)
    : p_plus(p_plus_), p_minus(p_minus_) {
  auto valid = [](double p) { return std::isfinite(p) && p >= 0.0 && p < 0.5; };
  if (!valid(p_plus) || !valid(p_minus)) {
    throw SampleError("noise rates must lie in [0, 0.5)");
  }
}

DoubledSample double_sample(const Sample& s) {
  return DoubledSample(s.observations());
}

Sample inject_noise(const Sample& s, const NoiseSpec& noise, std::uint64_t seed) {
  Rng rng(seed);
  Vector labels = s.labels();
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    // One draw per row regardless of rates keeps streams aligned across specs.
    const double u = rng.uniform();
    if (u < noise.rate_for(labels[i])) labels[i] = -labels[i];
  }
  return Sample(s.observations(), std::move(labels));
}

Standardizer Standardizer::fit(const Sample& s) {
  const Matrix& x = s.observations();
  Standardizer st;
  st.mean = x.colwise().mean().transpose();
  st.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - st.mean[j]).square().mean();
    st.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return st;
}

Sample Standardizer::apply(const Sample& s) const {
  if (s.dim() != mean.size()) throw SampleError("standardizer dimension mismatch");
  Matrix x = (s.observations().rowwise() - mean.transpose()).array().rowwise() /
             scale.transpose().array();
  return Sample(std::move(x), s.labels());
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && std::isfinite(out);
}

}  // namespace

Sample load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw CsvError(CsvError::Kind::io, "cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_cells(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      numeric = numeric && parse_number(cells[j], values[j]);
    }
    if (rows.empty() && header.empty() && !numeric) {
      header = cells;
      width = cells.size();
      continue;
    }
    if (!numeric) {
      throw CsvError(CsvError::Kind::non_numeric,
                     path + ":" + std::to_string(line_no) + ": non-numeric cell",
                     line_no);
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw CsvError(CsvError::Kind::ragged,
                     path + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(width) + " cells",
                     line_no);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw CsvError(CsvError::Kind::empty, "'" + path + "' has no data rows");
  if (width < 2) {
    throw CsvError(CsvError::Kind::missing_label_column,
                   "'" + path + "' needs a label column and at least one feature");
  }

  int label_col = -1;
  if (const auto* name = std::get_if<std::string>(&options.label_column)) {
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      throw CsvError(CsvError::Kind::missing_label_column,
                     "no column named '" + *name + "' in '" + path + "'");
    }
    label_col = static_cast<int>(it - header.begin());
  } else {
    const int idx = std::get<int>(options.label_column);
    label_col = idx < 0 ? static_cast<int>(width) + idx : idx;
    if (label_col < 0 || label_col >= static_cast<int>(width)) {
      throw CsvError(CsvError::Kind::missing_label_column,
                     "label column index " + std::to_string(idx) + " out of range");
    }
  }

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  Matrix x(m, d);
  Vector y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (static_cast<int>(j) == label_col) continue;
      x(i, c++) = row[j];
    }
    const double label = row[static_cast<std::size_t>(label_col)];
    if (label == 1.0) {
      y[i] = 1.0;
    } else if (label == -1.0 || label == 0.0) {
      y[i] = -1.0;
    } else {
      throw CsvError(CsvError::Kind::bad_label,
                     "label " + std::to_string(label) + " is not in {-1,0,1}");
    }
  }
  Sample s(std::move(x), std::move(y));
  if (options.standardize) return Standardizer::fit(s).apply(s);
  return s;
}

std::pair<Sample, Sample> split(const Sample& s, double test_fraction,
                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw SampleError("test_fraction must be in (0, 1)");
  }
  const auto m = s.size();
  const auto n_test = static_cast<Eigen::Index>(
      std::llround(test_fraction * static_cast<double>(m)));
  if (n_test < 1 || n_test >= m) {
    throw SampleError("split leaves an empty train or test part");
  }
  const auto idx = shuffled_indices(m, seed);
  std::vector<Eigen::Index> test(idx.begin(), idx.begin() + n_test);
  std::vector<Eigen::Index> train(idx.begin() + n_test, idx.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {s.subset(train), s.subset(test)};
}

std::vector<Fold> k_folds(const Sample& s, int k, std::uint64_t seed) {
  const auto m = s.size();
  if (k < 2 || k > m) throw SampleError("k_folds needs 2 <= k <= m");
  const auto idx = shuffled_indices(m, seed);
  std::vector<Fold> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    // Fold f takes positions [f*m/k, (f+1)*m/k) of the shuffled order.
    const auto lo = static_cast<std::size_t>(f * m / k);
    const auto hi = static_cast<std::size_t>((f + 1) * m / k);
    std::vector<Eigen::Index> val(idx.begin() + lo, idx.begin() + hi);
    std::vector<Eigen::Index> train;
    train.insert(train.end(), idx.begin(), idx.begin() + lo);
    train.insert(train.end(), idx.begin() + hi, idx.end());
    std::sort(val.begin(), val.end());
    std::sort(train.begin(), train.end());
    folds.push_back({s.subset(train), s.subset(val)});
  }
  return folds;
}

}  // namespace lossfact
