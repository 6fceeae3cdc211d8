#include "vanar/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace vanar {

Dataset::Dataset(std::vector<std::string> names, Matrix values, std::optional<std::string> freq,
                 std::vector<std::string> dates)
    : names_(std::move(names)), values_(std::move(values)), freq_(std::move(freq)),
      dates_(std::move(dates)) {
  if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
    throw Error("dataset: " + std::to_string(names_.size()) + " names for " +
                std::to_string(values_.cols()) + " columns");
  }
  if (names_.empty()) throw Error("dataset: no variables");
  if (values_.rows() < 1) throw Error("empty dataset");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error("dataset: empty variable name");
    if (!seen.insert(n).second) throw Error("dataset: duplicate variable name '" + n + "'");
  }
  if (!values_.allFinite()) throw Error("dataset: non-finite value");
  if (!dates_.empty() && static_cast<Eigen::Index>(dates_.size()) != values_.rows()) {
    throw Error("dataset: date labels do not match row count");
  }
}

Eigen::Index Dataset::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown variable '" + name + "'");
  return static_cast<Eigen::Index>(it - names_.begin());
}

bool Dataset::has(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Vector Dataset::column(const std::string& name) const { return values_.col(index_of(name)); }

Dataset Dataset::select(const std::vector<std::string>& names) const {
  Matrix out(values_.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = values_.col(index_of(names[j]));
  }
  return Dataset(names, std::move(out), freq_, dates_);
}

Dataset Dataset::slice_rows(Eigen::Index begin, Eigen::Index count) const {
  if (begin < 0 || count < 1 || begin + count > values_.rows()) {
    throw Error("dataset: row slice out of range");
  }
  std::vector<std::string> dates;
  if (!dates_.empty()) dates.assign(dates_.begin() + begin, dates_.begin() + begin + count);
  return Dataset(names_, values_.middleRows(begin, count), freq_, std::move(dates));
}

Dataset concat_rows(const Dataset& head, const Dataset& tail) {
  if (head.names() != tail.names()) throw Error("concat: variable lists differ");
  Matrix out(head.rows() + tail.rows(), head.cols());
  out << head.values(), tail.values();
  std::vector<std::string> dates;
  if (!head.dates().empty() && !tail.dates().empty()) {
    dates = head.dates();
    dates.insert(dates.end(), tail.dates().begin(), tail.dates().end());
  }
  return Dataset(head.names(), std::move(out), head.freq(), std::move(dates));
}

LagDesign build_lag_design(const Matrix& values, int p) {
  if (p <= 0) throw Error("invalid lag");
  const Eigen::Index t_len = values.rows();
  const Eigen::Index n_vars = values.cols();
  if (p >= t_len) throw Error("insufficient history");

  const Eigen::Index n_rows = t_len - p;
  LagDesign design;
  design.p = p;
  design.inputs.resize(n_rows, n_vars * p);
  design.targets = values.bottomRows(n_rows);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const Eigen::Index t = r + p;
    for (Eigen::Index j = 0; j < n_vars; ++j) {
      for (int l = 1; l <= p; ++l) design.inputs(r, j * p + (l - 1)) = values(t - l, j);
    }
  }
  return design;
}

LagDesign build_lag_design(const Dataset& data, int p) { return build_lag_design(data.values(), p); }

Vector lag_vector(const Matrix& values, int p) {
  if (p <= 0) throw Error("invalid lag");
  if (values.rows() < p) throw Error("insufficient history");
  const Eigen::Index t = values.rows();
  Vector out(values.cols() * p);
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (int l = 1; l <= p; ++l) out(j * p + (l - 1)) = values(t - l, j);
  }
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, Eigen::Index train_len,
                                          Eigen::Index test_len) {
  if (train_len < 1 || test_len < 1) throw Error("split: lengths must be positive");
  if (train_len + test_len > data.rows()) {
    throw Error("split: train_len + test_len = " + std::to_string(train_len + test_len) +
                " exceeds " + std::to_string(data.rows()) + " rows");
  }
  return {data.slice_rows(0, train_len), data.slice_rows(train_len, test_len)};
}

Scaler fit_scaler(const Matrix& values) {
  if (values.rows() == 0) throw Error("scaler: column length 0");
  Scaler s;
  const double n = static_cast<double>(values.rows());
  s.means = values.colwise().mean().transpose();
  s.sds.resize(values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const double var = (values.col(j).array() - s.means(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.sds(j) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Scaler fit_scaler(const Dataset& data) { return fit_scaler(data.values()); }

Matrix Scaler::apply(const Matrix& values) const {
  if (values.cols() != means.size()) throw Error("scaler: column count mismatch");
  return (values.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
}

Matrix Scaler::invert(const Matrix& scaled) const {
  if (scaled.cols() != means.size()) throw Error("scaler: column count mismatch");
  Matrix out = scaled.array().rowwise() * sds.transpose().array();
  return out.rowwise() + means.transpose();
}

Vector Scaler::apply_row(const Vector& row) const {
  if (row.size() != means.size()) throw Error("scaler: column count mismatch");
  return (row - means).cwiseQuotient(sds);
}

Vector Scaler::invert_row(const Vector& scaled) const {
  if (scaled.size() != means.size()) throw Error("scaler: column count mismatch");
  return scaled.cwiseProduct(sds) + means;
}

}  // namespace vanar
