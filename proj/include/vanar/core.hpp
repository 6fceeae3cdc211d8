#ifndef VANAR_CORE_HPP
#define VANAR_CORE_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vanar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for every contract violation in the library. The message is the
/// user-facing reason ("insufficient history", "singular design", ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * @brief Multivariate, time-indexed series.
 *
 * Rows are time steps (oldest first), columns are variables. Values are
 * validated on construction: every entry must be finite and names must be
 * unique and nonempty. An optional list of date labels is carried through
 * for reporting and is never used in arithmetic.
 */
class Dataset {
 public:
  Dataset(std::vector<std::string> names, Matrix values,
          std::optional<std::string> freq = std::nullopt,
          std::vector<std::string> dates = {});

  const std::vector<std::string>& names() const { return names_; }
  const Matrix& values() const { return values_; }
  const std::optional<std::string>& freq() const { return freq_; }
  const std::vector<std::string>& dates() const { return dates_; }

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }

  /// Column index of `name`; throws if the variable is unknown.
  Eigen::Index index_of(const std::string& name) const;
  bool has(const std::string& name) const;
  Vector column(const std::string& name) const;

  /// Subset of variables, in the order given.
  Dataset select(const std::vector<std::string>& names) const;
  /// Contiguous block of `count` rows starting at 0-based `begin`.
  Dataset slice_rows(Eigen::Index begin, Eigen::Index count) const;

 private:
  std::vector<std::string> names_;
  Matrix values_;
  std::optional<std::string> freq_;
  std::vector<std::string> dates_;
};

/// Stacks `tail` under `head`; both must carry the same variables.
Dataset concat_rows(const Dataset& head, const Dataset& tail);

/**
 * @brief Row-aligned regression design for a lag order p.
 *
 * inputs column `j * p + (l - 1)` holds variable j at lag l (variable-major,
 * most recent lag first). Row r of inputs pairs with row r of targets, which
 * is the observation at time index p + r.
 */
struct LagDesign {
  Matrix inputs;
  Matrix targets;
  int p = 0;
};

LagDesign build_lag_design(const Dataset& data, int p);
/// Same layout as build_lag_design, on a raw value matrix.
LagDesign build_lag_design(const Matrix& values, int p);

/// The lag vector that predicts the row following the last row of `values`.
Vector lag_vector(const Matrix& values, int p);

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, Eigen::Index train_len,
                                          Eigen::Index test_len);

/// Per-column z-score state. Population standard deviation; constant
/// columns keep an sd of 1 so they map to 0.
struct Scaler {
  Vector means;
  Vector sds;

  Matrix apply(const Matrix& values) const;
  Matrix invert(const Matrix& scaled) const;
  Vector apply_row(const Vector& row) const;
  Vector invert_row(const Vector& scaled) const;
};

Scaler fit_scaler(const Dataset& data);
Scaler fit_scaler(const Matrix& values);

}  // namespace vanar

#endif  // VANAR_CORE_HPP
