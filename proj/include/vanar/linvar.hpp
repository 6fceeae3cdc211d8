#ifndef VANAR_LINVAR_HPP
#define VANAR_LINVAR_HPP

#include <string>
#include <vector>

#include "vanar/core.hpp"

namespace vanar {

/// Deterministic regressors appended to the lag design.
enum class Deterministic { None, Constant, ConstantTrend };

std::string to_string(Deterministic det);
Deterministic deterministic_from_string(const std::string& s);
int deterministic_terms(Deterministic det);

/**
 * @brief Fitted VAR(p) / AR(p) model.
 *
 *   X_t = c + d * t + sum_{i=1..p} Phi_i X_{t-i} + xi_t
 *
 * `det_coef` is N x terms (column 0 = constant, column 1 = trend slope). The
 * trend regressor for the observation at 0-based row r of a dataset is r + 1.
 * `resid_cov` is the maximum-likelihood residual covariance (divisor n_obs).
 */
struct VarModel {
  int p = 0;
  std::vector<Matrix> phi;
  Deterministic det = Deterministic::None;
  Matrix det_coef;
  std::vector<std::string> names;
  Matrix resid_cov;
  Eigen::Index n_obs = 0;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(names.size()); }
  /// One-step prediction for the row that follows `values`, where the next
  /// row has 0-based index `values.rows()` in the same time frame.
  Vector predict_next(const Matrix& values) const;
};

/**
 * Per-equation OLS on the lag design. Only targets at 0-based rows
 * `sample_start .. T-1` are used (sample_start defaults to p), which lets lag
 * selection compare candidates on a common sample.
 *
 * Throws "singular design" when the regressor matrix is rank deficient.
 */
VarModel fit_var_ols(const Dataset& data, int p, Deterministic det, int sample_start = -1);

/// ln det(Sigma) + 2 k / T_eff with k = N^2 p + N * terms, residuals taken
/// over the same sample rows as the fit.
double compute_aic(const VarModel& model, const Dataset& data, int sample_start = -1);

/// Argmin AIC over p = 1..p_max on the common sample starting at row p_max.
/// Ties go to the smaller lag.
int select_lag_aic(const Dataset& data, int p_max, Deterministic det);

/// Recursive h-step forecast from the end of `history`.
Dataset var_forecast(const VarModel& model, const Dataset& history, int h);

/// In-sample residuals for targets at rows sample_start .. T-1.
Matrix var_residuals(const VarModel& model, const Dataset& data, int sample_start = -1);

}  // namespace vanar

#endif  // VANAR_LINVAR_HPP
