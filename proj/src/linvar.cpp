#include "vanar/linvar.hpp"

#include <cmath>
#include <limits>

namespace vanar {

std::string to_string(Deterministic det) {
  switch (det) {
    case Deterministic::None: return "none";
    case Deterministic::Constant: return "constant";
    case Deterministic::ConstantTrend: return "constant+trend";
  }
  return "none";
}

Deterministic deterministic_from_string(const std::string& s) {
  if (s == "none") return Deterministic::None;
  if (s == "constant" || s == "const") return Deterministic::Constant;
  if (s == "constant+trend" || s == "trend" || s == "both") return Deterministic::ConstantTrend;
  throw Error("unknown deterministic spec '" + s + "'");
}

int deterministic_terms(Deterministic det) {
  switch (det) {
    case Deterministic::None: return 0;
    case Deterministic::Constant: return 1;
    case Deterministic::ConstantTrend: return 2;
  }
  return 0;
}

namespace {

// Regressors for targets at rows [start, T): lag block then deterministic terms.
Matrix regressors(const Matrix& values, int p, Deterministic det, Eigen::Index start) {
  const LagDesign design = build_lag_design(values, p);
  const Eigen::Index skip = start - p;
  const Eigen::Index n = design.inputs.rows() - skip;
  const int terms = deterministic_terms(det);
  Matrix z(n, design.inputs.cols() + terms);
  z.leftCols(design.inputs.cols()) = design.inputs.bottomRows(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (terms >= 1) z(r, design.inputs.cols()) = 1.0;
    if (terms >= 2) z(r, design.inputs.cols() + 1) = static_cast<double>(start + r + 1);
  }
  return z;
}

int resolve_start(int p, int sample_start, Eigen::Index t_len) {
  const int start = sample_start < 0 ? p : sample_start;
  if (start < p) throw Error("sample start precedes the first usable row");
  if (start >= t_len) throw Error("insufficient history");
  return start;
}

Matrix coefficient_block(const VarModel& m) {
  const Eigen::Index n = m.dim();
  const int terms = deterministic_terms(m.det);
  Matrix b(n * m.p + terms, n);
  for (Eigen::Index eq = 0; eq < n; ++eq) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (int l = 1; l <= m.p; ++l) b(j * m.p + (l - 1), eq) = m.phi[l - 1](eq, j);
    }
    for (int k = 0; k < terms; ++k) b(n * m.p + k, eq) = m.det_coef(eq, k);
  }
  return b;
}

}  // namespace

Vector VarModel::predict_next(const Matrix& values) const {
  if (values.rows() < p) throw Error("insufficient history");
  if (values.cols() != dim()) throw Error("var: variable count mismatch");
  Vector next = Vector::Zero(dim());
  const Eigen::Index t = values.rows();
  for (int l = 1; l <= p; ++l) next += phi[l - 1] * values.row(t - l).transpose();
  const int terms = deterministic_terms(det);
  if (terms >= 1) next += det_coef.col(0);
  if (terms >= 2) next += det_coef.col(1) * static_cast<double>(t + 1);
  return next;
}

VarModel fit_var_ols(const Dataset& data, int p, Deterministic det, int sample_start) {
  if (p <= 0) throw Error("invalid lag");
  if (p >= data.rows()) throw Error("insufficient history");
  const int start = resolve_start(p, sample_start, data.rows());
  const Eigen::Index n_vars = data.cols();
  const int terms = deterministic_terms(det);

  const Matrix z = regressors(data.values(), p, det, start);
  const Matrix y = data.values().bottomRows(data.rows() - start);
  if (z.rows() <= z.cols()) {
    throw Error("insufficient history: " + std::to_string(z.rows()) + " observations for " +
                std::to_string(z.cols()) + " regressors");
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(z);
  if (qr.rank() < z.cols()) throw Error("singular design");
  const Matrix b = qr.solve(y);

  VarModel m;
  m.p = p;
  m.det = det;
  m.names = data.names();
  m.phi.assign(static_cast<std::size_t>(p), Matrix::Zero(n_vars, n_vars));
  for (Eigen::Index eq = 0; eq < n_vars; ++eq) {
    for (Eigen::Index j = 0; j < n_vars; ++j) {
      for (int l = 1; l <= p; ++l) m.phi[l - 1](eq, j) = b(j * p + (l - 1), eq);
    }
  }
  m.det_coef = Matrix::Zero(n_vars, terms);
  for (int k = 0; k < terms; ++k) m.det_coef.col(k) = b.row(n_vars * p + k).transpose();

  const Matrix resid = y - z * b;
  m.n_obs = resid.rows();
  m.resid_cov = (resid.transpose() * resid) / static_cast<double>(m.n_obs);
  return m;
}

Matrix var_residuals(const VarModel& model, const Dataset& data, int sample_start) {
  if (data.cols() != model.dim()) throw Error("var: variable count mismatch");
  const int start = resolve_start(model.p, sample_start, data.rows());
  const Matrix z = regressors(data.values(), model.p, model.det, start);
  return data.values().bottomRows(data.rows() - start) - z * coefficient_block(model);
}

double compute_aic(const VarModel& model, const Dataset& data, int sample_start) {
  const Matrix resid = var_residuals(model, data, sample_start);
  const double t_eff = static_cast<double>(resid.rows());
  const Matrix sigma = (resid.transpose() * resid) / t_eff;

  // Residual spread at rounding level relative to the data counts as a
  // perfect fit: the log-determinant would only measure floating-point noise.
  const int start = sample_start < 0 ? model.p : sample_start;
  const Matrix y = data.values().bottomRows(data.rows() - start);
  const Vector centered_var = (y.rowwise() - y.colwise().mean()).colwise().squaredNorm() / t_eff;
  const double scale = std::max(centered_var.maxCoeff(), y.cwiseAbs2().colwise().mean().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig > 1e-20 * std::max(scale, std::numeric_limits<double>::min()))) {
    throw Error("degenerate residual covariance");
  }
  const double log_det = eig.eigenvalues().array().log().sum();
  const double n = static_cast<double>(model.dim());
  const double k = n * n * model.p + n * deterministic_terms(model.det);
  return log_det + 2.0 * k / t_eff;
}

int select_lag_aic(const Dataset& data, int p_max, Deterministic det) {
  if (p_max < 1) throw Error("invalid lag");
  if (2 * p_max >= data.rows()) throw Error("select_lag_aic: p_max must be below T/2");
  int best = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  std::string last_error;
  for (int p = 1; p <= p_max; ++p) {
    try {
      const VarModel m = fit_var_ols(data, p, det, p_max);
      const double aic = compute_aic(m, data, p_max);
      if (aic < best_aic) {
        best_aic = aic;
        best = p;
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (best == 0) throw Error("select_lag_aic: every candidate failed (" + last_error + ")");
  return best;
}

Dataset var_forecast(const VarModel& model, const Dataset& history, int h) {
  if (h < 1) throw Error("forecast: horizon must be positive");
  if (history.rows() < model.p) throw Error("insufficient history");
  if (history.names() != model.names) throw Error("forecast: history variables do not match model");
  Matrix path(history.rows() + h, history.cols());
  path.topRows(history.rows()) = history.values();
  for (int s = 0; s < h; ++s) {
    const Eigen::Index t = history.rows() + s;
    path.row(t) = model.predict_next(path.topRows(t)).transpose();
  }
  return Dataset(model.names, path.bottomRows(h));
}

}  // namespace vanar
