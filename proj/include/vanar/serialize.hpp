#ifndef VANAR_SERIALIZE_HPP
#define VANAR_SERIALIZE_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "vanar/core.hpp"
#include "vanar/linvar.hpp"
#include "vanar/model.hpp"
#include "vanar/neural.hpp"

namespace vanar {

using Json = nlohmann::ordered_json;

// Matrices are written row-major as nested arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const nn::Mlp& net);
nn::Mlp mlp_from_json(const Json& j);

Json to_json(const Scaler& s);
Scaler scaler_from_json(const Json& j);

/// {"kind": "var", p, det, names, phi, det_coef, resid_cov, n_obs}
Json to_json(const VarModel& m);
VarModel var_model_from_json(const Json& j);

/// {"kind": "vanar", p, names, activated, scaler, autoencoder?, heads}
Json to_json(const VanarModel& m);
VanarModel vanar_model_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Writes via a temporary file renamed into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/**
 * Plain CSV: header of variable names, optional "date" column (kept as
 * labels), every other cell numeric. Errors carry the 1-based line and
 * column of the offending cell.
 */
Dataset parse_csv(const std::string& text);
Dataset read_csv(const std::filesystem::path& path);
std::string to_csv(const Dataset& data);
void write_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace vanar

#endif  // VANAR_SERIALIZE_HPP
