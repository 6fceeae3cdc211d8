#include "vanar/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vanar {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error("json: matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw Error("json: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

namespace {

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error("json: vector must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const nn::Mlp& net) {
  Json j;
  j["layer_dims"] = net.dims();
  Json acts = Json::array(), weights = Json::array(), biases = Json::array();
  for (const auto& l : net.layers()) {
    acts.push_back(nn::to_string(l.activation));
    weights.push_back(matrix_to_json(l.weights));
    biases.push_back(vector_to_json(l.biases));
  }
  j["activations"] = std::move(acts);
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  return j;
}

nn::Mlp mlp_from_json(const Json& j) {
  const auto dims = field(j, "layer_dims").get<std::vector<int>>();
  const Json& acts = field(j, "activations");
  const Json& weights = field(j, "weights");
  const Json& biases = field(j, "biases");
  if (dims.size() < 2 || acts.size() + 1 != dims.size() || weights.size() != acts.size() ||
      biases.size() != acts.size()) {
    throw Error("json: inconsistent network layer counts");
  }
  std::vector<nn::Layer> layers;
  for (std::size_t l = 0; l < acts.size(); ++l) {
    nn::Layer layer{matrix_from_json(weights[l]), vector_from_json(biases[l]),
                    nn::activation_from_string(acts[l].get<std::string>())};
    if (layer.weights.rows() != dims[l + 1] || layer.weights.cols() != dims[l]) {
      throw Error("json: weight shape disagrees with layer_dims");
    }
    layers.push_back(std::move(layer));
  }
  return nn::Mlp(std::move(layers));
}

Json to_json(const Scaler& s) {
  Json j;
  j["means"] = vector_to_json(s.means);
  j["sds"] = vector_to_json(s.sds);
  return j;
}

Scaler scaler_from_json(const Json& j) {
  Scaler s{vector_from_json(field(j, "means")), vector_from_json(field(j, "sds"))};
  if (s.means.size() != s.sds.size()) throw Error("json: scaler shape mismatch");
  return s;
}

Json to_json(const VarModel& m) {
  Json j;
  j["kind"] = "var";
  j["p"] = m.p;
  j["det"] = to_string(m.det);
  j["names"] = m.names;
  Json phi = Json::array();
  for (const auto& ph : m.phi) phi.push_back(matrix_to_json(ph));
  j["phi"] = std::move(phi);
  j["det_coef"] = matrix_to_json(m.det_coef);
  j["resid_cov"] = matrix_to_json(m.resid_cov);
  j["n_obs"] = m.n_obs;
  return j;
}

VarModel var_model_from_json(const Json& j) {
  if (j.value("kind", "var") != "var") throw Error("json: not a VAR model");
  VarModel m;
  m.p = field(j, "p").get<int>();
  m.det = deterministic_from_string(field(j, "det").get<std::string>());
  m.names = field(j, "names").get<std::vector<std::string>>();
  for (const auto& ph : field(j, "phi")) m.phi.push_back(matrix_from_json(ph));
  const auto n = static_cast<Eigen::Index>(m.names.size());
  const int terms = deterministic_terms(m.det);
  m.det_coef = terms > 0 ? matrix_from_json(field(j, "det_coef")) : Matrix::Zero(n, 0);
  m.resid_cov = matrix_from_json(field(j, "resid_cov"));
  m.n_obs = j.value("n_obs", Eigen::Index{0});
  if (m.p < 1 || static_cast<int>(m.phi.size()) != m.p) throw Error("json: phi list length must equal p");
  for (const auto& ph : m.phi) {
    if (ph.rows() != n || ph.cols() != n) throw Error("json: phi matrices must be N x N");
  }
  if (m.det_coef.rows() != n || m.det_coef.cols() != terms) throw Error("json: det_coef shape mismatch");
  return m;
}

Json to_json(const VanarModel& m) {
  Json j;
  j["kind"] = "vanar";
  j["p"] = m.p;
  j["names"] = m.names;
  j["activated"] = m.activated;
  j["validation_rmse"] = m.validation_rmse;
  j["scaler"] = to_json(m.scaler);
  if (m.autoencoder) {
    Json ae;
    ae["embedding_dim"] = m.autoencoder->embedding_dim;
    ae["reconstruction_error"] = m.autoencoder->reconstruction_error;
    ae["encoder"] = to_json(m.autoencoder->encoder);
    ae["decoder"] = to_json(m.autoencoder->decoder);
    j["autoencoder"] = std::move(ae);
  }
  Json heads = Json::array();
  for (const auto& h : m.heads) heads.push_back(to_json(h));
  j["heads"] = std::move(heads);
  return j;
}

VanarModel vanar_model_from_json(const Json& j) {
  if (j.value("kind", "") != "vanar") throw Error("json: not a VANAR model");
  VanarModel m;
  m.p = field(j, "p").get<int>();
  m.names = field(j, "names").get<std::vector<std::string>>();
  m.activated = field(j, "activated").get<bool>();
  m.validation_rmse = j.value("validation_rmse", 0.0);
  m.scaler = scaler_from_json(field(j, "scaler"));
  if (j.contains("autoencoder")) {
    const Json& ae = j.at("autoencoder");
    m.autoencoder = Autoencoder{mlp_from_json(field(ae, "encoder")), mlp_from_json(field(ae, "decoder")),
                                field(ae, "embedding_dim").get<int>(),
                                ae.value("reconstruction_error", 0.0)};
  }
  for (const auto& h : field(j, "heads")) m.heads.push_back(mlp_from_json(h));
  m.check_shapes();
  return m;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(split_line(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw Error("csv: missing header");
  const auto& header = rows.front();
  std::ptrdiff_t date_col = -1;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "date" && date_col < 0) {
      date_col = static_cast<std::ptrdiff_t>(c);
    } else {
      names.push_back(header[c]);
    }
  }
  if (rows.size() == 1) throw Error("empty dataset");

  Matrix values(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(names.size()));
  std::vector<std::string> dates;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() != header.size()) {
      throw Error("csv: line " + std::to_string(line_numbers[r]) + " has " + std::to_string(cells.size()) +
                  " cells, header has " + std::to_string(header.size()));
    }
    Eigen::Index out_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == date_col) {
        dates.push_back(cells[c]);
        continue;
      }
      double v = 0.0;
      const char* first = cells[c].data();
      const char* last = first + cells[c].size();
      if (!cells[c].empty() && *first == '+') ++first;
      const auto res = std::from_chars(first, last, v);
      if (cells[c].empty() || res.ec != std::errc() || res.ptr != last) {
        throw Error("csv: non-numeric cell '" + cells[c] + "' at line " + std::to_string(line_numbers[r]) +
                    ", column " + std::to_string(c + 1) + " (" + header[c] + ")");
      }
      values(static_cast<Eigen::Index>(r - 1), out_col++) = v;
    }
  }
  return Dataset(std::move(names), std::move(values), std::nullopt, std::move(dates));
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string to_csv(const Dataset& data) {
  std::string out;
  const bool dated = !data.dates().empty();
  if (dated) out += "date,";
  for (std::size_t j = 0; j < data.names().size(); ++j) out += (j ? "," : "") + data.names()[j];
  out += "\n";
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    if (dated) out += data.dates()[static_cast<std::size_t>(t)] + ",";
    for (Eigen::Index j = 0; j < data.cols(); ++j) out += (j ? "," : "") + format_double(data.values()(t, j));
    out += "\n";
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) { write_text_atomic(path, to_csv(data)); }

}  // namespace vanar
