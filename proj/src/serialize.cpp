#include "berezin/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "berezin/errors.hpp"

namespace berezin {

using nlohmann::json;

json matrix_to_json(const CMatrix& m, int dense_limit) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  if (m.rows() <= dense_limit) {
    j["layout"] = "row-major";
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
    j["data"] = std::move(data);
  } else {
    j["layout"] = "coo";
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        if (m(r, c) != cplx(0.0, 0.0)) data.push_back({r, c, m(r, c).real(), m(r, c).imag()});
    j["data"] = std::move(data);
  }
  return j;
}

CMatrix matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const std::string layout = j.at("layout").get<std::string>();
  const json& data = j.at("data");
  CMatrix m = CMatrix::Zero(rows, cols);
  if (layout == "row-major") {
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw ConfigError("matrix bundle: entry count does not match shape");
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        const json& e = data[static_cast<std::size_t>(r * cols + c)];
        m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
      }
  } else if (layout == "coo") {
    for (const json& e : data) {
      const auto r = e.at(0).get<Eigen::Index>(), c = e.at(1).get<Eigen::Index>();
      if (r < 0 || r >= rows || c < 0 || c >= cols) throw ConfigError("matrix bundle: index out of range");
      m(r, c) = cplx(e.at(2).get<double>(), e.at(3).get<double>());
    }
  } else {
    throw ConfigError("matrix bundle: unknown layout '" + layout + "'");
  }
  return m;
}

namespace {

json vector_to_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

RVector vector_from_json(const json& j) {
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

json irrep_to_json(const Irrep& rep) {
  json j;
  j["format"] = "berezin-matrix-bundle";
  j["version"] = 1;
  j["kind"] = "irrep";
  j["series"] = rep.cw->root_system.series_label;
  j["rank"] = rep.cw->rank();
  j["lambda"] = vector_to_json(rep.lambda.labels);
  j["k"] = rep.k;
  j["dimension"] = rep.dimension;
  json wts = json::array();
  for (const auto& w : rep.weight_labels) {
    json a = json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) a.push_back(w[i]);
    wts.push_back(std::move(a));
  }
  j["weights"] = std::move(wts);
  json h = json::array(), e = json::array();
  for (const CMatrix& m : rep.h_matrices) h.push_back(matrix_to_json(m));
  for (const CMatrix& m : rep.e_matrices) e.push_back(matrix_to_json(m));
  j["h"] = std::move(h);
  j["e"] = std::move(e);
  CMatrix hw(rep.dimension, 1);
  hw.col(0) = rep.hw_vector;
  j["hw_vector"] = matrix_to_json(hw, 1 << 30);
  return j;
}

Irrep irrep_from_json(const json& j) {
  if (j.value("format", "") != "berezin-matrix-bundle" || j.value("kind", "") != "irrep")
    throw ConfigError("not an irrep matrix bundle");
  Irrep rep;
  rep.cw = make_cartan_weyl(j.at("series").get<std::string>(), j.at("rank").get<int>());
  rep.lambda = Weight(vector_from_json(j.at("lambda")));
  rep.k = j.at("k").get<int>();
  rep.highest_weight = rep.lambda.scaled(rep.k);
  rep.dimension = j.at("dimension").get<int>();
  for (const json& w : j.at("weights")) {
    Eigen::VectorXi v(static_cast<int>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) v[static_cast<int>(i)] = w[i].get<int>();
    rep.weight_labels.push_back(v);
  }
  for (const json& m : j.at("h")) rep.h_matrices.push_back(matrix_from_json(m));
  for (const json& m : j.at("e")) rep.e_matrices.push_back(matrix_from_json(m));
  if (static_cast<int>(rep.h_matrices.size()) != rep.cw->rank() ||
      static_cast<int>(rep.e_matrices.size()) != rep.cw->num_roots())
    throw ConfigError("irrep bundle: generator count does not match the algebra");
  for (const CMatrix& m : rep.h_matrices)
    if (m.rows() != rep.dimension) throw ConfigError("irrep bundle: matrix size mismatch");
  for (const CMatrix& m : rep.e_matrices)
    if (m.rows() != rep.dimension) throw ConfigError("irrep bundle: matrix size mismatch");
  rep.hw_vector = matrix_from_json(j.at("hw_vector")).col(0);
  assemble_basis_matrices(rep);
  return rep;
}

json operator_to_json(const BerezinOperator& op) {
  json j;
  j["format"] = "berezin-matrix-bundle";
  j["version"] = 1;
  j["kind"] = "operator";
  j["k"] = op.k;
  j["dimension"] = op.matrix.rows();
  j["function"] = op.function;
  j["quadrature"] = op.quadrature;
  j["asymmetry"] = op.asymmetry;
  j["matrix"] = matrix_to_json(op.matrix);
  return j;
}

BerezinOperator operator_from_json(const json& j) {
  if (j.value("format", "") != "berezin-matrix-bundle" || j.value("kind", "") != "operator")
    throw ConfigError("not an operator matrix bundle");
  BerezinOperator op;
  op.k = j.at("k").get<int>();
  op.function = j.value("function", "");
  op.quadrature = j.value("quadrature", "");
  op.asymmetry = j.value("asymmetry", 0.0);
  op.matrix = matrix_from_json(j.at("matrix"));
  return op;
}

void save_irrep(const Irrep& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << irrep_to_json(rep).dump();
  if (!out) throw IoError("write failed: " + path);
}

Irrep load_irrep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return irrep_from_json(j);
}

std::string irrep_cache_key(std::string_view series, int rank, const Weight& lambda, int k) {
  std::ostringstream s;
  s << series << rank << "_";
  for (int i = 0; i < lambda.rank(); ++i) {
    if (i) s << "-";
    s << std::llround(lambda.labels[i]);
  }
  s << "_k" << k;
  return s.str();
}

std::string irrep_cache_key(const Irrep& rep) {
  return irrep_cache_key(rep.cw->root_system.series_label, rep.cw->rank(), rep.lambda, rep.k);
}

}  // namespace berezin
