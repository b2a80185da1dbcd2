#include "pwareach/json_io.hpp"

#include <fstream>

namespace pwareach {

namespace {

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInputError("json: expected a matrix (array of rows)");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Mat(0, 0);
  const int cols = static_cast<int>(j.at(0).size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<size_t>(i));
    if (static_cast<int>(row.size()) != cols)
      throw InvalidInputError("json: ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<size_t>(c)).get<double>();
  }
  return m;
}

Vec vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInputError("json: expected an array of reals");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<size_t>(i)).get<double>();
  return v;
}

}  // namespace

Json to_json(const Polyhedron& p) {
  Json j;
  j["A"] = matrix_to_json(p.matrix());
  j["b"] = vector_to_json(p.rhs());
  return j;
}

Json to_json(const PolyUnion& u) {
  Json j;
  Json polys = Json::array();
  for (const auto& m : u.members()) polys.push_back(to_json(m));
  j["polys"] = std::move(polys);
  return j;
}

Json to_json(const ReluNetwork& net) {
  Json j;
  Json layers = Json::array();
  for (const auto& l : net.layers()) {
    Json layer;
    layer["weights"] = matrix_to_json(l.weights);
    layer["bias"] = vector_to_json(l.bias);
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j;
}

Json to_json(const PwaFunction& pwa) {
  Json j;
  j["domain"] = to_json(pwa.domain);
  Json regions = Json::array();
  for (const auto& r : pwa.regions) {
    Json jr;
    jr["pattern"] = r.pattern.to_string();
    jr["A"] = matrix_to_json(r.poly.matrix());
    jr["b"] = vector_to_json(r.poly.rhs());
    jr["C"] = matrix_to_json(r.map.matrix);
    jr["d"] = vector_to_json(r.map.offset);
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);
  return j;
}

Json to_json(const ReachResult& res) {
  Json j;
  Json sets = Json::array();
  for (const auto& s : res.sets) sets.push_back(to_json(s));
  j["sets"] = std::move(sets);
  j["status"] = res.status == ReachStatus::Complete ? "complete" : "early_terminated";
  if (res.status == ReachStatus::EarlyTerminated)
    j["witness_point"] = vector_to_json(res.witness_point);
  j["regions_explored"] = res.regions_explored;
  return j;
}

Json to_json(const FixedPoint& fp) {
  Json j;
  j["point"] = vector_to_json(fp.point);
  j["region_index"] = fp.region_index;
  j["stable"] = fp.stable;
  j["spectral_radius"] = fp.spectral_radius;
  return j;
}

Json to_json(const HomeoCertificate& cert) {
  Json j;
  j["is_homeomorphism"] = cert.is_homeomorphism;
  j["minor_signs"] = cert.minor_signs;
  if (cert.failing_region) j["failing_region"] = *cert.failing_region;
  return j;
}

Polyhedron polyhedron_from_json(const Json& j, int expected_dim) {
  const Mat A = matrix_from_json(j.at("A"));
  const Vec b = vector_from_json(j.at("b"));
  if (A.rows() == 0) {
    if (expected_dim < 0)
      throw InvalidInputError("json: constraint-free polytope needs an expected dimension");
    return Polyhedron(expected_dim);
  }
  if (expected_dim >= 0 && A.cols() != expected_dim)
    throw InvalidInputError("json: polytope dimension mismatch");
  return Polyhedron::from_inequalities(A, b);
}

PolyUnion union_from_json(const Json& j, int expected_dim) {
  PolyUnion u(expected_dim >= 0 ? expected_dim : 0);
  for (const auto& jp : j.at("polys")) u.add(polyhedron_from_json(jp, expected_dim));
  return u;
}

ReluNetwork network_from_json(const Json& j) {
  std::vector<Layer> layers;
  for (const auto& jl : j.at("layers"))
    layers.push_back({matrix_from_json(jl.at("weights")), vector_from_json(jl.at("bias"))});
  return ReluNetwork(std::move(layers));
}

PwaFunction pwa_from_json(const Json& j) {
  PwaFunction pwa;
  pwa.domain = polyhedron_from_json(j.at("domain"));
  for (const auto& jr : j.at("regions")) {
    Region r;
    r.pattern = ActivationPattern::from_string(jr.at("pattern").get<std::string>());
    r.poly = polyhedron_from_json(jr, pwa.domain.dim());
    r.map = {matrix_from_json(jr.at("C")), vector_from_json(jr.at("d"))};
    r.origins.assign(static_cast<size_t>(r.poly.size()), FacetOrigin{});
    pwa.regions.push_back(std::move(r));
  }
  return pwa;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open file: " + path);
  Json j;
  in >> j;
  return j;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

ReluNetwork load_network(const std::string& path) {
  return network_from_json(load_json(path));
}

Polyhedron load_polyhedron(const std::string& path, int expected_dim) {
  return polyhedron_from_json(load_json(path), expected_dim);
}

}  // namespace pwareach
