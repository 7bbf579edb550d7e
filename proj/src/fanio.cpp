#include "tropgw/fanio.hpp"

namespace tropgw {

using nlohmann::json;

namespace {

json vec_to_json(const RatVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(rat_to_string(v(i)));
  return a;
}

RatVec vec_from_json(const json& a) {
  RatVec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = rat_from_string(a[i].get<std::string>());
  return v;
}

json mat_to_json(const RatMat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(vec_to_json(m.row(i).transpose()));
  return a;
}

RatMat mat_from_json(const json& a, int cols) {
  RatMat m(a.size(), cols);
  for (size_t i = 0; i < a.size(); ++i) m.row(i) = vec_from_json(a[i]).transpose();
  return m;
}

} // namespace

json complex_to_json(const WeightedComplex& x) {
  json j;
  j["ambient_dim"] = x.ambient_dim();
  j["dim"] = x.dim();
  json cells = json::array();
  json weights = json::object();
  for (int i = 0; i < x.facet_count(); ++i) {
    const Polyhedron& f = x.facet(i);
    json c;
    c["dim"] = f.dim();
    c["vertices"] = mat_to_json(f.vertices());
    c["rays"] = mat_to_json(f.rays());
    c["lineality"] = mat_to_json(f.lineality());
    cells.push_back(c);
    weights[std::to_string(i)] = x.weight(i).get_str();
  }
  j["cells"] = cells;
  j["weights"] = weights;
  return j;
}

WeightedComplex complex_from_json(const json& j) {
  int ambient = j.at("ambient_dim").get<int>();
  int dim = j.contains("dim") ? j.at("dim").get<int>() : -1;
  std::vector<Polyhedron> facets;
  std::vector<Int> weights;
  const json& cells = j.at("cells");
  const json& ws = j.at("weights");
  for (size_t i = 0; i < cells.size(); ++i) {
    const json& c = cells[i];
    RatMat v = mat_from_json(c.value("vertices", json::array()), ambient);
    RatMat r = mat_from_json(c.value("rays", json::array()), ambient);
    RatMat l = mat_from_json(c.value("lineality", json::array()), ambient);
    std::string key = std::to_string(i);
    if (!ws.contains(key)) continue; // weightless cells are face data only
    Polyhedron p = v.rows() == 0 ? Polyhedron::cone_from_rays(ambient, r, l)
                                 : Polyhedron::from_generators(ambient, v, r, l);
    facets.push_back(std::move(p));
    const json& w = ws.at(key);
    weights.push_back(w.is_string() ? Int(w.get<std::string>()) : Int(w.get<long>()));
  }
  if (dim < 0 && !facets.empty()) dim = facets[0].dim();
  return WeightedComplex::from_facets(ambient, dim, std::move(facets), std::move(weights), false);
}

json plfunction_to_json(const PLFunction& f) {
  json j;
  if (f.is_ray_values()) {
    j["kind"] = "ray_values";
    json vals = json::array();
    for (const auto& [r, v] : f.ray_vals().values) {
      json e;
      json ray = json::array();
      for (Eigen::Index i = 0; i < r.size(); ++i) ray.push_back(r(i).get_str());
      e["ray"] = ray;
      e["value"] = rat_to_string(v);
      vals.push_back(e);
    }
    j["values"] = vals;
    return j;
  }
  if (f.is_max_form()) {
    j["kind"] = "max";
    json terms = json::array();
    for (const auto& [a, c] : f.max_form().terms) {
      json t;
      t["linear"] = vec_to_json(a);
      t["constant"] = rat_to_string(c);
      terms.push_back(t);
    }
    j["terms"] = terms;
    return j;
  }
  throw std::invalid_argument("plfunction_to_json: per-cell data needs its host complex");
}

PLFunction plfunction_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "ray_values") {
    std::vector<std::pair<IntVec, Rat>> vals;
    for (const auto& e : j.at("values")) {
      const json& ray = e.at("ray");
      IntVec r(ray.size());
      for (size_t i = 0; i < ray.size(); ++i)
        r(i) = ray[i].is_string() ? Int(ray[i].get<std::string>()) : Int(ray[i].get<long>());
      vals.push_back({r, rat_from_string(e.at("value").get<std::string>())});
    }
    return PLFunction::ray_values(std::move(vals));
  }
  if (kind == "max") {
    std::vector<std::pair<RatVec, Rat>> terms;
    for (const auto& t : j.at("terms"))
      terms.push_back({vec_from_json(t.at("linear")),
                       rat_from_string(t.at("constant").get<std::string>())});
    return PLFunction::max_terms(std::move(terms));
  }
  throw std::invalid_argument("plfunction_from_json: unknown kind");
}

} // namespace tropgw
