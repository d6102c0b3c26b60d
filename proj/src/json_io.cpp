#include "globest/json_io.hpp"

namespace globest {

json cmat_to_json(const CMat& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat cmat_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty list of rows");
  const long r = static_cast<long>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ConfigError(field, "expected rows of [re, im] entries");
  const long c = static_cast<long>(j[0].size());
  CMat m(r, c);
  for (long a = 0; a < r; ++a) {
    if (!j[a].is_array() || static_cast<long>(j[a].size()) != c) throw ConfigError(field, "ragged matrix");
    for (long b = 0; b < c; ++b) {
      const json& e = j[a][b];
      if (e.is_number()) {
        m(a, b) = cd(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(a, b) = cd(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(field, "entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

json rvec_to_json(const RVec& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

RVec rvec_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected a list of numbers");
  RVec v(static_cast<long>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(field, "expected a list of numbers");
    v(static_cast<long>(i)) = j[i].get<double>();
  }
  return v;
}

}  // namespace globest
