#pragma once

#include <json.hpp>

#include "globest/spaces.hpp"

namespace globest {

using json = nlohmann::json;

// Complex matrices are row-major lists of rows, each entry [re, im].
json cmat_to_json(const CMat& m);
CMat cmat_from_json(const json& j, const std::string& field);

json rvec_to_json(const RVec& v);
RVec rvec_from_json(const json& j, const std::string& field);

// Raised for malformed user configuration; carries the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace globest
