#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "hinf/state_space.hpp"
#include "hinf/types.hpp"

namespace hinf {

namespace detail {

inline Complex parse_entry(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ParseError(where + ": entry must be a number or [re, im]");
}

inline CMat parse_matrix(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty())
    throw ParseError(name + ": expected a nonempty array of rows");
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw ParseError(name + ": rows must be nonempty arrays");
  const size_t cols = j[0].size();
  CMat out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(name + ": ragged rows");
    for (size_t c = 0; c < cols; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_entry(j[r][c], name);
  }
  if (!out.allFinite()) throw ParseError(name + ": entries must be finite");
  return out;
}

inline nlohmann::json matrix_to_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex v = m(r, c);
      if (v.imag() == 0.0)
        row.push_back(v.real());
      else
        row.push_back(nlohmann::json::array({v.real(), v.imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// System file format: {"A": [[..]], "B": [[..]], "C": [[..]], "D": [[..]]},
/// entries either plain numbers or [re, im] pairs. Dimensions are inferred
/// and validated.
inline StateSpace system_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("system: expected a JSON object");
  for (const char* key : {"A", "B", "C", "D"})
    if (!j.contains(key))
      throw ParseError(std::string("system: missing matrix \"") + key + "\"");
  try {
    return StateSpace(detail::parse_matrix(j["A"], "A"),
                      detail::parse_matrix(j["B"], "B"),
                      detail::parse_matrix(j["C"], "C"),
                      detail::parse_matrix(j["D"], "D"));
  } catch (const DimensionError& e) {
    throw ParseError(std::string("system: ") + e.what());
  }
}

inline nlohmann::json system_to_json(const StateSpace& sys) {
  nlohmann::json j;
  j["A"] = detail::matrix_to_json(sys.A());
  j["B"] = detail::matrix_to_json(sys.B());
  j["C"] = detail::matrix_to_json(sys.C());
  j["D"] = detail::matrix_to_json(sys.D());
  return j;
}

inline StateSpace load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open system file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return system_from_json(j);
}

}  // namespace hinf
