#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minkassign/errors.hpp"
#include "minkassign/formulas.hpp"
#include "minkassign/matrix.hpp"
#include "minkassign/montecarlo.hpp"
#include "minkassign/rational.hpp"
#include "minkassign/verify.hpp"

namespace minkassign {

// Rationals travel as strings: integers bare ("5"), everything else "num/den".
inline std::string rational_str(const Rational& x) {
  return x.is_integer() ? x.num().get_str() : x.str();
}

inline Rational parse_rational(const nlohmann::json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const DomainError& e) {
      throw JsonSchemaError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
  if (j.is_number_unsigned()) {
    unsigned long long v = j.get<unsigned long long>();
    if (v > static_cast<unsigned long long>(std::numeric_limits<long>::max()))
      throw JsonSchemaError(where + ": integer too large, pass it as a string");
    return Rational(static_cast<long>(v));
  }
  if (j.is_number_float()) {
    double d = j.get<double>();
    if (!std::isfinite(d)) throw JsonSchemaError(where + ": non-finite number");
    return Rational::from_double(d);  // exact binary value of the literal
  }
  throw JsonSchemaError(where + ": expected a number or a rational string like \"5/4\"");
}

inline nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw JsonSchemaError(std::string("malformed JSON: ") + e.what());
  }
}

// Accepts either a bare 2D array or an object carrying one under "matrix".
inline Grid<Rational> parse_matrix_json(const nlohmann::json& doc) {
  const nlohmann::json* arr = &doc;
  if (doc.is_object()) {
    if (!doc.contains("matrix")) throw JsonSchemaError("expected a \"matrix\" field");
    arr = &doc.at("matrix");
  }
  if (!arr->is_array() || arr->empty() || !(*arr)[0].is_array() || (*arr)[0].empty())
    throw JsonSchemaError("matrix must be a nonempty array of nonempty rows");
  const int m = static_cast<int>(arr->size());
  const int n = static_cast<int>((*arr)[0].size());
  Grid<Rational> g(m, n);
  for (int i = 0; i < m; ++i) {
    const nlohmann::json& row = (*arr)[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw JsonSchemaError("matrix rows must all have length " + std::to_string(n));
    for (int j = 0; j < n; ++j)
      g.at(i, j) = parse_rational(row[j], "matrix[" + std::to_string(i + 1) + "][" +
                                              std::to_string(j + 1) + "]");
  }
  return g;
}

inline std::vector<Rational> parse_rational_vector(const nlohmann::json& j,
                                                   const std::string& where) {
  if (!j.is_array() || j.empty())
    throw JsonSchemaError(where + " must be a nonempty array");
  std::vector<Rational> out;
  out.reserve(j.size());
  for (size_t t = 0; t < j.size(); ++t)
    out.push_back(parse_rational(j[t], where + "[" + std::to_string(t + 1) + "]"));
  return out;
}

inline RankOneRates<Rational> parse_rates_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("r") || !doc.contains("c"))
    throw JsonSchemaError("rates must be an object with \"r\" and \"c\" arrays");
  return {parse_rational_vector(doc.at("r"), "r"), parse_rational_vector(doc.at("c"), "c")};
}

inline nlohmann::json matrix_to_json(const Grid<Rational>& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < g.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < g.cols(); ++j) row.push_back(rational_str(g.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json rational_vector_to_json(const std::vector<Rational>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const Rational& x : v) out.push_back(rational_str(x));
  return out;
}

// positions leave the library 1-based
inline nlohmann::json cells_to_json(const std::vector<Cell>& cells) {
  nlohmann::json out = nlohmann::json::array();
  for (const Cell& c : cells) out.push_back({c.first + 1, c.second + 1});
  return out;
}

inline nlohmann::json index_set_to_json(const std::vector<int>& idx) {
  nlohmann::json out = nlohmann::json::array();
  for (int t : idx) out.push_back(t + 1);
  return out;
}

inline nlohmann::json estimate_to_json(const EstimateReport& r) {
  nlohmann::json out{{"mean", r.mean}, {"stderr", r.se}, {"samples", r.samples}};
  if (r.target) {
    out["target"] = rational_str(*r.target);
    out["target_float"] = r.target->to_double();
  }
  if (r.z) out["z"] = *r.z;
  return out;
}

inline nlohmann::json check_to_json(const CheckReport& rep) {
  nlohmann::json out{{"name", rep.name},
                     {"mode", rep.mode == CheckMode::kRational ? "rational" : "modular"},
                     {"trials", rep.trials},
                     {"failures", rep.failures},
                     {"conjectural", rep.conjectural},
                     {"witnesses", rep.witnesses}};
  if (!rep.false_pass_bound.empty()) out["false_pass_bound"] = rep.false_pass_bound;
  return out;
}

}  // namespace minkassign
