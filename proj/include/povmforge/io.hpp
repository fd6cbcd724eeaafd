/*
 * This code is part of povm-forge.
 *
 * (C) Copyright 2026 povm-forge contributors.
 *
 * Licensed under the Apache License, Version 2.0; see the LICENSE file in
 * the repository root or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "povmforge/channels.hpp"
#include "povmforge/errors.hpp"
#include "povmforge/matrix.hpp"
#include "povmforge/observables.hpp"

namespace povmforge {

using Json = nlohmann::ordered_json;

/// A parsed input file: named observables, channels, and states. Parsing
/// checks structure and declared dimensions only; semantic validation
/// (positivity, normalization) stays with validate_povm and friends so the
/// CLI can report those failures per command.
struct Document {
  std::string schema_version;
  std::map<std::string, std::variant<Povm, Channel, DensityMatrix>> objects;
};

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& path,
                                     const std::string& what) {
  throw SchemaError("schema error at " + path + ": " + what);
}

inline Complex parse_complex(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_fail(path, "complex entries must be [re, im] number pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json dump_complex(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

inline ComplexMatrix parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    schema_fail(path, "matrices are non-empty arrays of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    schema_fail(path + "[0]", "rows are non-empty arrays of complex entries");
  }
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      throw DimensionError("object at " + row_path + ": ragged matrix rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_complex(j[r][c], row_path + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline Json dump_matrix(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(dump_complex(m(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline int parse_dim_field(const Json& j, const char* field,
                           const std::string& path) {
  if (!j.contains(field) || !j[field].is_number_integer() ||
      j[field].get<int>() <= 0) {
    schema_fail(path, std::string("missing or invalid positive integer '") +
                          field + "'");
  }
  return j[field].get<int>();
}

inline Povm parse_povm_object(const Json& j, const std::string& path) {
  Povm a;
  a.dim = parse_dim_field(j, "dim", path);
  if (!j.contains("effects") || !j["effects"].is_array() || j["effects"].empty()) {
    schema_fail(path, "povm objects need a non-empty 'effects' array");
  }
  const std::size_t n = j["effects"].size();
  if (j.contains("outcomes")) {
    if (!j["outcomes"].is_array() || j["outcomes"].size() != n) {
      schema_fail(path, "'outcomes' must match the effect count");
    }
    for (const auto& o : j["outcomes"]) {
      if (!o.is_number_integer()) schema_fail(path, "outcomes are integers");
      a.outcomes.push_back(o.get<int>());
    }
  } else {
    a.outcomes.resize(n);
    std::iota(a.outcomes.begin(), a.outcomes.end(), 0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    ComplexMatrix e = parse_matrix(j["effects"][i],
                                   path + ".effects[" + std::to_string(i) + "]");
    if (e.rows() != a.dim || e.cols() != a.dim) {
      throw DimensionError("object at " + path + ": effect " +
                           std::to_string(i) + " does not match dim " +
                           std::to_string(a.dim));
    }
    a.effects.push_back(std::move(e));
  }
  return a;
}

inline Channel parse_channel_object(const Json& j, const std::string& path) {
  Channel c;
  c.in_dim = parse_dim_field(j, "in_dim", path);
  c.out_dim = parse_dim_field(j, "out_dim", path);
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty()) {
    schema_fail(path, "channel objects need a non-empty 'kraus' array");
  }
  for (std::size_t i = 0; i < j["kraus"].size(); ++i) {
    ComplexMatrix k = parse_matrix(j["kraus"][i],
                                   path + ".kraus[" + std::to_string(i) + "]");
    if (k.rows() != c.out_dim || k.cols() != c.in_dim) {
      throw DimensionError("object at " + path + ": Kraus operator " +
                           std::to_string(i) + " is not out_dim x in_dim");
    }
    c.kraus.push_back(std::move(k));
  }
  return c;
}

inline DensityMatrix parse_density_object(const Json& j,
                                          const std::string& path) {
  DensityMatrix rho;
  rho.dim = parse_dim_field(j, "dim", path);
  if (!j.contains("matrix")) schema_fail(path, "density objects need 'matrix'");
  rho.matrix = parse_matrix(j["matrix"], path + ".matrix");
  if (rho.matrix.rows() != rho.dim || rho.matrix.cols() != rho.dim) {
    throw DimensionError("object at " + path + ": matrix does not match dim " +
                         std::to_string(rho.dim));
  }
  return rho;
}

}  // namespace detail

inline Json povm_to_json(const Povm& a) {
  Json j;
  j["type"] = "povm";
  j["dim"] = a.dim;
  j["outcomes"] = a.outcomes;
  Json effects = Json::array();
  for (const ComplexMatrix& e : a.effects) effects.push_back(detail::dump_matrix(e));
  j["effects"] = std::move(effects);
  return j;
}

inline Json channel_to_json(const Channel& c) {
  Json j;
  j["type"] = "channel";
  j["in_dim"] = c.in_dim;
  j["out_dim"] = c.out_dim;
  Json kraus = Json::array();
  for (const ComplexMatrix& k : c.kraus) kraus.push_back(detail::dump_matrix(k));
  j["kraus"] = std::move(kraus);
  return j;
}

inline Json density_to_json(const DensityMatrix& rho) {
  Json j;
  j["type"] = "density";
  j["dim"] = rho.dim;
  j["matrix"] = detail::dump_matrix(rho.matrix);
  return j;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  return detail::dump_matrix(m);
}

inline Json real_matrix_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Parses a document from text. Throws SyntaxError (malformed text, with
/// line information), SchemaError (structural problems, with a path), or
/// DimensionError (declared dims disagreeing with matrix shapes).
inline Document parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw SyntaxError("syntax error near line " + std::to_string(line) + ": " +
                      e.what());
  }
  if (!j.is_object()) detail::schema_fail("$", "document root must be an object");
  if (!j.contains("schema_version") || !j["schema_version"].is_string()) {
    detail::schema_fail("$.schema_version", "missing or non-string");
  }
  Document doc;
  doc.schema_version = j["schema_version"].get<std::string>();
  if (doc.schema_version != "1") {
    detail::schema_fail("$.schema_version",
                        "unsupported version '" + doc.schema_version + "'");
  }
  if (!j.contains("objects") || !j["objects"].is_object()) {
    detail::schema_fail("$.objects", "missing or not an object map");
  }
  for (const auto& [name, obj] : j["objects"].items()) {
    std::string path = "$.objects." + name;
    if (!obj.is_object() || !obj.contains("type") || !obj["type"].is_string()) {
      detail::schema_fail(path, "objects need a string 'type'");
    }
    std::string type = obj["type"].get<std::string>();
    if (type == "povm") {
      doc.objects.emplace(name, detail::parse_povm_object(obj, path));
    } else if (type == "channel") {
      doc.objects.emplace(name, detail::parse_channel_object(obj, path));
    } else if (type == "density") {
      doc.objects.emplace(name, detail::parse_density_object(obj, path));
    } else {
      detail::schema_fail(path + ".type", "unknown type '" + type + "'");
    }
  }
  return doc;
}

/// Canonical serialization: stable key order, objects sorted by name,
/// shortest round-trip number formatting. serialize(parse(serialize(x)))
/// is byte-identical to serialize(x).
inline std::string serialize(const Document& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  Json objects = Json::object();
  for (const auto& [name, obj] : doc.objects) {
    if (std::holds_alternative<Povm>(obj)) {
      objects[name] = povm_to_json(std::get<Povm>(obj));
    } else if (std::holds_alternative<Channel>(obj)) {
      objects[name] = channel_to_json(std::get<Channel>(obj));
    } else {
      objects[name] = density_to_json(std::get<DensityMatrix>(obj));
    }
  }
  j["objects"] = std::move(objects);
  return j.dump(2) + "\n";
}

/// Typed lookups; throw MissingObject when the name is absent or holds a
/// different kind of object.
inline const Povm& get_povm(const Document& doc, const std::string& name) {
  auto it = doc.objects.find(name);
  if (it == doc.objects.end()) {
    throw MissingObject("no object named '" + name + "' in the document");
  }
  if (!std::holds_alternative<Povm>(it->second)) {
    throw MissingObject("object '" + name + "' is not a povm");
  }
  return std::get<Povm>(it->second);
}

inline const Channel& get_channel(const Document& doc,
                                  const std::string& name) {
  auto it = doc.objects.find(name);
  if (it == doc.objects.end()) {
    throw MissingObject("no object named '" + name + "' in the document");
  }
  if (!std::holds_alternative<Channel>(it->second)) {
    throw MissingObject("object '" + name + "' is not a channel");
  }
  return std::get<Channel>(it->second);
}

inline const DensityMatrix& get_density(const Document& doc,
                                        const std::string& name) {
  auto it = doc.objects.find(name);
  if (it == doc.objects.end()) {
    throw MissingObject("no object named '" + name + "' in the document");
  }
  if (!std::holds_alternative<DensityMatrix>(it->second)) {
    throw MissingObject("object '" + name + "' is not a density matrix");
  }
  return std::get<DensityMatrix>(it->second);
}

}  // namespace povmforge
