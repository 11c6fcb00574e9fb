#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "pb/model.hpp"

namespace pb {

using Json = nlohmann::ordered_json;

/// Rationals travel as "p/q" strings; integers and decimal strings are accepted on input.
inline Json rational_to_json(const Rational& r) { return to_string(r); }

inline Rational rational_from_json(const Json& j, std::string_view what) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ParseError&) {
      throw ParseError(ParseErrorKind::malformed_number, std::string(what) + ": '" + j.get<std::string>() + "'");
    }
  }
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number_float()) return parse_rational(j.dump());
  throw ParseError(ParseErrorKind::schema, std::string(what) + " must be a rational string");
}

inline Json instance_to_json(const Instance& inst) {
  Json j;
  j["n"] = inst.voter_count();
  j["budget"] = rational_to_json(inst.budget());
  Json projects = Json::array();
  for (const auto& p : inst.projects()) projects.push_back({{"id", p.id}, {"cost", rational_to_json(p.cost)}});
  j["projects"] = std::move(projects);
  Json approvals = Json::array();
  for (VoterIndex i = 0; i < inst.voter_count(); ++i) approvals.push_back(inst.ids(inst.ballot(i)));
  j["approvals"] = std::move(approvals);
  return j;
}

inline Instance instance_from_json(const Json& j) {
  auto require = [&](const char* key) -> const Json& {
    if (!j.is_object() || !j.contains(key)) throw ParseError(ParseErrorKind::schema, std::string("missing key '") + key + "'");
    return j.at(key);
  };
  const Json& n = require("n");
  if (!n.is_number_unsigned() || n.get<std::size_t>() == 0)
    throw ParseError(ParseErrorKind::schema, "'n' must be a positive integer");
  const Money budget = rational_from_json(require("budget"), "budget");

  const Json& pj = require("projects");
  if (!pj.is_array()) throw ParseError(ParseErrorKind::schema, "'projects' must be an array");
  std::vector<Project> projects;
  for (const auto& p : pj) {
    if (!p.is_object() || !p.contains("id") || !p.contains("cost") || !p["id"].is_string())
      throw ParseError(ParseErrorKind::schema, "project entries need a string 'id' and a 'cost'");
    projects.push_back({p["id"].get<std::string>(), rational_from_json(p["cost"], "cost of " + p["id"].get<std::string>())});
  }

  const Json& aj = require("approvals");
  if (!aj.is_array() || aj.size() != n.get<std::size_t>())
    throw ParseError(ParseErrorKind::schema, "'approvals' must be an array with one ballot per voter");
  std::vector<std::vector<std::string>> approvals;
  for (const auto& ballot : aj) {
    if (!ballot.is_array()) throw ParseError(ParseErrorKind::schema, "each ballot must be an array of project ids");
    std::vector<std::string> ids;
    for (const auto& id : ballot) {
      if (!id.is_string()) throw ParseError(ParseErrorKind::schema, "project ids must be strings");
      ids.push_back(id.get<std::string>());
    }
    approvals.push_back(std::move(ids));
  }
  try {
    return Instance::from_ids(std::move(projects), approvals, budget);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(ParseErrorKind::schema, e.what());
  }
}

inline Instance parse_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(ParseErrorKind::schema, e.what());
  }
  return instance_from_json(j);
}

inline std::string emit_json(const Instance& inst) { return instance_to_json(inst).dump(2); }

/// Outcome as a JSON array of project ids.
inline Json outcome_to_json(const Instance& inst, const ProjectSet& w) { return inst.ids(w); }

inline ProjectSet outcome_from_json(const Instance& inst, const Json& j) {
  if (!j.is_array()) throw ParseError(ParseErrorKind::schema, "outcome must be an array of project ids");
  ProjectSet w = inst.empty_set();
  for (const auto& id : j) {
    if (!id.is_string()) throw ParseError(ParseErrorKind::schema, "project ids must be strings");
    auto p = inst.find(id.get<std::string>());
    if (!p) throw ParseError(ParseErrorKind::dangling_project, "outcome references unknown project '" + id.get<std::string>() + "'");
    w.set(*p);
  }
  return w;
}

}  // namespace pb
