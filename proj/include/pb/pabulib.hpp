#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pb/model.hpp"

namespace pb {

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Splits one ';'-separated row. Fields may be double-quoted with "" as escape.
inline std::vector<std::string> split_row(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ';') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ParseError(ParseErrorKind::malformed_row, "unterminated quote on line " + std::to_string(line_no));
  fields.push_back(std::move(cur));
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

struct Section {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

inline std::size_t column(const Section& s, std::string_view name, std::string_view section) {
  for (std::size_t k = 0; k < s.header.size(); ++k)
    if (lower(s.header[k]) == name) return k;
  throw ParseError(ParseErrorKind::missing_key,
                   "column '" + std::string(name) + "' missing from " + std::string(section) + " header");
}

inline Money parse_money_field(const std::string& text, std::size_t line_no) {
  try {
    return parse_rational(text);
  } catch (const ParseError&) {
    throw ParseError(ParseErrorKind::malformed_number,
                     "line " + std::to_string(line_no) + ": '" + text + "' is not a number");
  }
}

}  // namespace detail

/// Parses a Pabulib `.pb` file with approval ballots. Decimal costs and
/// budgets become exact rationals ("2.5" -> 5/2).
inline Instance parse_pabulib(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::map<std::string, detail::Section> sections;
  detail::Section* current = nullptr;
  bool want_header = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;

    const std::string tag = detail::lower(detail::trim(line));
    if (tag == "meta" || tag == "projects" || tag == "votes") {
      if (sections.count(tag))
        throw ParseError(ParseErrorKind::malformed_row, "section " + tag + " appears twice");
      current = &sections[tag];
      want_header = true;
      continue;
    }
    if (!current) throw ParseError(ParseErrorKind::missing_section, "line " + std::to_string(line_no) + " precedes META");
    auto fields = detail::split_row(line, line_no);
    if (want_header) {
      current->header = std::move(fields);
      want_header = false;
    } else {
      current->rows.emplace_back(line_no, std::move(fields));
    }
  }
  for (const char* name : {"meta", "projects", "votes"})
    if (!sections.count(name))
      throw ParseError(ParseErrorKind::missing_section, std::string("section ") + name + " not found");

  std::map<std::string, std::string> meta;
  for (const auto& [ln, row] : sections["meta"].rows) {
    if (row.size() < 2) throw ParseError(ParseErrorKind::malformed_row, "META line " + std::to_string(ln));
    meta[detail::lower(row[0])] = row[1];
  }
  for (const char* key : {"num_projects", "num_votes", "budget", "vote_type"})
    if (!meta.count(key)) throw ParseError(ParseErrorKind::missing_key, std::string("META key '") + key + "'");
  if (detail::lower(meta["vote_type"]) != "approval")
    throw ParseError(ParseErrorKind::unsupported_vote_type, "'" + meta["vote_type"] + "' (only approval is supported)");

  const Money budget = detail::parse_money_field(meta["budget"], 0);
  auto parse_count = [&](const std::string& key) -> std::size_t {
    const std::string& v = meta[key];
    if (!detail::all_digits(v)) throw ParseError(ParseErrorKind::malformed_number, key + " = '" + v + "'");
    return std::stoul(v);
  };
  const std::size_t num_projects = parse_count("num_projects");
  const std::size_t num_votes = parse_count("num_votes");

  const auto& proj = sections["projects"];
  const std::size_t id_col = detail::column(proj, "project_id", "PROJECTS");
  const std::size_t cost_col = detail::column(proj, "cost", "PROJECTS");
  std::vector<Project> projects;
  std::map<std::string, ProjectIndex> index;
  for (const auto& [ln, row] : proj.rows) {
    if (row.size() <= std::max(id_col, cost_col))
      throw ParseError(ParseErrorKind::malformed_row, "PROJECTS line " + std::to_string(ln));
    if (!index.emplace(row[id_col], projects.size()).second)
      throw ParseError(ParseErrorKind::duplicate_id, "project '" + row[id_col] + "'");
    projects.push_back({row[id_col], detail::parse_money_field(row[cost_col], ln)});
  }
  if (projects.size() != num_projects)
    throw ParseError(ParseErrorKind::count_mismatch, "num_projects is " + std::to_string(num_projects) + " but " +
                                                         std::to_string(projects.size()) + " projects are listed");

  const auto& votes = sections["votes"];
  const std::size_t vote_col = detail::column(votes, "vote", "VOTES");
  std::vector<ProjectSet> ballots;
  for (const auto& [ln, row] : votes.rows) {
    if (row.size() <= vote_col) throw ParseError(ParseErrorKind::malformed_row, "VOTES line " + std::to_string(ln));
    ProjectSet ballot(projects.size());
    std::string_view rest = row[vote_col];
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto id = detail::trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (id.empty()) continue;
      auto it = index.find(std::string(id));
      if (it == index.end())
        throw ParseError(ParseErrorKind::dangling_project,
                         "VOTES line " + std::to_string(ln) + " references unknown project '" + std::string(id) + "'");
      ballot.set(it->second);
    }
    ballots.push_back(std::move(ballot));
  }
  if (ballots.size() != num_votes)
    throw ParseError(ParseErrorKind::count_mismatch, "num_votes is " + std::to_string(num_votes) + " but " +
                                                         std::to_string(ballots.size()) + " votes are listed");

  try {
    return Instance(std::move(projects), std::move(ballots), budget);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(ParseErrorKind::schema, e.what());
  }
}

/// Writes an instance in the Pabulib layout (approval ballots, exact costs).
inline std::string emit_pabulib(const Instance& inst) {
  std::string out = "META\nkey;value\n";
  out += "num_projects;" + std::to_string(inst.project_count()) + "\n";
  out += "num_votes;" + std::to_string(inst.voter_count()) + "\n";
  out += "budget;" + to_string(inst.budget()) + "\n";
  out += "vote_type;approval\n";
  out += "PROJECTS\nproject_id;cost\n";
  for (const auto& p : inst.projects()) out += p.id + ";" + to_string(p.cost) + "\n";
  out += "VOTES\nvoter_id;vote\n";
  for (VoterIndex i = 0; i < inst.voter_count(); ++i) {
    out += std::to_string(i + 1) + ";";
    bool first = true;
    for (const auto& id : inst.ids(inst.ballot(i))) {
      if (!first) out += ",";
      out += id;
      first = false;
    }
    out += "\n";
  }
  return out;
}

}  // namespace pb
