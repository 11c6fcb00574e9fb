#pragma once

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pb/errors.hpp"
#include "pb/rational.hpp"

namespace pb {

using ProjectIndex = std::size_t;
using VoterIndex = std::size_t;

/// Set of projects over an instance's dense project indices.
using ProjectSet = boost::dynamic_bitset<>;
/// Set of voters over dense voter indices (0-based; reported as 1..n).
using VoterSet = boost::dynamic_bitset<>;

struct Project {
  std::string id;
  Money cost;

  friend bool operator==(const Project&, const Project&) = default;
};

/// An approval-based budgeting instance: voters, projects with exact costs,
/// approval ballots and a budget limit. Immutable once constructed.
class Instance {
 public:
  Instance(std::vector<Project> projects, std::vector<ProjectSet> ballots, Money budget)
      : projects_(std::move(projects)), ballots_(std::move(ballots)), budget_(std::move(budget)) {
    if (projects_.empty()) throw InputError("instance needs at least one project");
    if (ballots_.empty()) throw InputError("instance needs at least one voter");
    if (budget_ <= 0) throw InputError("budget must be positive, got " + to_string(budget_));
    for (ProjectIndex p = 0; p < projects_.size(); ++p) {
      const auto& pr = projects_[p];
      if (pr.cost <= 0)
        throw InputError("cost of project '" + pr.id + "' must be positive, got " + to_string(pr.cost));
      if (!index_.emplace(pr.id, p).second) throw InputError("duplicate project id '" + pr.id + "'");
    }
    approvers_.resize(projects_.size());
    for (VoterIndex i = 0; i < ballots_.size(); ++i) {
      if (ballots_[i].size() != projects_.size())
        throw InputError("ballot of voter " + std::to_string(i + 1) + " does not match the project list");
      for (auto p = ballots_[i].find_first(); p != ProjectSet::npos; p = ballots_[i].find_next(p))
        approvers_[p].push_back(i);
    }
  }

  /// Builds an instance from ballots given as lists of project ids.
  static Instance from_ids(std::vector<Project> projects, const std::vector<std::vector<std::string>>& approvals,
                           Money budget) {
    std::unordered_map<std::string, ProjectIndex> index;
    for (ProjectIndex p = 0; p < projects.size(); ++p) index.emplace(projects[p].id, p);
    std::vector<ProjectSet> ballots;
    ballots.reserve(approvals.size());
    for (std::size_t i = 0; i < approvals.size(); ++i) {
      ProjectSet ballot(projects.size());
      for (const auto& id : approvals[i]) {
        auto it = index.find(id);
        if (it == index.end())
          throw InputError("voter " + std::to_string(i + 1) + " approves unknown project '" + id + "'");
        ballot.set(it->second);
      }
      ballots.push_back(std::move(ballot));
    }
    return Instance(std::move(projects), std::move(ballots), std::move(budget));
  }

  std::size_t voter_count() const noexcept { return ballots_.size(); }
  std::size_t project_count() const noexcept { return projects_.size(); }
  const Money& budget() const noexcept { return budget_; }

  const std::vector<Project>& projects() const noexcept { return projects_; }
  const Project& project(ProjectIndex p) const { return projects_.at(p); }
  const Money& cost(ProjectIndex p) const { return projects_.at(p).cost; }
  const std::string& id(ProjectIndex p) const { return projects_.at(p).id; }

  const ProjectSet& ballot(VoterIndex i) const { return ballots_.at(i); }
  const std::vector<ProjectSet>& ballots() const noexcept { return ballots_; }
  bool approves(VoterIndex i, ProjectIndex p) const { return ballots_.at(i).test(p); }

  /// Approvers N_p, sorted ascending.
  const std::vector<VoterIndex>& supporters(ProjectIndex p) const { return approvers_.at(p); }

  std::optional<ProjectIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  ProjectIndex index(std::string_view id) const {
    if (auto p = find(id)) return *p;
    throw InputError("unknown project id '" + std::string(id) + "'");
  }

  ProjectSet empty_set() const { return ProjectSet(projects_.size()); }
  ProjectSet all_projects() const { return ~empty_set(); }
  VoterSet no_voters() const { return VoterSet(ballots_.size()); }

  ProjectSet set_of(std::span<const std::string> ids) const {
    ProjectSet s = empty_set();
    for (const auto& id : ids) s.set(index(id));
    return s;
  }
  ProjectSet set_of(std::initializer_list<std::string_view> ids) const {
    ProjectSet s = empty_set();
    for (auto id : ids) s.set(index(id));
    return s;
  }

  /// Ids of the members of `s`, in project order.
  std::vector<std::string> ids(const ProjectSet& s) const {
    check_set(s);
    std::vector<std::string> out;
    for (auto p = s.find_first(); p != ProjectSet::npos; p = s.find_next(p)) out.push_back(projects_[p].id);
    return out;
  }

  void check_set(const ProjectSet& s) const {
    if (s.size() != projects_.size())
      throw InputError("project set of size " + std::to_string(s.size()) + " does not belong to an instance with " +
                       std::to_string(projects_.size()) + " projects");
  }

  void check_voter(VoterIndex i) const {
    if (i >= ballots_.size()) throw InputError("unknown voter " + std::to_string(i + 1));
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.budget_ == b.budget_ && a.projects_ == b.projects_ && a.ballots_ == b.ballots_;
  }

 private:
  std::vector<Project> projects_;
  std::vector<ProjectSet> ballots_;
  Money budget_;
  std::unordered_map<std::string, ProjectIndex> index_;
  std::vector<std::vector<VoterIndex>> approvers_;
};

/// Iterates the members of a dynamic bitset.
template <typename Fn>
void for_each_member(const boost::dynamic_bitset<>& s, Fn&& fn) {
  for (auto k = s.find_first(); k != boost::dynamic_bitset<>::npos; k = s.find_next(k)) fn(static_cast<std::size_t>(k));
}

inline Money total_cost(const Instance& inst, const ProjectSet& s) {
  inst.check_set(s);
  Money sum = 0;
  for_each_member(s, [&](ProjectIndex p) { sum += inst.cost(p); });
  return sum;
}

inline bool is_outcome(const Instance& inst, const ProjectSet& s) { return total_cost(inst, s) <= inst.budget(); }

/// True iff `s` is an outcome and no further project fits in the remaining budget.
inline bool is_exhaustive(const Instance& inst, const ProjectSet& s) {
  const Money spent = total_cost(inst, s);
  if (spent > inst.budget()) throw InputError("is_exhaustive: set exceeds the budget");
  const Money left = inst.budget() - spent;
  for (ProjectIndex p = 0; p < inst.project_count(); ++p)
    if (!s.test(p) && inst.cost(p) <= left) return false;
  return true;
}

inline VoterSet approvers(const Instance& inst, ProjectIndex p) {
  if (p >= inst.project_count()) throw InputError("unknown project index " + std::to_string(p));
  VoterSet out = inst.no_voters();
  for (VoterIndex i : inst.supporters(p)) out.set(i);
  return out;
}

inline VoterSet approvers(const Instance& inst, std::string_view id) { return approvers(inst, inst.index(id)); }

inline bool is_unit_cost(const Instance& inst) {
  return std::all_of(inst.projects().begin(), inst.projects().end(), [](const Project& p) { return p.cost == 1; });
}

}  // namespace pb
