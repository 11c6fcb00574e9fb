#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pb/flow.hpp"
#include "pb/model.hpp"
#include "pb/satisfaction.hpp"

namespace pb {

/// voter x project matrix of money amounts.
using PaymentMatrix = std::vector<std::vector<Money>>;

inline PaymentMatrix zero_matrix(const Instance& inst) {
  return PaymentMatrix(inst.voter_count(), std::vector<Money>(inst.project_count(), Money(0)));
}

/// Strict preference between two tied projects; `prefers(a, b)` true means a wins.
class TieBreak {
 public:
  using Compare = std::function<bool(const Instance&, ProjectIndex, ProjectIndex)>;

  TieBreak(std::string name, Compare cmp) : name_(std::move(name)), cmp_(std::move(cmp)) {}

  /// Smallest project id (plain string comparison) wins.
  static TieBreak lex() {
    return {"lex", [](const Instance& inst, ProjectIndex a, ProjectIndex b) { return inst.id(a) < inst.id(b); }};
  }
  /// Largest project id wins.
  static TieBreak reverse() {
    return {"reverse", [](const Instance& inst, ProjectIndex a, ProjectIndex b) { return inst.id(a) > inst.id(b); }};
  }

  bool prefers(const Instance& inst, ProjectIndex a, ProjectIndex b) const { return cmp_(inst, a, b); }
  const std::string& name() const noexcept { return name_; }

  /// Preferred member of a non-empty candidate list.
  ProjectIndex pick(const Instance& inst, const std::vector<ProjectIndex>& candidates) const {
    ProjectIndex best = candidates.at(0);
    for (ProjectIndex p : candidates)
      if (prefers(inst, p, best)) best = p;
    return best;
  }

 private:
  std::string name_;
  Compare cmp_;
};

/// Loads l_i(p) for the projects of an outcome.
struct LoadAssignment {
  PaymentMatrix loads;
  Money max_load = 0;

  Money voter_total(VoterIndex i) const {
    Money s = 0;
    for (const auto& x : loads.at(i)) s += x;
    return s;
  }
};

struct Selection {
  std::size_t round;
  ProjectIndex project;
  /// rho for MES, t for Phragmen, the balanced max load for maximin, mu(W') for GCR.
  Rational value;
};

struct BlockingProject {
  ProjectIndex project;
  Rational value;
};

/// Execution record of a rule run.
struct RuleTrace {
  std::string rule;
  std::string sat;  // satisfaction function, when the rule uses one
  std::vector<Selection> selections;
  /// MES: remaining budgets before round 1 and after every round.
  std::vector<std::vector<Money>> voter_budgets;
  /// Phragmen/maximin: total voter loads before round 1 and after every round.
  std::vector<std::vector<Money>> voter_loads;
  PaymentMatrix payments;
  std::optional<BlockingProject> blocking;
  /// Maximin: balanced loads for W plus the blocking project.
  std::optional<LoadAssignment> blocking_loads;
  /// MES: min over unselected p of c(p) - sum of its supporters' remaining budgets.
  std::optional<Money> delta;
  bool exhaustive = false;
  bool skip_blocked = false;

  ProjectSet selected(const Instance& inst) const {
    ProjectSet w = inst.empty_set();
    for (const auto& s : selections) w.set(s.project);
    return w;
  }
};

struct RuleResult {
  ProjectSet outcome;
  RuleTrace trace;
};

// ---------------------------------------------------------------------------
// Method of Equal Shares

/// Smallest rho with sum_{i in N_p} min(b_i, rho mu(p)) = c(p), or nullopt if
/// the supporters cannot afford p at any rho.
inline std::optional<Rational> min_rho(const Instance& inst, const std::vector<Money>& budgets,
                                       const SatisfactionFunction& mu, ProjectIndex p) {
  if (budgets.size() != inst.voter_count()) throw InputError("min_rho: one budget per voter expected");
  const SatValue& value = mu.value(p);
  if (value <= 0) throw CapabilityError("min_rho needs mu(p) > 0");
  std::vector<Money> b;
  for (VoterIndex i : inst.supporters(p)) {
    if (budgets[i] < 0) throw InputError("min_rho: negative voter budget");
    b.push_back(budgets[i]);
  }
  std::sort(b.begin(), b.end());
  const Money& c = inst.cost(p);
  Money prefix = 0;
  const std::size_t k = b.size();
  for (std::size_t j = 0; j < k; ++j) {
    // The j poorest supporters pay everything; the rest pay the same amount.
    Money share = (c - prefix) / Money(k - j);
    if (share <= b[j]) return Rational(share / value);
    prefix += b[j];
  }
  return std::nullopt;
}

inline RuleResult run_mes(const Instance& inst, const SatisfactionFunction& mu,
                          const TieBreak& tie = TieBreak::lex()) {
  if (!mu.additive()) throw CapabilityError("MES requires an additive satisfaction function, got " + mu.name());
  if (mu.project_count() != inst.project_count())
    throw InputError("satisfaction function does not match the instance");

  const std::size_t n = inst.voter_count(), m = inst.project_count();
  RuleTrace trace;
  trace.rule = "mes";
  trace.sat = mu.name();
  trace.payments = zero_matrix(inst);
  std::vector<Money> budget(n, inst.budget() / Money(n));
  trace.voter_budgets.push_back(budget);
  ProjectSet w = inst.empty_set();

  for (std::size_t round = 1;; ++round) {
    std::optional<Rational> best;
    std::vector<ProjectIndex> tied;
    for (ProjectIndex p = 0; p < m; ++p) {
      if (w.test(p) || inst.supporters(p).empty()) continue;
      auto rho = min_rho(inst, budget, mu, p);
      if (!rho) continue;
      if (!best || *rho < *best) {
        best = rho;
        tied = {p};
      } else if (*rho == *best) {
        tied.push_back(p);
      }
    }
    if (!best) break;
    const ProjectIndex p = tie.pick(inst, tied);
    const Money per_voter = *best * mu.value(p);
    for (VoterIndex i : inst.supporters(p)) {
      Money pay = std::min(budget[i], per_voter);
      budget[i] -= pay;
      trace.payments[i][p] = std::move(pay);
    }
    w.set(p);
    trace.selections.push_back({round, p, *best});
    trace.voter_budgets.push_back(budget);
  }

  for (ProjectIndex p = 0; p < m; ++p) {
    if (w.test(p)) continue;
    Money gap = inst.cost(p);
    for (VoterIndex i : inst.supporters(p)) gap -= budget[i];
    if (!trace.delta || gap < *trace.delta) trace.delta = gap;
  }
  trace.exhaustive = is_exhaustive(inst, w);
  return {std::move(w), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Load balancing and the Phragmen family

/// Loads for W minimising the largest total voter load, computed exactly.
///
/// The optimum equals max over Q subset of W of c(Q)/|N(Q)|. Starting from
/// lambda = c(W)/|N(W)|, each infeasible max-flow test yields a min-cut set Q
/// whose ratio strictly exceeds lambda; the loop stops at the first feasible
/// lambda, which is then optimal.
inline LoadAssignment balance_loads(const Instance& inst, const ProjectSet& w) {
  inst.check_set(w);
  const std::size_t n = inst.voter_count();
  std::vector<ProjectIndex> members;
  for_each_member(w, [&](ProjectIndex p) {
    if (inst.supporters(p).empty())
      throw InputError("balance_loads: project '" + inst.id(p) + "' has no approvers");
    members.push_back(p);
  });
  LoadAssignment out{zero_matrix(inst), Money(0)};
  if (members.empty()) return out;

  auto ratio = [&](const std::vector<ProjectIndex>& q) {
    Money c = 0;
    VoterSet covered = inst.no_voters();
    for (ProjectIndex p : q) {
      c += inst.cost(p);
      for (VoterIndex i : inst.supporters(p)) covered.set(i);
    }
    return Rational(c / Money(covered.count()));
  };

  const Money total = total_cost(inst, w);
  const Money unbounded = total + 1;
  Rational lambda = ratio(members);
  for (;;) {
    // source 0, projects 1..k, voters k+1..k+n, sink k+n+1
    const std::size_t k = members.size(), sink = k + n + 1;
    detail::MaxFlow net(k + n + 2);
    std::vector<std::vector<std::pair<VoterIndex, std::size_t>>> arcs(k);
    for (std::size_t j = 0; j < k; ++j) {
      net.add_edge(0, 1 + j, inst.cost(members[j]));
      for (VoterIndex i : inst.supporters(members[j])) arcs[j].emplace_back(i, net.add_edge(1 + j, 1 + k + i, unbounded));
    }
    for (VoterIndex i = 0; i < n; ++i) net.add_edge(1 + k + i, sink, lambda);
    if (net.run(0, sink) == total) {
      for (std::size_t j = 0; j < k; ++j)
        for (const auto& [i, e] : arcs[j]) out.loads[i][members[j]] = net.flow(e);
      for (VoterIndex i = 0; i < n; ++i) out.max_load = std::max(out.max_load, out.voter_total(i));
      return out;
    }
    const auto side = net.reachable(0);
    std::vector<ProjectIndex> q;
    for (std::size_t j = 0; j < k; ++j)
      if (side[1 + j]) q.push_back(members[j]);
    lambda = ratio(q);
  }
}

struct PhragmenOptions {
  /// Drop a blocked argmin candidate and continue instead of stopping.
  bool skip_blocked = false;
  /// Restrict the candidate pool to projects with c(p) <= b up front.
  bool prefilter_over_budget = false;
};

namespace detail {

inline std::vector<ProjectIndex> phragmen_pool(const Instance& inst, const PhragmenOptions& opt) {
  std::vector<ProjectIndex> pool;
  for (ProjectIndex p = 0; p < inst.project_count(); ++p) {
    if (inst.supporters(p).empty()) continue;
    if (opt.prefilter_over_budget && inst.cost(p) > inst.budget()) continue;
    pool.push_back(p);
  }
  return pool;
}

}  // namespace detail

/// Sequential Phragmen. Each round every candidate's equalised supporter load
/// t = (c(p) + sum_{N_p} l_i) / |N_p| is computed; if some argmin candidate
/// does not fit the remaining budget the rule stops (or, with skip_blocked,
/// drops it), otherwise the preferred argmin is bought and its supporters'
/// loads are raised to t.
inline RuleResult run_seq_phragmen(const Instance& inst, const TieBreak& tie = TieBreak::lex(),
                                   const PhragmenOptions& opt = {}) {
  const std::size_t n = inst.voter_count();
  RuleTrace trace;
  trace.rule = "phragmen";
  trace.skip_blocked = opt.skip_blocked;
  trace.payments = zero_matrix(inst);
  std::vector<Money> load(n, Money(0));
  trace.voter_loads.push_back(load);
  ProjectSet w = inst.empty_set();
  Money spent = 0;
  std::vector<ProjectIndex> pool = detail::phragmen_pool(inst, opt);

  for (std::size_t round = 1; !pool.empty();) {
    std::optional<Rational> best;
    std::vector<ProjectIndex> tied;
    for (ProjectIndex p : pool) {
      Money t = inst.cost(p);
      for (VoterIndex i : inst.supporters(p)) t += load[i];
      t /= Money(inst.supporters(p).size());
      if (!best || t < *best) {
        best = t;
        tied = {p};
      } else if (t == *best) {
        tied.push_back(p);
      }
    }
    std::vector<ProjectIndex> blocked;
    for (ProjectIndex p : tied)
      if (spent + inst.cost(p) > inst.budget()) blocked.push_back(p);
    if (!blocked.empty()) {
      const ProjectIndex p = tie.pick(inst, blocked);
      if (!opt.skip_blocked) {
        trace.blocking = BlockingProject{p, *best};
        break;
      }
      pool.erase(std::find(pool.begin(), pool.end(), p));
      continue;
    }
    const ProjectIndex p = tie.pick(inst, tied);
    for (VoterIndex i : inst.supporters(p)) {
      trace.payments[i][p] = *best - load[i];
      load[i] = *best;
    }
    w.set(p);
    spent += inst.cost(p);
    pool.erase(std::find(pool.begin(), pool.end(), p));
    trace.selections.push_back({round++, p, *best});
    trace.voter_loads.push_back(load);
  }
  trace.exhaustive = is_exhaustive(inst, w);
  return {std::move(w), std::move(trace)};
}

/// Maximin support: each round adds the candidate whose addition admits the
/// smallest maximum voter load after optimal rebalancing.
inline RuleResult run_maximin_support(const Instance& inst, const TieBreak& tie = TieBreak::lex(),
                                      const PhragmenOptions& opt = {}) {
  const std::size_t n = inst.voter_count();
  RuleTrace trace;
  trace.rule = "maximin";
  trace.skip_blocked = opt.skip_blocked;
  trace.voter_loads.push_back(std::vector<Money>(n, Money(0)));
  ProjectSet w = inst.empty_set();
  Money spent = 0;
  std::vector<ProjectIndex> pool = detail::phragmen_pool(inst, opt);

  for (std::size_t round = 1; !pool.empty();) {
    std::optional<Rational> best;
    std::vector<std::pair<ProjectIndex, LoadAssignment>> tied;
    for (ProjectIndex p : pool) {
      ProjectSet next = w;
      next.set(p);
      LoadAssignment la = balance_loads(inst, next);
      if (!best || la.max_load < *best) {
        best = la.max_load;
        tied.clear();
        tied.emplace_back(p, std::move(la));
      } else if (la.max_load == *best) {
        tied.emplace_back(p, std::move(la));
      }
    }
    auto pick = [&](bool only_blocked) -> std::optional<std::size_t> {
      std::optional<std::size_t> pos;
      for (std::size_t k = 0; k < tied.size(); ++k) {
        if (only_blocked && spent + inst.cost(tied[k].first) <= inst.budget()) continue;
        if (!pos || tie.prefers(inst, tied[k].first, tied[*pos].first)) pos = k;
      }
      return pos;
    };
    if (auto blocked = pick(true)) {
      const ProjectIndex p = tied[*blocked].first;
      if (!opt.skip_blocked) {
        trace.blocking = BlockingProject{p, *best};
        trace.blocking_loads = std::move(tied[*blocked].second);
        break;
      }
      pool.erase(std::find(pool.begin(), pool.end(), p));
      continue;
    }
    const auto chosen = *pick(false);
    const ProjectIndex p = tied[chosen].first;
    w.set(p);
    spent += inst.cost(p);
    pool.erase(std::find(pool.begin(), pool.end(), p));
    trace.selections.push_back({round++, p, *best});
    std::vector<Money> totals(n);
    for (VoterIndex i = 0; i < n; ++i) totals[i] = tied[chosen].second.voter_total(i);
    trace.voter_loads.push_back(std::move(totals));
  }
  trace.payments = balance_loads(inst, w).loads;
  trace.exhaustive = is_exhaustive(inst, w);
  return {std::move(w), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Greedy Cohesive Rule

struct GcrOptions {
  std::size_t max_projects = 12;
  std::size_t max_voters = 12;
};

/// Greedy Cohesive Rule. Each round picks, among non-empty W' outside W for
/// which the remaining voters approving all of W' are W'-cohesive, one with
/// maximal mu(W') (ties: lexicographically smallest sorted id list), adds it
/// and removes that maximal group.
inline RuleResult run_gcr(const Instance& inst, const SatisfactionFunction& mu, const GcrOptions& opt = {}) {
  const std::size_t n = inst.voter_count(), m = inst.project_count();
  if (m > opt.max_projects || n > opt.max_voters || m > 62)
    throw GuardExceeded("GCR enumerates subsets: m=" + std::to_string(m) + ", n=" + std::to_string(n) +
                        " exceeds the guard (m <= " + std::to_string(opt.max_projects) +
                        ", n <= " + std::to_string(opt.max_voters) + ")");
  if (mu.project_count() != m) throw InputError("satisfaction function does not match the instance");

  std::vector<std::uint64_t> ballot(n, 0);
  for (VoterIndex i = 0; i < n; ++i)
    for_each_member(inst.ballot(i), [&](ProjectIndex p) { ballot[i] |= std::uint64_t{1} << p; });
  std::vector<Money> cost_of(std::size_t{1} << m, Money(0));
  for (std::uint64_t s = 1; s < cost_of.size(); ++s)
    cost_of[s] = cost_of[s & (s - 1)] + inst.cost(static_cast<ProjectIndex>(__builtin_ctzll(s)));
  auto sorted_ids = [&](std::uint64_t s) {
    std::vector<std::string> ids;
    for (; s; s &= s - 1) ids.push_back(inst.id(static_cast<ProjectIndex>(__builtin_ctzll(s))));
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  RuleTrace trace;
  trace.rule = "gcr";
  trace.sat = mu.name();
  std::uint64_t w = 0;
  std::vector<bool> active(n, true);
  const std::uint64_t full = (std::uint64_t{1} << m) - 1;
  for (std::size_t round = 1;; ++round) {
    std::optional<std::uint64_t> best;
    SatValue best_value;
    const std::uint64_t free = full & ~w;
    for (std::uint64_t s = free; s; s = (s - 1) & free) {
      std::size_t group = 0;
      for (VoterIndex i = 0; i < n; ++i)
        if (active[i] && (ballot[i] & s) == s) ++group;
      if (cost_of[s] * Money(n) > Money(group) * inst.budget()) continue;
      SatValue v = mu.evaluate_mask(s);
      if (!best || v > best_value || (v == best_value && sorted_ids(s) < sorted_ids(*best))) {
        best = s;
        best_value = std::move(v);
      }
    }
    if (!best) break;
    w |= *best;
    for (VoterIndex i = 0; i < n; ++i)
      if (active[i] && (ballot[i] & *best) == *best) active[i] = false;
    for (std::uint64_t s = *best; s; s &= s - 1)
      trace.selections.push_back({round, static_cast<ProjectIndex>(__builtin_ctzll(s)), best_value});
  }
  ProjectSet out = inst.empty_set();
  for (std::uint64_t s = w; s; s &= s - 1) out.set(static_cast<std::size_t>(__builtin_ctzll(s)));
  trace.exhaustive = is_exhaustive(inst, out);
  return {std::move(out), std::move(trace)};
}

}  // namespace pb
