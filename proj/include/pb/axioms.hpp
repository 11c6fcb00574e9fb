#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pb/model.hpp"
#include "pb/satisfaction.hpp"

namespace pb {

enum class Axiom { ejr, ejr1, ejr1_plus, ejrx, pjr, pjr1, pjrx, local_bpjr };

inline constexpr Axiom all_axioms[] = {Axiom::ejr,  Axiom::ejr1, Axiom::ejr1_plus, Axiom::ejrx,
                                       Axiom::pjr,  Axiom::pjr1, Axiom::pjrx,      Axiom::local_bpjr};

inline const char* to_string(Axiom a) {
  switch (a) {
    case Axiom::ejr: return "ejr";
    case Axiom::ejr1: return "ejr1";
    case Axiom::ejr1_plus: return "ejr1plus";
    case Axiom::ejrx: return "ejrx";
    case Axiom::pjr: return "pjr";
    case Axiom::pjr1: return "pjr1";
    case Axiom::pjrx: return "pjrx";
    case Axiom::local_bpjr: return "localbpjr";
  }
  return "?";
}

inline std::optional<Axiom> axiom_from_string(std::string_view s) {
  for (Axiom a : all_axioms)
    if (s == to_string(a)) return a;
  return std::nullopt;
}

struct CohesiveWitness {
  ProjectSet T;
  VoterSet group;
};

/// A failed axiom: the cohesive pair, the project or superset involved, and
/// the comparison `lhs relation rhs` that holds and breaks the axiom.
///
///   ejr        max_{i in group} mu_i(W)                          <  mu(T)
///   ejr1       max_{i in group, p notin W} mu_i(W + p)           <= mu(T)
///   ejr1plus   max_{i in group, p in T\W} mu_i(W + p)            <= mu(T)
///   ejrx       max_{i in group} min_{p in T\W} mu_i(W + p)       <= mu(T)   (project: argmin for the argmax voter)
///   pjr        mu(W cap U)                                       <  mu(T)   (U = union of the group's ballots)
///   pjr1       max_{p in I\W} mu((W cap U) + p)                  <= mu(T)   (I = intersection of the group's ballots)
///   pjrx       mu((W cap U) + p)                                 <= mu(T)   (project: p)
///   localbpjr  mu(W*)                                            == max{mu(W') : W' in I, c(W') <= c(T)}
struct Violation {
  Axiom axiom;
  CohesiveWitness witness;
  std::optional<ProjectIndex> project;
  std::optional<ProjectSet> superset;
  SatValue lhs, rhs;
  std::string relation;
};

inline bool is_cohesive(const Instance& inst, const ProjectSet& t, const VoterSet& group) {
  inst.check_set(t);
  if (group.size() != inst.voter_count()) throw InputError("voter set does not match the instance");
  if (total_cost(inst, t) * Money(inst.voter_count()) > Money(group.count()) * inst.budget()) return false;
  bool ok = true;
  for_each_member(group, [&](VoterIndex i) { ok = ok && t.is_subset_of(inst.ballot(i)); });
  return ok;
}

struct AxiomOptions {
  std::size_t max_projects = 14;
  std::size_t max_voters = 14;
  /// Worker threads for the candidate scan; the reported violation does not depend on it.
  unsigned jobs = 1;
};

namespace detail {

using Mask = std::uint64_t;

inline int low_bit(Mask s) { return __builtin_ctzll(s); }

inline ProjectSet to_project_set(const Instance& inst, Mask s) {
  ProjectSet out = inst.empty_set();
  for (; s; s &= s - 1) out.set(static_cast<std::size_t>(low_bit(s)));
  return out;
}

inline VoterSet to_voter_set(const Instance& inst, const std::vector<VoterIndex>& vs) {
  VoterSet out = inst.no_voters();
  for (VoterIndex i : vs) out.set(i);
  return out;
}

// Precomputed bitmask view of (instance, mu, W) shared by all checkers.
class AuditContext {
 public:
  AuditContext(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w, const AxiomOptions& opt,
               Axiom axiom)
      : inst_(inst), mu_(mu), opt_(opt) {
    const std::size_t m = inst.project_count(), n = inst.voter_count();
    if (m > opt.max_projects || n > opt.max_voters || m > 62)
      throw GuardExceeded(std::string(to_string(axiom)) + " enumerates project subsets and voter groups: m=" +
                          std::to_string(m) + ", n=" + std::to_string(n) + " exceeds the guard (m <= " +
                          std::to_string(opt.max_projects) + ", n <= " + std::to_string(opt.max_voters) + ")");
    inst.check_set(w);
    if (mu.project_count() != m) throw InputError("satisfaction function does not match the instance");
    if (!is_outcome(inst, w)) throw InputError("W exceeds the budget");
    for (VoterIndex i = 0; i < n; ++i) {
      Mask a = 0;
      for_each_member(inst.ballot(i), [&](ProjectIndex p) { a |= Mask{1} << p; });
      ballot.push_back(a);
    }
    for_each_member(w, [&](ProjectIndex p) { W |= Mask{1} << p; });
    full = m == 64 ? ~Mask{0} : (Mask{1} << m) - 1;
    cost.assign(std::size_t{1} << m, Money(0));
    for (Mask s = 1; s < cost.size(); ++s) cost[s] = cost[s & (s - 1)] + inst.cost(static_cast<ProjectIndex>(low_bit(s)));
    // Only sets inside some ballot can have a cohesive group.
    for (Mask t = 1; t <= full; ++t)
      if (cost[t] <= inst.budget() && std::any_of(ballot.begin(), ballot.end(), [t](Mask a) { return (a & t) == t; }))
        candidates.push_back(t);
  }

  SatValue value(Mask s) const { return mu_.evaluate_mask(s); }
  std::size_t n() const { return inst_.voter_count(); }

  // Voters approving all of T.
  std::vector<VoterIndex> supporters(Mask t) const {
    std::vector<VoterIndex> out;
    for (VoterIndex i = 0; i < ballot.size(); ++i)
      if ((ballot[i] & t) == t) out.push_back(i);
    return out;
  }

  // Minimal size of a T-cohesive group: ceil(n c(T) / b).
  std::size_t min_group(Mask t) const {
    return static_cast<std::size_t>(ceil(Rational(Money(n()) * cost[t] / inst_.budget())).get_ui());
  }

  // Scans candidate sets T in increasing mask order and returns the first
  // violation; with several jobs, workers take interleaved candidates and the
  // lowest T still wins.
  std::optional<Violation> scan(const std::function<std::optional<Violation>(Mask)>& check) const {
    const unsigned jobs = std::max(1u, opt_.jobs);
    if (jobs == 1 || candidates.size() < 2 * jobs) {
      for (Mask t : candidates)
        if (auto v = check(t)) return v;
      return std::nullopt;
    }
    std::atomic<std::size_t> first{candidates.size()};
    std::vector<std::optional<Violation>> found(jobs);
    std::vector<std::size_t> at(jobs, candidates.size());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < candidates.size() && k < first.load(); k += jobs)
          if (auto v = check(candidates[k])) {
            found[w] = std::move(v);
            at[w] = k;
            std::size_t cur = first.load();
            while (k < cur && !first.compare_exchange_weak(cur, k)) {}
            return;
          }
      });
    for (auto& th : pool) th.join();
    std::optional<std::size_t> best;
    for (unsigned w = 0; w < jobs; ++w)
      if (found[w] && (!best || at[w] < at[*best])) best = w;
    return best ? std::move(found[*best]) : std::nullopt;
  }

  Violation make(Axiom a, Mask t, const std::vector<VoterIndex>& group, SatValue lhs, SatValue rhs,
                 const char* relation) const {
    return {a, {to_project_set(inst_, t), to_voter_set(inst_, group)}, std::nullopt, std::nullopt, std::move(lhs),
            std::move(rhs), relation};
  }

  const Instance& inst_;
  const SatisfactionFunction& mu_;
  const AxiomOptions& opt_;
  std::vector<Mask> ballot;
  Mask W = 0, full = 0;
  std::vector<Money> cost;
  std::vector<Mask> candidates;  // non-empty T with c(T) <= b, ascending
};

// Visits every size-k subset of `pool` (lexicographic order of positions);
// stops early when `fn` returns true.
template <typename Fn>
bool for_each_combination(const std::vector<VoterIndex>& pool, std::size_t k, Fn&& fn) {
  if (k > pool.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = j;
  std::vector<VoterIndex> group(k);
  for (;;) {
    for (std::size_t j = 0; j < k; ++j) group[j] = pool[idx[j]];
    if (fn(group)) return true;
    std::size_t j = k;
    while (j > 0 && idx[j - 1] == pool.size() - k + j - 1) --j;
    if (j == 0) return false;
    ++idx[j - 1];
    for (std::size_t l = j; l < k; ++l) idx[l] = idx[l - 1] + 1;
  }
}

// EJR family: for i approving T, mu_i(T) = mu(T), so violating groups are the
// cohesive subsets of the voters who individually fail; it suffices to test
// whether that set is large enough.
template <typename Fails>
std::optional<Violation> ejr_family(const AuditContext& ctx, Axiom axiom, bool skip_covered, Fails&& fails) {
  return ctx.scan([&](Mask t) -> std::optional<Violation> {
    if (skip_covered && (t & ~ctx.W) == 0) return std::nullopt;
    auto nt = ctx.supporters(t);
    const std::size_t k = ctx.min_group(t);
    if (nt.size() < k) return std::nullopt;
    const SatValue mt = ctx.value(t);
    std::vector<VoterIndex> group;
    std::optional<SatValue> lhs;
    std::optional<ProjectIndex> project;
    for (VoterIndex i : nt) {
      std::optional<ProjectIndex> p;
      if (auto v = fails(i, t, mt, p)) {
        group.push_back(i);
        if (!lhs || *v > *lhs) {
          lhs = std::move(*v);
          project = p;
        }
      }
    }
    if (group.size() < k) return std::nullopt;
    Violation out = ctx.make(axiom, t, group, *lhs, mt, axiom == Axiom::ejr ? "<" : "<=");
    out.project = project;
    return out;
  });
}

}  // namespace detail

inline std::optional<Violation> check_ejr(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                          const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::ejr);
  return detail::ejr_family(ctx, Axiom::ejr, false,
                            [&](VoterIndex i, detail::Mask, const SatValue& mt, std::optional<ProjectIndex>&)
                                -> std::optional<SatValue> {
                              SatValue v = ctx.value(ctx.ballot[i] & ctx.W);
                              if (v < mt) return v;
                              return std::nullopt;
                            });
}

inline std::optional<Violation> check_ejr1(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                           const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::ejr1);
  // Best satisfaction each voter reaches by adding one project outside W.
  std::vector<std::pair<SatValue, ProjectIndex>> best(ctx.n());
  for (VoterIndex i = 0; i < ctx.n(); ++i) {
    bool first = true;
    for (detail::Mask rest = ctx.full & ~ctx.W; rest; rest &= rest - 1) {
      const auto p = static_cast<ProjectIndex>(detail::low_bit(rest));
      SatValue v = ctx.value(ctx.ballot[i] & (ctx.W | (detail::Mask{1} << p)));
      if (first || v > best[i].first) best[i] = {std::move(v), p};
      first = false;
    }
  }
  return detail::ejr_family(ctx, Axiom::ejr1, true,
                            [&](VoterIndex i, detail::Mask, const SatValue& mt, std::optional<ProjectIndex>& p)
                                -> std::optional<SatValue> {
                              if (best[i].first > mt) return std::nullopt;
                              p = best[i].second;
                              return best[i].first;
                            });
}

inline std::optional<Violation> check_ejr1_plus(const Instance& inst, const SatisfactionFunction& mu,
                                                const ProjectSet& w, const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::ejr1_plus);
  return detail::ejr_family(ctx, Axiom::ejr1_plus, true,
                            [&](VoterIndex i, detail::Mask t, const SatValue& mt, std::optional<ProjectIndex>& p)
                                -> std::optional<SatValue> {
                              std::optional<SatValue> top;
                              for (detail::Mask rest = t & ~ctx.W; rest; rest &= rest - 1) {
                                const auto q = static_cast<ProjectIndex>(detail::low_bit(rest));
                                SatValue v = ctx.value(ctx.ballot[i] & (ctx.W | (detail::Mask{1} << q)));
                                if (v > mt) return std::nullopt;
                                if (!top || v > *top) {
                                  top = std::move(v);
                                  p = q;
                                }
                              }
                              return top;
                            });
}

inline std::optional<Violation> check_ejrx(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                           const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::ejrx);
  return detail::ejr_family(ctx, Axiom::ejrx, true,
                            [&](VoterIndex i, detail::Mask t, const SatValue& mt, std::optional<ProjectIndex>& p)
                                -> std::optional<SatValue> {
                              std::optional<SatValue> low;
                              for (detail::Mask rest = t & ~ctx.W; rest; rest &= rest - 1) {
                                const auto q = static_cast<ProjectIndex>(detail::low_bit(rest));
                                SatValue v = ctx.value(ctx.ballot[i] & (ctx.W | (detail::Mask{1} << q)));
                                if (!low || v < *low) {
                                  low = std::move(v);
                                  p = q;
                                }
                              }
                              if (low && *low <= mt) return low;
                              return std::nullopt;
                            });
}

namespace detail {

inline Mask union_of(const AuditContext& ctx, const std::vector<VoterIndex>& group) {
  Mask u = 0;
  for (VoterIndex i : group) u |= ctx.ballot[i];
  return u;
}

inline Mask intersection_of(const AuditContext& ctx, const std::vector<VoterIndex>& group) {
  Mask s = ctx.full;
  for (VoterIndex i : group) s &= ctx.ballot[i];
  return s;
}

// Visits every T-cohesive subgroup of N_T (all sizes >= the minimum).
template <typename Fn>
std::optional<Violation> for_each_cohesive_group(const AuditContext& ctx, Mask t, Fn&& fn) {
  const auto nt = ctx.supporters(t);
  const std::size_t k = ctx.min_group(t);
  std::optional<Violation> out;
  for (std::size_t size = k; size <= nt.size() && !out; ++size)
    for_each_combination(nt, size, [&](const std::vector<VoterIndex>& group) {
      out = fn(group);
      return out.has_value();
    });
  return out;
}

}  // namespace detail

/// For fixed T a larger group only enlarges the covered part of W, so only
/// groups of the minimal cohesive size need checking.
inline std::optional<Violation> check_pjr(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                          const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::pjr);
  return ctx.scan([&](detail::Mask t) -> std::optional<Violation> {
    const SatValue mt = ctx.value(t);
    std::optional<Violation> out;
    detail::for_each_combination(ctx.supporters(t), ctx.min_group(t), [&](const std::vector<VoterIndex>& g) {
      SatValue v = ctx.value(ctx.W & detail::union_of(ctx, g));
      if (v < mt) out = ctx.make(Axiom::pjr, t, g, v, mt, "<");
      return out.has_value();
    });
    return out;
  });
}

inline std::optional<Violation> check_pjrx(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                           const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::pjrx);
  return ctx.scan([&](detail::Mask t) -> std::optional<Violation> {
    if ((t & ~ctx.W) == 0) return std::nullopt;
    const SatValue mt = ctx.value(t);
    std::optional<Violation> out;
    detail::for_each_combination(ctx.supporters(t), ctx.min_group(t), [&](const std::vector<VoterIndex>& g) {
      const detail::Mask covered = ctx.W & detail::union_of(ctx, g);
      for (detail::Mask rest = t & ~ctx.W; rest; rest &= rest - 1) {
        const auto p = static_cast<ProjectIndex>(detail::low_bit(rest));
        SatValue v = ctx.value(covered | (detail::Mask{1} << p));
        if (v <= mt) {
          out = ctx.make(Axiom::pjrx, t, g, v, mt, "<=");
          out->project = p;
          return true;
        }
      }
      return false;
    });
    return out;
  });
}

/// The rescuing project comes from the group's ballot intersection, so group
/// size is not monotone here and every cohesive subgroup is tested.
inline std::optional<Violation> check_pjr1(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                           const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::pjr1);
  return ctx.scan([&](detail::Mask t) -> std::optional<Violation> {
    if ((t & ~ctx.W) == 0) return std::nullopt;
    const SatValue mt = ctx.value(t);
    return detail::for_each_cohesive_group(ctx, t, [&](const std::vector<VoterIndex>& g) -> std::optional<Violation> {
      const detail::Mask covered = ctx.W & detail::union_of(ctx, g);
      std::optional<SatValue> top;
      std::optional<ProjectIndex> arg;
      for (detail::Mask rest = detail::intersection_of(ctx, g) & ~ctx.W; rest; rest &= rest - 1) {
        const auto p = static_cast<ProjectIndex>(detail::low_bit(rest));
        SatValue v = ctx.value(covered | (detail::Mask{1} << p));
        if (v > mt) return std::nullopt;
        if (!top || v > *top) {
          top = std::move(v);
          arg = p;
        }
      }
      Violation out = ctx.make(Axiom::pjr1, t, g, *top, mt, "<=");
      out.project = arg;
      return out;
    });
  });
}

/// A violation is a T-cohesive group N' and a set W* strictly containing the
/// covered part W cap U of the outcome, inside the group's ballot
/// intersection I, with c(W*) <= c(T) and mu(W*) maximal among such subsets of I.
inline std::optional<Violation> check_local_bpjr(const Instance& inst, const SatisfactionFunction& mu,
                                                 const ProjectSet& w, const AxiomOptions& opt = {}) {
  detail::AuditContext ctx(inst, mu, w, opt, Axiom::local_bpjr);
  return ctx.scan([&](detail::Mask t) -> std::optional<Violation> {
    const Money& cap = ctx.cost[t];
    std::map<std::pair<detail::Mask, detail::Mask>, std::optional<std::pair<detail::Mask, SatValue>>> memo;
    return detail::for_each_cohesive_group(ctx, t, [&](const std::vector<VoterIndex>& g) -> std::optional<Violation> {
      const detail::Mask covered = ctx.W & detail::union_of(ctx, g);
      const detail::Mask inter = detail::intersection_of(ctx, g);
      if ((covered & ~inter) != 0) return std::nullopt;
      auto [it, fresh] = memo.try_emplace({inter, covered});
      if (fresh) {
        std::optional<SatValue> best;
        bool has_hit = false;
        detail::Mask hit = 0;  // first strict superset of `covered` reaching `best`
        for (detail::Mask s = inter;; s = (s - 1) & inter) {
          if (ctx.cost[s] <= cap) {
            SatValue v = ctx.value(s);
            const bool sup = (s & covered) == covered && s != covered;
            if (!best || v > *best) {
              best = v;
              has_hit = false;
            }
            if (v == *best && sup && (!has_hit || s < hit)) {
              hit = s;
              has_hit = true;
            }
          }
          if (s == 0) break;
        }
        if (has_hit) it->second = std::make_pair(hit, *best);
      }
      if (!it->second) return std::nullopt;
      Violation out = ctx.make(Axiom::local_bpjr, t, g, ctx.value(it->second->first), it->second->second, "==");
      out.superset = detail::to_project_set(inst, it->second->first);
      return out;
    });
  });
}

inline std::optional<Violation> check_axiom(Axiom a, const Instance& inst, const SatisfactionFunction& mu,
                                            const ProjectSet& w, const AxiomOptions& opt = {}) {
  switch (a) {
    case Axiom::ejr: return check_ejr(inst, mu, w, opt);
    case Axiom::ejr1: return check_ejr1(inst, mu, w, opt);
    case Axiom::ejr1_plus: return check_ejr1_plus(inst, mu, w, opt);
    case Axiom::ejrx: return check_ejrx(inst, mu, w, opt);
    case Axiom::pjr: return check_pjr(inst, mu, w, opt);
    case Axiom::pjr1: return check_pjr1(inst, mu, w, opt);
    case Axiom::pjrx: return check_pjrx(inst, mu, w, opt);
    case Axiom::local_bpjr: return check_local_bpjr(inst, mu, w, opt);
  }
  return std::nullopt;
}

struct AxiomResult {
  Axiom axiom;
  bool checked = false;  // false when the guard stopped the checker
  std::optional<Violation> violation;
  std::string guard_message;
};

struct Implication {
  Axiom premise, conclusion;
  bool needs_strictly_increasing;
};

/// Implications between the axioms for a fixed satisfaction function.
inline const std::vector<Implication>& implication_lattice() {
  static const std::vector<Implication> lattice{
      {Axiom::ejr, Axiom::ejrx, true},        {Axiom::ejrx, Axiom::ejr1_plus, false},
      {Axiom::ejr1_plus, Axiom::ejr1, false}, {Axiom::ejr, Axiom::pjr, false},
      {Axiom::ejrx, Axiom::pjrx, false},      {Axiom::pjr, Axiom::pjrx, true},
      {Axiom::pjrx, Axiom::pjr1, false},      {Axiom::pjrx, Axiom::local_bpjr, false},
  };
  return lattice;
}

struct AuditReport {
  std::vector<AxiomResult> results;
  /// Implications that the results contradict, as "premise=>conclusion".
  std::vector<std::string> lattice_failures;
  bool any_violation() const {
    return std::any_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.violation.has_value(); });
  }
  bool any_guard() const {
    return std::any_of(results.begin(), results.end(), [](const AxiomResult& r) { return !r.checked; });
  }
  const AxiomResult* find(Axiom a) const {
    for (const auto& r : results)
      if (r.axiom == a) return &r;
    return nullptr;
  }
};

inline AuditReport audit_all(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                             const AxiomOptions& opt = {}, const std::vector<Axiom>& axioms = {std::begin(all_axioms),
                                                                                              std::end(all_axioms)}) {
  AuditReport rep;
  for (Axiom a : axioms) {
    AxiomResult r;
    r.axiom = a;
    try {
      r.violation = check_axiom(a, inst, mu, w, opt);
      r.checked = true;
    } catch (const GuardExceeded& e) {
      r.guard_message = e.what();
    }
    rep.results.push_back(std::move(r));
  }
  for (const auto& imp : implication_lattice()) {
    if (imp.needs_strictly_increasing && !mu.strictly_increasing()) continue;
    const auto* pre = rep.find(imp.premise);
    const auto* con = rep.find(imp.conclusion);
    if (pre && con && pre->checked && con->checked && !pre->violation && con->violation)
      rep.lattice_failures.push_back(std::string(to_string(imp.premise)) + "=>" + to_string(imp.conclusion));
  }
  return rep;
}

}  // namespace pb
