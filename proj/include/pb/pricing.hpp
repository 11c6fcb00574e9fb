#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pb/lp.hpp"
#include "pb/rules.hpp"

namespace pb {

/// Raised when a trace carries no blocking project to build prices from.
class ExtractionUnavailable : public Error {
 public:
  using Error::Error;
};

/// Total virtual budget B (each voter gets B/n) and payments d_i(p).
struct PriceSystem {
  Money B;
  PaymentMatrix d;
};

struct ConditionVerdict {
  bool pass = true;
  std::optional<VoterIndex> voter;
  std::optional<ProjectIndex> project;
  std::optional<ProjectIndex> other;  // C6: the chosen project p_k
  Rational lhs, rhs;                  // the failed comparison, lhs <= rhs (or == for C4) expected
};

struct PriceReport {
  std::array<ConditionVerdict, 6> conditions;  // C1..C6
  bool c6_checked = false;
  bool b_strict = false;  // B > b

  const ConditionVerdict& condition(int k) const { return conditions.at(static_cast<std::size_t>(k - 1)); }
  bool c1_to_c5() const {
    for (int k = 1; k <= 5; ++k)
      if (!condition(k).pass) return false;
    return true;
  }
  bool passes(bool require_c6, bool require_b_strict) const {
    return c1_to_c5() && (!require_c6 || (c6_checked && condition(6).pass)) && (!require_b_strict || b_strict);
  }
};

namespace detail {

inline void check_price_system(const Instance& inst, const PriceSystem& ps) {
  if (ps.d.size() != inst.voter_count()) throw InputError("price system must have one payment row per voter");
  for (const auto& row : ps.d) {
    if (row.size() != inst.project_count()) throw InputError("payment row does not match the project list");
    for (const auto& x : row)
      if (x < 0) throw InputError("payments must be non-negative");
  }
  if (ps.B <= 0) throw InputError("B must be positive");
}

inline Money paid(const PriceSystem& ps, VoterIndex i) {
  Money s = 0;
  for (const auto& x : ps.d[i]) s += x;
  return s;
}

}  // namespace detail

/// Evaluates C1-C5 (and C6 when asked) exactly; every failure carries the
/// first witness in voter/project index order.
inline PriceReport verify_price_system(const Instance& inst, const ProjectSet& w, const PriceSystem& ps,
                                       bool require_c6) {
  inst.check_set(w);
  detail::check_price_system(inst, ps);
  const std::size_t n = inst.voter_count(), m = inst.project_count();
  PriceReport rep;
  rep.c6_checked = require_c6;
  rep.b_strict = ps.B > inst.budget();
  auto fail = [](ConditionVerdict& v, std::optional<VoterIndex> i, std::optional<ProjectIndex> p, Rational lhs,
                 Rational rhs, std::optional<ProjectIndex> other = std::nullopt) {
    if (!v.pass) return;
    v = {false, i, p, other, std::move(lhs), std::move(rhs)};
  };
  const Money share = ps.B / Money(n);
  std::vector<Money> leftover(n);
  for (VoterIndex i = 0; i < n; ++i) {
    for (ProjectIndex p = 0; p < m; ++p) {
      if (ps.d[i][p] == 0) continue;
      if (!inst.approves(i, p)) fail(rep.conditions[0], i, p, ps.d[i][p], 0);
      if (!w.test(p)) fail(rep.conditions[1], i, p, ps.d[i][p], 0);
    }
    const Money spent = detail::paid(ps, i);
    if (spent > share) fail(rep.conditions[2], i, std::nullopt, spent, share);
    leftover[i] = share - spent;
  }
  for (ProjectIndex p = 0; p < m; ++p) {
    if (w.test(p)) {
      Money sum = 0;
      for (VoterIndex i = 0; i < n; ++i) sum += ps.d[i][p];
      if (sum != inst.cost(p)) fail(rep.conditions[3], std::nullopt, p, sum, inst.cost(p));
    } else {
      Money sum = 0;
      for (VoterIndex i : inst.supporters(p)) sum += leftover[i];
      if (sum > inst.cost(p)) fail(rep.conditions[4], std::nullopt, p, sum, inst.cost(p));
    }
  }
  if (require_c6)
    for (ProjectIndex j = 0; j < m; ++j) {
      if (w.test(j)) continue;
      for (ProjectIndex k = 0; k < m; ++k) {
        if (!w.test(k)) continue;
        Money sum = 0;
        for (VoterIndex i : inst.supporters(j)) sum += ps.d[i][k];
        if (sum > inst.cost(j)) fail(rep.conditions[5], std::nullopt, j, sum, inst.cost(j), k);
      }
    }
  return rep;
}

/// Price system from an MES run: the trace's payments with every voter's
/// share raised by delta/(2n), so B = b + delta/2 > b and C5 keeps slack.
inline PriceSystem extract_from_mes_trace(const Instance& inst, const RuleTrace& trace) {
  if (trace.rule != "mes") throw PreconditionError("not an MES trace (rule '" + trace.rule + "')");
  if (trace.payments.size() != inst.voter_count()) throw InputError("trace does not match the instance");
  // With every project bought any positive delta works; b keeps B = 3b/2.
  const Money delta = trace.delta ? *trace.delta : inst.budget();
  if (delta <= 0)
    throw PreconditionError("MES trace ended while a project was still affordable (delta = " + to_string(delta) + ")");
  return {inst.budget() + delta / 2, trace.payments};
}

/// Price system from a sequential Phragmen run that stopped at a blocking
/// project p': loads after hypothetically buying p', B = n max l_i, and the
/// payments are the per-round load increments.
inline PriceSystem extract_from_phragmen_trace(const Instance& inst, const RuleTrace& trace) {
  if (trace.rule != "phragmen") throw PreconditionError("not a Phragmen trace (rule '" + trace.rule + "')");
  if (!trace.blocking)
    throw ExtractionUnavailable("the run ended without a blocking project; no price system can be extracted");
  if (trace.voter_loads.empty()) throw InputError("trace has no load history");
  std::vector<Money> loads = trace.voter_loads.back();
  if (loads.size() != inst.voter_count() || trace.payments.size() != inst.voter_count())
    throw InputError("trace does not match the instance");
  for (VoterIndex i : inst.supporters(trace.blocking->project)) loads[i] = trace.blocking->value;
  Money top = 0;
  for (const auto& l : loads) top = std::max(top, l);
  return {Money(inst.voter_count()) * top, trace.payments};
}

struct PriceSearchOptions {
  bool require_c6 = false;
  bool require_b_strict = true;
  /// Upper bound on n * m payment variables.
  std::size_t max_payment_vars = 64;
  /// Search payments for this B only.
  std::optional<Money> fixed_B;
};

/// Exact search for a price system for W. Solves the linear system C1-C5
/// (+C6) in (B/n, d) and maximises the slack t of B >= b + t (or B >= t
/// when B > b is not required), capped at 1; succeeds iff t > 0.
inline std::optional<PriceSystem> find_price_system(const Instance& inst, const ProjectSet& w,
                                                    const PriceSearchOptions& opt = {}) {
  inst.check_set(w);
  const std::size_t n = inst.voter_count(), m = inst.project_count();
  if (n * m > opt.max_payment_vars)
    throw GuardExceeded("price search over n*m = " + std::to_string(n * m) + " payment variables (limit " +
                        std::to_string(opt.max_payment_vars) + ")");
  if (!is_outcome(inst, w)) return std::nullopt;

  // d_{i,p} only for p in W and i in N_p (C1, C2 hold by construction).
  std::vector<std::vector<std::optional<std::size_t>>> var(n, std::vector<std::optional<std::size_t>>(m));
  std::size_t count = 0;
  for_each_member(w, [&](ProjectIndex p) {
    for (VoterIndex i : inst.supporters(p)) var[i][p] = count++;
  });
  const std::size_t beta = count++, slack = count++;
  detail::ExactLp lp(count);
  using detail::Sense;

  for (VoterIndex i = 0; i < n; ++i) {  // C3
    detail::ExactLp::Terms row{{beta, Rational(-1)}};
    for (ProjectIndex p = 0; p < m; ++p)
      if (var[i][p]) row.emplace_back(*var[i][p], Rational(1));
    lp.add(row, Sense::le, 0);
  }
  for (ProjectIndex p = 0; p < m; ++p) {
    if (w.test(p)) {  // C4
      detail::ExactLp::Terms row;
      for (VoterIndex i : inst.supporters(p)) row.emplace_back(*var[i][p], Rational(1));
      if (row.empty()) return std::nullopt;  // nobody may pay for it
      lp.add(row, Sense::eq, inst.cost(p));
      continue;
    }
    if (inst.supporters(p).empty()) continue;
    detail::ExactLp::Terms row{{beta, Rational(inst.supporters(p).size())}};  // C5
    for (VoterIndex i : inst.supporters(p))
      for (ProjectIndex k = 0; k < m; ++k)
        if (var[i][k]) row.emplace_back(*var[i][k], Rational(-1));
    lp.add(row, Sense::le, inst.cost(p));
    if (opt.require_c6)
      for_each_member(w, [&](ProjectIndex k) {  // C6
        detail::ExactLp::Terms c6;
        for (VoterIndex i : inst.supporters(p))
          if (var[i][k]) c6.emplace_back(*var[i][k], Rational(1));
        if (!c6.empty()) lp.add(c6, Sense::le, inst.cost(p));
      });
  }
  if (opt.fixed_B) lp.add({{beta, Rational(n)}}, Sense::eq, *opt.fixed_B);
  lp.add({{beta, Rational(n)}, {slack, Rational(-1)}}, Sense::ge, opt.require_b_strict ? inst.budget() : Money(0));
  lp.add({{slack, Rational(1)}}, Sense::le, 1);
  lp.maximize({{slack, Rational(1)}});

  const auto sol = lp.solve();
  if (sol.status != detail::LpSolution::Status::optimal || sol.value <= 0) return std::nullopt;
  PriceSystem ps{Money(n) * sol.x[beta], zero_matrix(inst)};
  for (VoterIndex i = 0; i < n; ++i)
    for (ProjectIndex p = 0; p < m; ++p)
      if (var[i][p]) ps.d[i][p] = sol.x[*var[i][p]];
  return ps;
}

}  // namespace pb

namespace pb {

struct MaximinExtraction {
  PriceSystem system;
  /// "blocking-loads", "payments-at-B", "searched" or "none".
  std::string method;
};

/// Price system from a maximin run that stopped at a blocking project p' with
/// balanced max load s for W + p'. Tried in order, keeping the first that
/// passes C1-C6 with B > b:
///   blocking-loads  B = n s, payments = the balanced loads of W + p' on W;
///   payments-at-B   B = n s, payments solved exactly for C1-C6;
///   searched        any B > b with C1-C6 (exact search).
/// If all fail, the blocking-loads system is returned with method "none";
/// such outcomes exist, so callers must verify.
inline MaximinExtraction extract_from_maximin_trace(const Instance& inst, const RuleTrace& trace,
                                                    std::size_t max_payment_vars = 64) {
  if (trace.rule != "maximin") throw PreconditionError("not a maximin trace (rule '" + trace.rule + "')");
  if (!trace.blocking)
    throw ExtractionUnavailable("the run ended without a blocking project; no price system can be extracted");
  if (!trace.blocking_loads) throw InputError("maximin trace lacks the blocking load assignment");
  if (trace.blocking_loads->loads.size() != inst.voter_count()) throw InputError("trace does not match the instance");
  const ProjectSet w = trace.selected(inst);
  PaymentMatrix d = trace.blocking_loads->loads;
  for (auto& row : d) row.at(trace.blocking->project) = 0;
  const Money B = Money(inst.voter_count()) * trace.blocking_loads->max_load;
  MaximinExtraction out{{B, std::move(d)}, "blocking-loads"};
  if (verify_price_system(inst, w, out.system, true).passes(true, true)) return out;
  if (inst.voter_count() * inst.project_count() <= max_payment_vars) {
    PriceSearchOptions opt{true, true, max_payment_vars, B};
    if (auto ps = find_price_system(inst, w, opt)) return {std::move(*ps), "payments-at-B"};
    opt.fixed_B.reset();
    if (auto ps = find_price_system(inst, w, opt)) return {std::move(*ps), "searched"};
  }
  out.method = "none";
  return out;
}

}  // namespace pb
