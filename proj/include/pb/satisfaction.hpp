#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pb/model.hpp"

namespace pb {

enum class SatKind { cost, cardinality, sqrt_cost, log_cost, cc, share, table, cost_map };

inline const char* to_string(SatKind k) {
  switch (k) {
    case SatKind::cost: return "cost";
    case SatKind::cardinality: return "card";
    case SatKind::sqrt_cost: return "sqrt";
    case SatKind::log_cost: return "log";
    case SatKind::cc: return "cc";
    case SatKind::share: return "share";
    case SatKind::table: return "table";
    case SatKind::cost_map: return "costmap";
  }
  return "?";
}

/// Map from a project cost to the satisfaction a project of that cost yields.
using CostValueMap = std::map<Money, SatValue>;

/// Approval-based satisfaction function bound to one instance's project list.
///
/// Every built-in except CC is additive and stores one value per project;
/// CC is 1 on any non-empty set. sqrt/log values are rounded once to 12
/// significant digits and are exact rationals from then on.
class SatisfactionFunction {
 public:
  static SatisfactionFunction cost(const Instance& inst) {
    return additive_from(inst, SatKind::cost, true, [&](ProjectIndex p) { return inst.cost(p); });
  }
  static SatisfactionFunction cardinality(const Instance& inst) {
    return additive_from(inst, SatKind::cardinality, true, [](ProjectIndex) { return SatValue(1); });
  }
  static SatisfactionFunction sqrt_cost(const Instance& inst) {
    return additive_from(inst, SatKind::sqrt_cost, true,
                         [&](ProjectIndex p) { return rationalize(std::sqrt(to_double(inst.cost(p)))); });
  }
  static SatisfactionFunction log_cost(const Instance& inst) {
    return additive_from(inst, SatKind::log_cost, true,
                         [&](ProjectIndex p) { return rationalize(std::log1p(to_double(inst.cost(p)))); });
  }
  static SatisfactionFunction cc(const Instance& inst) {
    SatisfactionFunction f(SatKind::cc, inst.project_count(), true);
    return f;
  }
  /// share(p) = c(p) / |N_p|; undefined (evaluation error) for unapproved projects.
  static SatisfactionFunction share(const Instance& inst) {
    SatisfactionFunction f(SatKind::share, inst.project_count(), false);
    for (ProjectIndex p = 0; p < inst.project_count(); ++p) {
      const auto k = inst.supporters(p).size();
      if (k > 0) f.values_[p] = inst.cost(p) / SatValue(k);
    }
    return f;
  }
  /// Per-project values keyed by project id; every project needs a positive entry.
  static SatisfactionFunction table(const Instance& inst, const std::map<std::string, SatValue>& values) {
    for (const auto& [id, v] : values) (void)inst.index(id);
    return additive_from(inst, SatKind::table, false, [&](ProjectIndex p) {
      auto it = values.find(inst.id(p));
      if (it == values.end()) throw InputError("satisfaction table has no entry for project '" + inst.id(p) + "'");
      if (it->second <= 0) throw InputError("satisfaction table entry for '" + inst.id(p) + "' must be positive");
      return it->second;
    });
  }
  /// Values keyed by cost; every project's cost needs a positive entry.
  static SatisfactionFunction cost_map(const Instance& inst, const CostValueMap& values) {
    return additive_from(inst, SatKind::cost_map, true, [&](ProjectIndex p) {
      auto it = values.find(inst.cost(p));
      if (it == values.end()) throw InputError("cost map has no entry for cost " + to_string(inst.cost(p)));
      if (it->second <= 0) throw InputError("cost map entry for cost " + to_string(inst.cost(p)) + " must be positive");
      return it->second;
    });
  }

  SatKind kind() const noexcept { return kind_; }
  std::string name() const { return to_string(kind_); }
  bool additive() const noexcept { return kind_ != SatKind::cc; }
  bool strictly_increasing() const noexcept { return kind_ != SatKind::cc; }
  bool cost_neutral() const noexcept { return cost_neutral_; }
  bool rationalized() const noexcept { return kind_ == SatKind::sqrt_cost || kind_ == SatKind::log_cost; }
  std::size_t project_count() const noexcept { return m_; }

  bool has_value(ProjectIndex p) const { return additive() && values_.at(p).has_value(); }

  /// mu({p}) for additive functions.
  const SatValue& value(ProjectIndex p) const {
    if (!additive()) throw CapabilityError(name() + " is not additive; per-project values are undefined");
    const auto& v = values_.at(p);
    if (!v) throw InputError(name() + " is undefined for project " + std::to_string(p) + " (no approvers)");
    return *v;
  }

  SatValue evaluate(const ProjectSet& s) const {
    check(s);
    if (kind_ == SatKind::cc) return s.any() ? SatValue(1) : SatValue(0);
    SatValue sum = 0;
    for_each_member(s, [&](ProjectIndex p) { sum += value(p); });
    return sum;
  }

  /// Evaluation over a 64-bit membership mask (bit k = project k).
  SatValue evaluate_mask(std::uint64_t mask) const {
    if (kind_ == SatKind::cc) return mask ? SatValue(1) : SatValue(0);
    SatValue sum = 0;
    while (mask) {
      const int p = __builtin_ctzll(mask);
      mask &= mask - 1;
      sum += value(static_cast<ProjectIndex>(p));
    }
    return sum;
  }

 private:
  SatisfactionFunction(SatKind kind, std::size_t m, bool cost_neutral)
      : kind_(kind), m_(m), cost_neutral_(cost_neutral) {
    if (kind != SatKind::cc) values_.resize(m);
  }

  template <typename Fn>
  static SatisfactionFunction additive_from(const Instance& inst, SatKind kind, bool cost_neutral, Fn&& fn) {
    SatisfactionFunction f(kind, inst.project_count(), cost_neutral);
    for (ProjectIndex p = 0; p < inst.project_count(); ++p) {
      SatValue v = fn(p);
      if (v <= 0) throw InputError("satisfaction of project '" + inst.id(p) + "' must be positive");
      f.values_[p] = std::move(v);
    }
    return f;
  }

  void check(const ProjectSet& s) const {
    if (s.size() != m_) throw InputError("project set does not match the satisfaction function's instance");
  }

  SatKind kind_;
  std::size_t m_;
  bool cost_neutral_;
  std::vector<std::optional<SatValue>> values_;
};

inline SatValue evaluate(const SatisfactionFunction& mu, const Instance& inst, const ProjectSet& s) {
  inst.check_set(s);
  return mu.evaluate(s);
}

/// mu_i(W) = mu(A_i ∩ W).
inline SatValue voter_satisfaction(const SatisfactionFunction& mu, const Instance& inst, VoterIndex i,
                                   const ProjectSet& w) {
  inst.check_voter(i);
  inst.check_set(w);
  return mu.evaluate(inst.ballot(i) & w);
}

enum class DnsFailure {
  value_order,  // c(p) <= c(p') but mu(p) > mu(p')
  ratio_order,  // c(p) <= c(p') but mu(p)/c(p) < mu(p')/c(p')
};

inline const char* to_string(DnsFailure f) {
  return f == DnsFailure::value_order ? "value_order" : "ratio_order";
}

struct DnsWitness {
  ProjectIndex cheaper;
  ProjectIndex pricier;
  DnsFailure failure;
};

struct DnsCheck {
  bool dns = true;
  std::optional<DnsWitness> witness;
  explicit operator bool() const noexcept { return dns; }
};

/// Checks the two DNS inequalities over every ordered pair with c(p) <= c(p').
/// Projects on which mu is undefined (share without approvers) are skipped.
inline DnsCheck is_dns(const SatisfactionFunction& mu, const Instance& inst) {
  if (!mu.additive()) throw CapabilityError("DNS is only defined for additive satisfaction functions");
  const std::size_t m = inst.project_count();
  for (ProjectIndex p = 0; p < m; ++p) {
    if (!mu.has_value(p)) continue;
    for (ProjectIndex q = 0; q < m; ++q) {
      if (p == q || !mu.has_value(q) || inst.cost(p) > inst.cost(q)) continue;
      if (mu.value(p) > mu.value(q)) return {false, DnsWitness{p, q, DnsFailure::value_order}};
      if (mu.value(p) * inst.cost(q) < mu.value(q) * inst.cost(p))
        return {false, DnsWitness{p, q, DnsFailure::ratio_order}};
    }
  }
  return {};
}

/// Exhaustive check that c(W) < c(W') implies mu(W) < mu(W') over all subsets.
inline bool is_strictly_cost_responsive(const SatisfactionFunction& mu, const Instance& inst,
                                        std::size_t max_projects = 16) {
  const std::size_t m = inst.project_count();
  if (m > max_projects)
    throw GuardExceeded("strict cost-responsiveness enumerates 2^" + std::to_string(m) + " subsets (limit 2^" +
                        std::to_string(max_projects) + ")");
  std::vector<std::pair<Money, SatValue>> sets;
  sets.reserve(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    Money c = 0;
    for (std::uint64_t r = mask; r; r &= r - 1) c += inst.cost(static_cast<ProjectIndex>(__builtin_ctzll(r)));
    sets.emplace_back(std::move(c), mu.evaluate_mask(mask));
  }
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Walk cost classes in increasing order; the best value of all strictly
  // cheaper sets must stay below every value in the current class.
  std::optional<SatValue> cheaper_max;
  for (std::size_t k = 0; k < sets.size();) {
    std::size_t end = k;
    SatValue class_min = sets[k].second, class_max = sets[k].second;
    while (end < sets.size() && sets[end].first == sets[k].first) {
      class_min = std::min(class_min, sets[end].second);
      class_max = std::max(class_max, sets[end].second);
      ++end;
    }
    if (cheaper_max && !(*cheaper_max < class_min)) return false;
    if (!cheaper_max || *cheaper_max < class_max) cheaper_max = class_max;
    k = end;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Constructing instances on which MES[card] fails PJR-x for a non-DNS map.

/// A pair of costs x <= x' witnessing that a cost map is not DNS.
struct DnsViolation {
  Money x, x_prime;
  DnsFailure failure;
};

/// First violating pair of a cost map, scanning costs in increasing order.
inline std::optional<DnsViolation> find_dns_violation(const CostValueMap& s) {
  for (auto a = s.begin(); a != s.end(); ++a)
    for (auto b = std::next(a); b != s.end(); ++b) {
      if (a->second > b->second) return DnsViolation{a->first, b->first, DnsFailure::value_order};
      if (a->second * b->first < b->second * a->first) return DnsViolation{a->first, b->first, DnsFailure::ratio_order};
    }
  return std::nullopt;
}

namespace detail {

// Rational with the smallest denominator (then numerator) in the open
// interval (lo, hi), lo >= 0; hi == nullopt means +infinity.
inline Rational simplest_between(const Rational& lo, const std::optional<Rational>& hi) {
  const Rational next_int(floor(lo) + 1);
  if (!hi || next_int < *hi) return next_int;
  const Rational base(floor(lo));
  // Both ends lie in [base, base + 1]; recurse on reciprocals of the fractional parts.
  std::optional<Rational> upper;
  if (lo != base) upper = Rational(1) / (lo - base);
  const Rational inner = simplest_between(Rational(1) / (*hi - base), upper);
  return base + Rational(1) / inner;
}

}  // namespace detail

struct DnsCounterexample {
  Instance instance;
  SatisfactionFunction mu;
  DnsFailure failure;
  mpz_class beta;
};

/// Builds an instance on which MES[cardinality] violates PJR-x with respect to
/// the additive function induced by `s` (mu(p) = s(c(p))).
///
/// value_order (s(x) > s(x')): q voters approve everything, p voters approve
/// only the x'-projects, with p/q just above x'/x - 1; MES[card] spends the
/// budget on x'-projects while the q voters deserve beta x-projects.
/// ratio_order (s(x)/x < s(x')/x'): one voter; MES[card] buys only
/// x-projects while the voter deserves beta x'-projects.
inline DnsCounterexample dns_counterexample_instance(const CostValueMap& s, const Money& x, const Money& x_prime) {
  auto sx = s.find(x), sxp = s.find(x_prime);
  if (sx == s.end() || sxp == s.end()) throw InputError("x and x' must both be keys of the cost map");
  if (x <= 0 || x > x_prime) throw PreconditionError("need 0 < x <= x'");
  if (sx->second <= 0 || sxp->second <= 0) throw InputError("cost map values must be positive");

  // Rescaled so that x = 1 and s(x) = 1.
  const Rational big = x_prime / x;             // cost of the pricier projects
  const Rational value = sxp->second / sx->second;  // their satisfaction

  auto project_list = [&](std::size_t cheap, std::size_t pricey) {
    std::vector<Project> out;
    for (std::size_t k = 0; k < cheap; ++k) out.push_back({"a" + std::to_string(k + 1), x});
    for (std::size_t k = 0; k < pricey; ++k) out.push_back({"b" + std::to_string(k + 1), x_prime});
    return out;
  };

  if (value < 1) {
    // Smallest beta with value + 1/beta < 1.
    const mpz_class beta = floor(Rational(1) / (1 - value)) + 1;
    const Rational ratio = detail::simplest_between(big - 1, big - 1 + Rational(1) / Rational(beta));
    const std::size_t p = ratio.get_num().get_ui(), q = ratio.get_den().get_ui();
    const std::size_t half = beta.get_ui() + 1;
    auto projects = project_list(half, half);
    std::vector<ProjectSet> ballots;
    ProjectSet all(2 * half), pricey(2 * half);
    all.set();
    for (std::size_t k = half; k < 2 * half; ++k) pricey.set(k);
    for (std::size_t k = 0; k < q; ++k) ballots.push_back(all);
    for (std::size_t k = 0; k < p; ++k) ballots.push_back(pricey);
    // b = beta (x' + eps) with eps = p/q - (x' - 1), in original units.
    const Money budget = x * Rational(beta) * (1 + ratio);
    Instance inst(std::move(projects), std::move(ballots), budget);
    auto mu = SatisfactionFunction::cost_map(inst, s);
    return {std::move(inst), std::move(mu), DnsFailure::value_order, beta};
  }

  if (value > big) {
    // Smallest beta with big/value < (beta - 1)/beta.
    const mpz_class beta = floor(value / (value - big)) + 1;
    // Enough x-projects that MES[card] exhausts the budget on them.
    const mpz_class cheap = floor(Rational(big * Rational(beta - 1))) + 1;
    auto projects = project_list(cheap.get_ui(), beta.get_ui());
    ProjectSet all(projects.size());
    all.set();
    const Money budget = x * Rational(beta) * big;
    Instance inst(std::move(projects), {all}, budget);
    auto mu = SatisfactionFunction::cost_map(inst, s);
    return {std::move(inst), std::move(mu), DnsFailure::ratio_order, beta};
  }

  throw PreconditionError("s(" + to_string(x) + ") and s(" + to_string(x_prime) + ") satisfy both DNS inequalities");
}

}  // namespace pb
