#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "pb/model.hpp"

namespace pb {

/// Budget drawn uniformly from the grid {lo + k/denominator} within [lo, hi].
struct BudgetRange {
  Money lo, hi;
  unsigned long denominator = 1;
};

/// Budget equal to a fixed fraction of the total project cost.
struct BudgetFraction {
  Rational fraction;
};

struct FixedBudget {
  Money value;
};

using BudgetRule = std::variant<BudgetRange, BudgetFraction, FixedBudget>;

struct GeneratorParams {
  std::size_t voters = 4;
  std::size_t projects = 6;
  Money cost_min = 1;
  Money cost_max = 5;
  /// Costs are drawn from the grid {cost_min + k/cost_denominator} within [cost_min, cost_max].
  unsigned long cost_denominator = 1;
  double approval_density = 0.5;
  BudgetRule budget = BudgetFraction{Rational(1, 2)};
};

namespace detail {

inline Rational draw_on_grid(std::mt19937_64& rng, const Rational& lo, const Rational& hi, unsigned long den) {
  if (den == 0) throw InputError("grid denominator must be positive");
  if (lo > hi) throw InputError("empty range [" + to_string(lo) + ", " + to_string(hi) + "]");
  // Grid points lo + k/den for k = 0 .. floor((hi - lo) * den).
  const mpz_class steps = floor(Rational((hi - lo) * den));
  if (!steps.fits_ulong_p()) throw InputError("range too wide for the grid");
  std::uniform_int_distribution<unsigned long> pick(0, steps.get_ui());
  Rational r = lo + Rational(pick(rng), den);
  r.canonicalize();
  return r;
}

}  // namespace detail

/// Deterministic random instance: same params and seed give the same instance.
/// Every voter approves at least one project (empty ballots are redrawn).
inline Instance generate_random(const GeneratorParams& params, std::uint64_t seed) {
  if (params.voters == 0 || params.projects == 0) throw InputError("generator needs n >= 1 and m >= 1");
  if (params.cost_min <= 0) throw InputError("cost range must be positive");
  if (params.cost_min > params.cost_max) throw InputError("empty cost range");
  if (params.approval_density <= 0.0 || params.approval_density > 1.0)
    throw InputError("approval density must lie in (0, 1]");

  std::mt19937_64 rng(seed);
  std::vector<Project> projects;
  Money total = 0;
  for (std::size_t p = 0; p < params.projects; ++p) {
    projects.push_back({"p" + std::to_string(p + 1),
                        detail::draw_on_grid(rng, params.cost_min, params.cost_max, params.cost_denominator)});
    total += projects.back().cost;
  }

  std::bernoulli_distribution approve(params.approval_density);
  std::vector<ProjectSet> ballots;
  for (std::size_t i = 0; i < params.voters; ++i) {
    ProjectSet ballot(params.projects);
    while (ballot.none())
      for (std::size_t p = 0; p < params.projects; ++p)
        if (approve(rng)) ballot.set(p);
    ballots.push_back(std::move(ballot));
  }

  Money budget = std::visit(
      [&](const auto& rule) -> Money {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, BudgetRange>) {
          if (rule.lo <= 0) throw InputError("budget range must be positive");
          return detail::draw_on_grid(rng, rule.lo, rule.hi, rule.denominator);
        } else if constexpr (std::is_same_v<T, BudgetFraction>) {
          return total * rule.fraction;
        } else {
          return rule.value;
        }
      },
      params.budget);

  return Instance(std::move(projects), std::move(ballots), std::move(budget));
}

}  // namespace pb
