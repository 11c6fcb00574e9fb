#pragma once

#include <cstdint>
#include <random>

#include "pb/generator.hpp"

namespace testing_support {

/// Random instance with 1..max_n voters and 1..max_m projects, costs on the
/// grid {1, 5/4, ..., 5}, budget on the half-integer grid in [m/2, 2m].
inline pb::Instance random_instance(std::uint64_t seed, std::size_t max_n = 6, std::size_t max_m = 8,
                                    bool unit_cost = false) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  pb::GeneratorParams p;
  p.voters = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
  p.projects = std::uniform_int_distribution<std::size_t>(1, max_m)(rng);
  p.cost_min = 1;
  p.cost_max = unit_cost ? 1 : 5;
  p.cost_denominator = 4;
  p.approval_density = std::uniform_real_distribution<double>(0.25, 0.8)(rng);
  const pb::Money m(static_cast<long>(p.projects));
  p.budget = pb::BudgetRange{m / 2, m * 2, 2};
  return pb::generate_random(p, rng());
}

}  // namespace testing_support
