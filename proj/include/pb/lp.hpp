#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pb/rational.hpp"

namespace pb::detail {

enum class Sense { le, eq, ge };

struct LpSolution {
  enum class Status { optimal, infeasible, unbounded } status;
  Rational value;
  std::vector<Rational> x;
};

// Dense two-phase simplex over exact rationals with Bland's rule (no
// cycling). Variables are non-negative; the objective is maximised.
class ExactLp {
 public:
  using Terms = std::vector<std::pair<std::size_t, Rational>>;

  explicit ExactLp(std::size_t vars) : vars_(vars) {}

  void add(const Terms& terms, Sense sense, Rational rhs) { rows_.push_back({terms, sense, std::move(rhs)}); }
  void maximize(Terms terms) { objective_ = std::move(terms); }

  LpSolution solve() const {
    // Column layout: structural | slack/surplus | artificial | rhs
    const std::size_t m = rows_.size();
    std::size_t slack_count = 0, art_count = 0;
    for (const auto& r : rows_) {
      const Sense s = normalized_sense(r);
      if (s != Sense::eq) ++slack_count;
      if (s != Sense::le) ++art_count;
    }
    const std::size_t first_slack = vars_, first_art = vars_ + slack_count, cols = first_art + art_count;
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols + 1, Rational(0)));
    std::vector<std::size_t> basis(m);
    std::size_t next_slack = first_slack, next_art = first_art;
    for (std::size_t r = 0; r < m; ++r) {
      const bool flip = rows_[r].rhs < 0;
      const Rational sign = flip ? -1 : 1;
      for (const auto& [j, a] : rows_[r].terms) t[r][j] += sign * a;
      t[r][cols] = sign * rows_[r].rhs;
      const Sense s = normalized_sense(rows_[r]);
      if (s == Sense::le) {
        t[r][next_slack] = 1;
        basis[r] = next_slack++;
      } else {
        if (s == Sense::ge) t[r][next_slack++] = -1;
        t[r][next_art] = 1;
        basis[r] = next_art++;
      }
    }

    // Phase 1: maximise -sum(artificials).
    std::vector<Rational> z(cols + 1, Rational(0));
    for (std::size_t j = first_art; j < cols; ++j) z[j] = 1;
    for (std::size_t r = 0; r < m; ++r)
      if (basis[r] >= first_art)
        for (std::size_t j = 0; j <= cols; ++j) z[j] -= t[r][j];
    run(t, z, basis, cols, cols);
    if (z[cols] != 0) return {LpSolution::Status::infeasible, Rational(0), {}};

    // Drive remaining artificials out of the basis (they sit at zero).
    for (std::size_t r = 0; r < t.size();) {
      if (basis[r] < first_art) {
        ++r;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_art && !col; ++j)
        if (t[r][j] != 0) col = j;
      if (col) {
        pivot(t, z, basis, r, *col, cols);
        ++r;
      } else {
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(r));  // redundant row
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }

    // Phase 2 over structural and slack columns only.
    std::fill(z.begin(), z.end(), Rational(0));
    for (const auto& [j, c] : objective_) z[j] -= c;
    for (std::size_t r = 0; r < t.size(); ++r)
      if (z[basis[r]] != 0) {
        const Rational f = z[basis[r]];
        for (std::size_t j = 0; j <= cols; ++j) z[j] -= f * t[r][j];
      }
    if (!run(t, z, basis, first_art, cols)) return {LpSolution::Status::unbounded, Rational(0), {}};

    LpSolution out{LpSolution::Status::optimal, z[cols], std::vector<Rational>(vars_, Rational(0))};
    for (std::size_t r = 0; r < t.size(); ++r)
      if (basis[r] < vars_) out.x[basis[r]] = t[r][cols];
    return out;
  }

 private:
  struct Row {
    Terms terms;
    Sense sense;
    Rational rhs;
  };

  static Sense normalized_sense(const Row& r) {
    if (r.rhs >= 0 || r.sense == Sense::eq) return r.sense;
    return r.sense == Sense::le ? Sense::ge : Sense::le;
  }

  static void pivot(std::vector<std::vector<Rational>>& t, std::vector<Rational>& z, std::vector<std::size_t>& basis,
                    std::size_t r, std::size_t c, std::size_t cols) {
    const Rational inv = 1 / t[r][c];
    for (std::size_t j = 0; j <= cols; ++j) t[r][j] *= inv;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k == r || t[k][c] == 0) continue;
      const Rational f = t[k][c];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[r][j] != 0) t[k][j] -= f * t[r][j];
    }
    if (z[c] != 0) {
      const Rational f = z[c];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[r][j] != 0) z[j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Pivots until optimal (true) or unbounded (false); only columns below
  // `limit` may enter.
  static bool run(std::vector<std::vector<Rational>>& t, std::vector<Rational>& z, std::vector<std::size_t>& basis,
                  std::size_t limit, std::size_t cols) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < limit && !enter; ++j)
        if (z[j] < 0) enter = j;
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < t.size(); ++r) {
        if (t[r][*enter] <= 0) continue;
        Rational ratio = t[r][cols] / t[r][*enter];
        if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
          leave = r;
          best = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(t, z, basis, *leave, *enter, cols);
    }
  }

  std::size_t vars_;
  std::vector<Row> rows_;
  Terms objective_;
};

}  // namespace pb::detail
