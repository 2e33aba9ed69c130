#include "polysum/lp.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace polysum {

namespace {

// Dense simplex tableau with an explicit basis.  Columns 0..ncols-1 are
// structural; column ncols holds the right-hand side.
struct Tableau {
    std::vector<std::vector<Rational>> rows; // m x (ncols + 1)
    std::vector<Rational> cost;              // reduced-cost row, length ncols
    Rational cost_value;                     // objective value of current basis
    std::vector<int> basis;                  // basic column per row
    int ncols = 0;

    void pivot(int r, int c) {
        auto &prow = rows[r];
        Rational inv = prow[c].inverse();
        for (auto &x : prow)
            if (!x.is_zero()) x *= inv;
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == r) continue;
            Rational f = rows[i][c];
            if (f.is_zero()) continue;
            for (int j = 0; j <= ncols; ++j)
                if (!prow[j].is_zero()) rows[i][j] -= f * prow[j];
        }
        Rational f = cost[c];
        if (!f.is_zero()) {
            for (int j = 0; j < ncols; ++j)
                if (!prow[j].is_zero()) cost[j] -= f * prow[j];
            cost_value += f * prow[ncols];
        }
        basis[r] = c;
    }

    // Maximize, entering the lowest-index improving column (Bland).
    // Returns false when the problem is unbounded.
    bool run(const std::vector<bool> &allowed) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j) {
                if (allowed[j] && cost[j].sign() > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            Rational best;
            for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
                if (rows[i][enter].sign() <= 0) continue;
                Rational ratio = rows[i][ncols] / rows[i][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }
};

} // namespace

LpResult lp_optimize(const std::vector<LpConstraint> &constraints,
                     const AffineTerm &objective, LpSense sense) {
    // Collect the variable universe in a fixed order.
    std::set<VarId> vars;
    for (const auto &c : constraints)
        for (const auto &[v, k] : c.term.coefficients()) vars.insert(v);
    for (const auto &[v, k] : objective.coefficients()) vars.insert(v);
    std::vector<VarId> order(vars.begin(), vars.end());
    const int nv = static_cast<int>(order.size());
    std::map<VarId, int> index;
    for (int i = 0; i < nv; ++i) index.emplace(order[i], i);

    // Column layout: [u_0..u_{nv-1}] [v_0..v_{nv-1}] [slacks] [artificials],
    // where free variable x_i = u_i - v_i with u_i, v_i >= 0.
    int nslack = 0;
    for (const auto &c : constraints)
        if (!c.equality) ++nslack;
    const int m = static_cast<int>(constraints.size());
    const int structural = 2 * nv + nslack;
    const int ncols = structural + m; // one artificial per row

    Tableau t;
    t.ncols = ncols;
    t.rows.assign(m, std::vector<Rational>(ncols + 1, Rational(0)));
    t.basis.assign(m, 0);

    int slack_at = 2 * nv;
    for (int i = 0; i < m; ++i) {
        auto &row = t.rows[i];
        // term >= 0  becomes  sum a x - s = -c  (s >= 0);
        // term  = 0  becomes  sum a x     = -c.
        for (const auto &[v, a] : constraints[i].term.coefficients()) {
            int j = index.at(v);
            row[j] += a;
            row[nv + j] -= a;
        }
        if (!constraints[i].equality) row[slack_at++] = Rational(-1);
        row[ncols] = -constraints[i].term.constant();
        if (row[ncols].sign() < 0)
            for (auto &x : row) x = -x;
        row[structural + i] = Rational(1);
        t.basis[i] = structural + i;
    }

    // Phase 1: maximize minus the sum of artificials.
    t.cost.assign(ncols, Rational(0));
    t.cost_value = Rational(0);
    for (int i = 0; i < m; ++i) t.cost[structural + i] = Rational(-1);
    for (int i = 0; i < m; ++i) {
        // Eliminate basic costs so reduced costs start consistent.
        Rational f = t.cost[t.basis[i]];
        if (!f.is_zero()) {
            for (int j = 0; j < ncols; ++j) t.cost[j] -= f * t.rows[i][j];
            t.cost_value += f * t.rows[i][ncols];
        }
    }
    std::vector<bool> allowed(ncols, true);
    bool bounded = t.run(allowed);
    assert(bounded);
    (void)bounded;
    if (t.cost_value.sign() < 0) return LpResult{LpStatus::Infeasible, Rational(0), {}};

    // Drive leftover artificials out of the basis; drop redundant rows.
    for (int i = static_cast<int>(t.rows.size()) - 1; i >= 0; --i) {
        if (t.basis[i] < structural) continue;
        int c = -1;
        for (int j = 0; j < structural; ++j)
            if (!t.rows[i][j].is_zero()) {
                c = j;
                break;
            }
        if (c >= 0) {
            t.pivot(i, c);
        } else {
            t.rows.erase(t.rows.begin() + i);
            t.basis.erase(t.basis.begin() + i);
        }
    }
    for (int j = structural; j < ncols; ++j) allowed[j] = false;

    // Phase 2: the real objective (negated for minimization).
    const bool maximize = sense == LpSense::Maximize;
    t.cost.assign(ncols, Rational(0));
    t.cost_value = objective.constant() * Rational(maximize ? 1 : -1);
    for (const auto &[v, a] : objective.coefficients()) {
        int j = index.at(v);
        Rational s = maximize ? a : -a;
        t.cost[j] += s;
        t.cost[nv + j] -= s;
    }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Rational f = t.cost[t.basis[i]];
        if (!f.is_zero()) {
            for (int j = 0; j < ncols; ++j) t.cost[j] -= f * t.rows[i][j];
            t.cost_value += f * t.rows[i][ncols];
        }
    }
    if (!t.run(allowed)) return LpResult{LpStatus::Unbounded, Rational(0), {}};

    std::vector<Rational> solution(structural, Rational(0));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.basis[i] < structural) solution[t.basis[i]] = t.rows[i][t.ncols];
    LpResult result;
    result.status = LpStatus::Optimum;
    result.value = maximize ? t.cost_value : -t.cost_value;
    for (int i = 0; i < nv; ++i)
        result.witness.emplace(order[i], solution[i] - solution[nv + i]);
    return result;
}

std::optional<std::map<VarId, Rational>>
lp_feasible_point(const std::vector<LpConstraint> &constraints) {
    LpResult r = lp_optimize(constraints, AffineTerm(), LpSense::Maximize);
    if (!r.optimal()) return std::nullopt;
    // Variables appearing in no constraint default to zero.
    return r.witness;
}

} // namespace polysum
