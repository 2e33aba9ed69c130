#pragma once

#include "polysum/affine.hpp"

#include <map>
#include <optional>
#include <vector>

namespace polysum {

// One linear side condition: term >= 0, or term = 0 when equality is set.
struct LpConstraint {
    AffineTerm term;
    bool equality = false;
};

enum class LpSense { Maximize, Minimize };

enum class LpStatus { Infeasible, Unbounded, Optimum };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;                    // optimal objective, when Optimum
    std::map<VarId, Rational> witness; // a point attaining it, when Optimum

    bool optimal() const { return status == LpStatus::Optimum; }
};

// Exact rational simplex (two phases, Bland's anti-cycling pivot rule).
// Variables are free; the encoding splits them into nonnegative pairs.
LpResult lp_optimize(const std::vector<LpConstraint> &constraints,
                     const AffineTerm &objective, LpSense sense);

// Feasibility check: a point satisfying all constraints, if one exists.
std::optional<std::map<VarId, Rational>>
lp_feasible_point(const std::vector<LpConstraint> &constraints);

} // namespace polysum
