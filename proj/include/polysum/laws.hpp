#pragma once

#include "polysum/randgen.hpp"
#include "polysum/transition.hpp"

#include <functional>
#include <string>
#include <vector>

namespace polysum {

using StarFn = std::function<TransitionFormula(const TransitionFormula &)>;

// The three iteration operators by name (pga, lra, combined).
StarFn star_by_name(const std::string &domain);

struct LawFailure {
    std::string law;
    std::string formula;
    std::string detail; // separating point or side formulas
};

struct LawReport {
    int samples = 0;
    int checks = 0;
    std::vector<LawFailure> failures;
    bool ok() const { return failures.empty(); }
};

// Iteration-operator laws on seeded random formulas: reflexivity,
// extensivity, transitivity (mutual entailment), monotonicity, unrolling for
// n in {2,3}, plus simulation preservation under random substitutions.
LawReport run_law_suite(const StarFn &star, const RandomFormulaSpec &shape, int samples,
                        std::uint64_t seed);

// The simulation-preservation suite alone: F := G[sigma,sigma'] strengthened
// with a random constraint, then sigma must remain a simulation between the
// starred formulas.
LawReport run_robustness_suite(const StarFn &star, const RandomFormulaSpec &shape, int samples,
                               std::uint64_t seed);

} // namespace polysum
