#pragma once

#include "polysum/transition.hpp"

#include <cstdint>
#include <random>

namespace polysum {

// Shape of randomly drawn transition formulas for the property suites.
struct RandomFormulaSpec {
    int var_count = 2;       // at most 3
    int max_disjuncts = 2;
    int max_constraints = 4; // per disjunct
    int coeff_range = 3;     // coefficients and constants in [-range, range]
    std::uint64_t seed = 0;
};

// Variable names used by generated formulas: x, y, z.
std::vector<VarId> gen_variables(int count);

// Deterministic for a fixed seed; unsatisfiable draws are kept (false is a
// legitimate algebra element).
TransitionFormula gen_random_formula(const RandomFormulaSpec &spec);

// Variants driven by an external engine, for suites that draw several
// related objects from one stream.
TransitionFormula gen_random_formula(const RandomFormulaSpec &spec, std::mt19937_64 &rng);
AffineTerm gen_random_term(const std::vector<VarId> &vars, int coeff_range,
                           std::mt19937_64 &rng);
Substitution gen_random_substitution(const std::vector<VarId> &source,
                                     const std::vector<VarId> &target, int coeff_range,
                                     std::mt19937_64 &rng);
Constraint gen_random_transition_constraint(const std::vector<VarId> &vars, int coeff_range,
                                            std::mt19937_64 &rng);

} // namespace polysum
