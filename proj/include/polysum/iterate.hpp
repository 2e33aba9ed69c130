#pragma once

#include "polysum/transition.hpp"

#include <optional>
#include <vector>

namespace polysum {

// Conjunction of a pre-state guard and a post-state guard; transitively
// closed by construction.
struct PolyCartFormula {
    Polyhedron pre_guard;  // over X
    Polyhedron post_guard; // over X'
};

// Conjunction of bounds fresh' <= fresh + bound over pairwise-distinct fresh
// variables, or bottom (false).  For bottom, vars holds the concrete
// variable set the formula is false over.
struct LossyTranslation {
    std::vector<VarId> vars;
    std::vector<Rational> bounds; // aligned with vars; empty when bottom
    bool bottom = false;
};

// Best abstraction of a transition formula into a sub-model, together with
// the translating substitution eta (abstract variables to concrete terms).
struct Abstraction {
    std::optional<PolyCartFormula> guards;
    std::optional<LossyTranslation> lossy;
    Substitution eta;
};

// Pre(F) /\ Post(F) with identity eta.
Abstraction alpha_pga(const TransitionFormula &f);

// Recurrence abstraction: one fresh variable per facet of conv(Delta(F)),
// bottom for unsatisfiable F.  eta maps each fresh variable to the facet's
// linear term over X.
Abstraction alpha_lra(const TransitionFormula &f);

// Both abstractions, sharing one eta over the disjoint abstract variables.
Abstraction alpha_product(const TransitionFormula &f);

// X' = X \/ F.
TransitionFormula star_pga_base(const PolyCartFormula &a, const std::vector<VarId> &vars);

// Reflexive transitive closure of a lossy translation with the iteration
// counter still pending: a polyhedron over vars, vars' and the counter
// (k >= 0 and fresh' <= fresh + k*bound; identity for bottom, counter
// unconstrained).  Callers project the counter out, either immediately or
// after conjoining with another counter-sharing relation.
Polyhedron star_lra_base(const LossyTranslation &a, const VarId &counter);

// eta-inverse image: carry a base-analysis result over the abstract
// variables back to the concrete ones.
TransitionFormula lift(const Substitution &eta, const TransitionFormula &base_result);
TransitionFormula lift(const Abstraction &a, const TransitionFormula &base_result);

TransitionFormula star_pga(const TransitionFormula &f);
TransitionFormula star_lra(const TransitionFormula &f);

// Guard and recurrence analyses combined through a shared iteration counter.
TransitionFormula star_combined(const TransitionFormula &f);

// The defining simulation property of an abstraction: f entails the abstract
// formula under [eta, eta'].  Checked by tests and debug builds.
bool abstraction_simulates(const TransitionFormula &f, const Abstraction &a);

// Counter variable used by the combined operator.
VarId iteration_counter();

} // namespace polysum
