#pragma once

#include "polysum/polyhedron.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polysum {

// Environment X followed by the primed copies X'.
std::vector<VarId> transition_environment(const std::vector<VarId> &vars);

// A union of closed convex polyhedra over X and X', denoting a binary
// relation on rational states.  No empty disjuncts are stored (an empty list
// is the formula false) and each stored disjunct is minimized.
class TransitionFormula {
  public:
    TransitionFormula() = default;
    TransitionFormula(std::vector<VarId> vars, std::vector<Polyhedron> disjuncts);

    static TransitionFormula zero(std::vector<VarId> vars);
    static TransitionFormula one(std::vector<VarId> vars);

    const std::vector<VarId> &variables() const { return vars_; }
    const std::vector<Polyhedron> &disjuncts() const { return disjuncts_; }
    std::vector<VarId> environment() const { return transition_environment(vars_); }

    bool is_false() const { return disjuncts_.empty(); }

    std::string str() const;

  private:
    std::vector<VarId> vars_;
    std::vector<Polyhedron> disjuncts_;
};

std::ostream &operator<<(std::ostream &os, const TransitionFormula &f);

// Formulas over X only (pre- and post-condition results).
class StateFormula {
  public:
    StateFormula() = default;
    StateFormula(std::vector<VarId> vars, std::vector<Polyhedron> disjuncts);

    const std::vector<VarId> &variables() const { return vars_; }
    const std::vector<Polyhedron> &disjuncts() const { return disjuncts_; }
    bool is_false() const { return disjuncts_.empty(); }

    std::string str() const;

  private:
    std::vector<VarId> vars_;
    std::vector<Polyhedron> disjuncts_;
};

std::ostream &operator<<(std::ostream &os, const StateFormula &f);

TransitionFormula tf_zero(const std::vector<VarId> &vars);
TransitionFormula tf_one(const std::vector<VarId> &vars);

// Disjunction, with absorption of disjuncts covered by the rest.
TransitionFormula tf_plus(const TransitionFormula &f, const TransitionFormula &g);

// Relational composition (conjoin over a tripled environment, project the
// middle copy out).
TransitionFormula tf_compose(const TransitionFormula &f, const TransitionFormula &g);

bool tf_entails(const TransitionFormula &f, const TransitionFormula &g);

struct EntailmentResult {
    bool holds = false;
    std::map<VarId, Rational> witness; // a point of f outside g, when !holds
};
EntailmentResult tf_entails_witness(const TransitionFormula &f, const TransitionFormula &g);

// G[sigma, sigma']: substitute sigma into unprimed and sigma' into primed
// occurrences.  G ranges over sigma's target variables; the result ranges
// over sigma's source variables.
TransitionFormula tf_subst(const TransitionFormula &g, const Substitution &sigma);

// sigma is a linear simulation from f to g: f |= g[sigma, sigma'].
bool is_simulation(const Substitution &sigma, const TransitionFormula &f,
                   const TransitionFormula &g);
EntailmentResult is_simulation_witness(const Substitution &sigma, const TransitionFormula &f,
                                       const TransitionFormula &g);

// Convex hull of the projection onto pre-states (resp. post-states, renamed
// down to unprimed variables).
StateFormula tf_pre(const TransitionFormula &f);
StateFormula tf_post(const TransitionFormula &f);

// Variable of the change polyhedron for x.
VarId delta_var(const VarId &v);

// conv of the changes x' - x, as a polyhedron over the delta variables.
Polyhedron tf_delta(const TransitionFormula &f);

TransitionFormula tf_power(const TransitionFormula &f, unsigned n);

// Explicit environment surgery (never implicit).
TransitionFormula tf_restrict(const TransitionFormula &f, const std::vector<VarId> &sub_vars);
TransitionFormula tf_rename(const TransitionFormula &f,
                            const std::map<VarId, VarId> &var_renaming,
                            std::vector<VarId> new_vars);

bool tf_equivalent(const TransitionFormula &f, const TransitionFormula &g);

} // namespace polysum
