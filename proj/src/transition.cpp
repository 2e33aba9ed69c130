#include "polysum/transition.hpp"

#include "polysum/error.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace polysum {

namespace {

void check_unprimed_unique(const std::vector<VarId> &vars) {
    std::set<VarId> seen;
    for (const VarId &v : vars) {
        if (v.primed) throw environment_error("formula variable is primed: " + v.str());
        if (!seen.insert(v).second)
            throw environment_error("duplicate formula variable: " + v.str());
    }
}

void check_same_vars(const TransitionFormula &f, const TransitionFormula &g) {
    if (f.variables() != g.variables())
        throw environment_error("transition formulas over different variable sets");
}

} // namespace

std::vector<VarId> transition_environment(const std::vector<VarId> &vars) {
    std::vector<VarId> env = vars;
    for (const VarId &v : vars) env.push_back(v.prime());
    return env;
}

TransitionFormula::TransitionFormula(std::vector<VarId> vars, std::vector<Polyhedron> disjuncts)
    : vars_(std::move(vars)) {
    check_unprimed_unique(vars_);
    std::vector<VarId> env = transition_environment(vars_);
    for (auto &d : disjuncts) {
        if (d.environment() != env)
            throw environment_error("disjunct environment differs from X union X'");
        Polyhedron m = poly_minimize(d);
        if (!m.syntactically_empty()) disjuncts_.push_back(std::move(m));
    }
}

TransitionFormula TransitionFormula::zero(std::vector<VarId> vars) {
    return TransitionFormula(std::move(vars), {});
}

TransitionFormula TransitionFormula::one(std::vector<VarId> vars) {
    std::vector<Constraint> cs;
    for (const VarId &v : vars)
        cs.push_back(constraint_eq(AffineTerm::variable(v.prime()), AffineTerm::variable(v)));
    std::vector<VarId> env = transition_environment(vars);
    Polyhedron identity(env, std::move(cs));
    return TransitionFormula(std::move(vars), {identity});
}

std::string TransitionFormula::str() const {
    if (disjuncts_.empty()) return "false";
    std::ostringstream os;
    for (std::size_t i = 0; i < disjuncts_.size(); ++i) {
        if (i) os << " | ";
        os << disjuncts_[i].str();
    }
    return os.str();
}

std::ostream &operator<<(std::ostream &os, const TransitionFormula &f) { return os << f.str(); }

StateFormula::StateFormula(std::vector<VarId> vars, std::vector<Polyhedron> disjuncts)
    : vars_(std::move(vars)) {
    check_unprimed_unique(vars_);
    for (auto &d : disjuncts) {
        if (d.environment() != vars_)
            throw environment_error("state disjunct environment differs from X");
        Polyhedron m = poly_minimize(d);
        if (!m.syntactically_empty()) disjuncts_.push_back(std::move(m));
    }
}

std::string StateFormula::str() const {
    if (disjuncts_.empty()) return "false";
    std::ostringstream os;
    for (std::size_t i = 0; i < disjuncts_.size(); ++i) {
        if (i) os << " | ";
        os << disjuncts_[i].str();
    }
    return os.str();
}

std::ostream &operator<<(std::ostream &os, const StateFormula &f) { return os << f.str(); }

TransitionFormula tf_zero(const std::vector<VarId> &vars) { return TransitionFormula::zero(vars); }
TransitionFormula tf_one(const std::vector<VarId> &vars) { return TransitionFormula::one(vars); }

TransitionFormula tf_plus(const TransitionFormula &f, const TransitionFormula &g) {
    check_same_vars(f, g);
    std::vector<Polyhedron> pool = f.disjuncts();
    pool.insert(pool.end(), g.disjuncts().begin(), g.disjuncts().end());
    // Absorption: drop any disjunct covered by the union of the others.
    for (std::size_t i = pool.size(); i-- > 0;) {
        std::vector<Polyhedron> others;
        others.reserve(pool.size() - 1);
        for (std::size_t j = 0; j < pool.size(); ++j)
            if (j != i) others.push_back(pool[j]);
        if (union_covers(others, pool[i])) pool = std::move(others);
    }
    return TransitionFormula(f.variables(), std::move(pool));
}

TransitionFormula tf_compose(const TransitionFormula &f, const TransitionFormula &g) {
    check_same_vars(f, g);
    const std::vector<VarId> &vars = f.variables();
    std::vector<VarId> mids;
    std::map<VarId, VarId> primed_to_mid, unprimed_to_mid;
    for (const VarId &v : vars) {
        VarId mid("$m$" + v.name);
        mids.push_back(mid);
        primed_to_mid.emplace(v.prime(), mid);
        unprimed_to_mid.emplace(v, mid);
    }
    std::vector<VarId> wide = vars;
    wide.insert(wide.end(), mids.begin(), mids.end());
    for (const VarId &v : vars) wide.push_back(v.prime());
    std::vector<VarId> target = transition_environment(vars);

    std::vector<Polyhedron> out;
    for (const auto &df : f.disjuncts()) {
        Polyhedron left = poly_rename(df, primed_to_mid, wide);
        for (const auto &dg : g.disjuncts()) {
            Polyhedron right = poly_rename(dg, unprimed_to_mid, wide);
            Polyhedron both = poly_conjoin(left, right);
            out.push_back(poly_project(both, target));
        }
    }
    return TransitionFormula(vars, std::move(out));
}

EntailmentResult tf_entails_witness(const TransitionFormula &f, const TransitionFormula &g) {
    check_same_vars(f, g);
    for (const auto &d : f.disjuncts()) {
        CoverageResult c = union_covers_witness(g.disjuncts(), d);
        if (!c.covered) return EntailmentResult{false, std::move(c.witness)};
    }
    return EntailmentResult{true, {}};
}

bool tf_entails(const TransitionFormula &f, const TransitionFormula &g) {
    return tf_entails_witness(f, g).holds;
}

TransitionFormula tf_subst(const TransitionFormula &g, const Substitution &sigma) {
    std::set<VarId> domain(sigma.target_variables().begin(), sigma.target_variables().end());
    std::set<VarId> gvars(g.variables().begin(), g.variables().end());
    if (domain != gvars)
        throw domain_error("substitution domain differs from formula variables");
    const std::vector<VarId> &xs = sigma.source_variables();
    std::vector<VarId> env = transition_environment(xs);
    std::vector<Polyhedron> out;
    for (const auto &d : g.disjuncts()) {
        std::vector<Constraint> cs;
        for (const auto &c : d.constraints())
            cs.push_back(Constraint{subst_apply(c.term, sigma), c.relation});
        out.emplace_back(env, std::move(cs));
    }
    return TransitionFormula(xs, std::move(out));
}

bool is_simulation(const Substitution &sigma, const TransitionFormula &f,
                   const TransitionFormula &g) {
    return is_simulation_witness(sigma, f, g).holds;
}

EntailmentResult is_simulation_witness(const Substitution &sigma, const TransitionFormula &f,
                                       const TransitionFormula &g) {
    std::set<VarId> src(sigma.source_variables().begin(), sigma.source_variables().end());
    std::set<VarId> fvars(f.variables().begin(), f.variables().end());
    if (src != fvars)
        throw domain_error("substitution source differs from simulatee variables");
    TransitionFormula image = tf_subst(g, sigma);
    if (image.variables() != f.variables())
        image = tf_rename(image, {}, f.variables());
    return tf_entails_witness(f, image);
}

StateFormula tf_pre(const TransitionFormula &f) {
    if (f.is_false()) return StateFormula(f.variables(), {});
    std::vector<Polyhedron> shadows;
    for (const auto &d : f.disjuncts()) shadows.push_back(poly_project(d, f.variables()));
    return StateFormula(f.variables(), {hull_union(shadows)});
}

StateFormula tf_post(const TransitionFormula &f) {
    if (f.is_false()) return StateFormula(f.variables(), {});
    std::vector<VarId> primed;
    std::map<VarId, VarId> down;
    for (const VarId &v : f.variables()) {
        primed.push_back(v.prime());
        down.emplace(v.prime(), v);
    }
    std::vector<Polyhedron> shadows;
    for (const auto &d : f.disjuncts())
        shadows.push_back(poly_rename(poly_project(d, primed), down, f.variables()));
    return StateFormula(f.variables(), {hull_union(shadows)});
}

VarId delta_var(const VarId &v) { return VarId("$d$" + v.name); }

Polyhedron tf_delta(const TransitionFormula &f) {
    std::vector<VarId> deltas;
    for (const VarId &v : f.variables()) deltas.push_back(delta_var(v));
    if (f.is_false()) return Polyhedron::empty(deltas);
    std::vector<VarId> wide = transition_environment(f.variables());
    wide.insert(wide.end(), deltas.begin(), deltas.end());
    std::vector<Polyhedron> shadows;
    for (const auto &d : f.disjuncts()) {
        std::vector<Constraint> cs = d.constraints();
        for (const VarId &v : f.variables()) {
            AffineTerm change = AffineTerm::variable(v.prime()) - AffineTerm::variable(v);
            cs.push_back(constraint_eq(AffineTerm::variable(delta_var(v)), change));
        }
        Polyhedron extended(wide, std::move(cs));
        shadows.push_back(poly_project(extended, deltas));
    }
    return hull_union(shadows);
}

TransitionFormula tf_power(const TransitionFormula &f, unsigned n) {
    TransitionFormula acc = tf_one(f.variables());
    for (unsigned i = 0; i < n; ++i) acc = tf_compose(acc, f);
    return acc;
}

TransitionFormula tf_restrict(const TransitionFormula &f, const std::vector<VarId> &sub_vars) {
    std::set<VarId> have(f.variables().begin(), f.variables().end());
    for (const VarId &v : sub_vars)
        if (!have.count(v))
            throw environment_error("restriction variable outside formula: " + v.str());
    std::vector<VarId> env = transition_environment(sub_vars);
    std::vector<Polyhedron> out;
    for (const auto &d : f.disjuncts()) {
        Polyhedron shadow = poly_project(d, env);
        // Re-order the environment to the canonical X, X' layout.
        out.push_back(poly_extend(shadow, env));
    }
    return TransitionFormula(sub_vars, std::move(out));
}

TransitionFormula tf_rename(const TransitionFormula &f,
                            const std::map<VarId, VarId> &var_renaming,
                            std::vector<VarId> new_vars) {
    std::map<VarId, VarId> full = var_renaming;
    for (const auto &[from, to] : var_renaming) full.emplace(from.prime(), to.prime());
    std::vector<VarId> env = transition_environment(new_vars);
    std::vector<Polyhedron> out;
    for (const auto &d : f.disjuncts()) out.push_back(poly_rename(d, full, env));
    return TransitionFormula(std::move(new_vars), std::move(out));
}

bool tf_equivalent(const TransitionFormula &f, const TransitionFormula &g) {
    return tf_entails(f, g) && tf_entails(g, f);
}

} // namespace polysum
