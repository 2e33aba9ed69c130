#include "polysum/iterate.hpp"

#include "polysum/error.hpp"

#include <algorithm>
#include <cassert>

namespace polysum {

namespace {

// Facets of a polyhedron as inequalities t <= b: equalities expand into two
// facets, ordered by first involved variable (environment order) then
// lexicographically.  Each facet is returned as (t, b) with t linear over the
// environment.
struct Facet {
    AffineTerm term; // linear, no constant
    Rational bound;
};

std::vector<Facet> facet_list(const Polyhedron &p) {
    struct Keyed {
        std::vector<Rational> row; // dense coefficients then constant
        std::size_t first_nonzero;
    };
    const auto &env = p.environment();
    std::vector<Keyed> rows;
    auto add = [&](const AffineTerm &term) {
        Keyed k;
        k.row.resize(env.size() + 1);
        k.first_nonzero = env.size();
        for (std::size_t i = 0; i < env.size(); ++i) {
            k.row[i] = term.coefficient(env[i]);
            if (!k.row[i].is_zero() && k.first_nonzero == env.size()) k.first_nonzero = i;
        }
        k.row[env.size()] = term.constant();
        rows.push_back(std::move(k));
    };
    for (const auto &c : p.constraints()) {
        if (c.term.is_constant()) continue;
        add(c.term);
        if (c.relation == Relation::EqZero) add(-c.term);
    }
    std::sort(rows.begin(), rows.end(), [](const Keyed &a, const Keyed &b) {
        if (a.first_nonzero != b.first_nonzero) return a.first_nonzero < b.first_nonzero;
        for (std::size_t i = 0; i < a.row.size(); ++i) {
            if (a.row[i] < b.row[i]) return true;
            if (b.row[i] < a.row[i]) return false;
        }
        return false;
    });
    // A stored row a.x + c >= 0 is the facet -a.x <= c.
    std::vector<Facet> facets;
    for (const auto &k : rows) {
        Facet f;
        for (std::size_t i = 0; i < env.size(); ++i)
            if (!k.row[i].is_zero()) f.term.set_coefficient(env[i], -k.row[i]);
        f.bound = k.row[env.size()];
        facets.push_back(std::move(f));
    }
    return facets;
}

Polyhedron state_poly_or(const StateFormula &s, const Polyhedron &fallback) {
    return s.disjuncts().empty() ? fallback : s.disjuncts().front();
}

} // namespace

VarId iteration_counter() { return VarId("$k"); }

Abstraction alpha_pga(const TransitionFormula &f) {
    const auto &vars = f.variables();
    std::vector<VarId> primed;
    std::map<VarId, VarId> up;
    for (const VarId &v : vars) {
        primed.push_back(v.prime());
        up.emplace(v, v.prime());
    }
    StateFormula pre = tf_pre(f);
    StateFormula post = tf_post(f);
    PolyCartFormula g{state_poly_or(pre, Polyhedron::empty(vars)),
                      poly_rename(state_poly_or(post, Polyhedron::empty(vars)), up, primed)};
    Abstraction a;
    a.guards = std::move(g);
    a.eta = Substitution::identity(vars);
    return a;
}

Abstraction alpha_lra(const TransitionFormula &f) {
    Abstraction a;
    if (f.is_false()) {
        LossyTranslation bot;
        bot.vars = f.variables();
        bot.bottom = true;
        a.lossy = std::move(bot);
        a.eta = Substitution::identity(f.variables());
        return a;
    }
    Polyhedron changes = poly_minimize(tf_delta(f));
    std::vector<Facet> facets = facet_list(changes);
    std::map<VarId, VarId> delta_to_var;
    for (const VarId &v : f.variables()) delta_to_var.emplace(delta_var(v), v);

    LossyTranslation lt;
    std::map<VarId, AffineTerm> eta_map;
    for (std::size_t i = 0; i < facets.size(); ++i) {
        VarId y("$y" + std::to_string(i));
        lt.vars.push_back(y);
        lt.bounds.push_back(facets[i].bound);
        eta_map.emplace(y, facets[i].term.rename(delta_to_var));
    }
    a.eta = Substitution(f.variables(), lt.vars, std::move(eta_map));
    a.lossy = std::move(lt);
    return a;
}

Abstraction alpha_product(const TransitionFormula &f) {
    Abstraction pga = alpha_pga(f);
    Abstraction lra = alpha_lra(f);
    Abstraction a;
    a.guards = std::move(pga.guards);
    a.lossy = lra.lossy;
    std::vector<VarId> targets = f.variables();
    std::map<VarId, AffineTerm> m;
    for (const VarId &v : f.variables()) m.emplace(v, AffineTerm::variable(v));
    if (!lra.lossy->bottom)
        for (const VarId &y : lra.lossy->vars) {
            targets.push_back(y);
            m.emplace(y, lra.eta.image(y));
        }
    a.eta = Substitution(f.variables(), std::move(targets), std::move(m));
    return a;
}

TransitionFormula star_pga_base(const PolyCartFormula &a, const std::vector<VarId> &vars) {
    std::vector<VarId> env = transition_environment(vars);
    std::vector<Constraint> cs = a.pre_guard.constraints();
    const auto &post = a.post_guard.constraints();
    cs.insert(cs.end(), post.begin(), post.end());
    Polyhedron taken(env, std::move(cs));
    TransitionFormula once(vars, {taken});
    return tf_plus(tf_one(vars), once);
}

Polyhedron star_lra_base(const LossyTranslation &a, const VarId &counter) {
    std::vector<VarId> env = transition_environment(a.vars);
    env.push_back(counter);
    std::vector<Constraint> cs;
    if (a.bottom) {
        for (const VarId &v : a.vars)
            cs.push_back(constraint_eq(AffineTerm::variable(v.prime()), AffineTerm::variable(v)));
        return Polyhedron(env, std::move(cs));
    }
    cs.push_back(Constraint{AffineTerm::variable(counter), Relation::GeqZero});
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
        // v' <= v + k*bound
        AffineTerm t = AffineTerm::variable(a.vars[i]) +
                       AffineTerm::variable(counter, a.bounds[i]) -
                       AffineTerm::variable(a.vars[i].prime());
        cs.push_back(Constraint{std::move(t), Relation::GeqZero});
    }
    return Polyhedron(env, std::move(cs));
}

TransitionFormula lift(const Substitution &eta, const TransitionFormula &base_result) {
    return tf_subst(base_result, eta);
}

TransitionFormula lift(const Abstraction &a, const TransitionFormula &base_result) {
    return lift(a.eta, base_result);
}

TransitionFormula star_pga(const TransitionFormula &f) {
    Abstraction a = alpha_pga(f);
    return lift(a, star_pga_base(*a.guards, f.variables()));
}

TransitionFormula star_lra(const TransitionFormula &f) {
    Abstraction a = alpha_lra(f);
    const LossyTranslation &lt = *a.lossy;
    VarId k = iteration_counter();
    Polyhedron pending = star_lra_base(lt, k);
    std::vector<VarId> abstract_env = transition_environment(lt.vars);
    Polyhedron closed = poly_project(pending, abstract_env);
    TransitionFormula base(lt.vars, {closed});
    return lift(a, base);
}

TransitionFormula star_combined(const TransitionFormula &f) {
    const auto &vars = f.variables();
    if (f.is_false()) return tf_one(vars);

    Abstraction a = alpha_lra(f);
    const LossyTranslation &lt = *a.lossy;
    VarId k = iteration_counter();
    std::vector<VarId> env_k = transition_environment(vars);
    env_k.push_back(k);

    // Recurrences with the counter shared, already substituted into X.
    std::vector<Constraint> rec;
    rec.push_back(Constraint{AffineTerm::variable(k), Relation::GeqZero});
    for (std::size_t i = 0; i < lt.vars.size(); ++i) {
        AffineTerm t = a.eta.image(lt.vars[i]);
        AffineTerm tp = a.eta.image(lt.vars[i].prime());
        rec.push_back(Constraint{t + AffineTerm::variable(k, lt.bounds[i]) - tp,
                                 Relation::GeqZero});
    }
    Polyhedron exp_lra(env_k, std::move(rec));

    // Guard side, split on whether at least one iteration happens.
    std::vector<Constraint> zero_case;
    zero_case.push_back(Constraint{AffineTerm::variable(k), Relation::EqZero});
    for (const VarId &v : vars)
        zero_case.push_back(
            constraint_eq(AffineTerm::variable(v.prime()), AffineTerm::variable(v)));
    Polyhedron d0(env_k, std::move(zero_case));

    Abstraction guards = alpha_pga(f);
    std::vector<Constraint> pos_case;
    pos_case.push_back(
        Constraint{AffineTerm::variable(k) - AffineTerm(Rational(1)), Relation::GeqZero});
    for (const auto &c : guards.guards->pre_guard.constraints()) pos_case.push_back(c);
    for (const auto &c : guards.guards->post_guard.constraints()) pos_case.push_back(c);
    Polyhedron d1(env_k, std::move(pos_case));

    std::vector<VarId> env = transition_environment(vars);
    TransitionFormula result = tf_zero(vars);
    for (const Polyhedron &d : {d0, d1}) {
        Polyhedron joint = poly_conjoin(poly_extend(d, env_k), exp_lra);
        Polyhedron shadow = poly_project(joint, env);
        result = tf_plus(result, TransitionFormula(vars, {shadow}));
    }
    return result;
}

bool abstraction_simulates(const TransitionFormula &f, const Abstraction &a) {
    const auto &vars = f.variables();
    if (a.lossy) {
        TransitionFormula abstract =
            a.lossy->bottom
                ? tf_zero(a.lossy->vars)
                : [&] {
                      std::vector<Constraint> cs;
                      for (std::size_t i = 0; i < a.lossy->vars.size(); ++i) {
                          const VarId &y = a.lossy->vars[i];
                          cs.push_back(Constraint{AffineTerm::variable(y) +
                                                      AffineTerm(a.lossy->bounds[i]) -
                                                      AffineTerm::variable(y.prime()),
                                                  Relation::GeqZero});
                      }
                      std::vector<VarId> env = transition_environment(a.lossy->vars);
                      return TransitionFormula(a.lossy->vars, {Polyhedron(env, std::move(cs))});
                  }();
        Substitution eta_lra = a.lossy->bottom ? a.eta : [&] {
            std::map<VarId, AffineTerm> m;
            for (const VarId &y : a.lossy->vars) m.emplace(y, a.eta.image(y));
            return Substitution(vars, a.lossy->vars, std::move(m));
        }();
        if (!is_simulation(eta_lra, f, abstract)) return false;
    }
    if (a.guards) {
        std::vector<VarId> env = transition_environment(vars);
        std::vector<Constraint> cs = a.guards->pre_guard.constraints();
        const auto &post = a.guards->post_guard.constraints();
        cs.insert(cs.end(), post.begin(), post.end());
        TransitionFormula abstract(vars, {Polyhedron(env, std::move(cs))});
        if (!is_simulation(Substitution::identity(vars), f, abstract)) return false;
    }
    return true;
}

} // namespace polysum
