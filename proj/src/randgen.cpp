#include "polysum/randgen.hpp"

#include "polysum/error.hpp"

namespace polysum {

namespace {

// Engine output reduced by modulo: keeps draws identical across platforms
// (std::uniform_int_distribution is implementation-defined).
long draw(std::mt19937_64 &rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

} // namespace

std::vector<VarId> gen_variables(int count) {
    static const char *names[] = {"x", "y", "z"};
    if (count < 1 || count > 3) throw input_error("generator supports 1 to 3 variables");
    std::vector<VarId> vars;
    for (int i = 0; i < count; ++i) vars.emplace_back(names[i]);
    return vars;
}

AffineTerm gen_random_term(const std::vector<VarId> &vars, int coeff_range,
                           std::mt19937_64 &rng) {
    AffineTerm t;
    for (const VarId &v : vars)
        t.set_coefficient(v, Rational(draw(rng, -coeff_range, coeff_range)));
    t.set_constant(Rational(draw(rng, -coeff_range, coeff_range)));
    return t;
}

Constraint gen_random_transition_constraint(const std::vector<VarId> &vars, int coeff_range,
                                            std::mt19937_64 &rng) {
    AffineTerm t;
    for (const VarId &v : vars) {
        t.set_coefficient(v, Rational(draw(rng, -coeff_range, coeff_range)));
        t.set_coefficient(v.prime(), Rational(draw(rng, -coeff_range, coeff_range)));
    }
    t.set_constant(Rational(draw(rng, -coeff_range, coeff_range)));
    bool equality = draw(rng, 0, 4) == 0;
    return Constraint{t, equality ? Relation::EqZero : Relation::GeqZero};
}

TransitionFormula gen_random_formula(const RandomFormulaSpec &spec, std::mt19937_64 &rng) {
    std::vector<VarId> vars = gen_variables(spec.var_count);
    std::vector<VarId> env = transition_environment(vars);
    int ndisjuncts = static_cast<int>(draw(rng, 1, spec.max_disjuncts));
    std::vector<Polyhedron> disjuncts;
    for (int d = 0; d < ndisjuncts; ++d) {
        int ncons = static_cast<int>(draw(rng, 0, spec.max_constraints));
        std::vector<Constraint> cs;
        for (int c = 0; c < ncons; ++c)
            cs.push_back(gen_random_transition_constraint(vars, spec.coeff_range, rng));
        disjuncts.emplace_back(env, std::move(cs));
    }
    return TransitionFormula(vars, std::move(disjuncts));
}

TransitionFormula gen_random_formula(const RandomFormulaSpec &spec) {
    std::mt19937_64 rng(spec.seed);
    return gen_random_formula(spec, rng);
}

Substitution gen_random_substitution(const std::vector<VarId> &source,
                                     const std::vector<VarId> &target, int coeff_range,
                                     std::mt19937_64 &rng) {
    std::map<VarId, AffineTerm> m;
    for (const VarId &v : target) m.emplace(v, gen_random_term(source, coeff_range, rng));
    return Substitution(source, target, std::move(m));
}

} // namespace polysum
