#include "polysum/laws.hpp"

#include "polysum/error.hpp"
#include "polysum/iterate.hpp"

#include <sstream>

namespace polysum {

namespace {

std::string point_str(const std::map<VarId, Rational> &point) {
    std::ostringstream os;
    bool first = true;
    for (const auto &[v, r] : point) {
        if (!first) os << ", ";
        os << v.str() << " = " << r.str();
        first = false;
    }
    return os.str();
}

std::vector<VarId> law_source_variables(int count) {
    static const char *names[] = {"a", "b", "c"};
    std::vector<VarId> vars;
    for (int i = 0; i < count; ++i) vars.emplace_back(names[i]);
    return vars;
}

TransitionFormula strengthen(const TransitionFormula &f, const Constraint &extra) {
    std::vector<Polyhedron> disjuncts;
    std::vector<VarId> env = f.environment();
    for (const auto &d : f.disjuncts()) {
        std::vector<Constraint> cs = d.constraints();
        cs.push_back(extra);
        disjuncts.emplace_back(env, std::move(cs));
    }
    return TransitionFormula(f.variables(), std::move(disjuncts));
}

void robustness_check(const StarFn &star, const RandomFormulaSpec &shape,
                      std::mt19937_64 &rng, LawReport &report) {
    TransitionFormula g = gen_random_formula(shape, rng);
    std::vector<VarId> sources = law_source_variables(shape.var_count);
    Substitution sigma = gen_random_substitution(sources, g.variables(), shape.coeff_range, rng);
    TransitionFormula f = tf_subst(g, sigma);
    Constraint extra = gen_random_transition_constraint(sources, shape.coeff_range, rng);
    f = strengthen(f, extra);
    ++report.checks;
    EntailmentResult r = is_simulation_witness(sigma, star(f), star(g));
    if (!r.holds)
        report.failures.push_back(LawFailure{"simulation-preservation", f.str(),
                                             "sigma " + sigma.str() + "; target " + g.str() +
                                                 "; separating point " + point_str(r.witness)});
}

} // namespace

StarFn star_by_name(const std::string &domain) {
    if (domain == "pga") return [](const TransitionFormula &f) { return star_pga(f); };
    if (domain == "lra") return [](const TransitionFormula &f) { return star_lra(f); };
    if (domain == "combined")
        return [](const TransitionFormula &f) { return star_combined(f); };
    throw input_error("unknown domain: " + domain + " (expected pga, lra or combined)");
}

LawReport run_law_suite(const StarFn &star, const RandomFormulaSpec &shape, int samples,
                        std::uint64_t seed) {
    LawReport report;
    report.samples = samples;
    std::mt19937_64 rng(seed);
    TransitionFormula one = tf_one(gen_variables(shape.var_count));
    for (int i = 0; i < samples; ++i) {
        TransitionFormula f = gen_random_formula(shape, rng);
        TransitionFormula sf = star(f);
        auto fail = [&](const std::string &law, const EntailmentResult &r) {
            report.failures.push_back(
                LawFailure{law, f.str(), "separating point " + point_str(r.witness)});
        };

        ++report.checks;
        EntailmentResult r = tf_entails_witness(one, sf);
        if (!r.holds) fail("reflexivity", r);

        ++report.checks;
        r = tf_entails_witness(f, sf);
        if (!r.holds) fail("extensivity", r);

        ++report.checks;
        TransitionFormula twice = tf_compose(sf, sf);
        r = tf_entails_witness(twice, sf);
        if (!r.holds) fail("transitivity (star.star <= star)", r);
        ++report.checks;
        r = tf_entails_witness(sf, twice);
        if (!r.holds) fail("transitivity (star <= star.star)", r);

        ++report.checks;
        TransitionFormula bigger = tf_plus(f, gen_random_formula(shape, rng));
        r = tf_entails_witness(sf, star(bigger));
        if (!r.holds) fail("monotonicity", r);

        for (unsigned n = 2; n <= 3; ++n) {
            ++report.checks;
            r = tf_entails_witness(star(tf_power(f, n)), sf);
            if (!r.holds) fail("unrolling n=" + std::to_string(n), r);
        }

        robustness_check(star, shape, rng, report);
    }
    return report;
}

LawReport run_robustness_suite(const StarFn &star, const RandomFormulaSpec &shape, int samples,
                               std::uint64_t seed) {
    LawReport report;
    report.samples = samples;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) robustness_check(star, shape, rng, report);
    return report;
}

} // namespace polysum
