// End-to-end acceptance suite.  Each criterion prints one PASS/FAIL line.

#include "polysum/cli.hpp"
#include "polysum/iterate.hpp"
#include "polysum/laws.hpp"
#include "polysum/parse.hpp"
#include "polysum/simcheck.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace polysum;
using namespace polysum::testing;

namespace {

std::string corpus(const std::string &name) { return std::string(CORPUS_DIR) + "/" + name; }

std::string slurp(const std::string &name) {
    std::ifstream in(corpus(name));
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Criterion {
    const char *label;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;

    explicit Criterion(const char *l) : label(l) {}
    void require(bool condition) { ok = ok && condition; }
    ~Criterion() {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        std::cout << "criterion " << label << ": " << (ok ? "PASS" : "FAIL") << " ("
                  << ms / 1000.0 << " s)" << std::endl;
    }
};

VarId I("i"), X("x"), Y("y");

TransitionFormula g1_summary_expected() {
    std::vector<VarId> env = transition_environment({I});
    Polyhedron stay(env,
                    {Constraint{make_term({{I.prime(), 1}, {I, -1}}), Relation::EqZero}});
    Polyhedron go(env,
                  {Constraint{make_term({{I.prime(), 1}, {I, -1}}, -1), Relation::GeqZero},
                   Constraint{make_term({{I, -1}}, 4), Relation::GeqZero},
                   Constraint{make_term({{I.prime(), -1}}, 5), Relation::GeqZero}});
    return TransitionFormula({I}, {stay, go});
}

TransitionFormula g2_summary_expected() {
    std::vector<VarId> env = transition_environment({X, Y});
    Polyhedron stay(env,
                    {Constraint{make_term({{X.prime(), 1}, {X, -1}}), Relation::EqZero},
                     Constraint{make_term({{Y.prime(), 1}, {Y, -1}}), Relation::EqZero}});
    Polyhedron go(env,
                  {Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1), Relation::GeqZero},
                   Constraint{make_term({{X, -1}}, 4), Relation::GeqZero},
                   Constraint{make_term({{X.prime(), -1}}, 5), Relation::GeqZero},
                   Constraint{make_term({{Y, 1}, {Y.prime(), -1}, {X.prime(), 5}, {X, -5}}),
                              Relation::GeqZero}});
    return TransitionFormula({X, Y}, {stay, go});
}

} // namespace

TEST_CASE("criterion 1: loop summary table reproduction") {
    Criterion crit("1 (summary table)");

    // Loop bodies parsed from text, strict guards integer-tightened.
    TransitionFormula g1 = parse_formula_file(slurp("g1.formula")).formula;
    TransitionFormula g2 = parse_formula_file(slurp("g2.formula")).formula;
    crit.require(tf_equivalent(g1, make_g1()));
    crit.require(tf_equivalent(g2, make_g2()));

    // The same bodies arise from the parsed programs' loop paths.
    FlowGraph p2g = program_to_flowgraph(parse_program(slurp("p2.imp")));
    TransitionFormula body2 = tf_compose(tf_compose(p2g.weight("3", "4"), p2g.weight("4", "5")),
                                         p2g.weight("5", "3"));
    crit.require(tf_equivalent(body2, g2));
    FlowGraph p1g = program_to_flowgraph(parse_program(slurp("p1.imp")));
    TransitionFormula body1 = tf_compose(p1g.weight("2", "3"), p1g.weight("3", "2"));
    crit.require(tf_equivalent(body1, g1));

    // Change hulls.
    VarId di = delta_var(I), dx = delta_var(X), dy = delta_var(Y);
    crit.require(tf_delta(g1).set_equal(
        Polyhedron({di}, {Constraint{make_term({{di, 1}}, -1), Relation::EqZero}})));
    crit.require(tf_delta(g2).set_equal(Polyhedron(
        {dx, dy}, {Constraint{make_term({{dx, 1}}, -1), Relation::EqZero},
                   Constraint{make_term({{dy, -1}}, 5), Relation::GeqZero}})));

    // Recurrences: i' = i + 1 (as a pair of bounds) and
    // x' = x + 1, y' <= y + 5.
    auto recurrences = [](const TransitionFormula &f) {
        Abstraction a = alpha_lra(f);
        std::vector<std::pair<AffineTerm, Rational>> out;
        for (std::size_t k = 0; k < a.lossy->vars.size(); ++k)
            out.emplace_back(a.eta.image(a.lossy->vars[k]), a.lossy->bounds[k]);
        return out;
    };
    auto has = [](const std::vector<std::pair<AffineTerm, Rational>> &rs, const AffineTerm &t,
                  long b) {
        for (const auto &r : rs)
            if (r.first == t && r.second == Rational(b)) return true;
        return false;
    };
    auto r1 = recurrences(g1);
    crit.require(r1.size() == 2 && has(r1, make_term({{I, 1}}), 1) &&
                 has(r1, make_term({{I, -1}}), -1));
    auto r2 = recurrences(g2);
    crit.require(r2.size() == 3 && has(r2, make_term({{X, 1}}), 1) &&
                 has(r2, make_term({{X, -1}}), -1) && has(r2, make_term({{Y, 1}}), 5));

    // Pre- and post-conditions (post renamed down to unprimed variables).
    crit.require(tf_pre(g1).disjuncts()[0].set_equal(
        Polyhedron({I}, {Constraint{make_term({{I, -1}}, 4), Relation::GeqZero}})));
    crit.require(tf_post(g1).disjuncts()[0].set_equal(
        Polyhedron({I}, {Constraint{make_term({{I, -1}}, 5), Relation::GeqZero}})));
    crit.require(tf_pre(g2).disjuncts()[0].set_equal(
        Polyhedron({X, Y}, {Constraint{make_term({{X, -1}}, 4), Relation::GeqZero}})));
    crit.require(tf_post(g2).disjuncts()[0].set_equal(
        Polyhedron({X, Y}, {Constraint{make_term({{X, -1}}, 5), Relation::GeqZero}})));

    // Combined loop summaries under the rational reading of the counter.
    crit.require(tf_equivalent(star_combined(g1), g1_summary_expected()));
    crit.require(tf_equivalent(star_combined(g2), g2_summary_expected()));

    CHECK(crit.ok);
}

TEST_CASE("criterion 2: summary robustness of the overview pair") {
    Criterion crit("2 (overview robustness)");
    TransitionFormula g1 = make_g1();
    TransitionFormula g2 = make_g2();
    TransitionFormula s1 = star_combined(g1);
    TransitionFormula s2 = star_combined(g2);

    crit.require(is_simulation(make_sigma_ix(), s2, s1));

    // Projecting y, y' out of the refined summary and renaming x to i gives
    // exactly the coarse summary.
    TransitionFormula projected = tf_restrict(s2, {X});
    TransitionFormula renamed = tf_rename(projected, {{X, I}}, {I});
    crit.require(tf_equivalent(renamed, s1));

    CHECK(crit.ok);
}

TEST_CASE("criterion 3: elimination-order invariance") {
    Criterion crit("3 (order invariance)");
    for (const char *file : {"p1.graph", "nested.graph", "seqloops.graph"}) {
        FlowGraph g = parse_graph(slurp(file));
        std::vector<Vertex> rest;
        for (const Vertex &v : g.vertices())
            if (v != g.root()) rest.push_back(v);
        std::sort(rest.begin(), rest.end());
        std::vector<SummaryAssignment> results;
        int admissible = 0;
        do {
            if (!is_admissible_order(g, rest)) continue;
            ++admissible;
            results.push_back(summarize_with_order(g, rest));
        } while (std::next_permutation(rest.begin(), rest.end()));
        crit.require(admissible >= 2);
        for (std::size_t k = 1; k < results.size(); ++k)
            for (const Vertex &v : g.vertices())
                crit.require(
                    tf_equivalent(results[0].summary.at(v), results[k].summary.at(v)));
    }
    CHECK(crit.ok);
}

TEST_CASE("criterion 4: summary robustness end to end") {
    Criterion crit("4 (robust summarization)");
    struct Pair {
        const char *g, *h, *map;
    };
    for (const Pair &p : {Pair{"p2.graph", "p1.graph", "fig.map"},
                          Pair{"phase_split.graph", "phase_orig.graph", "phase.map"},
                          Pair{"unroll_unrolled.graph", "unroll_orig.graph", "unroll.map"}}) {
        FlowGraph g = parse_graph(slurp(p.g));
        FlowGraph h = parse_graph(slurp(p.h));
        StutterMap m = parse_map(slurp(p.map), g.variables(), h.variables());
        crit.require(check_stutter_sim(g, h, m).ok);
        crit.require(check_loop_preserving(g, h, m).ok);
        crit.require(verify_robustness(g, h, m).verified);
    }
    CHECK(crit.ok);
}

TEST_CASE("criterion 5: iteration-operator law suite") {
    Criterion crit("5 (operator laws, 200 samples x 3 operators)");
    RandomFormulaSpec shape;
    shape.var_count = 3;
    shape.max_disjuncts = 2;
    shape.coeff_range = 3;
    for (const char *domain : {"pga", "lra", "combined"}) {
        LawReport report = run_law_suite(star_by_name(domain), shape, 200, 9001);
        crit.require(report.ok());
        for (const auto &f : report.failures)
            std::cout << "  [" << domain << "] " << f.law << " failed on " << f.formula
                      << "\n";
    }
    CHECK(crit.ok);
}

TEST_CASE("criterion 6: lifting preserves simulations") {
    Criterion crit("6 (lifting robustness, 100 instances x 3 operators)");
    RandomFormulaSpec shape;
    shape.var_count = 2;
    shape.coeff_range = 3;
    for (const char *domain : {"pga", "lra", "combined"}) {
        LawReport report = run_robustness_suite(star_by_name(domain), shape, 100, 4242);
        crit.require(report.ok());
        for (const auto &f : report.failures)
            std::cout << "  [" << domain << "] " << f.law << " failed on " << f.formula
                      << "\n";
    }
    CHECK(crit.ok);
}

TEST_CASE("criterion 7: oracle equivalence") {
    Criterion crit("7 (grid oracles)");
    std::mt19937_64 rng(190733);
    auto draw = [&](long lo, long hi) {
        return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
    };
    VarId Z("z");

    // Projection of random 3-variable polyhedra versus extension search.
    for (int inst = 0; inst < 10; ++inst) {
        std::vector<Constraint> cs;
        int n = static_cast<int>(draw(1, 4));
        for (int c = 0; c < n; ++c) {
            AffineTerm t;
            for (const VarId &v : {X, Y, Z}) t.set_coefficient(v, Rational(draw(-3, 3)));
            t.set_constant(Rational(draw(-3, 3)));
            cs.push_back(Constraint{t, draw(0, 5) == 0 ? Relation::EqZero
                                                       : Relation::GeqZero});
        }
        Polyhedron p({X, Y, Z}, cs);
        Polyhedron shadow = poly_project(p, {X, Y});
        for_each_grid_point({X, Y}, -5, 5, [&](const std::map<VarId, Rational> &pt) {
            bool extends = false;
            for (long z = -50; z <= 50 && !extends; ++z) {
                auto full = pt;
                full[Z] = Rational(z);
                extends = satisfies(p, full);
            }
            if (extends) crit.require(satisfies(shadow, pt));
            if (satisfies(shadow, pt) && !extends) {
                std::vector<LpConstraint> ground = p.lp_constraints();
                for (const auto &[v, r] : pt)
                    ground.push_back(LpConstraint{AffineTerm::variable(v) - AffineTerm(r),
                                                  true});
                crit.require(lp_feasible_point(ground).has_value());
            }
        });
    }

    // Composition versus integer-middle search (soundness direction) on the
    // two-counter body, where middles are determined.
    {
        TransitionFormula g2 = make_g2();
        TransitionFormula g22 = tf_compose(g2, g2);
        for (long x0 = 0; x0 <= 3; ++x0)
            for (long y0 = 0; y0 <= 6; ++y0) {
                long x2 = x0 + 2, y2 = y0 + 2 * x0 + 3;
                crit.require(satisfies_formula(
                    g22, transition_point({X, Y}, {Rational(x0), Rational(y0)},
                                          {Rational(x2), Rational(y2)})));
            }
    }

    // Coverage versus the grid: positives have all grid points covered,
    // negatives carry a verified witness.
    for (int inst = 0; inst < 20; ++inst) {
        auto rand_poly = [&]() {
            std::vector<Constraint> cs;
            int n = static_cast<int>(draw(1, 3));
            for (int c = 0; c < n; ++c) {
                AffineTerm t;
                t.set_coefficient(X, Rational(draw(-3, 3)));
                t.set_coefficient(Y, Rational(draw(-3, 3)));
                t.set_constant(Rational(draw(-3, 3)));
                cs.push_back(Constraint{t, Relation::GeqZero});
            }
            return Polyhedron({X, Y}, cs);
        };
        std::vector<Polyhedron> ps{rand_poly(), rand_poly()};
        Polyhedron q = rand_poly();
        CoverageResult r = union_covers_witness(ps, q);
        if (r.covered) {
            for_each_grid_point({X, Y}, -6, 6, [&](const std::map<VarId, Rational> &pt) {
                if (!satisfies(q, pt)) return;
                crit.require(satisfies(ps[0], pt) || satisfies(ps[1], pt));
            });
        } else {
            crit.require(satisfies(q, r.witness));
            crit.require(!satisfies(ps[0], r.witness) && !satisfies(ps[1], r.witness));
        }
    }
    CHECK(crit.ok);
}

TEST_CASE("criterion 8: negative controls") {
    Criterion crit("8 (negative controls)");

    // Irreducible input is rejected without --force.
    {
        std::ostringstream out, err;
        int code = run_cli({"summarize", corpus("irreducible.graph")}, out, err);
        crit.require(code == 2);
        crit.require(err.str().find("irreducible") != std::string::npos);
        std::ostringstream out2, err2;
        crit.require(run_cli({"summarize", "--force", corpus("irreducible.graph")}, out2,
                             err2) == 0);
    }

    // A deliberately broken map is refuted with a verified counterexample.
    {
        FlowGraph g = parse_graph(slurp("p2.graph"));
        FlowGraph h = parse_graph(slurp("p1.graph"));
        StutterMap m = parse_map(slurp("fig_broken.map"), g.variables(), h.variables());
        StutterCheck sim = check_stutter_sim(g, h, m);
        crit.require(!sim.ok);
        if (!sim.ok) {
            const TransitionFormula &w =
                g.weight(sim.failing_edge.first, sim.failing_edge.second);
            crit.require(satisfies_formula(w, sim.witness));
            const Vertex hu = m.vertex_map.at(sim.failing_edge.first);
            const Vertex hv = m.vertex_map.at(sim.failing_edge.second);
            if (h.has_edge(hu, hv))
                crit.require(
                    !satisfies_formula(tf_subst(h.weight(hu, hv), m.f), sim.witness));
            if (hu == hv)
                crit.require(
                    !satisfies_formula(tf_subst(tf_one(h.variables()), m.f), sim.witness));
        }
        std::ostringstream out, err;
        crit.require(run_cli({"check-sim", corpus("p2.graph"), corpus("p1.graph"),
                              corpus("fig_broken.map")},
                             out, err) == 1);
    }
    CHECK(crit.ok);
}
