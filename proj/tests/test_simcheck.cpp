#include "polysum/simcheck.hpp"

#include "polysum/error.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>

using namespace polysum;
using namespace polysum::testing;

namespace {

VarId I("i"), J("j"), X("x"), Y("y");

TransitionFormula tf1(const std::vector<VarId> &vars, std::vector<Constraint> cs) {
    std::vector<VarId> env = transition_environment(vars);
    return TransitionFormula(vars, {Polyhedron(env, std::move(cs))});
}

Constraint frame(const VarId &v) {
    return Constraint{make_term({{v.prime(), 1}, {v, -1}}), Relation::EqZero};
}

FlowGraph upper_graph() {
    std::vector<VarId> vars{I};
    std::map<Edge, TransitionFormula> edges;
    edges.emplace(Edge{"A", "B"},
                  tf1(vars, {Constraint{make_term({{I.prime(), 1}}, -1), Relation::EqZero}}));
    edges.emplace(Edge{"B", "C"},
                  tf1(vars, {Constraint{make_term({{I, -1}}, 4), Relation::GeqZero}, frame(I)}));
    edges.emplace(Edge{"C", "B"},
                  tf1(vars, {Constraint{make_term({{I.prime(), 1}, {I, -1}}, -1),
                             Relation::EqZero}}));
    edges.emplace(Edge{"B", "D"},
                  tf1(vars, {Constraint{make_term({{I, 1}}, -5), Relation::GeqZero}, frame(I)}));
    return FlowGraph("p1", vars, {"A", "B", "C", "D"}, "A", std::move(edges));
}

FlowGraph lower_graph() {
    std::vector<VarId> vars{X, Y};
    std::map<Edge, TransitionFormula> edges;
    edges.emplace(Edge{"1", "2"},
                  tf1(vars, {Constraint{make_term({{X.prime(), 1}}, -1), Relation::EqZero},
                             frame(Y)}));
    edges.emplace(Edge{"2", "3"},
                  tf1(vars, {frame(X), Constraint{make_term({{Y.prime(), 1}}),
                                                  Relation::EqZero}}));
    edges.emplace(Edge{"3", "4"},
                  tf1(vars, {Constraint{make_term({{X, -1}}, 4), Relation::GeqZero}, frame(X),
                             frame(Y)}));
    edges.emplace(Edge{"4", "5"},
                  tf1(vars, {Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1),
                             Relation::EqZero},
                             frame(Y)}));
    edges.emplace(Edge{"5", "3"},
                  tf1(vars, {frame(X), Constraint{make_term({{Y.prime(), 1}, {Y, -1}, {X, -1}}),
                                                  Relation::EqZero}}));
    edges.emplace(Edge{"3", "6"},
                  tf1(vars, {Constraint{make_term({{X, 1}}, -5), Relation::GeqZero}, frame(X),
                             frame(Y)}));
    return FlowGraph("p2", vars, {"1", "2", "3", "4", "5", "6"}, "1", std::move(edges));
}

StutterMap figure_map() {
    StutterMap m;
    m.vertex_map = {{"1", "A"}, {"2", "B"}, {"3", "B"}, {"4", "C"}, {"5", "B"}, {"6", "D"}};
    std::map<VarId, AffineTerm> sub;
    sub.emplace(I, AffineTerm::variable(X));
    m.f = Substitution({X, Y}, {I}, std::move(sub));
    return m;
}

// The loop-splitting pair: one self-loop a+b against two phased self-loops.
TransitionFormula phase_a() {
    std::vector<VarId> vars{X, Y};
    return tf1(vars, {Constraint{make_term({{X, -1}}, 49), Relation::GeqZero},
                      Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1), Relation::EqZero},
                      frame(Y)});
}

TransitionFormula phase_b() {
    std::vector<VarId> vars{X, Y};
    return tf1(vars, {Constraint{make_term({{X, 1}}, -50), Relation::GeqZero},
                      Constraint{make_term({{X, -1}}, 99), Relation::GeqZero},
                      Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1), Relation::EqZero},
                      Constraint{make_term({{Y.prime(), 1}, {Y, -1}}, -1), Relation::EqZero}});
}

FlowGraph phase_split_graph() {
    std::vector<VarId> vars{X, Y};
    std::map<Edge, TransitionFormula> edges;
    edges.emplace(Edge{"u", "u"}, phase_a());
    edges.emplace(Edge{"u", "v"}, tf_one(vars));
    edges.emplace(Edge{"v", "v"}, phase_b());
    return FlowGraph("split", vars, {"u", "v"}, "u", std::move(edges));
}

FlowGraph phase_orig_graph() {
    std::vector<VarId> vars{X, Y};
    std::map<Edge, TransitionFormula> edges;
    edges.emplace(Edge{"s", "s"}, tf_plus(phase_a(), phase_b()));
    return FlowGraph("orig", vars, {"s"}, "s", std::move(edges));
}

StutterMap phase_map() {
    StutterMap m;
    m.vertex_map = {{"u", "s"}, {"v", "s"}};
    m.f = Substitution::identity({X, Y});
    return m;
}

// The unrolling pair: a two-step cycle plus a leftover edge against one
// self-loop.
TransitionFormula unroll_a() {
    std::vector<VarId> vars{X};
    return tf1(vars, {Constraint{make_term({{X, -1}}, 99), Relation::GeqZero},
                      Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1), Relation::EqZero}});
}

FlowGraph unrolled_graph() {
    std::vector<VarId> vars{X};
    std::map<Edge, TransitionFormula> edges;
    edges.emplace(Edge{"u", "v"}, unroll_a());
    edges.emplace(Edge{"v", "u"}, unroll_a());
    edges.emplace(Edge{"u", "w"}, unroll_a());
    return FlowGraph("unrolled", vars, {"u", "v", "w"}, "u", std::move(edges));
}

FlowGraph rolled_graph() {
    std::vector<VarId> vars{X};
    std::map<Edge, TransitionFormula> edges;
    edges.emplace(Edge{"s", "s"}, unroll_a());
    return FlowGraph("rolled", vars, {"s"}, "s", std::move(edges));
}

StutterMap unroll_map() {
    StutterMap m;
    m.vertex_map = {{"u", "s"}, {"v", "s"}, {"w", "s"}};
    m.f = Substitution::identity({X});
    return m;
}

} // namespace

TEST_CASE("stuttering simulation on the figure pair") {
    FlowGraph g = lower_graph();
    FlowGraph h = upper_graph();
    StutterMap m = figure_map();

    StutterCheck sim = check_stutter_sim(g, h, m);
    REQUIRE(sim.ok);
    CHECK(sim.tags.at({"3", "4"}) == EdgeTag::Match);
    CHECK(sim.tags.at({"4", "5"}) == EdgeTag::Match);
    CHECK(sim.tags.at({"5", "3"}) == EdgeTag::Stutter);
    CHECK(sim.tags.at({"2", "3"}) == EdgeTag::Stutter);
    CHECK(sim.tags.at({"1", "2"}) == EdgeTag::Match);
    CHECK(sim.tags.at({"3", "6"}) == EdgeTag::Match);
}

TEST_CASE("identity map simulates itself with all-match tags") {
    FlowGraph g = upper_graph();
    StutterMap m;
    for (const Vertex &v : g.vertices()) m.vertex_map[v] = v;
    m.f = Substitution::identity({I});
    StutterCheck sim = check_stutter_sim(g, g, m);
    REQUIRE(sim.ok);
    for (const auto &[e, w] : g.edges()) {
        EdgeTag t = sim.tags.at(e);
        CHECK((t == EdgeTag::Match || t == EdgeTag::Either));
    }
}

TEST_CASE("broken substitution is refuted with a verified witness") {
    FlowGraph g = lower_graph();
    FlowGraph h = upper_graph();
    StutterMap m = figure_map();
    std::map<VarId, AffineTerm> sub;
    sub.emplace(I, AffineTerm::variable(Y));
    m.f = Substitution({X, Y}, {I}, std::move(sub));

    StutterCheck sim = check_stutter_sim(g, h, m);
    REQUIRE(!sim.ok);
    // The witness satisfies the edge weight but not the mapped target.
    const TransitionFormula &w = g.weight(sim.failing_edge.first, sim.failing_edge.second);
    CHECK(satisfies_formula(w, sim.witness));
    const Vertex hu = m.vertex_map.at(sim.failing_edge.first);
    const Vertex hv = m.vertex_map.at(sim.failing_edge.second);
    if (h.has_edge(hu, hv)) {
        TransitionFormula image = tf_subst(h.weight(hu, hv), m.f);
        CHECK(!satisfies_formula(image, sim.witness));
    }
}

TEST_CASE("loop preservation on the figure pair") {
    FlowGraph g = lower_graph();
    FlowGraph h = upper_graph();
    LoopCheck loops = check_loop_preserving(g, h, figure_map());
    REQUIRE(loops.ok);
    REQUIRE(loops.cycle_total.count("3"));
    CHECK(loops.cycle_total.at("3") == 1);
    CHECK(loops.distances.at("3").at("3") == 0);
    CHECK(loops.distances.at("3").at("4") == 1);
    CHECK(loops.distances.at("3").at("5") == 1);
}

TEST_CASE("robustness verification on the figure pair") {
    FlowGraph g = lower_graph();
    FlowGraph h = upper_graph();
    RobustnessCheck rc = verify_robustness(g, h, figure_map());
    CHECK(rc.verified);
}

TEST_CASE("every corpus graph simulates itself") {
    std::vector<FlowGraph> graphs{upper_graph(), lower_graph(), phase_orig_graph(),
                                  phase_split_graph(), rolled_graph(), unrolled_graph()};
    for (const FlowGraph &g : graphs) {
        CAPTURE(g.name());
        StutterMap m;
        for (const Vertex &v : g.vertices()) m.vertex_map[v] = v;
        m.f = Substitution::identity(g.variables());
        CHECK(check_stutter_sim(g, g, m).ok);
        CHECK(check_loop_preserving(g, g, m).ok);
        CHECK(verify_robustness(g, g, m).verified);
    }
}

TEST_CASE("loop splitting verifies") {
    FlowGraph g = phase_split_graph();
    FlowGraph h = phase_orig_graph();
    StutterMap m = phase_map();
    StutterCheck sim = check_stutter_sim(g, h, m);
    REQUIRE(sim.ok);
    CHECK(sim.tags.at({"u", "v"}) == EdgeTag::Stutter);
    LoopCheck loops = check_loop_preserving(g, h, m);
    REQUIRE(loops.ok);
    CHECK(loops.cycle_total.at("u") == 1);
    CHECK(loops.cycle_total.at("v") == 1);
    CHECK(verify_robustness(g, h, m).verified);
}

TEST_CASE("loop unrolling verifies with cycle count two") {
    FlowGraph g = unrolled_graph();
    FlowGraph h = rolled_graph();
    StutterMap m = unroll_map();
    LoopCheck loops = check_loop_preserving(g, h, m);
    REQUIRE(loops.ok);
    CHECK(loops.cycle_total.at("u") == 2);
    CHECK(verify_robustness(g, h, m).verified);
}

TEST_CASE("collapsing a nest onto one header violates non-nesting") {
    std::vector<VarId> vars{X};
    std::map<Edge, TransitionFormula> ge;
    ge.emplace(Edge{"r", "a"},
               tf1(vars, {Constraint{make_term({{X.prime(), 1}}), Relation::EqZero}}));
    ge.emplace(Edge{"a", "b"},
               tf1(vars, {Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1),
                          Relation::EqZero}}));
    ge.emplace(Edge{"b", "b"},
               tf1(vars, {Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1),
                          Relation::EqZero}}));
    ge.emplace(Edge{"b", "a"}, tf_one(vars));
    FlowGraph g("nest", vars, {"r", "a", "b"}, "r", std::move(ge));

    std::map<Edge, TransitionFormula> he;
    he.emplace(Edge{"r2", "c"},
               tf1(vars, {Constraint{make_term({{X.prime(), 1}}), Relation::EqZero}}));
    he.emplace(Edge{"c", "c"},
               tf1(vars, {Constraint{make_term({{X.prime(), 1}, {X, -1}}, -1),
                          Relation::EqZero}}));
    FlowGraph h("flat", vars, {"r2", "c"}, "r2", std::move(he));

    StutterMap m;
    m.vertex_map = {{"r", "r2"}, {"a", "c"}, {"b", "c"}};
    m.f = Substitution::identity(vars);
    REQUIRE(check_stutter_sim(g, h, m).ok);
    LoopCheck loops = check_loop_preserving(g, h, m);
    CHECK(!loops.ok);
    CHECK(loops.reason.find("non-nesting") != std::string::npos);
}

TEST_CASE("negative controls produce grid-confirmed counterexamples") {
    int refuted = 0;
    auto confirm = [&](const FlowGraph &g, const FlowGraph &h, const StutterMap &m) {
        StutterCheck sim = check_stutter_sim(g, h, m);
        REQUIRE(!sim.ok);
        const TransitionFormula &w =
            g.weight(sim.failing_edge.first, sim.failing_edge.second);
        CHECK(satisfies_formula(w, sim.witness));
        const Vertex hu = m.vertex_map.at(sim.failing_edge.first);
        const Vertex hv = m.vertex_map.at(sim.failing_edge.second);
        bool outside_target = true;
        if (h.has_edge(hu, hv))
            outside_target = !satisfies_formula(tf_subst(h.weight(hu, hv), m.f), sim.witness);
        bool outside_identity = true;
        if (hu == hv)
            outside_identity =
                !satisfies_formula(tf_subst(tf_one(h.variables()), m.f), sim.witness);
        CHECK(outside_target);
        CHECK(outside_identity);
        ++refuted;
    };

    // Wrong projection on the figure pair.
    {
        StutterMap m = figure_map();
        std::map<VarId, AffineTerm> sub;
        sub.emplace(I, AffineTerm::variable(Y));
        m.f = Substitution({X, Y}, {I}, std::move(sub));
        confirm(lower_graph(), upper_graph(), m);
    }
    // Vertex map that points the loop body at the exit.
    {
        StutterMap m = figure_map();
        m.vertex_map["4"] = "D";
        confirm(lower_graph(), upper_graph(), m);
    }
    // Splitting against a weakened original that lost one phase.
    {
        std::vector<VarId> vars{X, Y};
        std::map<Edge, TransitionFormula> he;
        he.emplace(Edge{"s", "s"}, phase_a());
        FlowGraph weak("weak", vars, {"s"}, "s", std::move(he));
        confirm(phase_split_graph(), weak, phase_map());
    }
    CHECK(refuted == 3);
}

TEST_CASE("composition of loop-preserving maps stays loop-preserving") {
    FlowGraph g = lower_graph();
    FlowGraph h = upper_graph();
    StutterMap m1 = figure_map();

    // Rename the upper graph's variable i to j.
    std::map<VarId, VarId> ren{{I, J}};
    std::map<Edge, TransitionFormula> edges;
    for (const auto &[e, w] : h.edges()) edges.emplace(e, tf_rename(w, ren, {J}));
    FlowGraph k("p1j", {J}, h.vertices(), h.root(), std::move(edges));
    StutterMap m2;
    for (const Vertex &v : h.vertices()) m2.vertex_map[v] = v;
    std::map<VarId, AffineTerm> sub;
    sub.emplace(J, AffineTerm::variable(I));
    m2.f = Substitution({I}, {J}, std::move(sub));

    REQUIRE(check_loop_preserving(g, h, m1).ok);
    REQUIRE(check_loop_preserving(h, k, m2).ok);

    StutterMap composite;
    for (const auto &[u, v] : m1.vertex_map) composite.vertex_map[u] = m2.vertex_map.at(v);
    composite.f = compose(m2.f, m1.f);
    CHECK(check_loop_preserving(g, k, composite).ok);
    CHECK(verify_robustness(g, k, composite).verified);
}

TEST_CASE("distance labelling agrees with bounded cycle enumeration") {
    // Cross-check the labelling decision against direct enumeration of
    // primitive local cycles (walks re-using each edge at most twice).
    auto enumerate_check = [](const FlowGraph &g, const StutterMap &m,
                              const StutterCheck &sim) {
        std::vector<Edge> eithers;
        for (const auto &[e, t] : sim.tags)
            if (t == EdgeTag::Either) eithers.push_back(e);
        auto try_assignment = [&](const std::map<Edge, EdgeTag> &chosen) {
            for (const Vertex &v : g.vertices()) {
                std::set<Vertex> body = local_cycles(g, v);
                if (body.empty()) continue;
                const Vertex target = m.vertex_map.at(v);
                long expected = -1;
                bool consistent = true;
                // Walks from v back to v avoiding v in between.
                std::function<void(const Vertex &, std::map<Edge, int> &, long)> walk =
                    [&](const Vertex &at, std::map<Edge, int> &used, long acc) {
                        if (!consistent) return;
                        for (const Vertex &next : g.successors(at)) {
                            Edge e{at, next};
                            if (!body.count(next)) continue;
                            if (used[e] >= 2) continue;
                            EdgeTag t = sim.tags.at(e);
                            if (t == EdgeTag::Either) t = chosen.at(e);
                            long inc = 0;
                            if (t == EdgeTag::Match)
                                inc = m.vertex_map.at(at) == target ? 1 : 0;
                            if (next == v) {
                                long total = acc + inc;
                                if (expected < 0)
                                    expected = total;
                                else if (expected != total)
                                    consistent = false;
                                if (total < 1) consistent = false;
                                continue;
                            }
                            used[e]++;
                            walk(next, used, acc + inc);
                            used[e]--;
                        }
                    };
                std::map<Edge, int> used;
                walk(v, used, 0);
                if (!consistent || expected < 1) return false;
            }
            return true;
        };
        std::function<bool(std::size_t, std::map<Edge, EdgeTag> &)> search =
            [&](std::size_t idx, std::map<Edge, EdgeTag> &chosen) -> bool {
            if (idx == eithers.size()) return try_assignment(chosen);
            for (EdgeTag t : {EdgeTag::Match, EdgeTag::Stutter}) {
                chosen[eithers[idx]] = t;
                if (search(idx + 1, chosen)) return true;
            }
            chosen.erase(eithers[idx]);
            return false;
        };
        std::map<Edge, EdgeTag> chosen;
        return search(0, chosen);
    };

    struct Case {
        FlowGraph g, h;
        StutterMap m;
    };
    std::vector<Case> cases;
    cases.push_back({lower_graph(), upper_graph(), figure_map()});
    cases.push_back({phase_split_graph(), phase_orig_graph(), phase_map()});
    cases.push_back({unrolled_graph(), rolled_graph(), unroll_map()});
    // A pair with genuine Either edges: identity weights always allow both.
    {
        std::vector<VarId> vars{X};
        std::map<Edge, TransitionFormula> ge;
        ge.emplace(Edge{"u", "v"}, tf_one(vars));
        ge.emplace(Edge{"v", "u"}, tf_one(vars));
        FlowGraph g("idc", vars, {"u", "v"}, "u", std::move(ge));
        std::map<Edge, TransitionFormula> he;
        std::vector<VarId> env = transition_environment(vars);
        he.emplace(Edge{"s", "s"},
                   TransitionFormula(vars, {Polyhedron(
                       env, {Constraint{make_term({{X.prime(), 1}, {X, -1}}),
                             Relation::GeqZero}})}));
        FlowGraph h("ids", vars, {"s"}, "s", std::move(he));
        StutterMap m;
        m.vertex_map = {{"u", "s"}, {"v", "s"}};
        m.f = Substitution::identity(vars);
        cases.push_back({g, h, m});
    }

    for (const auto &c : cases) {
        StutterCheck sim = check_stutter_sim(c.g, c.h, c.m);
        REQUIRE(sim.ok);
        LoopCheck loops = check_loop_preserving(c.g, c.h, c.m);
        CHECK(loops.ok == enumerate_check(c.g, c.m, sim));
    }
}

TEST_CASE("map validation") {
    FlowGraph g = lower_graph();
    FlowGraph h = upper_graph();
    SUBCASE("partial vertex map") {
        StutterMap m = figure_map();
        m.vertex_map.erase("4");
        CHECK_THROWS_AS(check_stutter_sim(g, h, m), input_error);
    }
    SUBCASE("root must map to root") {
        StutterMap m = figure_map();
        m.vertex_map["1"] = "B";
        CHECK_THROWS_AS(check_stutter_sim(g, h, m), input_error);
    }
    SUBCASE("substitution must cover H's variables") {
        StutterMap m = figure_map();
        m.f = Substitution::identity({X, Y});
        CHECK_THROWS_AS(check_stutter_sim(g, h, m), input_error);
    }
}
