#include "polysum/cli.hpp"

#include "polysum/error.hpp"
#include "polysum/iterate.hpp"
#include "polysum/laws.hpp"
#include "polysum/parse.hpp"
#include "polysum/simcheck.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace polysum {

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Program and graph files share the CLI surface; sniff the leading keyword.
FlowGraph load_graph(const std::string &path) {
    std::string text = read_file(path);
    std::istringstream probe(text);
    std::string first;
    // Skip comment lines.
    std::string line;
    while (std::getline(probe, line)) {
        std::string stripped = line.substr(0, line.find('#'));
        std::istringstream ls(stripped);
        if (ls >> first) break;
    }
    if (first == "graph") return parse_graph(text);
    if (first == "vars") {
        Program p = parse_program(text);
        return program_to_flowgraph(p);
    }
    throw input_error(path + ": expected a 'graph' or 'vars' header");
}

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

int cmd_summarize(const std::string &path, bool show_order, bool force, std::ostream &out,
                  std::ostream &err) {
    FlowGraph g = load_graph(path);
    std::vector<Vertex> order;
    if (is_reducible(g)) {
        order = admissible_order(g);
    } else if (force) {
        out << "WARNING: irreducible graph; eliminating in reverse postorder.\n"
            << "WARNING: results are order-dependent and carry no robustness guarantee.\n";
        order = reverse_postorder_non_root(g);
    } else {
        err << path << ": graph is irreducible (no vertex dominates each cycle); "
            << "rerun with --force to eliminate in reverse postorder\n";
        return 2;
    }
    if (show_order) {
        out << "order:";
        for (const Vertex &v : order) out << " " << v;
        out << "\n";
    }
    SummaryAssignment s = summarize_with_order(g, order);
    for (const Vertex &v : s.vertices) out << v << ": " << s.summary.at(v).str() << "\n";
    return 0;
}

int cmd_star(const std::string &path, const std::string &domain, std::ostream &out) {
    FormulaFile f = parse_formula_file(read_file(path));
    StarFn star = star_by_name(domain);
    out << star(f.formula).str() << "\n";
    return 0;
}

int cmd_check_sim(const std::string &g_path, const std::string &h_path,
                  const std::string &map_path, bool loop_preserving, bool robustness,
                  std::ostream &out) {
    FlowGraph g = load_graph(g_path);
    FlowGraph h = load_graph(h_path);
    StutterMap m = parse_map(read_file(map_path), g.variables(), h.variables());

    StutterCheck sim = check_stutter_sim(g, h, m);
    if (!sim.ok) {
        out << "stuttering simulation: REFUTED at edge " << sim.failing_edge.first << " -> "
            << sim.failing_edge.second << "\n";
        if (!sim.witness.empty())
            out << "  counterexample point: " << point_str(sim.witness) << "\n";
        return 1;
    }
    out << "stuttering simulation: OK\n";
    if (!loop_preserving && !robustness) return 0;

    LoopCheck loops = check_loop_preserving(g, h, m);
    if (!loops.ok) {
        out << "loop preservation: REFUTED (" << loops.reason << ")\n";
        return 1;
    }
    out << "loop preservation: OK";
    if (!loops.cycle_total.empty()) {
        out << " (cycle counts:";
        for (const auto &[v, n] : loops.cycle_total) out << " " << v << "=" << n;
        out << ")";
    }
    out << "\n";
    if (!robustness) return 0;

    RobustnessCheck rc = verify_robustness(g, h, m);
    if (!rc.verified) {
        out << "summary robustness: REFUTED at vertex " << rc.vertex << "\n";
        out << "  source summary: " << rc.source_summary.str() << "\n";
        out << "  target summary: " << rc.target_summary.str() << "\n";
        if (!rc.witness.empty())
            out << "  separating point: " << point_str(rc.witness) << "\n";
        return 1;
    }
    out << "summary robustness: OK\n";
    return 0;
}

int cmd_laws(int samples, std::uint64_t seed, int vars, const std::string &domain,
             std::ostream &out) {
    RandomFormulaSpec shape;
    shape.var_count = vars;
    StarFn star = star_by_name(domain);
    LawReport report = run_law_suite(star, shape, samples, seed);
    out << "samples: " << report.samples << ", checks: " << report.checks << "\n";
    for (const auto &f : report.failures) {
        out << "FAIL " << f.law << "\n  formula: " << f.formula << "\n  " << f.detail << "\n";
    }
    if (report.ok()) {
        out << "all laws hold\n";
        return 0;
    }
    out << report.failures.size() << " law violations\n";
    return 1;
}

int cmd_eliminate(const std::string &path, const std::string &vertex, std::ostream &out) {
    FlowGraph g = load_graph(path);
    FlowGraph h = eliminate(g, vertex);
    out << h.str();
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Robust loop and program summaries over rational polyhedra"};
    app.require_subcommand(1);

    std::string path, g_path, h_path, map_path, vertex;
    std::string domain = "combined";
    bool show_order = false, force = false, loop_preserving = false, robustness = false;
    int samples = 50;
    std::uint64_t seed = 0;
    int vars = 2;

    CLI::App *summarize = app.add_subcommand("summarize", "Per-vertex program summaries");
    summarize->add_option("file", path, "program or graph file")->required();
    summarize->add_flag("--order", show_order, "print the elimination order");
    summarize->add_flag("--force", force, "eliminate even when irreducible");

    CLI::App *star = app.add_subcommand("star", "Apply an iteration operator to a formula");
    star->add_option("file", path, "formula file (vars ...; formula)")->required();
    star->add_option("--domain", domain, "pga, lra or combined");

    CLI::App *check = app.add_subcommand("check-sim", "Check simulations between flow graphs");
    check->add_option("graphG", g_path, "simulatee graph or program")->required();
    check->add_option("graphH", h_path, "simulator graph or program")->required();
    check->add_option("map", map_path, "vertex map and substitution")->required();
    check->add_flag("--loop-preserving", loop_preserving, "also check loop preservation");
    check->add_flag("--robustness", robustness, "also verify summary robustness");

    CLI::App *laws = app.add_subcommand("laws", "Run the iteration-operator law suites");
    laws->add_option("--samples", samples, "number of random formulas")
        ->check(CLI::PositiveNumber);
    laws->add_option("--seed", seed, "random seed");
    laws->add_option("--vars", vars, "variables per formula (1-3)");
    laws->add_option("--domain", domain, "pga, lra or combined");

    CLI::App *elim = app.add_subcommand("eliminate", "Apply one elimination step and print");
    elim->add_option("file", path, "program or graph file")->required();
    elim->add_option("vertex", vertex, "vertex to eliminate")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError &e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (summarize->parsed()) return cmd_summarize(path, show_order, force, out, err);
        if (star->parsed()) return cmd_star(path, domain, out);
        if (check->parsed())
            return cmd_check_sim(g_path, h_path, map_path, loop_preserving, robustness, out);
        if (laws->parsed()) {
            if (vars < 1 || vars > 3) {
                err << "--vars must be 1, 2 or 3\n";
                return 2;
            }
            return cmd_laws(samples, seed, vars, domain, out);
        }
        if (elim->parsed()) return cmd_eliminate(path, vertex, out);
    } catch (const parse_error &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "no subcommand given\n";
    return 2;
}

} // namespace polysum
