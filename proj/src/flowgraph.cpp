#include "polysum/flowgraph.hpp"

#include "polysum/error.hpp"
#include "polysum/iterate.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace polysum {

FlowGraph::FlowGraph(std::string name, std::vector<VarId> vars, std::vector<Vertex> vertices,
                     Vertex root, std::map<Edge, TransitionFormula> edges, bool check_reachable)
    : name_(std::move(name)), vars_(std::move(vars)), vertices_(std::move(vertices)),
      root_(std::move(root)), edges_(std::move(edges)) {
    std::set<Vertex> vs(vertices_.begin(), vertices_.end());
    if (vs.size() != vertices_.size()) throw input_error("duplicate vertex in flow graph");
    if (!vs.count(root_)) throw input_error("root vertex missing from flow graph");
    for (auto it = edges_.begin(); it != edges_.end();) {
        const auto &[e, w] = *it;
        if (!vs.count(e.first) || !vs.count(e.second))
            throw input_error("edge endpoint missing from flow graph: " + e.first + " -> " +
                              e.second);
        if (w.variables() != vars_)
            throw environment_error("edge weight variables differ from graph variables");
        if (w.is_false())
            it = edges_.erase(it); // zero weights are implicit, never stored
        else
            ++it;
    }
    if (!check_reachable) return;
    std::set<Vertex> seen{root_};
    std::deque<Vertex> work{root_};
    while (!work.empty()) {
        Vertex u = work.front();
        work.pop_front();
        for (const auto &[e, w] : edges_)
            if (e.first == u && !seen.count(e.second)) {
                seen.insert(e.second);
                work.push_back(e.second);
            }
    }
    for (const Vertex &v : vertices_)
        if (!seen.count(v)) throw input_error("vertex unreachable from root: " + v);
}

bool FlowGraph::has_vertex(const Vertex &v) const {
    return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

bool FlowGraph::has_edge(const Vertex &u, const Vertex &v) const {
    return edges_.count({u, v}) != 0;
}

TransitionFormula FlowGraph::weight(const Vertex &u, const Vertex &v) const {
    auto it = edges_.find({u, v});
    return it == edges_.end() ? tf_zero(vars_) : it->second;
}

std::vector<Vertex> FlowGraph::successors(const Vertex &u) const {
    std::vector<Vertex> out;
    for (const auto &[e, w] : edges_)
        if (e.first == u) out.push_back(e.second);
    return out;
}

std::vector<Vertex> FlowGraph::predecessors(const Vertex &v) const {
    std::vector<Vertex> out;
    for (const auto &[e, w] : edges_)
        if (e.second == v) out.push_back(e.first);
    return out;
}

std::string FlowGraph::str() const {
    std::ostringstream os;
    os << "graph " << (name_.empty() ? "g" : name_) << " vars";
    for (const VarId &v : vars_) os << " " << v.str();
    os << "\nroot " << root_ << "\n";
    for (const auto &[e, w] : edges_) os << e.first << " -> " << e.second << " : " << w.str()
                                         << "\n";
    return os.str();
}

std::map<Vertex, std::set<Vertex>> dominators(const FlowGraph &g) {
    std::set<Vertex> all(g.vertices().begin(), g.vertices().end());
    std::map<Vertex, std::set<Vertex>> dom;
    for (const Vertex &v : g.vertices()) dom[v] = v == g.root() ? std::set<Vertex>{v} : all;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Vertex &v : g.vertices()) {
            if (v == g.root()) continue;
            std::set<Vertex> meet = all;
            for (const Vertex &p : g.predecessors(v)) {
                std::set<Vertex> tmp;
                std::set_intersection(meet.begin(), meet.end(), dom[p].begin(), dom[p].end(),
                                      std::inserter(tmp, tmp.begin()));
                meet = std::move(tmp);
            }
            meet.insert(v);
            if (meet != dom[v]) {
                dom[v] = std::move(meet);
                changed = true;
            }
        }
    }
    return dom;
}

std::set<Edge> back_edges(const FlowGraph &g) {
    auto dom = dominators(g);
    std::set<Edge> out;
    for (const auto &[e, w] : g.edges())
        if (dom[e.first].count(e.second)) out.insert(e);
    return out;
}

namespace {

// DFS postorder over forward (non-back) edges, successors in sorted order.
std::vector<Vertex> forward_postorder(const FlowGraph &g) {
    std::set<Edge> back = back_edges(g);
    std::vector<Vertex> order;
    std::set<Vertex> visited;
    std::vector<std::pair<Vertex, std::size_t>> stack;
    auto forward_succs = [&](const Vertex &u) {
        std::vector<Vertex> out;
        for (const Vertex &s : g.successors(u))
            if (!back.count({u, s})) out.push_back(s);
        return out;
    };
    visited.insert(g.root());
    stack.emplace_back(g.root(), 0);
    while (!stack.empty()) {
        auto &[u, idx] = stack.back();
        std::vector<Vertex> succs = forward_succs(u);
        if (idx >= succs.size()) {
            order.push_back(u);
            stack.pop_back();
            continue;
        }
        Vertex next = succs[idx++];
        if (visited.insert(next).second) stack.emplace_back(next, 0);
    }
    return order;
}

} // namespace

bool is_reducible(const FlowGraph &g) {
    std::set<Edge> back = back_edges(g);
    // Kahn's algorithm on the forward edges.
    std::map<Vertex, int> indeg;
    for (const Vertex &v : g.vertices()) indeg[v] = 0;
    for (const auto &[e, w] : g.edges())
        if (!back.count(e)) indeg[e.second]++;
    std::deque<Vertex> ready;
    for (const auto &[v, d] : indeg)
        if (d == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        Vertex u = ready.front();
        ready.pop_front();
        ++seen;
        for (const auto &[e, w] : g.edges()) {
            if (e.first != u || back.count(e)) continue;
            if (--indeg[e.second] == 0) ready.push_back(e.second);
        }
    }
    return seen == g.vertices().size();
}

std::set<Vertex> local_cycles(const FlowGraph &g, const Vertex &v) {
    if (!g.has_vertex(v)) throw input_error("unknown vertex: " + v);
    auto dom = dominators(g);
    std::set<Vertex> body;
    for (const auto &[e, w] : g.edges()) {
        if (e.second != v || !dom[e.first].count(v)) continue;
        // Natural loop of the back edge: vertices reaching e.first without
        // passing through v.
        body.insert(v);
        std::deque<Vertex> work{e.first};
        while (!work.empty()) {
            Vertex u = work.front();
            work.pop_front();
            if (body.count(u)) continue;
            body.insert(u);
            for (const Vertex &p : g.predecessors(u))
                if (!body.count(p)) work.push_back(p);
        }
    }
    // Restrict to vertices dominated by v (coincides with the body on
    // reducible graphs).
    std::set<Vertex> out;
    for (const Vertex &u : body)
        if (dom[u].count(v)) out.insert(u);
    return out;
}

bool is_admissible_order(const FlowGraph &g, const std::vector<Vertex> &order) {
    std::map<Vertex, std::set<Vertex>> loops;
    for (const Vertex &v : order) loops[v] = local_cycles(g, v);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (loops[order[i]].count(order[j])) return false;
    return true;
}

std::vector<Vertex> admissible_order(const FlowGraph &g) {
    if (!is_reducible(g))
        throw reducibility_error("graph is irreducible; no admissible order exists");
    std::map<Vertex, std::set<Vertex>> loops;
    for (const Vertex &v : g.vertices()) loops[v] = local_cycles(g, v);
    std::map<Vertex, int> depth;
    for (const Vertex &v : g.vertices()) {
        int d = 0;
        for (const auto &[h, body] : loops)
            if (body.count(v)) ++d;
        depth[v] = d;
    }
    std::vector<Vertex> post = forward_postorder(g);
    std::map<Vertex, int> post_index;
    for (std::size_t i = 0; i < post.size(); ++i) post_index[post[i]] = static_cast<int>(i);

    std::vector<Vertex> order;
    for (const Vertex &v : g.vertices())
        if (v != g.root()) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](const Vertex &a, const Vertex &b) {
        if (depth[a] != depth[b]) return depth[a] > depth[b];
        return post_index[a] < post_index[b];
    });
    if (!is_admissible_order(g, order))
        throw reducibility_error("computed elimination order failed the admissibility check");
    return order;
}

std::vector<Vertex> reverse_postorder_non_root(const FlowGraph &g) {
    std::vector<Vertex> post = forward_postorder(g);
    std::reverse(post.begin(), post.end());
    std::vector<Vertex> out;
    for (const Vertex &v : post)
        if (v != g.root()) out.push_back(v);
    return out;
}

FlowGraph eliminate(const FlowGraph &g, const Vertex &v) {
    if (!g.has_vertex(v)) throw input_error("unknown vertex: " + v);
    if (v == g.root()) throw input_error("cannot eliminate the root vertex");
    TransitionFormula loop = g.has_edge(v, v) ? star_combined(g.weight(v, v))
                                              : tf_one(g.variables());
    std::map<Edge, TransitionFormula> edges;
    for (const auto &[e, w] : g.edges())
        if (e.first != v && e.second != v) edges.emplace(e, w);
    for (const Vertex &p : g.predecessors(v)) {
        if (p == v) continue;
        TransitionFormula through = tf_compose(g.weight(p, v), loop);
        for (const Vertex &s : g.successors(v)) {
            if (s == v) continue;
            TransitionFormula rerouted = tf_compose(through, g.weight(v, s));
            auto it = edges.find({p, s});
            if (it == edges.end())
                edges.emplace(Edge{p, s}, rerouted);
            else
                it->second = tf_plus(it->second, rerouted);
        }
        edges.emplace(Edge{p, v}, through);
    }
    return FlowGraph(g.name(), g.variables(), g.vertices(), g.root(), std::move(edges),
                     /*check_reachable=*/false);
}

SummaryAssignment summarize_with_order(const FlowGraph &g, const std::vector<Vertex> &order) {
    FlowGraph h = g;
    for (const Vertex &v : order) h = eliminate(h, v);
    // Any residual self-loop on the root never gets eliminated; paths from
    // the root factor as (self-loops)* followed by at most one edge, so the
    // readout stars the loop once.  Without a root loop this is 1 and w(r,v).
    TransitionFormula root_star = h.has_edge(g.root(), g.root())
                                      ? star_combined(h.weight(g.root(), g.root()))
                                      : tf_one(g.variables());
    SummaryAssignment s;
    s.vertices = g.vertices();
    for (const Vertex &v : g.vertices()) {
        if (v == g.root())
            s.summary.emplace(v, root_star);
        else
            s.summary.emplace(v, tf_compose(root_star, h.weight(g.root(), v)));
    }
    return s;
}

SummaryAssignment summarize(const FlowGraph &g) {
    return summarize_with_order(g, admissible_order(g));
}

} // namespace polysum
