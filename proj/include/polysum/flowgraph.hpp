#pragma once

#include "polysum/transition.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace polysum {

using Vertex = std::string;
using Edge = std::pair<Vertex, Vertex>;

// Rooted digraph weighted by transition formulas over a shared variable set.
// Absent edges implicitly carry weight false and are never stored; stored
// weights are non-false.  Every vertex is reachable from the root.
class FlowGraph {
  public:
    FlowGraph() = default;
    // check_reachable: input graphs must have every vertex reachable from the
    // root; graphs mid-elimination may transiently violate this when a
    // rerouted weight collapses to false.
    FlowGraph(std::string name, std::vector<VarId> vars, std::vector<Vertex> vertices,
              Vertex root, std::map<Edge, TransitionFormula> edges,
              bool check_reachable = true);

    const std::string &name() const { return name_; }
    const std::vector<VarId> &variables() const { return vars_; }
    const std::vector<Vertex> &vertices() const { return vertices_; }
    const Vertex &root() const { return root_; }
    const std::map<Edge, TransitionFormula> &edges() const { return edges_; }

    bool has_vertex(const Vertex &v) const;
    bool has_edge(const Vertex &u, const Vertex &v) const;
    // Total weight extension: false for absent edges.
    TransitionFormula weight(const Vertex &u, const Vertex &v) const;

    std::vector<Vertex> successors(const Vertex &u) const;
    std::vector<Vertex> predecessors(const Vertex &v) const;

    std::string str() const;

  private:
    std::string name_;
    std::vector<VarId> vars_;
    std::vector<Vertex> vertices_;
    Vertex root_;
    std::map<Edge, TransitionFormula> edges_;
};

// Classical iterative dataflow fixpoint; dom(root) = {root}.
std::map<Vertex, std::set<Vertex>> dominators(const FlowGraph &g);

// Edges u -> v with v dominating u.
std::set<Edge> back_edges(const FlowGraph &g);

// Deleting all back edges leaves an acyclic graph.
bool is_reducible(const FlowGraph &g);

// Vertices on local cycles of v: union of the natural-loop bodies of back
// edges into v, intersected with the vertices dominated by v.  Empty when v
// heads no loop.
std::set<Vertex> local_cycles(const FlowGraph &g, const Vertex &v);

// The defining admissibility condition: no v_j in L(v_i) for i < j.
bool is_admissible_order(const FlowGraph &g, const std::vector<Vertex> &order);

// An admissible enumeration of the non-root vertices (inner loops first);
// verified against the defining condition before returning.
std::vector<Vertex> admissible_order(const FlowGraph &g);

// Non-root vertices in reverse postorder (used only for forced elimination
// on irreducible graphs).
std::vector<Vertex> reverse_postorder_non_root(const FlowGraph &g);

// Remove v's outgoing edges, rerouting paths through v:
//   w'(u,u') = w(u,u') + w(u,v) . w(v,v)* . w(v,u')
// with the combined polyhedral operator as star.
FlowGraph eliminate(const FlowGraph &g, const Vertex &v);

struct SummaryAssignment {
    std::vector<Vertex> vertices;
    std::map<Vertex, TransitionFormula> summary;
};

// Eliminate all non-root vertices (admissible order; any given order when
// supplied) and read off the root-to-v weights.  The root maps to 1 plus its
// residual self-loop.
SummaryAssignment summarize(const FlowGraph &g);
SummaryAssignment summarize_with_order(const FlowGraph &g, const std::vector<Vertex> &order);

} // namespace polysum
