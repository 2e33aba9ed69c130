#pragma once

#include "polysum/flowgraph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polysum {

// Candidate arrow between flow graphs: a total vertex map and a substitution
// sending H-variables to affine terms over G-variables.
struct StutterMap {
    std::map<Vertex, Vertex> vertex_map;
    Substitution f;
};

enum class EdgeTag { Stutter, Match, Either };

struct StutterCheck {
    bool ok = false;
    std::map<Edge, EdgeTag> tags;       // admissible tags per G-edge, when ok
    Edge failing_edge;                  // when !ok
    std::map<VarId, Rational> witness;  // point separating the failing edge
};

// Each G-edge must map to an H-edge simulating it modulo f, or stutter
// (h(u) = h(v) and the weight is simulated by the identity).
StutterCheck check_stutter_sim(const FlowGraph &g, const FlowGraph &h, const StutterMap &m);

struct LoopCheck {
    bool ok = false;
    std::string reason; // "membership", "non-nesting" or "unrolling" detail when !ok
    // Per header: consistent distance labels and the common cycle total.
    std::map<Vertex, std::map<Vertex, long>> distances;
    std::map<Vertex, long> cycle_total;
};

// Loop membership, non-nesting, and consistent unrolling (via distance
// labelings; Either-tagged edges are searched exhaustively).
LoopCheck check_loop_preserving(const FlowGraph &g, const FlowGraph &h, const StutterMap &m);

struct RobustnessCheck {
    bool verified = false;
    Vertex vertex;                     // offending vertex when refuted
    TransitionFormula source_summary;  // summary of G at vertex
    TransitionFormula target_summary;  // summary of H at h(vertex)
    std::map<VarId, Rational> witness; // separating rational point
};

// Summarize both graphs and check that every G-summary is simulated by the
// corresponding H-summary modulo f.
RobustnessCheck verify_robustness(const FlowGraph &g, const FlowGraph &h, const StutterMap &m);

} // namespace polysum
