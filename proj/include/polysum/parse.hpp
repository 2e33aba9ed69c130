#pragma once

#include "polysum/flowgraph.hpp"
#include "polysum/simcheck.hpp"
#include "polysum/transition.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace polysum {

// ---------------------------------------------------------------------------
// Mini imperative language AST.

enum class RelOp { Lt, Le, Eq, Ge, Gt };

struct Comparison {
    AffineTerm lhs;
    AffineTerm rhs;
    RelOp op = RelOp::Le;
};

// Boolean condition in disjunctive normal form, or a nondeterministic coin.
struct Condition {
    bool nondet = false;
    std::vector<std::vector<Comparison>> dnf; // or-of-ands
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct AssignStmt {
    VarId var;
    AffineTerm expr;
};
struct NondetAssignStmt {
    VarId var;
};
struct AssumeStmt {
    Condition cond;
};
struct IfStmt {
    Condition cond;
    std::vector<StmtPtr> then_branch;
    std::vector<StmtPtr> else_branch;
};
struct WhileStmt {
    Condition cond;
    std::vector<StmtPtr> body;
};

struct Stmt {
    std::variant<AssignStmt, NondetAssignStmt, AssumeStmt, IfStmt, WhileStmt> node;
};

struct Program {
    std::vector<VarId> vars;
    std::vector<StmtPtr> body;
};

Program parse_program(const std::string &text);

// One vertex per program point (vertices numbered from 1 in creation order),
// assignments with frame equalities, guards conjoined with the identity,
// strict integer comparisons tightened.  Program points with no satisfiable
// incoming path are pruned.
FlowGraph program_to_flowgraph(const Program &p, const std::string &name = "g");

// ---------------------------------------------------------------------------
// Text formats.

// Disjuncts separated by '|', conjuncts by '&', comparisons over affine
// terms; keywords true/false.  Strict comparisons are integer-tightened.
TransitionFormula parse_formula(const std::string &text, const std::vector<VarId> &vars);

// vars x y; <formula>
struct FormulaFile {
    std::vector<VarId> vars;
    TransitionFormula formula;
};
FormulaFile parse_formula_file(const std::string &text);

// graph <name> vars x y... / root <v> / <u> -> <v> : <formula> / # comment
FlowGraph parse_graph(const std::string &text);

// vmap <g-vertex> -> <h-vertex> / sub <h-var> := <term over g-vars>
StutterMap parse_map(const std::string &text, const std::vector<VarId> &g_vars,
                     const std::vector<VarId> &h_vars);

// Strict t > 0 over integer-valued states: scale the variable part to
// coprime integers, then round the threshold (a.x > -c  iff  a.x >= floor(-c)+1).
// Returns the tightened closed constraint, or nothing when t has no
// variables (the comparison is decided by sign; *constant_true receives it).
std::optional<Constraint> tighten_strict_positive(const AffineTerm &t, bool *constant_true);

} // namespace polysum
