#pragma once

#include "polysum/affine.hpp"
#include "polysum/lp.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polysum {

enum class Relation { EqZero, GeqZero };

// term >= 0 or term = 0.  Canonical inside a Polyhedron: coefficients and
// constant scaled to coprime integers, and for equalities the leading nonzero
// coefficient (in environment order) positive.
struct Constraint {
    AffineTerm term;
    Relation relation = Relation::GeqZero;

    friend bool operator==(const Constraint &, const Constraint &) = default;
};

Constraint constraint_geq(AffineTerm lhs, AffineTerm rhs); // lhs >= rhs
Constraint constraint_eq(AffineTerm lhs, AffineTerm rhs);  // lhs = rhs

// Dual generator representation: points, recession rays, lines (dense
// vectors in environment order).
struct GeneratorSet {
    std::vector<std::vector<Rational>> points;
    std::vector<std::vector<Rational>> rays;
    std::vector<std::vector<Rational>> lines;

    bool empty_set() const { return points.empty(); }
};

// A closed convex polyhedron over an ordered variable environment.
// Constraints are canonicalized, deduplicated and sorted on construction;
// an unsatisfiable constant constraint collapses to the canonical empty form
// (the single constraint -1 >= 0).
class Polyhedron {
  public:
    Polyhedron() = default;
    Polyhedron(std::vector<VarId> env, std::vector<Constraint> constraints);

    static Polyhedron full_space(std::vector<VarId> env);
    static Polyhedron empty(std::vector<VarId> env);

    const std::vector<VarId> &environment() const { return env_; }
    const std::vector<Constraint> &constraints() const { return constraints_; }

    // Canonical empty form; semantic emptiness is poly_is_empty.
    bool syntactically_empty() const;

    bool contains_point(const std::map<VarId, Rational> &point) const;

    // Same point set and same environment, by mutual inclusion.
    bool set_equal(const Polyhedron &other) const;

    std::vector<LpConstraint> lp_constraints() const;

    std::string str() const;

  private:
    std::vector<VarId> env_;
    std::vector<Constraint> constraints_;
};

std::ostream &operator<<(std::ostream &os, const Polyhedron &p);

bool poly_is_empty(const Polyhedron &p);

// Every point of p satisfies c.
bool poly_entails(const Polyhedron &p, const Constraint &c);

// Exact shadow onto the kept variables (Fourier-Motzkin with equality
// substitution and redundancy pruning per eliminated variable).
Polyhedron poly_project(const Polyhedron &p, const std::vector<VarId> &keep);

GeneratorSet poly_generators(const Polyhedron &p);
Polyhedron poly_from_generators(const GeneratorSet &g, std::vector<VarId> env);

// Smallest closed convex polyhedron containing the union.
Polyhedron hull_union(const std::vector<Polyhedron> &ps);

// Q is a subset of P.
bool poly_includes(const Polyhedron &p, const Polyhedron &q);

// Q is covered by the union of ps.
bool union_covers(const std::vector<Polyhedron> &ps, const Polyhedron &q);

// As union_covers, but on failure produces a rational witness point of q
// lying outside every member of ps.
struct CoverageResult {
    bool covered = false;
    std::map<VarId, Rational> witness; // meaningful when !covered
};
CoverageResult union_covers_witness(const std::vector<Polyhedron> &ps, const Polyhedron &q);

// Drop redundant constraints; result mutually includes the input.
Polyhedron poly_minimize(const Polyhedron &p);

// Structural helpers used by the transition-formula layer.
Polyhedron poly_conjoin(const Polyhedron &a, const Polyhedron &b);
Polyhedron poly_rename(const Polyhedron &p, const std::map<VarId, VarId> &renaming,
                       std::vector<VarId> new_env);
// Reinterpret over a larger environment (new variables unconstrained).
Polyhedron poly_extend(const Polyhedron &p, std::vector<VarId> new_env);

std::string render_constraint(const Constraint &c, const std::vector<VarId> &env);

} // namespace polysum
