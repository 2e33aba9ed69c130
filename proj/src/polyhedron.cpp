#include "polysum/polyhedron.hpp"

#include "polysum/error.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace polysum {

namespace {

// Dense constraint row over a fixed environment: coefficients in environment
// order, then the constant.  Relation is >= 0, or = 0 when eq is set.
struct Row {
    std::vector<Rational> v; // length d + 1
    bool eq = false;
};

Row to_row(const Constraint &c, const std::vector<VarId> &env,
           const std::map<VarId, int> &index) {
    Row r;
    r.v.assign(env.size() + 1, Rational(0));
    for (const auto &[var, coeff] : c.term.coefficients()) {
        auto it = index.find(var);
        if (it == index.end())
            throw environment_error("constraint mentions variable outside environment: " +
                                    var.str());
        r.v[it->second] = coeff;
    }
    r.v[env.size()] = c.term.constant();
    r.eq = c.relation == Relation::EqZero;
    return r;
}

Constraint from_row(const Row &r, const std::vector<VarId> &env) {
    AffineTerm t;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (!r.v[i].is_zero()) t.set_coefficient(env[i], r.v[i]);
    t.set_constant(r.v[env.size()]);
    return Constraint{t, r.eq ? Relation::EqZero : Relation::GeqZero};
}

// Scale entries to coprime integers; for equalities make the leading nonzero
// coefficient positive.  Returns false if the row is a tautology (drop it);
// throws unsat_row for a violated constant row.
struct unsat_row {};

bool canonicalize_row(Row &r) {
    const std::size_t n = r.v.size() - 1;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
        if (!r.v[i].is_zero()) any = true;
    if (!any) {
        const Rational &c = r.v[n];
        if (r.eq ? c.is_zero() : c.sign() >= 0) return false;
        throw unsat_row{};
    }
    mpz_class lcm = 1, gcd = 0;
    for (const auto &x : r.v) {
        if (x.is_zero()) continue;
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), x.denominator().get_mpz_t());
        lcm = l;
    }
    for (const auto &x : r.v) {
        if (x.is_zero()) continue;
        mpz_class num = x.numerator() * (lcm / x.denominator());
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), gcd.get_mpz_t(), num.get_mpz_t());
        gcd = g;
    }
    Rational factor(lcm, gcd);
    for (auto &x : r.v) x *= factor;
    if (r.eq) {
        for (std::size_t i = 0; i < n; ++i) {
            if (r.v[i].is_zero()) continue;
            if (r.v[i].sign() < 0)
                for (auto &x : r.v) x = -x;
            break;
        }
    }
    return true;
}

int compare_rows(const Row &a, const Row &b) {
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        if (a.v[i] < b.v[i]) return -1;
        if (b.v[i] < a.v[i]) return 1;
    }
    if (a.eq != b.eq) return a.eq ? -1 : 1;
    return 0;
}

Row empty_row(std::size_t dim) {
    Row r;
    r.v.assign(dim + 1, Rational(0));
    r.v[dim] = Rational(-1);
    return r;
}

// Canonicalize, deduplicate, sort; collapse to the empty form on a violated
// constant row.
std::vector<Row> normalize_rows(std::vector<Row> rows, std::size_t dim) {
    std::vector<Row> out;
    try {
        for (auto &r : rows)
            if (canonicalize_row(r)) out.push_back(std::move(r));
    } catch (const unsat_row &) {
        return {empty_row(dim)};
    }
    std::sort(out.begin(), out.end(),
              [](const Row &a, const Row &b) { return compare_rows(a, b) < 0; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Row &a, const Row &b) { return compare_rows(a, b) == 0; }),
              out.end());
    return out;
}

std::vector<LpConstraint> rows_to_lp(const std::vector<Row> &rows,
                                     const std::vector<VarId> &env) {
    std::vector<LpConstraint> cs;
    cs.reserve(rows.size());
    for (const auto &r : rows) {
        Constraint c = from_row(r, env);
        cs.push_back(LpConstraint{c.term, r.eq});
    }
    return cs;
}

bool lp_rows_entail(const std::vector<LpConstraint> &ground, const AffineTerm &term,
                    bool equality) {
    LpResult lo = lp_optimize(ground, term, LpSense::Minimize);
    if (lo.status == LpStatus::Infeasible) return true;
    if (lo.status == LpStatus::Unbounded || lo.value.sign() < 0) return false;
    if (!equality) return true;
    LpResult hi = lp_optimize(ground, term, LpSense::Maximize);
    return hi.status == LpStatus::Optimum && hi.value.sign() <= 0;
}

// Bring the equality subsystem to reduced row echelon form and eliminate its
// pivot variables from every inequality.  Fixes the representative of each
// constraint modulo the equality space, so facet normals are canonical.
std::vector<Row> reduce_by_equalities(std::vector<Row> rows, std::size_t dim) {
    std::vector<std::size_t> eq_idx;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].eq) eq_idx.push_back(i);
    if (eq_idx.empty()) return rows;
    std::size_t next = 0;
    for (std::size_t col = 0; col < dim && next < eq_idx.size(); ++col) {
        std::size_t found = eq_idx.size();
        for (std::size_t k = next; k < eq_idx.size(); ++k)
            if (!rows[eq_idx[k]].v[col].is_zero()) {
                found = k;
                break;
            }
        if (found == eq_idx.size()) continue;
        std::swap(eq_idx[next], eq_idx[found]);
        const Row pivot = rows[eq_idx[next]];
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == eq_idx[next]) continue;
            Rational f = rows[i].v[col] / pivot.v[col];
            if (f.is_zero()) continue;
            for (std::size_t j = 0; j <= dim; ++j) rows[i].v[j] -= f * pivot.v[j];
        }
        ++next;
    }
    return normalize_rows(std::move(rows), dim);
}

// Drop rows entailed by the remaining ones.
std::vector<Row> lp_minimize_rows(std::vector<Row> rows, const std::vector<VarId> &env) {
    for (std::size_t i = rows.size(); i-- > 0;) {
        std::vector<Row> others;
        others.reserve(rows.size() - 1);
        for (std::size_t j = 0; j < rows.size(); ++j)
            if (j != i) others.push_back(rows[j]);
        Constraint c = from_row(rows[i], env);
        if (lp_rows_entail(rows_to_lp(others, env), c.term, rows[i].eq)) rows = std::move(others);
    }
    return rows;
}

// Cheap pass between elimination steps: identical coefficient vectors fold
// into the tightest constant; contradictory equalities collapse to empty.
std::vector<Row> cheap_prune(std::vector<Row> rows, std::size_t dim) {
    rows = normalize_rows(std::move(rows), dim);
    std::vector<Row> out;
    for (auto &r : rows) {
        bool keep = true;
        for (auto &o : out) {
            if (o.eq != r.eq) continue;
            bool same = true;
            for (std::size_t i = 0; i < dim; ++i)
                if (o.v[i] != r.v[i]) {
                    same = false;
                    break;
                }
            if (!same) continue;
            if (r.eq) {
                if (o.v[dim] != r.v[dim]) return {empty_row(dim)};
                keep = false;
            } else {
                // a.x + c >= 0 is tighter for smaller c.
                if (r.v[dim] < o.v[dim]) o.v[dim] = r.v[dim];
                keep = false;
            }
            if (!keep) break;
        }
        if (keep) out.push_back(std::move(r));
    }
    return out;
}

} // namespace

Constraint constraint_geq(AffineTerm lhs, AffineTerm rhs) {
    lhs -= rhs;
    return Constraint{std::move(lhs), Relation::GeqZero};
}

Constraint constraint_eq(AffineTerm lhs, AffineTerm rhs) {
    lhs -= rhs;
    return Constraint{std::move(lhs), Relation::EqZero};
}

Polyhedron::Polyhedron(std::vector<VarId> env, std::vector<Constraint> constraints)
    : env_(std::move(env)) {
    std::set<VarId> seen(env_.begin(), env_.end());
    if (seen.size() != env_.size())
        throw environment_error("environment contains duplicate variables");
    std::map<VarId, int> index;
    for (std::size_t i = 0; i < env_.size(); ++i) index.emplace(env_[i], static_cast<int>(i));
    std::vector<Row> rows;
    rows.reserve(constraints.size());
    for (const auto &c : constraints) rows.push_back(to_row(c, env_, index));
    rows = normalize_rows(std::move(rows), env_.size());
    constraints_.reserve(rows.size());
    for (const auto &r : rows) constraints_.push_back(from_row(r, env_));
}

Polyhedron Polyhedron::full_space(std::vector<VarId> env) {
    return Polyhedron(std::move(env), {});
}

Polyhedron Polyhedron::empty(std::vector<VarId> env) {
    return Polyhedron(std::move(env), {Constraint{AffineTerm(Rational(-1)), Relation::GeqZero}});
}

bool Polyhedron::syntactically_empty() const {
    return constraints_.size() == 1 && constraints_[0].term.is_constant() &&
           constraints_[0].term.constant().sign() < 0;
}

bool Polyhedron::contains_point(const std::map<VarId, Rational> &point) const {
    for (const auto &c : constraints_) {
        Rational v = c.term.eval(point);
        if (c.relation == Relation::EqZero ? !v.is_zero() : v.sign() < 0) return false;
    }
    return true;
}

bool Polyhedron::set_equal(const Polyhedron &other) const {
    return poly_includes(*this, other) && poly_includes(other, *this);
}

std::vector<LpConstraint> Polyhedron::lp_constraints() const {
    std::vector<LpConstraint> cs;
    cs.reserve(constraints_.size());
    for (const auto &c : constraints_)
        cs.push_back(LpConstraint{c.term, c.relation == Relation::EqZero});
    return cs;
}

std::string Polyhedron::str() const {
    if (constraints_.empty()) return "true";
    std::ostringstream os;
    bool first = true;
    for (const auto &c : constraints_) {
        if (!first) os << " & ";
        os << render_constraint(c, env_);
        first = false;
    }
    return os.str();
}

std::ostream &operator<<(std::ostream &os, const Polyhedron &p) { return os << p.str(); }

bool poly_is_empty(const Polyhedron &p) {
    if (p.syntactically_empty()) return true;
    if (p.constraints().empty()) return false;
    return !lp_feasible_point(p.lp_constraints()).has_value();
}

bool poly_entails(const Polyhedron &p, const Constraint &c) {
    return lp_rows_entail(p.lp_constraints(), c.term, c.relation == Relation::EqZero);
}

namespace {

// Projection through the generator representation (defined after the double
// description machinery below).
Polyhedron project_via_generators(const Polyhedron &p, const std::vector<VarId> &kept_env);

} // namespace

Polyhedron poly_project(const Polyhedron &p, const std::vector<VarId> &keep) {
    const auto &env = p.environment();
    std::set<VarId> keep_set(keep.begin(), keep.end());
    std::vector<VarId> kept_env;
    for (const VarId &v : env)
        if (keep_set.count(v)) kept_env.push_back(v);
    if (kept_env.size() != keep_set.size())
        throw environment_error("projection keeps a variable outside the environment");

    std::map<VarId, int> index;
    for (std::size_t i = 0; i < env.size(); ++i) index.emplace(env[i], static_cast<int>(i));
    std::vector<int> elim;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (!keep_set.count(env[i])) elim.push_back(static_cast<int>(i));

    std::vector<Row> rows;
    rows.reserve(p.constraints().size());
    for (const auto &c : p.constraints()) rows.push_back(to_row(c, env, index));
    rows = cheap_prune(std::move(rows), env.size());

    // Count inequalities that actually involve eliminated variables; a long
    // multi-variable elimination is cheaper through the generator side.
    long involved = 0;
    for (const auto &r : rows) {
        if (r.eq) continue;
        for (int e : elim)
            if (!r.v[e].is_zero()) {
                ++involved;
                break;
            }
    }
    if (elim.size() >= 2 && involved > 10) return project_via_generators(p, kept_env);

    std::set<int> pending(elim.begin(), elim.end());
    while (!pending.empty()) {
        // Pick the cheapest variable: one with an equality, else the one
        // minimizing the Fourier-Motzkin pair count.
        int var = -1;
        long best_cost = -1;
        for (int cand : pending) {
            bool has_eq = false;
            long pos = 0, neg = 0;
            for (const auto &r : rows) {
                if (r.v[cand].is_zero()) continue;
                if (r.eq) {
                    has_eq = true;
                    break;
                }
                (r.v[cand].sign() > 0 ? pos : neg)++;
            }
            long cost = has_eq ? 0 : pos * neg;
            if (var < 0 || cost < best_cost) {
                var = cand;
                best_cost = cost;
            }
            if (best_cost == 0) break;
        }
        pending.erase(var);

        int eq_row = -1;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].eq && !rows[i].v[var].is_zero()) {
                eq_row = static_cast<int>(i);
                break;
            }
        std::vector<Row> next;
        if (eq_row >= 0) {
            // Substitute var from the equality into every other row.
            Row pivot = rows[eq_row];
            Rational a = pivot.v[var];
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<int>(i) == eq_row) continue;
                Row r = rows[i];
                if (!r.v[var].is_zero()) {
                    Rational f = r.v[var] / a;
                    for (std::size_t j = 0; j < r.v.size(); ++j) r.v[j] -= f * pivot.v[j];
                }
                next.push_back(std::move(r));
            }
        } else {
            std::vector<const Row *> lower, upper;
            for (const auto &r : rows) {
                int s = r.v[var].sign();
                if (s == 0)
                    next.push_back(r);
                else
                    (s > 0 ? lower : upper).push_back(&r);
            }
            for (const Row *lo : lower) {
                for (const Row *up : upper) {
                    Row combined;
                    combined.v.resize(lo->v.size());
                    Rational a = lo->v[var];  // > 0
                    Rational b = -up->v[var]; // > 0
                    for (std::size_t j = 0; j < combined.v.size(); ++j)
                        combined.v[j] = b * lo->v[j] + a * up->v[j];
                    assert(combined.v[var].is_zero());
                    next.push_back(std::move(combined));
                }
            }
        }
        rows = cheap_prune(std::move(next), env.size());
        if (!pending.empty() && rows.size() > 24) {
            // Pair combination is snowballing; finish on the generator side.
            std::vector<Constraint> partial;
            for (const auto &r : rows) partial.push_back(from_row(r, env));
            return project_via_generators(Polyhedron(env, std::move(partial)), kept_env);
        }
        if (rows.size() > 32) rows = lp_minimize_rows(std::move(rows), env);
    }

    // Rebuild over the kept environment (eliminated coordinates are zero).
    std::vector<Constraint> cs;
    for (const auto &r : rows) cs.push_back(from_row(r, env));
    return Polyhedron(kept_env, std::move(cs));
}

// ---------------------------------------------------------------------------
// Double description.  Cones live in homogenized space (environment
// coordinates then a trailing coordinate); the state keeps a lineality basis
// and extreme rays with their tight-constraint sets.

namespace {

Rational dot(const std::vector<Rational> &a, const std::vector<Rational> &b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool is_zero_vec(const std::vector<Rational> &v) {
    return std::all_of(v.begin(), v.end(), [](const Rational &x) { return x.is_zero(); });
}

// Scale to coprime integers; sign_normalize flips so the leading nonzero
// entry is positive (for lines, whose direction is irrelevant).
void normalize_vec(std::vector<Rational> &v, bool sign_normalize) {
    mpz_class lcm = 1, gcd = 0;
    for (const auto &x : v) {
        if (x.is_zero()) continue;
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), x.denominator().get_mpz_t());
        lcm = l;
    }
    for (const auto &x : v) {
        if (x.is_zero()) continue;
        mpz_class num = x.numerator() * (lcm / x.denominator());
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), gcd.get_mpz_t(), num.get_mpz_t());
        gcd = g;
    }
    if (gcd == 0) return;
    Rational factor(lcm, gcd);
    for (auto &x : v) x *= factor;
    if (sign_normalize)
        for (const auto &x : v) {
            if (x.is_zero()) continue;
            if (x.sign() < 0)
                for (auto &y : v) y = -y;
            break;
        }
}

struct DDCone {
    std::size_t dim = 0;
    std::vector<std::vector<Rational>> lines;
    std::vector<std::vector<Rational>> rays;
    std::vector<std::vector<Rational>> processed; // halfspace normals so far

    explicit DDCone(std::size_t d) : dim(d) {
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<Rational> e(d, Rational(0));
            e[i] = Rational(1);
            lines.push_back(std::move(e));
        }
    }

    std::vector<bool> tight_set(const std::vector<Rational> &ray) const {
        std::vector<bool> t(processed.size());
        for (std::size_t i = 0; i < processed.size(); ++i)
            t[i] = dot(processed[i], ray).is_zero();
        return t;
    }

    void add_halfspace(const std::vector<Rational> &m) {
        // Line phase: a line leaving the halfspace becomes a ray.
        int hit = -1;
        for (std::size_t i = 0; i < lines.size(); ++i)
            if (!dot(m, lines[i]).is_zero()) {
                hit = static_cast<int>(i);
                break;
            }
        if (hit >= 0) {
            std::vector<Rational> ell = lines[hit];
            lines.erase(lines.begin() + hit);
            Rational me = dot(m, ell);
            if (me.sign() < 0) {
                for (auto &x : ell) x = -x;
                me = -me;
            }
            for (auto &l : lines) {
                Rational f = dot(m, l) / me;
                if (f.is_zero()) continue;
                for (std::size_t j = 0; j < dim; ++j) l[j] -= f * ell[j];
                normalize_vec(l, true);
            }
            for (auto &r : rays) {
                Rational f = dot(m, r) / me;
                if (f.is_zero()) continue;
                for (std::size_t j = 0; j < dim; ++j) r[j] -= f * ell[j];
                assert(!is_zero_vec(r));
                normalize_vec(r, false);
            }
            rays.push_back(std::move(ell));
            processed.push_back(m);
            return;
        }

        std::vector<int> sign(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i) sign[i] = dot(m, rays[i]).sign();

        std::vector<std::vector<bool>> tights(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i) tights[i] = tight_set(rays[i]);

        auto adjacent = [&](std::size_t a, std::size_t b) {
            std::vector<bool> common(processed.size());
            for (std::size_t k = 0; k < processed.size(); ++k)
                common[k] = tights[a][k] && tights[b][k];
            for (std::size_t c = 0; c < rays.size(); ++c) {
                if (c == a || c == b) continue;
                bool superset = true;
                for (std::size_t k = 0; k < processed.size(); ++k)
                    if (common[k] && !tights[c][k]) {
                        superset = false;
                        break;
                    }
                if (superset) return false;
            }
            return true;
        };

        std::vector<std::vector<Rational>> next;
        for (std::size_t i = 0; i < rays.size(); ++i)
            if (sign[i] >= 0) next.push_back(rays[i]);
        for (std::size_t i = 0; i < rays.size(); ++i) {
            if (sign[i] <= 0) continue;
            for (std::size_t j = 0; j < rays.size(); ++j) {
                if (sign[j] >= 0) continue;
                if (!adjacent(i, j)) continue;
                Rational wi = dot(m, rays[i]);
                Rational wj = dot(m, rays[j]);
                std::vector<Rational> combo(dim);
                for (std::size_t k = 0; k < dim; ++k)
                    combo[k] = wi * rays[j][k] - wj * rays[i][k];
                assert(!is_zero_vec(combo));
                normalize_vec(combo, false);
                next.push_back(std::move(combo));
            }
        }
        rays = std::move(next);
        processed.push_back(m);
    }
};

} // namespace

GeneratorSet poly_generators(const Polyhedron &p) {
    const auto &env = p.environment();
    const std::size_t d = env.size();
    std::map<VarId, int> index;
    for (std::size_t i = 0; i < d; ++i) index.emplace(env[i], static_cast<int>(i));

    DDCone cone(d + 1);
    std::vector<std::vector<Rational>> normals;
    for (const auto &c : p.constraints()) {
        Row r = to_row(c, env, index);
        normals.push_back(r.v); // coefficient vector with trailing constant
        if (c.relation == Relation::EqZero) {
            std::vector<Rational> neg(r.v.size());
            for (std::size_t j = 0; j < r.v.size(); ++j) neg[j] = -r.v[j];
            normals.push_back(std::move(neg));
        }
    }
    std::vector<Rational> homog(d + 1, Rational(0));
    homog[d] = Rational(1);
    normals.push_back(std::move(homog)); // lambda >= 0
    for (const auto &m : normals) cone.add_halfspace(m);

    GeneratorSet g;
    bool nonempty = false;
    for (const auto &r : cone.rays)
        if (r[d].sign() > 0) nonempty = true;
    if (!nonempty) return g;

    for (const auto &r : cone.rays) {
        if (r[d].sign() > 0) {
            std::vector<Rational> pt(d);
            Rational inv = r[d].inverse();
            for (std::size_t j = 0; j < d; ++j) pt[j] = r[j] * inv;
            g.points.push_back(std::move(pt));
        } else {
            std::vector<Rational> ray(r.begin(), r.begin() + static_cast<long>(d));
            if (is_zero_vec(ray)) continue;
            normalize_vec(ray, false);
            g.rays.push_back(std::move(ray));
        }
    }
    for (const auto &l : cone.lines) {
        std::vector<Rational> line(l.begin(), l.begin() + static_cast<long>(d));
        if (is_zero_vec(line)) continue;
        normalize_vec(line, true);
        g.lines.push_back(std::move(line));
    }
    auto vec_less = [](const std::vector<Rational> &a, const std::vector<Rational> &b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] < b[i]) return true;
            if (b[i] < a[i]) return false;
        }
        return false;
    };
    std::sort(g.points.begin(), g.points.end(), vec_less);
    std::sort(g.rays.begin(), g.rays.end(), vec_less);
    std::sort(g.lines.begin(), g.lines.end(), vec_less);
    return g;
}

Polyhedron poly_from_generators(const GeneratorSet &g, std::vector<VarId> env) {
    const std::size_t d = env.size();
    for (const auto &v : g.points)
        if (v.size() != d) throw input_error("generator dimension mismatch");
    for (const auto &v : g.rays)
        if (v.size() != d || is_zero_vec(v)) throw input_error("invalid ray generator");
    for (const auto &v : g.lines)
        if (v.size() != d || is_zero_vec(v)) throw input_error("invalid line generator");
    if (g.points.empty()) {
        if (!g.rays.empty() || !g.lines.empty())
            throw input_error("generator set with rays or lines requires a point");
        return Polyhedron::empty(std::move(env));
    }

    // The valid constraints a.x + c >= 0 form the polar cone in (a, c) space;
    // run double description over one halfspace per generator.
    DDCone cone(d + 1);
    for (const auto &p : g.points) {
        std::vector<Rational> m(d + 1);
        for (std::size_t j = 0; j < d; ++j) m[j] = p[j];
        m[d] = Rational(1);
        cone.add_halfspace(m);
    }
    for (const auto &r : g.rays) {
        std::vector<Rational> m(d + 1);
        for (std::size_t j = 0; j < d; ++j) m[j] = r[j];
        m[d] = Rational(0);
        cone.add_halfspace(m);
    }
    for (const auto &l : g.lines) {
        std::vector<Rational> m(d + 1);
        for (std::size_t j = 0; j < d; ++j) m[j] = l[j];
        m[d] = Rational(0);
        cone.add_halfspace(m);
        for (auto &x : m) x = -x;
        cone.add_halfspace(m);
    }

    std::vector<Constraint> cs;
    for (const auto &r : cone.rays) {
        Row row;
        row.v = r;
        row.eq = false;
        AffineTerm t;
        for (std::size_t j = 0; j < d; ++j)
            if (!r[j].is_zero()) t.set_coefficient(env[j], r[j]);
        t.set_constant(r[d]);
        cs.push_back(Constraint{t, Relation::GeqZero});
    }
    for (const auto &l : cone.lines) {
        AffineTerm t;
        for (std::size_t j = 0; j < d; ++j)
            if (!l[j].is_zero()) t.set_coefficient(env[j], l[j]);
        t.set_constant(l[d]);
        if (t.is_constant()) continue; // spans only the constant coordinate
        cs.push_back(Constraint{t, Relation::EqZero});
    }
    return poly_minimize(Polyhedron(std::move(env), std::move(cs)));
}

namespace {

// Drop the eliminated coordinates of every generator and convert back.  Far
// better behaved than pairwise elimination when several variables go at once.
Polyhedron project_via_generators(const Polyhedron &p, const std::vector<VarId> &kept_env) {
    GeneratorSet g = poly_generators(p);
    if (g.empty_set()) return Polyhedron::empty(kept_env);
    const auto &env = p.environment();
    std::vector<std::size_t> keep_idx;
    for (const VarId &v : kept_env)
        for (std::size_t i = 0; i < env.size(); ++i)
            if (env[i] == v) keep_idx.push_back(i);
    auto shrink = [&](const std::vector<Rational> &vec) {
        std::vector<Rational> out;
        out.reserve(keep_idx.size());
        for (std::size_t i : keep_idx) out.push_back(vec[i]);
        return out;
    };
    GeneratorSet projected;
    for (const auto &v : g.points) projected.points.push_back(shrink(v));
    for (const auto &v : g.rays) {
        auto r = shrink(v);
        if (!is_zero_vec(r)) projected.rays.push_back(std::move(r));
    }
    for (const auto &v : g.lines) {
        auto l = shrink(v);
        if (!is_zero_vec(l)) projected.lines.push_back(std::move(l));
    }
    return poly_from_generators(projected, kept_env);
}

} // namespace

Polyhedron hull_union(const std::vector<Polyhedron> &ps) {
    if (ps.empty()) throw input_error("hull of an empty list of polyhedra");
    const auto &env = ps.front().environment();
    GeneratorSet pool;
    for (const auto &p : ps) {
        if (p.environment() != env)
            throw environment_error("hull members disagree on environment");
        if (poly_is_empty(p)) continue;
        GeneratorSet g = poly_generators(p);
        pool.points.insert(pool.points.end(), g.points.begin(), g.points.end());
        pool.rays.insert(pool.rays.end(), g.rays.begin(), g.rays.end());
        pool.lines.insert(pool.lines.end(), g.lines.begin(), g.lines.end());
    }
    if (pool.points.empty()) return Polyhedron::empty(env);
    return poly_from_generators(pool, env);
}

bool poly_includes(const Polyhedron &p, const Polyhedron &q) {
    if (p.environment() != q.environment())
        throw environment_error("inclusion between different environments");
    auto ground = q.lp_constraints();
    for (const auto &c : p.constraints())
        if (!lp_rows_entail(ground, c.term, c.relation == Relation::EqZero)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Coverage of a polyhedron by a union, by recursive splitting.  Cells carry
// strict side conditions (term > 0) coming from complements; emptiness of a
// cell is decided exactly with an auxiliary margin variable.

namespace {

struct Cell {
    std::vector<LpConstraint> closed;
    std::vector<AffineTerm> strict; // each term > 0
};

VarId fresh_margin_var(const std::vector<VarId> &env) {
    std::string name = "$margin";
    auto used = [&](const std::string &n) {
        return std::any_of(env.begin(), env.end(),
                           [&](const VarId &v) { return v.name == n; });
    };
    while (used(name)) name += "$";
    return VarId(name);
}

std::optional<std::map<VarId, Rational>> cell_point(const Cell &cell, const VarId &margin) {
    std::vector<LpConstraint> cs = cell.closed;
    AffineTerm eps = AffineTerm::variable(margin);
    for (const auto &t : cell.strict) cs.push_back(LpConstraint{t - eps, false});
    AffineTerm cap(Rational(1));
    cs.push_back(LpConstraint{cap - eps, false}); // margin <= 1
    cs.push_back(LpConstraint{eps, false});       // margin >= 0
    LpResult r = lp_optimize(cs, eps, LpSense::Maximize);
    if (!r.optimal()) return std::nullopt;
    if (!cell.strict.empty() && r.value.sign() <= 0) return std::nullopt;
    r.witness.erase(margin);
    return r.witness;
}

bool covers_rec(const std::vector<Polyhedron> &ps, std::size_t from, const Cell &cell,
                const VarId &margin, std::map<VarId, Rational> *witness) {
    auto pt = cell_point(cell, margin);
    if (!pt) return true;
    if (from >= ps.size()) {
        if (witness) *witness = std::move(*pt);
        return false;
    }
    // Quick accept: the cell's closed hull sits inside one member.  Only
    // members containing the sample point can qualify, so test those alone.
    auto at_point = [&](const AffineTerm &t) {
        Rational acc = t.constant();
        for (const auto &[v, c] : t.coefficients()) {
            auto it = pt->find(v);
            if (it != pt->end()) acc += c * it->second;
        }
        return acc;
    };
    for (std::size_t i = from; i < ps.size(); ++i) {
        bool candidate = true;
        for (const auto &c : ps[i].constraints()) {
            Rational v = at_point(c.term);
            if (c.relation == Relation::EqZero ? !v.is_zero() : v.sign() < 0) {
                candidate = false;
                break;
            }
        }
        if (!candidate) continue;
        bool inside = true;
        for (const auto &c : ps[i].constraints())
            if (!lp_rows_entail(cell.closed, c.term, c.relation == Relation::EqZero)) {
                inside = false;
                break;
            }
        if (inside) return true;
    }
    const Polyhedron &p = ps[from];
    std::vector<AffineTerm> geqs;
    for (const auto &c : p.constraints()) {
        geqs.push_back(c.term);
        if (c.relation == Relation::EqZero) geqs.push_back(-c.term);
    }
    Cell running = cell;
    for (const auto &t : geqs) {
        Cell piece = running;
        piece.strict.push_back(-t); // violate this constraint: -t > 0
        if (!covers_rec(ps, from + 1, piece, margin, witness)) return false;
        running.closed.push_back(LpConstraint{t, false});
    }
    return true; // the remaining cell lies inside p
}

} // namespace

CoverageResult union_covers_witness(const std::vector<Polyhedron> &ps, const Polyhedron &q) {
    for (const auto &p : ps)
        if (p.environment() != q.environment())
            throw environment_error("coverage between different environments");
    Cell cell;
    cell.closed = q.lp_constraints();
    std::vector<VarId> env = q.environment();
    CoverageResult result;
    std::map<VarId, Rational> witness;
    result.covered = covers_rec(ps, 0, cell, fresh_margin_var(env), &witness);
    if (!result.covered) {
        // LP witnesses mention only constrained variables; complete the point.
        for (const VarId &v : env)
            witness.emplace(v, Rational(0));
        result.witness = std::move(witness);
    }
    return result;
}

bool union_covers(const std::vector<Polyhedron> &ps, const Polyhedron &q) {
    return union_covers_witness(ps, q).covered;
}

Polyhedron poly_minimize(const Polyhedron &p) {
    if (poly_is_empty(p)) return Polyhedron::empty(p.environment());
    std::map<VarId, int> index;
    for (std::size_t i = 0; i < p.environment().size(); ++i)
        index.emplace(p.environment()[i], static_cast<int>(i));
    std::vector<Row> rows;
    for (const auto &c : p.constraints()) rows.push_back(to_row(c, p.environment(), index));
    rows = lp_minimize_rows(std::move(rows), p.environment());
    rows = reduce_by_equalities(std::move(rows), p.environment().size());
    std::vector<Constraint> cs;
    for (const auto &r : rows) cs.push_back(from_row(r, p.environment()));
    return Polyhedron(p.environment(), std::move(cs));
}

Polyhedron poly_conjoin(const Polyhedron &a, const Polyhedron &b) {
    if (a.environment() != b.environment())
        throw environment_error("conjunction between different environments");
    std::vector<Constraint> cs = a.constraints();
    cs.insert(cs.end(), b.constraints().begin(), b.constraints().end());
    return Polyhedron(a.environment(), std::move(cs));
}

Polyhedron poly_rename(const Polyhedron &p, const std::map<VarId, VarId> &renaming,
                       std::vector<VarId> new_env) {
    std::vector<Constraint> cs;
    cs.reserve(p.constraints().size());
    for (const auto &c : p.constraints())
        cs.push_back(Constraint{c.term.rename(renaming), c.relation});
    return Polyhedron(std::move(new_env), std::move(cs));
}

Polyhedron poly_extend(const Polyhedron &p, std::vector<VarId> new_env) {
    std::set<VarId> have(new_env.begin(), new_env.end());
    for (const VarId &v : p.environment())
        if (!have.count(v))
            throw environment_error("extended environment drops variable " + v.str());
    return Polyhedron(std::move(new_env), p.constraints());
}

std::string render_constraint(const Constraint &c, const std::vector<VarId> &env) {
    // Positive-coefficient terms on the left, the rest (negated) plus the
    // constant on the right: x' - x - 1 >= 0 prints as "x' >= x + 1".
    std::vector<std::pair<VarId, Rational>> lhs, rhs;
    for (const VarId &v : env) {
        Rational a = c.term.coefficient(v);
        if (a.sign() > 0) lhs.emplace_back(v, a);
        if (a.sign() < 0) rhs.emplace_back(v, -a);
    }
    Rational constant = -c.term.constant();
    const char *rel = c.relation == Relation::EqZero ? " = " : " >= ";
    if (lhs.empty() && !rhs.empty()) {
        // Only negated terms: flip so variables stay on the left.  (For
        // equalities the canonical leading-positive sign rule makes this
        // unreachable.)
        std::swap(lhs, rhs);
        constant = -constant;
        rel = " <= ";
    }
    auto side = [](std::ostringstream &os, const std::vector<std::pair<VarId, Rational>> &ts,
                   const Rational &k) {
        bool first = true;
        for (const auto &[v, a] : ts) {
            if (!first) os << " + ";
            if (a != Rational(1)) os << a.str() << "*";
            os << v.str();
            first = false;
        }
        if (first)
            os << k.str();
        else if (!k.is_zero())
            os << (k.sign() < 0 ? " - " : " + ") << k.abs().str();
    };
    std::ostringstream os;
    side(os, lhs, Rational(0));
    os << rel;
    side(os, rhs, constant);
    return os.str();
}

} // namespace polysum
