#pragma once

#include "polysum/rational.hpp"

#include <compare>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace polysum {

// A program variable, possibly the primed (post-state) copy.
struct VarId {
    std::string name;
    bool primed = false;

    VarId() = default;
    VarId(std::string name_, bool primed_ = false);

    VarId prime() const { return VarId(name, true); }
    VarId unprime() const { return VarId(name, false); }

    friend bool operator==(const VarId &, const VarId &) = default;
    friend auto operator<=>(const VarId &a, const VarId &b) {
        if (auto c = a.name <=> b.name; c != 0) return c;
        return a.primed <=> b.primed;
    }

    std::string str() const { return primed ? name + "'" : name; }
};

std::ostream &operator<<(std::ostream &os, const VarId &v);

// An affine expression: sum of coefficient * variable, plus a constant.
// Zero coefficients are never stored.
class AffineTerm {
  public:
    AffineTerm() = default;
    explicit AffineTerm(Rational constant) : constant_(std::move(constant)) {}
    static AffineTerm variable(const VarId &v, Rational coeff = Rational(1));

    const std::map<VarId, Rational> &coefficients() const { return coeffs_; }
    const Rational &constant() const { return constant_; }
    Rational coefficient(const VarId &v) const;
    void set_coefficient(const VarId &v, const Rational &c);
    void set_constant(Rational c) { constant_ = std::move(c); }

    bool is_constant() const { return coeffs_.empty(); }
    bool is_zero() const { return coeffs_.empty() && constant_.is_zero(); }
    std::vector<VarId> variables() const;
    bool mentions(const VarId &v) const { return coeffs_.count(v) != 0; }

    AffineTerm operator-() const;
    AffineTerm &operator+=(const AffineTerm &o);
    AffineTerm &operator-=(const AffineTerm &o);
    AffineTerm &operator*=(const Rational &c);

    friend AffineTerm operator+(AffineTerm a, const AffineTerm &b) { return a += b; }
    friend AffineTerm operator-(AffineTerm a, const AffineTerm &b) { return a -= b; }
    friend AffineTerm operator*(AffineTerm a, const Rational &c) { return a *= c; }
    friend AffineTerm operator*(const Rational &c, AffineTerm a) { return a *= c; }

    friend bool operator==(const AffineTerm &, const AffineTerm &) = default;

    // Exact evaluation; every mentioned variable must be assigned.
    Rational eval(const std::map<VarId, Rational> &point) const;

    // Rename every variable through the map; variables absent from the map are
    // kept.  Used for priming/unpriming and environment renaming.
    AffineTerm rename(const std::map<VarId, VarId> &renaming) const;

    std::string str() const;

  private:
    std::map<VarId, Rational> coeffs_;
    Rational constant_;
};

std::ostream &operator<<(std::ostream &os, const AffineTerm &t);

// A linear map in transposed form: each target variable is sent to an affine
// term over the source variables.  Total on its declared target set; terms
// mention only declared source variables; everything unprimed.
class Substitution {
  public:
    Substitution() = default;
    Substitution(std::vector<VarId> source_vars, std::vector<VarId> target_vars,
                 std::map<VarId, AffineTerm> mapping);

    static Substitution identity(const std::vector<VarId> &vars);

    const std::vector<VarId> &source_variables() const { return source_; }
    const std::vector<VarId> &target_variables() const { return target_; }
    const std::map<VarId, AffineTerm> &mapping() const { return mapping_; }

    bool has(const VarId &v) const { return mapping_.count(v.unprime()) != 0; }
    // Image of a target variable; for a primed variable, the primed variant
    // sigma'(y') = sigma(y)[X -> X'].
    AffineTerm image(const VarId &v) const;

    std::string str() const;

  private:
    std::vector<VarId> source_;
    std::vector<VarId> target_;
    std::map<VarId, AffineTerm> mapping_;
};

// Apply a substitution to a term: every variable of t must be in sigma's
// domain (primed variables use the primed variant).
AffineTerm subst_apply(const AffineTerm &t, const Substitution &sigma);

// Functional composition: subst_apply(t, compose(sigma, tau)) ==
// subst_apply(subst_apply(t, sigma), tau).  sigma maps Z to terms over Y,
// tau maps Y to terms over X; the result maps Z to terms over X.
Substitution compose(const Substitution &sigma, const Substitution &tau);

} // namespace polysum
