#include "polysum/affine.hpp"

#include "polysum/error.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace polysum {

VarId::VarId(std::string name_, bool primed_) : name(std::move(name_)), primed(primed_) {
    if (name.empty()) throw input_error("variable name must be nonempty");
}

std::ostream &operator<<(std::ostream &os, const VarId &v) { return os << v.str(); }

AffineTerm AffineTerm::variable(const VarId &v, Rational coeff) {
    AffineTerm t;
    t.set_coefficient(v, coeff);
    return t;
}

Rational AffineTerm::coefficient(const VarId &v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

void AffineTerm::set_coefficient(const VarId &v, const Rational &c) {
    if (c.is_zero())
        coeffs_.erase(v);
    else
        coeffs_[v] = c;
}

std::vector<VarId> AffineTerm::variables() const {
    std::vector<VarId> vs;
    vs.reserve(coeffs_.size());
    for (const auto &[v, c] : coeffs_) vs.push_back(v);
    return vs;
}

AffineTerm AffineTerm::operator-() const {
    AffineTerm t;
    for (const auto &[v, c] : coeffs_) t.coeffs_.emplace(v, -c);
    t.constant_ = -constant_;
    return t;
}

AffineTerm &AffineTerm::operator+=(const AffineTerm &o) {
    for (const auto &[v, c] : o.coeffs_) set_coefficient(v, coefficient(v) + c);
    constant_ += o.constant_;
    return *this;
}

AffineTerm &AffineTerm::operator-=(const AffineTerm &o) {
    for (const auto &[v, c] : o.coeffs_) set_coefficient(v, coefficient(v) - c);
    constant_ -= o.constant_;
    return *this;
}

AffineTerm &AffineTerm::operator*=(const Rational &c) {
    if (c.is_zero()) {
        coeffs_.clear();
        constant_ = Rational(0);
        return *this;
    }
    for (auto &[v, k] : coeffs_) k *= c;
    constant_ *= c;
    return *this;
}

Rational AffineTerm::eval(const std::map<VarId, Rational> &point) const {
    Rational acc = constant_;
    for (const auto &[v, c] : coeffs_) {
        auto it = point.find(v);
        if (it == point.end())
            throw domain_error("evaluation point does not assign variable " + v.str());
        acc += c * it->second;
    }
    return acc;
}

AffineTerm AffineTerm::rename(const std::map<VarId, VarId> &renaming) const {
    AffineTerm t(constant_);
    for (const auto &[v, c] : coeffs_) {
        auto it = renaming.find(v);
        const VarId &target = it == renaming.end() ? v : it->second;
        t.set_coefficient(target, t.coefficient(target) + c);
    }
    return t;
}

std::string AffineTerm::str() const {
    if (coeffs_.empty()) return constant_.str();
    std::ostringstream os;
    bool first = true;
    for (const auto &[v, c] : coeffs_) {
        if (first) {
            if (c == Rational(-1))
                os << "-";
            else if (c != Rational(1))
                os << c.str() << "*";
        } else {
            if (c.sign() < 0)
                os << " - ";
            else
                os << " + ";
            Rational a = c.abs();
            if (a != Rational(1)) os << a.str() << "*";
        }
        os << v.str();
        first = false;
    }
    if (!constant_.is_zero()) {
        if (constant_.sign() < 0)
            os << " - " << (-constant_).str();
        else
            os << " + " << constant_.str();
    }
    return os.str();
}

std::ostream &operator<<(std::ostream &os, const AffineTerm &t) { return os << t.str(); }

Substitution::Substitution(std::vector<VarId> source_vars, std::vector<VarId> target_vars,
                           std::map<VarId, AffineTerm> mapping)
    : source_(std::move(source_vars)), target_(std::move(target_vars)),
      mapping_(std::move(mapping)) {
    std::set<VarId> src(source_.begin(), source_.end());
    std::set<VarId> tgt(target_.begin(), target_.end());
    if (src.size() != source_.size() || tgt.size() != target_.size())
        throw input_error("substitution variable lists contain duplicates");
    for (const VarId &v : source_)
        if (v.primed) throw input_error("substitution source variable is primed: " + v.str());
    for (const VarId &v : target_)
        if (v.primed) throw input_error("substitution target variable is primed: " + v.str());
    if (mapping_.size() != tgt.size())
        throw input_error("substitution is not total on its target set");
    for (const auto &[v, term] : mapping_) {
        if (!tgt.count(v))
            throw input_error("substitution maps variable outside target set: " + v.str());
        for (const auto &[w, c] : term.coefficients())
            if (!src.count(w))
                throw domain_error("substitution term mentions non-source variable: " + w.str());
    }
}

Substitution Substitution::identity(const std::vector<VarId> &vars) {
    std::map<VarId, AffineTerm> m;
    for (const VarId &v : vars) m.emplace(v, AffineTerm::variable(v));
    return Substitution(vars, vars, std::move(m));
}

AffineTerm Substitution::image(const VarId &v) const {
    auto it = mapping_.find(v.unprime());
    if (it == mapping_.end())
        throw domain_error("variable outside substitution domain: " + v.str());
    if (!v.primed) return it->second;
    std::map<VarId, VarId> prime_all;
    for (const auto &[w, c] : it->second.coefficients()) prime_all.emplace(w, w.prime());
    return it->second.rename(prime_all);
}

std::string Substitution::str() const {
    std::ostringstream os;
    os << "[";
    bool first = true;
    for (const auto &[v, t] : mapping_) {
        if (!first) os << ", ";
        os << v.str() << " -> " << t.str();
        first = false;
    }
    os << "]";
    return os.str();
}

AffineTerm subst_apply(const AffineTerm &t, const Substitution &sigma) {
    AffineTerm out(t.constant());
    for (const auto &[v, c] : t.coefficients()) out += c * sigma.image(v);
    return out;
}

Substitution compose(const Substitution &sigma, const Substitution &tau) {
    std::map<VarId, AffineTerm> m;
    for (const auto &[v, t] : sigma.mapping()) m.emplace(v, subst_apply(t, tau));
    return Substitution(tau.source_variables(), sigma.target_variables(), std::move(m));
}

} // namespace polysum
