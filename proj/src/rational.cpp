#include "polysum/rational.hpp"

#include "polysum/error.hpp"

#include <ostream>

namespace polysum {

Rational::Rational(long num, long den) {
    if (den == 0) throw arithmetic_error("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational::Rational(const mpz_class &num, const mpz_class &den) {
    if (den == 0) throw arithmetic_error("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational Rational::from_string(const std::string &text) {
    mpq_class q;
    if (q.set_str(text, 10) != 0)
        throw arithmetic_error("malformed rational literal: " + text);
    if (q.get_den() == 0) throw arithmetic_error("rational with zero denominator");
    q.canonicalize();
    return Rational(q);
}

Rational Rational::inverse() const {
    if (is_zero()) throw arithmetic_error("division by zero");
    return Rational(mpq_class(1) / value_);
}

Rational &Rational::operator+=(const Rational &o) {
    value_ += o.value_;
    return *this;
}

Rational &Rational::operator-=(const Rational &o) {
    value_ -= o.value_;
    return *this;
}

Rational &Rational::operator*=(const Rational &o) {
    value_ *= o.value_;
    return *this;
}

Rational &Rational::operator/=(const Rational &o) {
    if (o.is_zero()) throw arithmetic_error("division by zero");
    value_ /= o.value_;
    return *this;
}

mpz_class Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), value_.get_num().get_mpz_t(), value_.get_den().get_mpz_t());
    return q;
}

mpz_class Rational::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), value_.get_num().get_mpz_t(), value_.get_den().get_mpz_t());
    return q;
}

std::string Rational::str() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.str(); }

} // namespace polysum
