#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace polysum {

// Exact rational number backed by GMP.  Always stored in canonical form:
// gcd(|num|, den) = 1, den > 0, zero is 0/1.
class Rational {
  public:
    Rational() : value_(0) {}
    Rational(long n) : value_(n) {} // NOLINT(google-explicit-constructor)
    Rational(long num, long den);
    explicit Rational(const mpq_class &q) : value_(q) { value_.canonicalize(); }
    explicit Rational(const mpz_class &n) : value_(n) {}
    Rational(const mpz_class &num, const mpz_class &den);

    static Rational from_string(const std::string &text);

    const mpq_class &raw() const { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }

    bool is_zero() const { return sgn(value_) == 0; }
    bool is_integer() const { return value_.get_den() == 1; }
    int sign() const { return sgn(value_); }

    Rational operator-() const { return Rational(mpq_class(-value_)); }
    Rational abs() const { return sign() < 0 ? -*this : *this; }
    Rational inverse() const;

    Rational &operator+=(const Rational &o);
    Rational &operator-=(const Rational &o);
    Rational &operator*=(const Rational &o);
    Rational &operator/=(const Rational &o);

    friend Rational operator+(Rational a, const Rational &b) { return a += b; }
    friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

    friend bool operator==(const Rational &a, const Rational &b) {
        return a.value_ == b.value_;
    }
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
        int c = cmp(a.value_, b.value_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    // Largest integer <= this, smallest integer >= this.
    mpz_class floor() const;
    mpz_class ceil() const;

    std::string str() const;

  private:
    mpq_class value_;
};

std::ostream &operator<<(std::ostream &os, const Rational &r);

} // namespace polysum
