#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mandel {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Thrown when a rational with an odd prime factor in its denominator is
/// forced into dyadic form.
struct NotDyadicError : std::domain_error {
    explicit NotDyadicError(const std::string& what) : std::domain_error(what) {}
};

/// Exact value p * 2^e with p odd, or zero. The odd-numerator normal form
/// means addition only ever aligns exponents and strips trailing zero bits;
/// no gcd is computed anywhere on the hot path.
class Dyadic {
  public:
    Dyadic() = default;  // zero
    Dyadic(long v) : Dyadic(BigInt(v)) {}
    explicit Dyadic(BigInt v);

    /// Assembles p * 2^e from an already-odd numerator.
    static Dyadic from_parts(BigInt odd_numerator, long exponent);

    bool is_zero() const { return mpz_sgn(num_.get_mpz_t()) == 0; }
    const BigInt& numerator() const { return num_; }
    long exponent() const { return exp_; }

    /// The 2-adic valuation; undefined at zero.
    long valuation() const;

    Dyadic operator-() const;
    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }
    bool operator==(const Dyadic& o) const { return exp_ == o.exp_ && num_ == o.num_; }
    bool operator!=(const Dyadic& o) const { return !(*this == o); }

    Dyadic abs() const;
    double to_double() const;
    Rational to_rational() const;

    /// "p/2^e" (e = -valuation >= 0), "p*2^e" (e > 0), or "0".
    std::string str() const;
    static Dyadic parse(std::string_view s);

  private:
    BigInt num_;    // odd when nonzero
    long exp_ = 0;  // zero value keeps exp_ == 0
};

/// Generalized binomial coefficient a(a-1)...(a-j+1)/j!. The numerator
/// product accumulates over the common denominator q^j and is reduced once
/// at the end.
Rational gen_binomial(const Rational& a, unsigned long j);

/// Normal-form dyadic equivalent of x; throws NotDyadicError if the reduced
/// denominator has an odd prime factor.
Dyadic to_dyadic(const Rational& x);

}  // namespace mandel
