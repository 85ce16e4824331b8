#include "mandel/dyadic.hpp"

#include <cassert>
#include <charconv>
#include <cmath>

namespace mandel {

Dyadic::Dyadic(BigInt v) {
    if (mpz_sgn(v.get_mpz_t()) == 0) return;
    const mp_bitcnt_t shift = mpz_scan1(v.get_mpz_t(), 0);
    if (shift > 0) mpz_tdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), shift);
    num_ = std::move(v);
    exp_ = static_cast<long>(shift);
}

Dyadic Dyadic::from_parts(BigInt odd_numerator, long exponent) {
    assert(mpz_odd_p(odd_numerator.get_mpz_t()));
    Dyadic d;
    d.num_ = std::move(odd_numerator);
    d.exp_ = exponent;
    return d;
}

long Dyadic::valuation() const {
    if (is_zero()) throw std::domain_error("valuation undefined at zero");
    return exp_;
}

Dyadic Dyadic::operator-() const {
    Dyadic r(*this);
    mpz_neg(r.num_.get_mpz_t(), r.num_.get_mpz_t());
    return r;
}

Dyadic Dyadic::abs() const {
    Dyadic r(*this);
    mpz_abs(r.num_.get_mpz_t(), r.num_.get_mpz_t());
    return r;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    // Align to the smaller exponent, add, then strip trailing zero bits.
    const long e = std::min(a.exp_, b.exp_);
    BigInt sum;
    if (a.exp_ == e) {
        mpz_mul_2exp(sum.get_mpz_t(), b.num_.get_mpz_t(), static_cast<mp_bitcnt_t>(b.exp_ - e));
        sum += a.num_;
    } else {
        mpz_mul_2exp(sum.get_mpz_t(), a.num_.get_mpz_t(), static_cast<mp_bitcnt_t>(a.exp_ - e));
        sum += b.num_;
    }
    if (mpz_sgn(sum.get_mpz_t()) == 0) return Dyadic();
    const mp_bitcnt_t shift = mpz_scan1(sum.get_mpz_t(), 0);
    if (shift > 0) mpz_tdiv_q_2exp(sum.get_mpz_t(), sum.get_mpz_t(), shift);
    return Dyadic::from_parts(std::move(sum), e + static_cast<long>(shift));
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return Dyadic();
    // Odd times odd stays odd: no renormalization needed.
    BigInt prod;
    mpz_mul(prod.get_mpz_t(), a.num_.get_mpz_t(), b.num_.get_mpz_t());
    return Dyadic::from_parts(std::move(prod), a.exp_ + b.exp_);
}

double Dyadic::to_double() const {
    if (is_zero()) return 0.0;
    long e2 = 0;
    const double mant = mpz_get_d_2exp(&e2, num_.get_mpz_t());
    return std::ldexp(mant, static_cast<int>(e2 + exp_));
}

Rational Dyadic::to_rational() const {
    if (is_zero()) return Rational(0);
    Rational r(num_);
    if (exp_ >= 0) {
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
    } else {
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-exp_));
    }
    return r;  // numerator odd, denominator a power of two: already canonical
}

std::string Dyadic::str() const {
    if (is_zero()) return "0";
    if (exp_ > 0) return num_.get_str() + "*2^" + std::to_string(exp_);
    return num_.get_str() + "/2^" + std::to_string(-exp_);
}

Dyadic Dyadic::parse(std::string_view s) {
    if (s == "0") return Dyadic();
    const auto pos = s.find("2^");
    if (pos == std::string_view::npos || pos == 0)
        throw std::invalid_argument("malformed dyadic literal: " + std::string(s));
    const char sep = s[pos - 1];
    if (sep != '/' && sep != '*')
        throw std::invalid_argument("malformed dyadic literal: " + std::string(s));
    BigInt p;
    if (p.set_str(std::string(s.substr(0, pos - 1)), 10) != 0)
        throw std::invalid_argument("malformed dyadic numerator: " + std::string(s));
    long e = 0;
    const auto es = s.substr(pos + 2);
    const auto [ptr, ec] = std::from_chars(es.data(), es.data() + es.size(), e);
    if (ec != std::errc() || ptr != es.data() + es.size())
        throw std::invalid_argument("malformed dyadic exponent: " + std::string(s));
    if (mpz_sgn(p.get_mpz_t()) == 0 || mpz_even_p(p.get_mpz_t()))
        throw std::invalid_argument("dyadic numerator must be odd and nonzero: " + std::string(s));
    return from_parts(std::move(p), sep == '/' ? -e : e);
}

Rational gen_binomial(const Rational& a, unsigned long j) {
    if (j == 0) return Rational(1);
    const BigInt& p = a.get_num();
    const BigInt& q = a.get_den();
    BigInt num = 1;
    BigInt term;
    for (unsigned long i = 0; i < j; ++i) {
        // a - i over the common denominator q
        term = p - i * q;
        num *= term;
    }
    BigInt den;
    mpz_pow_ui(den.get_mpz_t(), q.get_mpz_t(), j);
    BigInt fact;
    mpz_fac_ui(fact.get_mpz_t(), j);
    den *= fact;
    Rational r;
    r.get_num() = std::move(num);
    r.get_den() = std::move(den);
    r.canonicalize();
    return r;
}

Dyadic to_dyadic(const Rational& x) {
    const BigInt& num = x.get_num();
    const BigInt& den = x.get_den();
    if (mpz_sgn(num.get_mpz_t()) == 0) return Dyadic();
    // x is canonical, so den > 0 and gcd(num, den) = 1; dyadic iff den = 2^k.
    if (mpz_popcount(den.get_mpz_t()) != 1)
        throw NotDyadicError("not dyadic: denominator " + den.get_str() + " has an odd factor");
    const long k = static_cast<long>(mpz_scan1(den.get_mpz_t(), 0));
    Dyadic d(num);  // strips any factor of 2 in the numerator
    return Dyadic::from_parts(d.numerator(), d.exponent() - k);
}

}  // namespace mandel
