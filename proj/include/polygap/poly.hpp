#pragma once

// Integer-valued polynomials with positive leading coefficient.
//
// Canonical internal form is the binomial basis f(x) = sum a_j binom(x,j)
// with all a_j integers (Polya: exactly the integer-valued polynomials).
// t is the minimal positive integer with t*f in Z[x]; ft = t*f is the
// primitive integer form used everywhere downstream.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polygap/util.hpp"

namespace polygap {

struct ZeroPolynomial : std::invalid_argument {
    ZeroPolynomial() : std::invalid_argument("zero polynomial") {}
};
struct NegativeLeadingCoefficient : std::invalid_argument {
    NegativeLeadingCoefficient() : std::invalid_argument("leading coefficient must be positive") {}
};
struct NotIntegerValued : std::invalid_argument {
    NotIntegerValued() : std::invalid_argument("polynomial is not integer-valued on Z") {}
};
struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

class IntValuedPoly {
  public:
    // f = sum coeffs[j] * binom(x, j), a_0 first
    static IntValuedPoly from_binomial(const std::vector<mpz_class>& coeffs);
    // power-basis rational coefficients, leading first
    // (c_d, ..., c_0 -> f = c_d x^d + ... + c_0); rejected unless
    // integer-valued on Z
    static IntValuedPoly from_rational(const std::vector<mpq_class>& coeffs);

    int degree() const { return (int)binom_.size() - 1; }
    const std::vector<mpz_class>& binom_coeffs() const { return binom_; }
    const std::vector<mpz_class>& primitive_coeffs() const { return prim_; }
    const mpz_class& denominator() const { return t_; }
    const mpz_class& leading() const { return prim_.back(); }

    // f(n), exact
    mpz_class operator()(const mpz_class& n) const;
    // ft(n) = t*f(n), exact
    mpz_class eval_primitive(const mpz_class& n) const;
    // ft(n) mod p for word-sized p
    u64 eval_primitive_mod(u64 n, u64 p) const;

    // rational power-basis coefficients prim[i]/t
    std::vector<mpq_class> rational_coeffs() const;

    // text forms: "binom:[a0,a1,...]" (canonical) and "poly:[c0,c1/q1,...]"
    std::string text() const;
    static IntValuedPoly parse(const std::string& text);

  private:
    IntValuedPoly() = default;
    void finalize();  // computes t_ and prim_ from binom_

    std::vector<mpz_class> binom_;
    std::vector<mpz_class> prim_;
    mpz_class t_;
};

enum class IrreducibilityStatus { Irreducible, Reducible, Unknown };

struct IrreducibilityReport {
    IrreducibilityStatus status = IrreducibilityStatus::Unknown;
    std::optional<u64> witness;                    // prime p with ft irreducible mod p
    std::optional<std::vector<mpz_class>> factor;  // nontrivial integer factor of pp(ft)
    u64 primes_tried = 0;
};

// Screens primes p not dividing c*t up to the budget for an irreducibility
// witness mod p; if none and deg <= 8, decides exactly (integer root test
// plus Kronecker factor search). deg > 8 without witness -> Unknown.
IrreducibilityReport irreducibility_check(const IntValuedPoly& f, u64 prime_budget);

// exact evaluation of an integer polynomial (ascending coefficients)
mpz_class eval_int_poly(const std::vector<mpz_class>& coeffs, const mpz_class& x);

}  // namespace polygap
