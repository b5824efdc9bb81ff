#pragma once

// The difference polynomial F of degree d^2 whose roots are the pairwise
// differences r_i - r_j of the roots of f, computed exactly as
// c^(d^2-d) * Res_y(ft(y), ft(x+y)) without ever materializing the roots.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polygap/poly.hpp"
#include "polygap/sieve_table.hpp"

namespace polygap {

struct NotIrreducible : std::runtime_error {
    NotIrreducible()
        : std::runtime_error("polynomial not screened irreducible (pass override to force)") {}
};
struct ZeroArgument : std::invalid_argument {
    ZeroArgument() : std::invalid_argument("argument must be nonzero") {}
};
struct ZeroValueEncountered : std::runtime_error {
    explicit ZeroValueEncountered(const std::string& w) : std::runtime_error(w) {}
};
struct LemmaViolated : std::runtime_error {
    explicit LemmaViolated(const std::string& w) : std::runtime_error(w) {}
};

struct DifferencePoly {
    std::vector<mpz_class> coeffs;  // ascending, size d^2 + 1
    int degree = 0;
    std::string source_text;

    mpz_class operator()(const mpz_class& x) const { return eval_int_poly(coeffs, x); }
    u64 eval_mod(u64 x, u64 p) const;
};

// requires f screened irreducible unless override
DifferencePoly build_difference_poly(const IntValuedPoly& f, bool override_irreducibility = false,
                                     u64 screen_budget = 50);

struct LemmaFReport {
    bool integer_coeffs = true;   // F has integer coefficients (by construction)
    bool divisibility_ok = true;  // q | F(a-b) for all roots a, b of ft mod q, q <= prime_bound
    bool nonvanishing_ok = true;  // F(l) != 0 for 1 <= |l| <= range
    u64 pairs_checked = 0;
    u64 values_checked = 0;
    // first counterexample, if any
    std::optional<std::tuple<u64, u64, u64>> bad_pair;  // (q, a, b)
    std::optional<long long> bad_l;
};

LemmaFReport check_lemma_F(const IntValuedPoly& f, const DifferencePoly& F, u64 prime_bound,
                           u64 range);

struct NvReport {
    mpz_class v;
    u64 count = 0;
    std::vector<u64> witnesses;
    // nv_via_factorization: cofactor of F(v) left unfactored over table primes
    std::optional<mpz_class> unresolved_cofactor;
};

// N(v) = #{p <= table.limit : v mod p in I_p - I_p}, by direct scan
NvReport count_nv(const SieveTable& table, const mpz_class& v);
// same count via the prime divisors of F(v) filtered by the membership test
NvReport nv_via_factorization(const DifferencePoly& F, const SieveTable& table,
                              const mpz_class& v);

// exact sum_{k<=x} tau(|g(k)|) for an integer polynomial g (ascending coeffs)
mpz_class tau_sum(const std::vector<mpz_class>& g, u64 x);

struct HypGHistogram {
    u64 u = 0;
    long long w = 0;
    u64 primes_considered = 0;  // q <= u with a valid m_q
    // counts[k-1] = #{q : N(m_q + w) >= k}
    std::vector<u64> counts;
    // least-squares slope of log(count) vs k over nonzero counts
    double log_slope = 0;
};

HypGHistogram hyp_g_tail(const SieveTable& table, u64 u, long long w);

// the m_q choice used by hyp_g_tail: smallest |m| != 0 with
// m mod q in I_q - I_q and |m| <= u, ties toward positive
std::optional<long long> smallest_difference_rep(const SieveTable& table, std::size_t qi, u64 u);

}  // namespace polygap
