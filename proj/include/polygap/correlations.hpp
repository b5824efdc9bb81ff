#pragma once

// The weight E_A(m;H) over squarefree moduli with prime factors in (H^M, z],
// exact small-modulus expectation identities for |S cap [1,y]|, and Monte
// Carlo verification of the correlation identities behind the concentration
// argument.

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "polygap/engine.hpp"
#include "polygap/sieve_table.hpp"

namespace polygap {

struct RangeTooLarge : std::invalid_argument {
    explicit RangeTooLarge(const std::string& w) : std::invalid_argument(w) {}
};
struct ModulusTooLarge : std::invalid_argument {
    explicit ModulusTooLarge(const std::string& w) : std::invalid_argument(w) {}
};
struct EmptyBlock : std::runtime_error {
    explicit EmptyBlock(const std::string& w) : std::runtime_error(w) {}
};

struct CorrelationParams {
    double H = 0;
    double M = 0;
    u64 z = 0;
    long long K = 0;
    int B = 0;
    // enumeration caps
    int max_omega = 6;
    double d_cap_exponent = 3;  // D <= z^exponent

    double A() const { return 8.0 * B * B * B * (double)(K * K) * H * H; }
    double lo() const { return std::pow(H, M); }  // prime range (H^M, z]
};

struct EWeight {
    double value = 0;
    double excluded = 0;  // exact contribution cut off by the caps
    int qualifying_primes = 0;
};

// E_A(m;H) summed over qualifying squarefree D with the configured caps
EWeight e_weight(const CorrelationParams& params, const SieveTable& table, const mpz_class& m);
// oracle: full enumeration of all squarefree D over the range (<= 12 primes)
double e_weight_bruteforce(const CorrelationParams& params, const SieveTable& table,
                           const mpz_class& m);

struct ExactExpectation {
    mpq_class mean;
    mpq_class second_moment;
    mpq_class sigma_y;  // sigma * y as an exact rational
    u64 modulus = 0;    // P(z)
};

// iterates every b in [0, P(z)) exactly; P(z) <= 10^7 required
ExactExpectation exact_expectation_small(const IntValuedPoly& f, u64 z, u64 y);

enum class Thm3Quantity { I, II, III };

struct EstimateReport {
    std::string quantity;  // thm3-i / thm3-ii / thm3-iii
    double H = 0;
    int nu = 0;
    int i = 0;
    int j = 0;
    u64 trials = 0;
    double mean = 0;
    double prediction = 0;
    double rel_dev = 0;
    double stderr_mean = 0;
};

EstimateReport mc_theorem3(const IntValuedPoly& f, const SieveTable& table,
                           const ScaleParams& scale, Thm3Quantity kind, double H, int nu, int i,
                           int j, u64 trials, u64 seed, unsigned threads = 1);

}  // namespace polygap
