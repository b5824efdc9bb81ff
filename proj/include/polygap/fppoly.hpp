#pragma once

// Univariate polynomial arithmetic over F_p (p an odd word-sized prime,
// p = 2 handled by the callers via direct scan). Coefficients ascending.

#include <vector>

#include "polygap/util.hpp"

namespace polygap::fp {

using Poly = std::vector<u64>;  // c[0] + c[1] x + ..., c.back() != 0 unless empty

inline void normalize(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const Poly& a) { return (int)a.size() - 1; }

Poly mul(const Poly& a, const Poly& b, u64 p);
Poly mod(Poly a, const Poly& m, u64 p);
Poly gcd(Poly a, Poly b, u64 p);
Poly make_monic(Poly a, u64 p);

// x^e mod (m, p) by square-and-multiply
Poly xpow_mod(u64 e, const Poly& m, u64 p);

// (base)^e mod (m, p)
Poly pow_mod(Poly base, u64 e, const Poly& m, u64 p);

// distinct roots of a (not identically zero mod p) in [0, p), sorted.
// Uses gcd(x^p - x, a) then equal-degree splitting with a deterministic
// stream derived from (seed, p).
std::vector<u64> roots(const Poly& a, u64 p, u64 seed = 0x726f6f74ULL);

// true iff a is irreducible over F_p (deg >= 1); Rabin's test
bool irreducible(const Poly& a, u64 p);

}  // namespace polygap::fp
