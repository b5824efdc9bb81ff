#include "polygap/verify.hpp"

#include <algorithm>
#include <map>

namespace polygap {

namespace {

// local primality test so the checker does not lean on engine-side helpers
bool checker_is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    auto mul = [](u64 a, u64 b, u64 m) { return (u64)((unsigned __int128)a * b % m); };
    auto pw = [&](u64 a, u64 e, u64 m) {
        u64 r = 1 % m;
        a %= m;
        while (e) {
            if (e & 1) r = mul(r, a, m);
            a = mul(a, a, m);
            e >>= 1;
        }
        return r;
    };
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = pw(a % n, d, n);
        if (x <= 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mul(x, x, n);
            if (x == n - 1) { comp = false; break; }
        }
        if (comp) return false;
    }
    return true;
}

}  // namespace

VerifyReport verify_certificate(const GapCertificate& cert) {
    VerifyReport rep;
    IntValuedPoly f = [&] {
        try {
            return IntValuedPoly::parse(cert.poly_text);
        } catch (const std::exception& e) {
            rep.fail(std::string("polynomial text rejected: ") + e.what());
            return IntValuedPoly::parse("binom:[0,1]");
        }
    }();
    if (!rep.pass) return rep;
    const mpz_class& t = f.denominator();
    int d = f.degree();
    if (f.leading() <= 0) rep.fail("leading coefficient not positive");
    if (cert.n0 <= 0) rep.fail("n0 must be positive");
    if (cert.y < 1) rep.fail("empty certificate range");

    std::map<u64, u64> shift_of;
    for (auto& [p, s] : cert.shifts) {
        if (!checker_is_prime(p)) rep.fail("shift modulus " + std::to_string(p) + " not prime");
        if (s >= p) rep.fail("shift out of range for p=" + std::to_string(p));
        if (shift_of.count(p)) rep.fail("duplicate shift for p=" + std::to_string(p));
        shift_of[p] = s;
    }
    // n0 == -s_p (mod p) for every recorded prime
    for (auto& [p, s] : shift_of) {
        u64 r = mpz_fdiv_ui(cert.n0.get_mpz_t(), p);
        if ((r + s) % p != 0)
            rep.fail("n0 inconsistent with shift at p=" + std::to_string(p));
    }
    // every offset m in [1, y] exactly once
    std::vector<u64> seen(cert.y + 1, 0);
    for (auto& [m, p] : cert.witnesses) {
        if (m < 1 || m > cert.y) {
            rep.fail("witness offset out of range: " + std::to_string(m));
            continue;
        }
        if (seen[m]++) rep.fail("duplicate witness for m=" + std::to_string(m));
    }
    for (u64 m = 1; m <= cert.y; ++m)
        if (!seen[m]) {
            rep.fail("offset without witness: m=" + std::to_string(m));
            break;
        }
    if (!rep.pass) return rep;

    for (auto& [m, p] : cert.witnesses) {
        ++rep.offsets_checked;
        if (!checker_is_prime(p)) {
            rep.fail("witness " + std::to_string(p) + " at m=" + std::to_string(m) + " not prime");
            continue;
        }
        if (p > cert.x) {
            rep.fail("witness exceeds x at m=" + std::to_string(m));
            continue;
        }
        // p | t would not transfer divisibility from ft to f (p > d implies
        // p coprime to t since t | d!)
        if (p <= (u64)d && mpz_fdiv_ui(t.get_mpz_t(), p) == 0) {
            rep.fail("witness divides denominator at m=" + std::to_string(m));
            continue;
        }
        if (!shift_of.count(p)) {
            rep.fail("witness prime has no recorded shift: p=" + std::to_string(p));
            continue;
        }
        mpz_class value = f.eval_primitive(cert.n0 + m);
        if (!mpz_divisible_ui_p(value.get_mpz_t(), p)) {
            rep.fail("p does not divide ft(n0+m) at m=" + std::to_string(m));
            continue;
        }
        // f(n0+m) > p, i.e. ft(n0+m) > t*p
        if (value <= t * (long)p)
            rep.fail("f(n0+m) not larger than its witness at m=" + std::to_string(m));
    }
    return rep;
}

}  // namespace polygap
