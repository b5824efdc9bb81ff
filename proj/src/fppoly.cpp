#include "polygap/fppoly.hpp"

#include <algorithm>

namespace polygap::fp {

Poly mul(const Poly& a, const Poly& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    }
    normalize(r);
    return r;
}

Poly mod(Poly a, const Poly& m, u64 p) {
    normalize(a);
    if (m.empty()) return a;
    u64 inv_lead = powmod(m.back(), p - 2, p);
    while (a.size() >= m.size()) {
        u64 c = mulmod(a.back(), inv_lead, p);
        std::size_t shift = a.size() - m.size();
        if (c)
            for (std::size_t i = 0; i < m.size(); ++i) {
                u64 sub = mulmod(c, m[i], p);
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
        a.pop_back();
        normalize(a);
        if (a.empty()) break;
    }
    return a;
}

Poly make_monic(Poly a, u64 p) {
    normalize(a);
    if (a.empty() || a.back() == 1) return a;
    u64 inv = powmod(a.back(), p - 2, p);
    for (auto& c : a) c = mulmod(c, inv, p);
    return a;
}

Poly gcd(Poly a, Poly b, u64 p) {
    normalize(a);
    normalize(b);
    while (!b.empty()) {
        Poly r = mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(std::move(a), p);
}

Poly xpow_mod(u64 e, const Poly& m, u64 p) {
    Poly base = mod(Poly{0, 1}, m, p);
    return pow_mod(std::move(base), e, m, p);
}

Poly pow_mod(Poly base, u64 e, const Poly& m, u64 p) {
    Poly r{1};
    base = mod(std::move(base), m, p);
    while (e) {
        if (e & 1) r = mod(mul(r, base, p), m, p);
        base = mod(mul(base, base, p), m, p);
        e >>= 1;
    }
    return r;
}

namespace {

// g is monic, squarefree, splits into distinct linear factors; collect roots.
void split_linear(const Poly& g, u64 p, Rng& rng, std::vector<u64>& out) {
    int d = degree(g);
    if (d <= 0) return;
    if (d == 1) {
        // x + c -> root -c
        out.push_back((p - g[0] % p) % p);
        return;
    }
    for (;;) {
        u64 a = rng.below(p);
        // gcd((x+a)^((p-1)/2) - 1, g)
        Poly xa{a, 1};
        Poly t = pow_mod(xa, (p - 1) / 2, g, p);
        if (t.empty())
            t = Poly{p - 1};  // 0 - 1
        else {
            t[0] = (t[0] + p - 1) % p;
            normalize(t);
        }
        Poly h = gcd(g, t, p);
        int dh = degree(h);
        if (dh <= 0 || dh >= d) continue;
        // g = h * g2
        Poly g2 = g;
        // divide g by h exactly
        {
            Poly q;
            Poly rem = g;
            normalize(rem);
            q.assign(rem.size() - h.size() + 1, 0);
            while ((int)rem.size() >= (int)h.size() && !rem.empty()) {
                u64 c = rem.back();  // h monic
                std::size_t shift = rem.size() - h.size();
                q[shift] = c;
                for (std::size_t i = 0; i < h.size(); ++i)
                    rem[shift + i] = (rem[shift + i] + p - mulmod(c, h[i], p)) % p;
                normalize(rem);
            }
            g2 = std::move(q);
            normalize(g2);
        }
        split_linear(h, p, rng, out);
        split_linear(g2, p, rng, out);
        return;
    }
}

}  // namespace

std::vector<u64> roots(const Poly& a, u64 p, u64 seed) {
    std::vector<u64> out;
    if (p == 2) {
        // direct evaluation
        for (u64 r = 0; r < 2; ++r) {
            u64 v = 0;
            for (std::size_t i = a.size(); i-- > 0;) v = (v * r + a[i]) % 2;
            if (v == 0) out.push_back(r);
        }
        return out;
    }
    Poly f = a;
    normalize(f);
    if (f.empty()) return out;
    // linear part: gcd(x^p - x, f)
    Poly xp = xpow_mod(p, f, p);
    // xp - x
    Poly t = xp;
    if (t.size() < 2) t.resize(2, 0);
    t[1] = (t[1] + p - 1) % p;
    normalize(t);
    Poly g = gcd(f, t, p);
    if (degree(g) <= 0) return out;
    if (g[0] == 0) {
        out.push_back(0);
        // divide by x
        g.erase(g.begin());
        normalize(g);
    }
    Rng rng(derive_stream(seed, p));
    split_linear(make_monic(std::move(g), p), p, rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

bool irreducible(const Poly& a, u64 p) {
    Poly f = make_monic(a, p);
    int d = degree(f);
    if (d <= 0) return false;
    if (d == 1) return true;
    // Rabin: x^(p^d) == x mod f, and gcd(x^(p^(d/q)) - x, f) = 1 for prime q | d
    auto frob_iter = [&](int k) {
        // x^(p^k) mod f by iterated powering in F_p[x]/(f)
        Poly cur = xpow_mod(p, f, p);
        for (int i = 1; i < k; ++i) cur = pow_mod(cur, p, f, p);
        return cur;
    };
    std::vector<int> prime_divs;
    int dd = d;
    for (int q = 2; q * q <= dd; ++q)
        while (dd % q == 0) {
            if (prime_divs.empty() || prime_divs.back() != q) prime_divs.push_back(q);
            dd /= q;
        }
    if (dd > 1) prime_divs.push_back(dd);
    for (int q : prime_divs) {
        Poly h = frob_iter(d / q);
        // h - x
        if (h.size() < 2) h.resize(2, 0);
        h[1] = (h[1] + p - 1) % p;
        normalize(h);
        Poly g = gcd(f, h, p);
        if (degree(g) != 0) return false;
    }
    Poly h = frob_iter(d);
    if (h.size() < 2) h.resize(2, 0);
    h[1] = (h[1] + p - 1) % p;
    normalize(h);
    return h.empty();
}

}  // namespace polygap::fp
