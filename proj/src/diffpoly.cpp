#include "polygap/diffpoly.hpp"

#include <algorithm>
#include <cmath>

#include "polygap/fppoly.hpp"

namespace polygap {

u64 DifferencePoly::eval_mod(u64 x, u64 p) const {
    u64 v = 0;
    x %= p;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        u64 c = mpz_fdiv_ui(coeffs[i].get_mpz_t(), p);
        v = (mulmod(v, x, p) + c) % p;
    }
    return v;
}

namespace {

// determinant of an integer matrix by fraction-free Bareiss elimination
mpz_class bareiss_det(std::vector<std::vector<mpz_class>> m) {
    std::size_t n = m.size();
    if (n == 0) return 1;
    mpz_class sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

// Res_y(a(y), b(y)) for integer polynomials (ascending), deg a = deg b = d
mpz_class resultant(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
    int da = (int)a.size() - 1, db = (int)b.size() - 1;
    int n = da + db;
    std::vector<std::vector<mpz_class>> syl(n, std::vector<mpz_class>(n, mpz_class(0)));
    // rows of a (db rows), coefficients descending
    for (int r = 0; r < db; ++r)
        for (int j = 0; j <= da; ++j) syl[r][r + j] = a[da - j];
    for (int r = 0; r < da; ++r)
        for (int j = 0; j <= db; ++j) syl[db + r][r + j] = b[db - j];
    return bareiss_det(std::move(syl));
}

// coefficients of ft(x0 + y) as a polynomial in y (ascending), exact
std::vector<mpz_class> taylor_shift(const std::vector<mpz_class>& c, const mpz_class& x0) {
    int d = (int)c.size() - 1;
    // b_j = sum_{i>=j} c_i binom(i,j) x0^(i-j)
    std::vector<mpz_class> out(d + 1, mpz_class(0));
    std::vector<std::vector<mpz_class>> binom(d + 1, std::vector<mpz_class>(d + 1, mpz_class(0)));
    for (int i = 0; i <= d; ++i) {
        binom[i][0] = 1;
        for (int j = 1; j <= i; ++j)
            binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : mpz_class(0));
    }
    std::vector<mpz_class> pows(d + 1);
    pows[0] = 1;
    for (int i = 1; i <= d; ++i) pows[i] = pows[i - 1] * x0;
    for (int j = 0; j <= d; ++j)
        for (int i = j; i <= d; ++i) out[j] += c[i] * binom[i][j] * pows[i - j];
    return out;
}

}  // namespace

DifferencePoly build_difference_poly(const IntValuedPoly& f, bool override_irreducibility,
                                     u64 screen_budget) {
    int d = f.degree();
    if (!override_irreducibility) {
        auto rep = irreducibility_check(f, screen_budget);
        if (rep.status != IrreducibilityStatus::Irreducible) throw NotIrreducible();
    }
    const auto& ft = f.primitive_coeffs();
    const mpz_class& c = f.leading();
    int degF = d * d;
    // F = c^(d^2-d) * Res_y(ft(y), ft(x+y)); evaluate at degF+1 points and
    // interpolate exactly
    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), c.get_mpz_t(), (unsigned long)(degF - d));
    std::vector<mpz_class> pts;
    pts.push_back(0);
    for (int i = 1; (int)pts.size() < degF + 1; ++i) {
        pts.push_back(i);
        if ((int)pts.size() < degF + 1) pts.push_back(-i);
    }
    std::vector<mpz_class> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto shifted = taylor_shift(ft, pts[i]);
        vals[i] = scale * resultant(ft, shifted);
    }
    // Newton's divided differences in exact rationals, then expand
    std::size_t n = pts.size();
    std::vector<mpq_class> dd(n);
    for (std::size_t i = 0; i < n; ++i) dd[i] = vals[i];
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / mpq_class(pts[i] - pts[i - j]);
            dd[i].canonicalize();
            if (i == j) break;
        }
    std::vector<mpq_class> poly{dd[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        // poly = poly * (x - pts[i]) + dd[i]
        std::vector<mpq_class> next(poly.size() + 1, mpq_class(0));
        for (std::size_t j = 0; j < poly.size(); ++j) {
            next[j + 1] += poly[j];
            next[j] -= poly[j] * pts[i];
        }
        next[0] += dd[i];
        poly = std::move(next);
    }
    DifferencePoly F;
    F.degree = degF;
    F.source_text = f.text();
    F.coeffs.resize(degF + 1);
    for (int i = 0; i <= degF; ++i) {
        poly[i].canonicalize();
        if (poly[i].get_den() != 1)
            throw LemmaViolated("difference polynomial interpolation produced a non-integer");
        F.coeffs[i] = poly[i].get_num();
    }
    for (std::size_t i = degF + 1; i < poly.size(); ++i)
        if (poly[i] != 0) throw LemmaViolated("difference polynomial degree overflow");
    if (F.coeffs[0] != 0) throw LemmaViolated("F(0) must vanish");
    return F;
}

LemmaFReport check_lemma_F(const IntValuedPoly& f, const DifferencePoly& F, u64 prime_bound,
                           u64 range) {
    LemmaFReport rep;
    for (u64 q = 2; q <= prime_bound; ++q) {
        if (!is_prime_u64(q)) continue;
        auto roots = residues_for_prime(f, q);
        for (u64 a : roots)
            for (u64 b : roots) {
                ++rep.pairs_checked;
                u64 diff = (a + q - b) % q;
                if (F.eval_mod(diff, q) != 0) {
                    rep.divisibility_ok = false;
                    if (!rep.bad_pair) rep.bad_pair = {q, a, b};
                }
            }
    }
    for (long long l = 1; (u64)l <= range; ++l) {
        for (long long s : {l, -l}) {
            ++rep.values_checked;
            if (F(mpz_class((long)s)) == 0) {
                rep.nonvanishing_ok = false;
                if (!rep.bad_l) rep.bad_l = s;
            }
        }
    }
    return rep;
}

namespace {

// v mod p in I_p - I_p, for the i-th table prime
bool in_difference_set(const SieveTable& table, std::size_t i, u64 v_mod_p) {
    auto [rb, re] = table.residues_at(i);
    u64 p = table.prime_at(i);
    for (const u64* a = rb; a != re; ++a)
        for (const u64* b = rb; b != re; ++b)
            if ((*a + p - *b) % p == v_mod_p) return true;
    return false;
}

}  // namespace

NvReport count_nv(const SieveTable& table, const mpz_class& v) {
    if (v == 0) throw ZeroArgument();
    NvReport rep;
    rep.v = v;
    for (std::size_t i = 0; i < table.prime_count(); ++i) {
        if (table.residue_count(i) == 0) continue;
        u64 p = table.prime_at(i);
        u64 vm = mpz_fdiv_ui(v.get_mpz_t(), p);
        if (in_difference_set(table, i, vm)) {
            ++rep.count;
            rep.witnesses.push_back(p);
        }
    }
    return rep;
}

NvReport nv_via_factorization(const DifferencePoly& F, const SieveTable& table,
                              const mpz_class& v) {
    if (v == 0) throw ZeroArgument();
    NvReport rep;
    rep.v = v;
    mpz_class Fv = F(v);
    if (Fv == 0) throw LemmaViolated("F vanishes at a nonzero integer");
    mpz_class cof = abs(Fv);
    for (std::size_t i = 0; i < table.prime_count(); ++i) {
        u64 p = table.prime_at(i);
        // candidate iff p | F(v); test via Horner mod p
        if (F.eval_mod(mpz_fdiv_ui(v.get_mpz_t(), p), p) != 0) continue;
        while (mpz_divisible_ui_p(cof.get_mpz_t(), p)) mpz_divexact_ui(cof.get_mpz_t(), cof.get_mpz_t(), p);
        if (table.residue_count(i) == 0) continue;
        u64 vm = mpz_fdiv_ui(v.get_mpz_t(), p);
        if (in_difference_set(table, i, vm)) {
            ++rep.count;
            rep.witnesses.push_back(p);
        }
    }
    if (cof != 1) rep.unresolved_cofactor = cof;
    return rep;
}

// --- tau sums -----------------------------------------------------------

namespace {

// Pollard-Brent on mpz; n composite, no factor <= sieved bound
mpz_class pollard_rho(const mpz_class& n, u64 seed) {
    Rng rng(seed);
    for (;;) {
        mpz_class c = (unsigned long)(rng.below(1000000) + 1);
        mpz_class x = (unsigned long)(rng.below(1000000) + 2);
        mpz_class y = x, d = 1;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            mpz_class diff = x > y ? x - y : y - x;
            if (diff == 0) break;
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != 1 && d != n) return d;
    }
}

void factor_into(const mpz_class& n, std::map<mpz_class, unsigned>& out, u64 seed) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
        ++out[n];
        return;
    }
    if (mpz_perfect_square_p(n.get_mpz_t())) {
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
        std::map<mpz_class, unsigned> sub;
        factor_into(r, sub, seed);
        for (auto& [p, e] : sub) out[p] += 2 * e;
        return;
    }
    mpz_class d = pollard_rho(n, seed);
    factor_into(d, out, seed + 1);
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    factor_into(q, out, seed + 2);
}

}  // namespace

mpz_class tau_sum(const std::vector<mpz_class>& g, u64 x) {
    if (x == 0) return 0;
    std::vector<mpz_class> vals(x + 1);
    std::vector<mpz_class> tau(x + 1, 1);
    for (u64 k = 1; k <= x; ++k) {
        vals[k] = abs(eval_int_poly(g, mpz_class(k)));
        if (vals[k] == 0)
            throw ZeroValueEncountered("g(" + std::to_string(k) + ") = 0");
    }
    // divide out primes p <= x along the arithmetic progressions of the
    // roots of g mod p
    for (u64 p : primes_upto(x)) {
        fp::Poly gm(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) gm[i] = mpz_fdiv_ui(g[i].get_mpz_t(), p);
        fp::normalize(gm);
        std::vector<u64> roots;
        if (gm.empty()) {
            for (u64 r = 0; r < p; ++r) roots.push_back(r);  // p divides every value
        } else {
            roots = fp::roots(gm, p);
        }
        for (u64 r : roots) {
            for (u64 k = (r == 0 ? p : r); k <= x; k += p) {
                unsigned e = 0;
                while (mpz_divisible_ui_p(vals[k].get_mpz_t(), p)) {
                    mpz_divexact_ui(vals[k].get_mpz_t(), vals[k].get_mpz_t(), p);
                    ++e;
                }
                tau[k] *= e + 1;
            }
        }
    }
    mpz_class total = 0;
    for (u64 k = 1; k <= x; ++k) {
        if (vals[k] != 1) {
            std::map<mpz_class, unsigned> fac;
            factor_into(vals[k], fac, 0x7461755fULL + k);
            for (auto& [p, e] : fac) tau[k] *= e + 1;
        }
        total += tau[k];
    }
    return total;
}

// --- hypothesis (g) -----------------------------------------------------

std::optional<long long> smallest_difference_rep(const SieveTable& table, std::size_t qi, u64 u) {
    u64 q = table.prime_at(qi);
    auto [rb, re] = table.residues_at(qi);
    long long best = 0;
    bool have = false;
    auto consider = [&](long long m) {
        if (m == 0 || (u64)std::llabs(m) > u) return;
        if (!have || std::llabs(m) < std::llabs(best) ||
            (std::llabs(m) == std::llabs(best) && m > best)) {
            best = m;
            have = true;
        }
    };
    for (const u64* a = rb; a != re; ++a)
        for (const u64* b = rb; b != re; ++b) {
            u64 delta = (*a + q - *b) % q;
            if (delta == 0) {
                consider((long long)q);
                consider(-(long long)q);
            } else {
                consider((long long)delta);
                consider((long long)delta - (long long)q);
            }
        }
    if (!have) return std::nullopt;
    return best;
}

HypGHistogram hyp_g_tail(const SieveTable& table, u64 u, long long w) {
    HypGHistogram h;
    h.u = u;
    h.w = w;
    std::vector<u64> nvals;
    std::size_t qn = count_upto(table.primes(), u);
    for (std::size_t qi = 0; qi < qn; ++qi) {
        if (table.residue_count(qi) == 0) continue;
        auto mq = smallest_difference_rep(table, qi, u);
        if (!mq) continue;
        ++h.primes_considered;
        long long m = *mq + w;
        if (m == 0) continue;
        nvals.push_back(count_nv(table, mpz_class((long)m)).count);
    }
    u64 kmax = 0;
    for (u64 n : nvals) kmax = std::max(kmax, n);
    h.counts.assign(kmax, 0);
    for (u64 n : nvals)
        for (u64 k = 1; k <= n; ++k) ++h.counts[k - 1];
    // least-squares slope of log(count) on k over nonzero counts
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (u64 k = 1; k <= kmax; ++k) {
        if (!h.counts[k - 1]) continue;
        double xk = (double)k, yk = std::log((double)h.counts[k - 1]);
        sx += xk;
        sy += yk;
        sxx += xk * xk;
        sxy += xk * yk;
        ++npts;
    }
    h.log_slope = npts >= 2 ? (npts * sxy - sx * sy) / (npts * sxx - sx * sx) : 0;
    return h;
}

}  // namespace polygap
