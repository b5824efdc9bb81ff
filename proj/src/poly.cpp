#include "polygap/poly.hpp"

#include <algorithm>

#include "polygap/fppoly.hpp"
#include "polygap/util.hpp"

namespace polygap {

mpz_class eval_int_poly(const std::vector<mpz_class>& coeffs, const mpz_class& x) {
    mpz_class v = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
    return v;
}

IntValuedPoly IntValuedPoly::from_binomial(const std::vector<mpz_class>& coeffs) {
    std::vector<mpz_class> a = coeffs;
    while (!a.empty() && a.back() == 0) a.pop_back();
    if (a.empty()) throw ZeroPolynomial();
    if (a.back() < 0) throw NegativeLeadingCoefficient();
    IntValuedPoly f;
    f.binom_ = std::move(a);
    f.finalize();
    return f;
}

void IntValuedPoly::finalize() {
    // expand sum a_j binom(x,j) in the power basis over Q:
    // binom(x,j) = x(x-1)...(x-j+1)/j!
    int d = degree();
    std::vector<mpq_class> power(d + 1, mpq_class(0));
    std::vector<mpq_class> falling{mpq_class(1)};  // falling factorial, ascending coeffs
    mpz_class jfact = 1;
    for (int j = 0; j <= d; ++j) {
        if (j > 0) {
            jfact *= j;
            // falling *= (x - (j-1))
            std::vector<mpq_class> next(falling.size() + 1, mpq_class(0));
            for (std::size_t i = 0; i < falling.size(); ++i) {
                next[i + 1] += falling[i];
                next[i] -= falling[i] * (j - 1);
            }
            falling = std::move(next);
        }
        if (binom_[j] != 0) {
            mpq_class scale(binom_[j], jfact);
            scale.canonicalize();
            for (std::size_t i = 0; i < falling.size(); ++i) power[i] += falling[i] * scale;
        }
    }
    // t = lcm of denominators
    t_ = 1;
    for (auto& q : power) {
        q.canonicalize();
        mpz_class den = q.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), t_.get_mpz_t(), den.get_mpz_t());
        t_ = t_ / g * den;
    }
    prim_.assign(d + 1, 0);
    for (int i = 0; i <= d; ++i) {
        mpq_class c = power[i] * t_;
        c.canonicalize();
        prim_[i] = c.get_num();  // exact: denominator is 1
    }
    if (prim_.back() <= 0) throw NegativeLeadingCoefficient();
}

IntValuedPoly IntValuedPoly::from_rational(const std::vector<mpq_class>& coeffs) {
    // input is leading-first; flip to ascending internally
    std::vector<mpq_class> c(coeffs.rbegin(), coeffs.rend());
    for (auto& q : c) q.canonicalize();
    while (!c.empty() && c.back() == 0) c.pop_back();
    if (c.empty()) throw ZeroPolynomial();
    if (c.back() < 0) throw NegativeLeadingCoefficient();
    int d = (int)c.size() - 1;
    // a_j = j-th finite difference of f at 0; integer for all j iff f is
    // integer-valued (Polya)
    std::vector<mpq_class> vals(d + 1);
    for (int n = 0; n <= d; ++n) {
        mpq_class v = 0;
        for (int i = d; i >= 0; --i) v = v * n + c[i];
        vals[n] = v;
    }
    std::vector<mpz_class> a(d + 1);
    for (int j = 0; j <= d; ++j) {
        if (j > 0)
            for (int i = 0; i <= d - j; ++i) vals[i] = vals[i + 1] - vals[i];
        mpq_class aj = vals[0];
        aj.canonicalize();
        if (aj.get_den() != 1) throw NotIntegerValued();
        a[j] = aj.get_num();
    }
    return from_binomial(a);
}

mpz_class IntValuedPoly::operator()(const mpz_class& n) const {
    mpz_class v = eval_primitive(n);
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), v.get_mpz_t(), t_.get_mpz_t());
    return q;
}

mpz_class IntValuedPoly::eval_primitive(const mpz_class& n) const {
    return eval_int_poly(prim_, n);
}

u64 IntValuedPoly::eval_primitive_mod(u64 n, u64 p) const {
    u64 v = 0;
    n %= p;
    for (std::size_t i = prim_.size(); i-- > 0;) {
        u64 c = mpz_fdiv_ui(prim_[i].get_mpz_t(), p);
        v = (mulmod(v, n, p) + c) % p;
    }
    return v;
}

std::vector<mpq_class> IntValuedPoly::rational_coeffs() const {
    std::vector<mpq_class> out(prim_.size());
    for (std::size_t i = 0; i < prim_.size(); ++i) {
        out[i] = mpq_class(prim_[i], t_);
        out[i].canonicalize();
    }
    return out;
}

std::string IntValuedPoly::text() const {
    std::string s = "binom:[";
    for (std::size_t i = 0; i < binom_.size(); ++i) {
        if (i) s += ',';
        s += binom_[i].get_str();
    }
    s += ']';
    return s;
}

namespace {

std::vector<std::string> split_list(const std::string& body) {
    std::vector<std::string> items;
    std::string cur;
    for (char ch : body) {
        if (ch == ',') {
            items.push_back(cur);
            cur.clear();
        } else if (!isspace((unsigned char)ch)) {
            cur += ch;
        }
    }
    if (!cur.empty() || !items.empty()) items.push_back(cur);
    return items;
}

}  // namespace

IntValuedPoly IntValuedPoly::parse(const std::string& text) {
    auto open = text.find('[');
    auto close = text.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("polynomial text must contain [...]: " + text);
    std::string head = text.substr(0, open);
    std::string body = text.substr(open + 1, close - open - 1);
    auto items = split_list(body);
    if (items.empty()) throw ParseError("empty coefficient list: " + text);
    if (head == "binom:") {
        std::vector<mpz_class> a;
        for (auto& s : items) {
            if (s.empty()) throw ParseError("empty coefficient in: " + text);
            a.emplace_back(s);
        }
        return from_binomial(a);
    }
    if (head == "poly:") {
        std::vector<mpq_class> c;
        for (auto& s : items) {
            if (s.empty()) throw ParseError("empty coefficient in: " + text);
            c.emplace_back(s);
            c.back().canonicalize();
        }
        return from_rational(c);
    }
    throw ParseError("unknown polynomial form (want binom:[...] or poly:[...]): " + text);
}

// ---------------------------------------------------------------------
// irreducibility screening

namespace {

// primitive part of ft (content removed), degree >= 1 assumed
std::vector<mpz_class> primitive_part(const std::vector<mpz_class>& c) {
    mpz_class g = 0;
    for (auto& x : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    std::vector<mpz_class> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        mpz_divexact(out[i].get_mpz_t(), c[i].get_mpz_t(), g.get_mpz_t());
    if (out.back() < 0)
        for (auto& x : out) x = -x;
    return out;
}

// exact division of integer polynomials; returns quotient iff divisor
// divides dividend over Q with integer quotient options handled by caller
std::optional<std::vector<mpq_class>> divide_rational(const std::vector<mpz_class>& num,
                                                      const std::vector<mpz_class>& den) {
    if (den.empty() || den.back() == 0) return std::nullopt;
    std::vector<mpq_class> rem(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) rem[i] = num[i];
    std::vector<mpq_class> q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0,
                             mpq_class(0));
    mpq_class lead(den.back());
    while (rem.size() >= den.size()) {
        mpq_class c = rem.back() / lead;
        c.canonicalize();
        std::size_t shift = rem.size() - den.size();
        q[shift] = c;
        for (std::size_t i = 0; i < den.size(); ++i) {
            rem[shift + i] -= c * den[i];
            rem[shift + i].canonicalize();
        }
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
        if (rem.empty()) break;
    }
    if (!rem.empty()) return std::nullopt;
    return q;
}

bool divides_exactly(const std::vector<mpz_class>& factor, const std::vector<mpz_class>& poly) {
    return divide_rational(poly, factor).has_value();
}

std::vector<mpz_class> all_divisors_signed(const mpz_class& n) {
    // all divisors of |n|, both signs; n != 0
    std::vector<mpz_class> divs;
    mpz_class a = abs(n);
    for (mpz_class d = 1; d * d <= a; ++d) {
        if (a % d == 0) {
            divs.push_back(d);
            mpz_class q = a / d;
            if (q != d) divs.push_back(q);
        }
    }
    std::size_t half = divs.size();
    for (std::size_t i = 0; i < half; ++i) divs.push_back(-divs[i]);
    return divs;
}

// Kronecker search: look for an integer factor of pp of degree k
std::optional<std::vector<mpz_class>> kronecker_factor(const std::vector<mpz_class>& pp, int k) {
    int d = (int)pp.size() - 1;
    // evaluation points 0, 1, -1, 2, -2, ...
    std::vector<mpz_class> pts;
    for (int i = 0; (int)pts.size() < k + 1; ++i) {
        if (i == 0)
            pts.push_back(0);
        else {
            pts.push_back(i);
            if ((int)pts.size() < k + 1) pts.push_back(-i);
        }
    }
    std::vector<mpz_class> vals(k + 1);
    for (int i = 0; i <= k; ++i) {
        vals[i] = eval_int_poly(pp, pts[i]);
        if (vals[i] == 0) {
            // linear factor (x - pts[i]); only possible if k covers it
            std::vector<mpz_class> lin{-pts[i], 1};
            if (divides_exactly(lin, pp)) return lin;
        }
    }
    // enumerate divisor tuples
    std::vector<std::vector<mpz_class>> choices(k + 1);
    for (int i = 0; i <= k; ++i) choices[i] = all_divisors_signed(vals[i]);
    std::vector<std::size_t> idx(k + 1, 0);
    for (;;) {
        // Lagrange-interpolate candidate through (pts[i], choices[i][idx[i]])
        std::vector<mpq_class> cand(k + 1, mpq_class(0));
        for (int i = 0; i <= k; ++i) {
            // basis poly for point i
            std::vector<mpq_class> basis{mpq_class(1)};
            mpq_class denom(1);
            for (int j = 0; j <= k; ++j) {
                if (j == i) continue;
                std::vector<mpq_class> nb(basis.size() + 1, mpq_class(0));
                for (std::size_t b = 0; b < basis.size(); ++b) {
                    nb[b + 1] += basis[b];
                    nb[b] -= basis[b] * pts[j];
                }
                basis = std::move(nb);
                denom *= mpq_class(pts[i] - pts[j]);
            }
            mpq_class scale = mpq_class(choices[i][idx[i]]) / denom;
            scale.canonicalize();
            for (std::size_t b = 0; b < basis.size(); ++b) cand[b] += basis[b] * scale;
        }
        bool integral = true;
        std::vector<mpz_class> candz(k + 1);
        for (int i = 0; i <= k; ++i) {
            cand[i].canonicalize();
            if (cand[i].get_den() != 1) {
                integral = false;
                break;
            }
            candz[i] = cand[i].get_num();
        }
        if (integral && candz.back() != 0 && (int)candz.size() - 1 == k) {
            if (divides_exactly(candz, pp)) {
                if (candz.back() < 0)
                    for (auto& c : candz) c = -c;
                return candz;
            }
        }
        // next tuple
        int pos = 0;
        while (pos <= k) {
            if (++idx[pos] < choices[pos].size()) break;
            idx[pos] = 0;
            ++pos;
        }
        if (pos > k) break;
    }
    (void)d;
    return std::nullopt;
}

}  // namespace

IrreducibilityReport irreducibility_check(const IntValuedPoly& f, u64 prime_budget) {
    IrreducibilityReport rep;
    int d = f.degree();
    if (d < 1) {
        rep.status = IrreducibilityStatus::Unknown;
        return rep;
    }
    if (d == 1) {
        rep.status = IrreducibilityStatus::Irreducible;
        return rep;
    }
    const auto& prim = f.primitive_coeffs();
    mpz_class ct = f.leading() * f.denominator();
    // witness search
    u64 p = 2;
    for (u64 tried = 0; tried < prime_budget; ++p) {
        while (!is_prime_u64(p)) ++p;
        if (mpz_fdiv_ui(ct.get_mpz_t(), p) != 0) {
            ++tried;
            ++rep.primes_tried;
            fp::Poly fm(prim.size());
            for (std::size_t i = 0; i < prim.size(); ++i)
                fm[i] = mpz_fdiv_ui(prim[i].get_mpz_t(), p);
            fp::normalize(fm);
            if (fp::degree(fm) == d && fp::irreducible(fm, p)) {
                rep.status = IrreducibilityStatus::Irreducible;
                rep.witness = p;
                return rep;
            }
        }
    }
    if (d > 8) {
        rep.status = IrreducibilityStatus::Unknown;
        return rep;
    }
    // exact path on the primitive part (Gauss)
    std::vector<mpz_class> pp = primitive_part(prim);
    for (int k = 1; k <= d / 2; ++k) {
        auto fac = kronecker_factor(pp, k);
        if (fac) {
            rep.status = IrreducibilityStatus::Reducible;
            rep.factor = *fac;
            return rep;
        }
    }
    rep.status = IrreducibilityStatus::Irreducible;
    return rep;
}

}  // namespace polygap
