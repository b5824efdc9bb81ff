#include "polygap/sieve_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "polygap/fppoly.hpp"

namespace polygap {

namespace {

// roots via stepping the finite-difference table mod p: d additions per
// residue instead of d multiplications
std::vector<u64> scan_roots(const std::vector<mpz_class>& prim, u64 p) {
    int d = (int)prim.size() - 1;
    // difference table of values at 0..d
    std::vector<u64> diff(d + 1);
    {
        std::vector<u64> vals(d + 1);
        for (int n = 0; n <= d; ++n) {
            u64 v = 0;
            for (int i = d; i >= 0; --i)
                v = (mulmod(v, (u64)n % p, p) + mpz_fdiv_ui(prim[i].get_mpz_t(), p)) % p;
            vals[n] = v;
        }
        for (int j = 0; j <= d; ++j) {
            diff[j] = vals[0];
            for (int i = 0; i <= d - j - 1; ++i) vals[i] = (vals[i + 1] + p - vals[i]) % p;
        }
    }
    std::vector<u64> out;
    if ((u64)d >= p) {
        // degenerate tiny p: evaluate each residue directly
        for (u64 n = 0; n < p; ++n) {
            u64 v = 0;
            for (int i = d; i >= 0; --i)
                v = (mulmod(v, n, p) + mpz_fdiv_ui(prim[i].get_mpz_t(), p)) % p;
            if (v == 0) out.push_back(n);
        }
        return out;
    }
    // value at n is diff[0] after n steps
    std::vector<u64> cur = diff;
    for (u64 n = 0; n < p; ++n) {
        if (cur[0] == 0) out.push_back(n);
        for (int j = 0; j < d; ++j) cur[j] = (cur[j] + cur[j + 1]) % p;
    }
    return out;
}

std::vector<u64> filter_proper(std::vector<u64> roots, u64 p) {
    if (roots.size() == p) roots.clear();  // all residues: not a sieving class
    return roots;
}

}  // namespace

std::vector<u64> residues_scan(const IntValuedPoly& f, u64 p) {
    if (!is_prime_u64(p)) throw CompositeModulus();
    if (mpz_fdiv_ui(f.denominator().get_mpz_t(), p) == 0) return {};
    return filter_proper(scan_roots(f.primitive_coeffs(), p), p);
}

std::vector<u64> residues_gcd(const IntValuedPoly& f, u64 p) {
    if (!is_prime_u64(p)) throw CompositeModulus();
    if (mpz_fdiv_ui(f.denominator().get_mpz_t(), p) == 0) return {};
    const auto& prim = f.primitive_coeffs();
    fp::Poly fm(prim.size());
    for (std::size_t i = 0; i < prim.size(); ++i) fm[i] = mpz_fdiv_ui(prim[i].get_mpz_t(), p);
    fp::normalize(fm);
    if (fm.empty()) return {};  // ft = 0 mod p: degenerate, not a sieving class
    return filter_proper(fp::roots(fm, p), p);
}

std::vector<u64> residues_for_prime(const IntValuedPoly& f, u64 p) {
    return p < kScanThreshold ? residues_scan(f, p) : residues_gcd(f, p);
}

std::vector<u64> PolynomialSieveSource::residues(u64 p) const {
    return residues_for_prime(f_, p);
}

std::optional<std::size_t> SieveTable::index_of(u64 p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return std::nullopt;
    return (std::size_t)(it - primes_.begin());
}

SieveTable SieveTable::build(const SieveSource& src, u64 limit, unsigned threads,
                             u64 memory_cap_bytes) {
    if (limit < 2) throw std::invalid_argument("build_table: limit must be >= 2");
    SieveTable t;
    t.limit_ = limit;
    t.source_text_ = src.text();
    t.primes_ = primes_upto(limit);
    std::size_t np = t.primes_.size();
    u64 estimate = (u64)np * (8 + 1 + 8ULL * std::max(1, src.size_bound()));
    if (estimate > memory_cap_bytes)
        throw ResourceLimit("sieve table estimate " + std::to_string(estimate) +
                            " bytes exceeds cap " + std::to_string(memory_cap_bytes));
    std::vector<std::vector<u64>> chunk_res(threads ? threads : 1);
    std::vector<std::vector<u64>> chunk_off(threads ? threads : 1);
    std::vector<std::size_t> chunk_begin(threads ? threads : 1, np);
    parallel_chunks(np, threads, [&](unsigned c, std::size_t b, std::size_t e) {
        chunk_begin[c] = b;
        auto& res = chunk_res[c];
        auto& off = chunk_off[c];
        off.reserve(e - b + 1);
        off.push_back(0);
        for (std::size_t i = b; i < e; ++i) {
            auto r = src.residues(t.primes_[i]);
            res.insert(res.end(), r.begin(), r.end());
            off.push_back(res.size());
        }
    });
    t.offsets_.assign(np + 1, 0);
    for (unsigned c = 0; c < chunk_off.size(); ++c) {
        if (chunk_off[c].empty()) continue;
        std::size_t b = chunk_begin[c];
        u64 base = t.residues_.size();
        t.residues_.insert(t.residues_.end(), chunk_res[c].begin(), chunk_res[c].end());
        for (std::size_t i = 1; i < chunk_off[c].size(); ++i)
            t.offsets_[b + i] = base + chunk_off[c][i];
    }
    t.B_ = 0;
    for (std::size_t i = 0; i < np; ++i) t.B_ = std::max(t.B_, t.residue_count(i));
    return t;
}

DensityReport density_estimate(const SieveTable& table, u64 x) {
    if (x > table.limit()) throw std::invalid_argument("density_estimate: x exceeds table limit");
    DensityReport rep;
    rep.x = x;
    std::vector<u64> counts(table.bound() + 1, 0);
    std::size_t n = count_upto(table.primes(), x);
    rep.pi_x = n;
    for (std::size_t i = 0; i < n; ++i) {
        int nu = table.residue_count(i);
        if (nu >= 1) ++counts[nu];
    }
    double keep_threshold = std::log((double)x);
    for (int nu = 1; nu <= table.bound(); ++nu) {
        DensityClass cls;
        cls.nu = nu;
        cls.count = counts[nu];
        cls.kept = (double)counts[nu] >= keep_threshold;
        if (cls.kept && rep.pi_x > 0) {
            cls.rho_nu = (double)counts[nu] / (double)rep.pi_x;
            rep.rho_hat += cls.rho_nu;
            rep.weighted_sum += nu * cls.rho_nu;
        }
        rep.classes.push_back(cls);
    }
    return rep;
}

MertensReport mertens_sigma(const SieveTable& table, u64 z) {
    if (z > table.limit()) throw std::invalid_argument("mertens_sigma: z exceeds table limit");
    MertensReport rep;
    rep.z = z;
    rep.sigma = sigma_range(table, 1, z);
    rep.sigma_str = mpf_to_string(rep.sigma);
    rep.c1_estimate = rep.sigma.get_d() * std::log((double)z);
    return rep;
}

mpf_class sigma_range(const SieveTable& table, u64 lo, u64 hi) {
    if (lo > hi || hi > table.limit())
        throw std::invalid_argument("sigma_range: need lo <= hi <= limit");
    mpf_class prod(1, kMertensPrecisionBits);
    std::size_t b = count_upto(table.primes(), lo);
    std::size_t e = count_upto(table.primes(), hi);
    for (std::size_t i = b; i < e; ++i) {
        int nu = table.residue_count(i);
        if (!nu) continue;
        u64 p = table.prime_at(i);
        mpf_class factor(p - (u64)nu, kMertensPrecisionBits);
        factor /= p;
        prod *= factor;
    }
    return prod;
}

std::string mpf_to_string(const mpf_class& v, int digits) {
    mp_exp_t exp;
    std::string mant = v.get_str(exp, 10, digits);
    if (mant.empty()) return "0";
    bool neg = mant[0] == '-';
    std::string dig = neg ? mant.substr(1) : mant;
    std::string s = (neg ? "-0." : "0.") + dig + "e" + std::to_string(exp);
    return s;
}

// --- cache io -----------------------------------------------------------

namespace {
constexpr char kMagic[5] = {'P', 'G', 'S', 'V', '1'};

void put_u64(std::ostream& os, u64 v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
    os.write((const char*)b, 8);
}
u64 get_u64(std::istream& is) {
    unsigned char b[8];
    is.read((char*)b, 8);
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= (u64)b[i] << (8 * i);
    return v;
}
void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)(v >> (8 * i));
    os.write((const char*)b, 4);
}
std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read((char*)b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= (std::uint32_t)b[i] << (8 * i);
    return v;
}
}  // namespace

void SieveTable::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open table cache for writing: " + path);
    os.write(kMagic, 5);
    put_u32(os, (std::uint32_t)source_text_.size());
    os.write(source_text_.data(), (std::streamsize)source_text_.size());
    put_u64(os, limit_);
    put_u64(os, primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        put_u64(os, primes_[i]);
        unsigned char cnt = (unsigned char)residue_count(i);
        os.write((const char*)&cnt, 1);
        auto [rb, re] = residues_at(i);
        for (const u64* r = rb; r != re; ++r) put_u64(os, *r);
    }
    if (!os) throw std::runtime_error("short write on table cache: " + path);
}

std::optional<SieveTable> SieveTable::load(const std::string& path, const std::string& poly_text,
                                           u64 limit) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[5];
    is.read(magic, 5);
    if (!is || std::memcmp(magic, kMagic, 5) != 0) return std::nullopt;
    std::uint32_t tl = get_u32(is);
    std::string text(tl, '\0');
    is.read(text.data(), tl);
    u64 lm = get_u64(is);
    if (!is || text != poly_text || lm != limit) return std::nullopt;
    SieveTable t;
    t.limit_ = lm;
    t.source_text_ = text;
    u64 np = get_u64(is);
    t.primes_.reserve(np);
    t.offsets_.reserve(np + 1);
    t.offsets_.push_back(0);
    for (u64 i = 0; i < np; ++i) {
        u64 p = get_u64(is);
        unsigned char cnt;
        is.read((char*)&cnt, 1);
        if (!is) return std::nullopt;
        t.primes_.push_back(p);
        for (unsigned c = 0; c < cnt; ++c) t.residues_.push_back(get_u64(is));
        t.offsets_.push_back(t.residues_.size());
        t.B_ = std::max(t.B_, (int)cnt);
    }
    if (!is) return std::nullopt;
    return t;
}

}  // namespace polygap
