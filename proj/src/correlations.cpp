#include "polygap/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace polygap {

namespace {

// indices of table primes in (lo, z] whose difference set contains m
std::vector<std::size_t> qualifying_primes(const CorrelationParams& params,
                                           const SieveTable& table, const mpz_class& m,
                                           int* range_count = nullptr) {
    std::vector<std::size_t> out;
    double lo = params.lo();
    std::size_t b = lo >= (double)table.limit()
                        ? table.prime_count()
                        : count_upto(table.primes(), (u64)std::floor(std::max(lo, 0.0)));
    std::size_t e = count_upto(table.primes(), params.z);
    int in_range = 0;
    for (std::size_t i = b; i < e; ++i) {
        ++in_range;
        if (table.residue_count(i) == 0) continue;
        u64 p = table.prime_at(i);
        u64 vm = mpz_fdiv_ui(m.get_mpz_t(), p);
        auto [rb, re] = table.residues_at(i);
        bool member = false;
        for (const u64* a = rb; a != re && !member; ++a)
            for (const u64* bb = rb; bb != re; ++bb)
                if ((*a + p - *bb) % p == vm) {
                    member = true;
                    break;
                }
        if (member) out.push_back(i);
    }
    if (range_count) *range_count = in_range;
    return out;
}

}  // namespace

EWeight e_weight(const CorrelationParams& params, const SieveTable& table, const mpz_class& m) {
    EWeight w;
    if (m == 0) return w;
    auto qual = qualifying_primes(params, table, m);
    w.qualifying_primes = (int)qual.size();
    if (qual.empty()) return w;
    double A = params.A();
    double dcap = std::pow((double)params.z, params.d_cap_exponent);
    // DFS over products of qualifying primes with the caps
    long double capped = 0;
    std::vector<std::pair<std::size_t, long double>> stack;  // (next index, D so far)
    std::function<void(std::size_t, long double, int)> rec = [&](std::size_t from, long double D,
                                                                 int omega) {
        for (std::size_t k = from; k < qual.size(); ++k) {
            long double D2 = D * (long double)table.prime_at(qual[k]);
            if (D2 > (long double)dcap || omega + 1 > params.max_omega) break;
            capped += std::pow((long double)A, omega + 1) / D2;
            rec(k + 1, D2, omega + 1);
        }
    };
    rec(0, 1.0L, 0);
    // full sum over qualifying primes has the closed form prod(1 + A/p) - 1
    long double full = 1.0L;
    for (auto i : qual) full *= 1.0L + (long double)A / (long double)table.prime_at(i);
    full -= 1.0L;
    w.value = (double)capped;
    w.excluded = (double)(full - capped);
    return w;
}

double e_weight_bruteforce(const CorrelationParams& params, const SieveTable& table,
                           const mpz_class& m) {
    if (m == 0) return 0;
    double lo = params.lo();
    std::size_t b = lo >= (double)table.limit()
                        ? table.prime_count()
                        : count_upto(table.primes(), (u64)std::floor(std::max(lo, 0.0)));
    std::size_t e = count_upto(table.primes(), params.z);
    std::size_t n = e - b;
    if (n > 12)
        throw RangeTooLarge("brute-force range holds " + std::to_string(n) + " primes (> 12)");
    double A = params.A();
    long double total = 0;
    for (u64 mask = 1; mask < (u64(1) << n); ++mask) {
        long double D = 1;
        int omega = 0;
        bool member = true;
        for (std::size_t k = 0; k < n && member; ++k) {
            if (!(mask >> k & 1)) continue;
            std::size_t i = b + k;
            u64 p = table.prime_at(i);
            D *= (long double)p;
            ++omega;
            u64 vm = mpz_fdiv_ui(m.get_mpz_t(), p);
            auto [rb, re] = table.residues_at(i);
            bool mem = false;
            for (const u64* a = rb; a != re && !mem; ++a)
                for (const u64* bb = rb; bb != re; ++bb)
                    if ((*a + p - *bb) % p == vm) {
                        mem = true;
                        break;
                    }
            member = mem;
        }
        if (member) total += std::pow((long double)A, omega) / D;
    }
    return (double)total;
}

ExactExpectation exact_expectation_small(const IntValuedPoly& f, u64 z, u64 y) {
    PolynomialSieveSource src(f);
    SieveTable table = SieveTable::build(src, std::max<u64>(z, 2));
    mpz_class P = 1;
    std::vector<std::pair<u64, std::vector<u64>>> classes;
    for (std::size_t i = 0; i < table.prime_count(); ++i) {
        u64 p = table.prime_at(i);
        if (p > z) break;
        P *= (unsigned long)p;
        if (P > 10000000) throw ModulusTooLarge("P(z) exceeds 10^7");
        auto [rb, re] = table.residues_at(i);
        classes.emplace_back(p, std::vector<u64>(rb, re));
    }
    u64 Pu = (u64)P.get_ui();
    ExactExpectation out;
    out.modulus = Pu;
    mpz_class sum = 0, sumsq = 0;
    for (u64 bshift = 0; bshift < Pu; ++bshift) {
        u64 cnt = 0;
        for (u64 n = 1; n <= y; ++n) {
            bool alive = true;
            for (auto& [p, roots] : classes) {
                u64 r = (n + p - bshift % p) % p;
                for (u64 a : roots)
                    if (r == a) {
                        alive = false;
                        break;
                    }
                if (!alive) break;
            }
            if (alive) ++cnt;
        }
        sum += (unsigned long)cnt;
        sumsq += (unsigned long)(cnt * cnt);
    }
    out.mean = mpq_class(sum, P);
    out.mean.canonicalize();
    out.second_moment = mpq_class(sumsq, P);
    out.second_moment.canonicalize();
    // sigma * y as an exact rational
    mpq_class sigma(1);
    for (auto& [p, roots] : classes) {
        sigma *= mpq_class((unsigned long)(p - roots.size()), (unsigned long)p);
        sigma.canonicalize();
    }
    out.sigma_y = sigma * (unsigned long)y;
    out.sigma_y.canonicalize();
    return out;
}

EstimateReport mc_theorem3(const IntValuedPoly& f, const SieveTable& table,
                           const ScaleParams& scale, Thm3Quantity kind, double H, int nu, int i,
                           int j, u64 trials, u64 seed, unsigned threads) {
    if (table.source_text() != f.text())
        throw std::invalid_argument("mc_theorem3: table was built for a different polynomial");
    EstimateReport rep;
    rep.H = H;
    rep.nu = nu;
    rep.i = i;
    rep.j = j;
    rep.trials = trials;
    PrimeBlocks blocks = build_blocks(scale, table);
    const Block* blk = nullptr;
    for (auto& b : blocks.blocks)
        if (std::abs(b.H - H) < 1e-9 * std::max(1.0, H) && b.nu == nu) blk = &b;
    if (kind != Thm3Quantity::I && (!blk || blk->primes.empty()))
        throw EmptyBlock("no primes in block (H, nu)");
    std::vector<double> stat(trials, 0.0);
    parallel_chunks(trials, threads, [&](unsigned, std::size_t tb, std::size_t te) {
        for (std::size_t tr = tb; tr < te; ++tr) {
            u64 tseed = derive_stream(seed, tr);
            ShiftState st = stage_uniform(scale, table, tseed);
            double v = 0;
            switch (kind) {
                case Thm3Quantity::I: {
                    for (u64 m = 1; m <= scale.y; ++m)
                        if (st.in_S((long long)m)) v += 1;
                    break;
                }
                case Thm3Quantity::II: {
                    for (const BlockPrime& bp : blk->primes) {
                        double row = lambda_row_sum(st, H, bp);
                        v += j == 0 ? 1.0 : (j == 1 ? row : row * row);
                    }
                    break;
                }
                case Thm3Quantity::III: {
                    long long J = (long long)std::floor(scale.params.K * H);
                    for (u64 m = 1; m <= scale.y; ++m) {
                        if (!st.in_S((long long)m)) continue;
                        if (j == 0) {
                            v += 1;
                            continue;
                        }
                        double inner = 0;
                        for (const BlockPrime& bp : blk->primes) {
                            u64 a = bp.roots[(std::size_t)(i - 1)];
                            for (long long h = 1; h <= J; ++h)
                                inner += lambda_weight(st, H, bp,
                                                       (long long)m - (long long)a -
                                                           h * (long long)bp.q);
                        }
                        v += j == 1 ? inner : inner * inner;
                    }
                    break;
                }
            }
            stat[tr] = v;
        }
    });
    if (trials == 0) throw std::invalid_argument("mc_theorem3: trials >= 1 required");
    // fixed-order pairwise reduction for reproducibility at any thread count
    std::function<long double(std::size_t, std::size_t, int)> reduce =
        [&](std::size_t b, std::size_t e, int power) -> long double {
        if (e - b == 1) {
            long double s = stat[b];
            return power == 1 ? s : s * s;
        }
        std::size_t mid = b + (e - b) / 2;
        return reduce(b, mid, power) + reduce(mid, e, power);
    };
    long double sum = reduce(0, trials, 1);
    long double sumsq = reduce(0, trials, 2);
    rep.mean = (double)(sum / trials);
    long double varl = trials > 1 ? (sumsq - sum * sum / trials) / (trials - 1) : 0.0L;
    if (varl < 0) varl = 0;
    rep.stderr_mean = std::sqrt((double)varl / (double)trials);
    // predictions from measured quantities
    double y = (double)scale.y;
    double Ky = (double)(scale.params.K + 2) * y;
    double sigma = sigma_range(table, 1, scale.stage1_bound()).get_d();
    switch (kind) {
        case Thm3Quantity::I: {
            rep.quantity = "thm3-i";
            rep.prediction = sigma * y;
            break;
        }
        case Thm3Quantity::II: {
            rep.quantity = "thm3-ii";
            double Q = (double)blk->primes.size();
            rep.prediction = std::pow(Ky, j) * Q;
            break;
        }
        case Thm3Quantity::III: {
            rep.quantity = "thm3-iii";
            double hm = std::pow(H, scale.params.M);
            u64 z1 = scale.stage1_bound();
            u64 s1_bound = hm >= (double)z1 ? z1 : (u64)hm;
            double sigma2 = sigma_range(table, s1_bound, z1).get_d();
            double Q = (double)blk->primes.size();
            double KH = std::floor(scale.params.K * H);
            rep.prediction = std::pow(Q * KH / sigma2, j) * sigma * y;
            break;
        }
    }
    rep.rel_dev = rep.prediction != 0 ? std::abs(rep.mean / rep.prediction - 1.0) : 0;
    return rep;
}

}  // namespace polygap
