#include "polygap/engine.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace polygap {

using nlohmann::json;

ScaleParams derive_scales(u64 x, const AdmissibleParams& params, u64 x_min, bool strict) {
    if (x < x_min)
        throw ScaleTooSmall("x = " + std::to_string(x) + " below floor " + std::to_string(x_min));
    ScaleParams s;
    s.x = x;
    s.params = params;
    double lx = std::log((double)x);
    s.y = (u64)std::ceil((double)x * std::pow(lx, params.delta));
    s.z = (u64)((double)s.y * std::log(lx) / std::sqrt(lx));
    s.h_lo = 2.0 * (double)s.y / (double)x;
    s.h_hi = (double)s.y / (params.xi * (double)s.z);
    for (double h = 1.0; h <= s.h_hi; h *= params.xi)
        if (h >= s.h_lo) s.scales.push_back(h);
    std::sort(s.scales.rbegin(), s.scales.rend());
    s.scales_empty = s.scales.empty();
    if (strict && s.scales_empty)
        throw ScaleTooSmall("scale set empty at x = " + std::to_string(x));
    return s;
}

ScaleParams derive_scales_with(u64 x, const AdmissibleParams& params, std::optional<u64> y_override,
                               std::optional<u64> z_override) {
    ScaleParams s = derive_scales(x, params, 2, false);
    if (y_override || z_override) {
        if (y_override) s.y = *y_override;
        if (z_override) s.z = *z_override;
        s.surrogate = true;
        s.h_lo = 2.0 * (double)s.y / (double)x;
        s.h_hi = (double)s.y / (params.xi * (double)s.z);
        s.scales.clear();
        for (double h = 1.0; h <= s.h_hi; h *= params.xi)
            if (h >= s.h_lo) s.scales.push_back(h);
        std::sort(s.scales.rbegin(), s.scales.rend());
        s.scales_empty = s.scales.empty();
    }
    return s;
}

PrimeBlocks build_blocks(const ScaleParams& scale, const SieveTable& table) {
    PrimeBlocks pb;
    u64 xhalf = scale.x / 2;
    double y = (double)scale.y;
    double clamp_h = scale.scales_empty
                         ? (double)scale.y / (double)std::max<u64>(scale.z, 1)
                         : 0.0;
    // rho_nu for the asymptotic ratio
    DensityReport dens = density_estimate(table, std::min<u64>(scale.x, table.limit()));
    std::map<std::pair<long long, int>, Block> acc;  // key: (-H scaled, nu)
    auto h_of = [&](u64 q) -> std::pair<double, bool> {
        for (double H : scale.scales) {
            double lo = y / (scale.params.xi * H), hi = y / H;
            if ((double)q > lo && (double)q <= hi) return {H, false};
        }
        if (scale.scales_empty) return {clamp_h, true};
        double H = y / (double)q;
        H = std::min(std::max(H, scale.scales.back()), scale.scales.front());
        return {H, true};
    };
    std::size_t b = count_upto(table.primes(), scale.z);
    std::size_t e = count_upto(table.primes(), xhalf);
    for (std::size_t i = b; i < e; ++i) {
        int nu = table.residue_count(i);
        if (nu == 0) continue;
        u64 q = table.prime_at(i);
        auto [H, clamped] = h_of(q);
        auto key = std::make_pair(-(long long)std::llround(H * 1e6), nu);
        Block& blk = acc[key];
        blk.H = H;
        blk.nu = nu;
        blk.clamped |= clamped;
        BlockPrime bp;
        bp.q = q;
        auto [rb, re] = table.residues_at(i);
        for (const u64* r = rb; r != re; ++r) bp.roots.push_back(*r == 0 ? q : *r);
        std::sort(bp.roots.begin(), bp.roots.end());
        blk.primes.push_back(std::move(bp));
        ++pb.total_primes;
    }
    for (auto& [key, blk] : acc) {
        double rho_nu = 0;
        if (blk.nu <= (int)dens.classes.size()) rho_nu = dens.classes[blk.nu - 1].rho_nu;
        double lx = std::log((double)scale.x);
        double expected = rho_nu * (1.0 - 1.0 / scale.params.xi) * y / (blk.H * lx);
        blk.asymptotic_ratio = expected > 0 ? (double)blk.primes.size() / expected : 0;
        pb.blocks.push_back(std::move(blk));
    }
    return pb;
}

// --- ShiftState ----------------------------------------------------------

ShiftState::ShiftState(const ScaleParams& scale, const SieveTable& table)
    : table_(&table),
      scale_(scale),
      shift_(table.prime_count(), -1),
      stage_(table.prime_count(), 0),
      S_(scale.window_lo(), scale.window_hi()) {
    if (table.limit() < scale.x)
        throw std::invalid_argument("shift state: table limit below x");
}

void ShiftState::assign(std::size_t pi, u64 s, int stage) {
    shift_[pi] = (long long)s;
    stage_[pi] = (std::int8_t)stage;
}

bool ShiftState::survives_direct(long long n, u64 prime_bound, int max_stage) const {
    for (std::size_t i = 0; i < table_->prime_count(); ++i) {
        u64 p = table_->prime_at(i);
        if (p > prime_bound) break;
        if (!stage_[i] || stage_[i] > max_stage) continue;
        auto [rb, re] = table_->residues_at(i);
        if (rb == re) continue;
        long long r = (n - shift_[i]) % (long long)p;
        if (r < 0) r += (long long)p;
        for (const u64* a = rb; a != re; ++a)
            if ((u64)r == *a) return false;
    }
    return true;
}

mpf_class ShiftState::sigma() const {
    mpf_class prod(1, kMertensPrecisionBits);
    for (std::size_t i = 0; i < table_->prime_count(); ++i) {
        if (stage_[i] != 1) continue;
        int nu = table_->residue_count(i);
        if (!nu) continue;
        u64 p = table_->prime_at(i);
        mpf_class f(p - (u64)nu, kMertensPrecisionBits);
        f /= p;
        prod *= f;
    }
    return prod;
}

void ShiftState::rebuild_survivors() {
    S_.fill();
    long long lo = S_.lo(), hi = S_.hi();
    for (std::size_t i = 0; i < table_->prime_count(); ++i) {
        if (stage_[i] != 1) continue;
        u64 p = table_->prime_at(i);
        auto [rb, re] = table_->residues_at(i);
        for (const u64* a = rb; a != re; ++a) {
            // clear n == shift + a (mod p) over (lo, hi]
            long long r = (shift_[i] + (long long)*a) % (long long)p;
            long long start = lo + 1 + ((r - (lo + 1)) % (long long)p + (long long)p) % (long long)p;
            for (long long n = start; n <= hi; n += (long long)p) S_.clear(n);
        }
    }
    hcache_.clear();
}

const ShiftState::HCache& ShiftState::hcache(double H) const {
    auto it = hcache_.find(H);
    if (it != hcache_.end()) return it->second;
    HCache c;
    u64 z1 = scale_.stage1_bound();
    double hm = std::pow(H, scale_.params.M);
    c.s1_bound = hm >= (double)z1 ? z1 : (u64)hm;
    c.sigma1 = sigma_range(*table_, 1, c.s1_bound).get_d();
    c.sigma2 = sigma_range(*table_, c.s1_bound, z1).get_d();
    c.S1 = BitWindow(S_.lo(), S_.hi());
    c.S2 = BitWindow(S_.lo(), S_.hi());
    long long lo = S_.lo(), hi = S_.hi();
    for (std::size_t i = 0; i < table_->prime_count(); ++i) {
        if (stage_[i] != 1) continue;
        u64 p = table_->prime_at(i);
        BitWindow& target = p <= c.s1_bound ? c.S1 : c.S2;
        auto [rb, re] = table_->residues_at(i);
        for (const u64* a = rb; a != re; ++a) {
            long long r = (shift_[i] + (long long)*a) % (long long)p;
            long long start = lo + 1 + ((r - (lo + 1)) % (long long)p + (long long)p) % (long long)p;
            for (long long n = start; n <= hi; n += (long long)p) target.clear(n);
        }
    }
    c.inv_sigma2_pow.resize(1 + (std::size_t)std::max(1, table_->bound()) *
                                    ((std::size_t)std::floor(scale_.params.K * H) + 1));
    for (std::size_t k = 0; k < c.inv_sigma2_pow.size(); ++k)
        c.inv_sigma2_pow[k] = std::pow(c.sigma2, -(double)k);
    return hcache_.emplace(H, std::move(c)).first->second;
}

ShiftState stage_uniform(const ScaleParams& scale, const SieveTable& table, u64 seed) {
    ShiftState st(scale, table);
    u64 bound = scale.stage1_bound();
    for (std::size_t i = 0; i < table.prime_count(); ++i) {
        u64 p = table.prime_at(i);
        if (p > bound) break;
        Rng rng(derive_stream(seed, p));
        st.assign(i, rng.below(p), 1);
    }
    st.rebuild_survivors();
    return st;
}

ShiftState inject_shifts(const ScaleParams& scale, const SieveTable& table,
                         const std::vector<std::pair<u64, u64>>& forced) {
    ShiftState st(scale, table);
    for (auto& [p, s] : forced) {
        auto idx = table.index_of(p);
        if (!idx) throw std::invalid_argument("inject_shifts: prime not in table");
        st.assign(*idx, s % p, 1);
    }
    st.rebuild_survivors();
    return st;
}

// --- lambda ---------------------------------------------------------------

double lambda_weight(const ShiftState& st, double H, const BlockPrime& bp, long long n) {
    const ScaleParams& sc = st.scale();
    if (n <= sc.window_lo() || n > sc.sample_hi()) return 0.0;
    const auto& c = st.hcache(H);
    if (c.sigma2 == 1.0) return 1.0;  // no usable primes in (H^M, z]: S2 = Z
    long long J = (long long)std::floor(sc.params.K * H);
    int members = 0;
    long long lo = st.survivors().lo(), hi = st.survivors().hi();
    for (u64 a : bp.roots) {
        for (long long h = 1; h <= J; ++h) {
            long long v = n + (long long)a + h * (long long)bp.q;
            bool in_s1, in_s2;
            if (v > lo && v <= hi) {
                in_s1 = c.S1.get(v);
                in_s2 = c.S2.get(v);
            } else {
                in_s1 = st.survives_direct(v, c.s1_bound, 1);
                in_s2 = in_s1 ? true : false;
                if (in_s1) {
                    // separate S2 check outside the window
                    in_s2 = true;
                    for (std::size_t i = 0; i < st.table().prime_count(); ++i) {
                        u64 p = st.table().prime_at(i);
                        if (p <= c.s1_bound) continue;
                        if (p > sc.stage1_bound()) break;
                        if (st.stage_of(i) != 1) continue;
                        auto [rb, re] = st.table().residues_at(i);
                        long long r = (v - (long long)st.shift(i)) % (long long)p;
                        if (r < 0) r += (long long)p;
                        for (const u64* aa = rb; aa != re; ++aa)
                            if ((u64)r == *aa) { in_s2 = false; break; }
                        if (!in_s2) break;
                    }
                }
            }
            if (in_s1) {
                if (!in_s2) return 0.0;  // AP member escapes S2
                ++members;
            }
        }
    }
    return c.inv_sigma2_pow[(std::size_t)members];
}

double lambda_row_sum(const ShiftState& st, double H, const BlockPrime& bp) {
    const ScaleParams& sc = st.scale();
    double total = 0;
    for (long long n = sc.window_lo() + 1; n <= sc.sample_hi(); ++n)
        total += lambda_weight(st, H, bp, n);
    return total;
}

// --- greedy stage ----------------------------------------------------------

namespace {

GreedyOutcome greedy_impl(ShiftState& st, const PrimeBlocks& blocks, GreedyMode mode, u64 seed,
                          bool single_residue) {
    const ScaleParams& sc = st.scale();
    GreedyOutcome out;
    // V = S intersect [1, y], with O(1) membership
    std::vector<std::uint8_t> inV(sc.y + 1, 0);
    for (u64 m = 1; m <= sc.y; ++m)
        if (st.in_S((long long)m)) inV[m] = 1;
    out.initial_V = (std::size_t)std::count(inV.begin(), inV.end(), 1);
    long long wlo = sc.window_lo(), whi = sc.sample_hi();
    // per-n score buffer for maxcover
    std::vector<std::uint32_t> score((std::size_t)(whi - wlo), 0);
    std::vector<long long> touched;
    for (const Block& blk : blocks.blocks) {
        long long J = (long long)std::floor(sc.params.K * blk.H);
        if (J < 1) J = 1;
        for (const BlockPrime& bp : blk.primes) {
            std::vector<u64> roots = bp.roots;
            if (single_residue) roots.resize(1);
            GreedyPick pick;
            pick.q = bp.q;
            pick.H = blk.H;
            long long chosen = 0;
            if (mode == GreedyMode::MaxCover) {
                touched.clear();
                for (u64 m = 1; m <= sc.y; ++m) {
                    if (!inV[m]) continue;
                    for (u64 a : roots) {
                        long long base = (long long)m - (long long)a;
                        for (long long h = 1; h <= J; ++h) {
                            long long n = base - h * (long long)bp.q;
                            if (n <= wlo || n > whi) continue;
                            std::size_t idx = (std::size_t)(n - wlo - 1);
                            if (score[idx]++ == 0) touched.push_back(n);
                        }
                    }
                }
                std::uint32_t best = 0;
                chosen = wlo + 1;
                std::sort(touched.begin(), touched.end());
                for (long long n : touched) {
                    std::uint32_t sc_n = score[(std::size_t)(n - wlo - 1)];
                    if (sc_n > best) {
                        best = sc_n;
                        chosen = n;
                    }
                }
                for (long long n : touched) score[(std::size_t)(n - wlo - 1)] = 0;
            } else {
                // sampled: P(n) proportional to lambda(H; q, n)
                const auto& c = st.hcache(blk.H);
                Rng rng(derive_stream(seed, bp.q));
                if (c.sigma2 == 1.0) {
                    // uniform over the window
                    chosen = wlo + 1 + (long long)rng.below((u64)(whi - wlo));
                } else {
                    double total = 0;
                    std::vector<double> w((std::size_t)(whi - wlo));
                    for (long long n = wlo + 1; n <= whi; ++n) {
                        double lw = lambda_weight(st, blk.H, bp, n);
                        w[(std::size_t)(n - wlo - 1)] = lw;
                        total += lw;
                    }
                    if (total <= 0) {
                        pick.degenerate = true;
                        ++out.degenerate_events;
                        chosen = wlo + 1 + (long long)rng.below((u64)(whi - wlo));
                    } else {
                        double target = rng.unit() * total;
                        double acc = 0;
                        chosen = whi;
                        for (long long n = wlo + 1; n <= whi; ++n) {
                            acc += w[(std::size_t)(n - wlo - 1)];
                            if (acc >= target) {
                                chosen = n;
                                break;
                            }
                        }
                    }
                }
            }
            pick.n_q = chosen;
            // record e_{i,q} against V and update V; shift s_q = n_q mod q
            long long qs = (long long)bp.q;
            long long smod = ((chosen % qs) + qs) % qs;
            auto idx = st.table().index_of(bp.q);
            st.assign(*idx, (u64)smod, 2);
            pick.e_iq.resize(roots.size());
            for (std::size_t i = 0; i < roots.size(); ++i) {
                for (long long h = 1; h <= J; ++h) {
                    long long v = chosen + (long long)roots[i] + h * qs;
                    if (v >= 1 && v <= (long long)sc.y && inV[(u64)v]) {
                        pick.e_iq[i].push_back((u64)v);
                        inV[(u64)v] = 0;
                        ++pick.covered;
                    }
                }
            }
            out.picks.push_back(std::move(pick));
        }
    }
    for (u64 m = 1; m <= sc.y; ++m)
        if (inV[m]) out.uncovered.push_back(m);
    return out;
}

}  // namespace

GreedyOutcome stage_greedy(ShiftState& st, const PrimeBlocks& blocks, GreedyMode mode, u64 seed) {
    return greedy_impl(st, blocks, mode, seed, false);
}

GreedyOutcome baseline_single_residue(ShiftState& st, const PrimeBlocks& blocks, GreedyMode mode,
                                      u64 seed) {
    return greedy_impl(st, blocks, mode, seed, true);
}

void assign_leftover_random(ShiftState& st, u64 seed) {
    const ScaleParams& sc = st.scale();
    u64 lo = sc.stage1_bound(), hi = sc.x / 2;
    const SieveTable& t = st.table();
    for (std::size_t i = count_upto(t.primes(), lo); i < t.prime_count(); ++i) {
        u64 p = t.prime_at(i);
        if (p > hi) break;
        if (st.assigned(i) || t.residue_count(i) == 0) continue;
        Rng rng(derive_stream(seed ^ 0x66696c6cULL, p));
        st.assign(i, rng.below(p), 2);
    }
}

std::vector<u64> residual_in_range(const ShiftState& st, u64 y_target) {
    const SieveTable& t = st.table();
    u64 xhalf = std::max(st.scale().x / 2, st.scale().stage1_bound());
    std::vector<std::uint8_t> alive(y_target + 1, 1);
    for (std::size_t i = 0; i < t.prime_count(); ++i) {
        u64 p = t.prime_at(i);
        if (p > xhalf) break;
        if (!st.assigned(i) || st.stage_of(i) > 2) continue;
        auto [rb, re] = t.residues_at(i);
        for (const u64* a = rb; a != re; ++a) {
            u64 r = (st.shift(i) + *a) % p;
            for (u64 m = (r == 0 ? p : r); m <= y_target; m += p) alive[m] = 0;
        }
    }
    std::vector<u64> out;
    for (u64 m = 1; m <= y_target; ++m)
        if (alive[m]) out.push_back(m);
    return out;
}

CleanupResult stage_cleanup(ShiftState& st, const std::vector<u64>& residual, CleanupMode mode) {
    const ScaleParams& sc = st.scale();
    const SieveTable& t = st.table();
    CleanupResult res;
    u64 lo = std::max(sc.x / 2, sc.stage1_bound());
    std::vector<std::size_t> avail;  // table indices of usable primes, ascending
    for (std::size_t i = count_upto(t.primes(), lo); i < t.prime_count(); ++i) {
        u64 p = t.prime_at(i);
        if (p > sc.x) break;
        if (t.residue_count(i) >= 1 && !st.assigned(i)) avail.push_back(i);
    }
    res.primes_available = avail.size();
    std::vector<u64> rem = residual;
    std::vector<std::uint8_t> used(avail.size(), 0);
    auto kills_of = [&](std::size_t ai, u64 m, std::vector<u64>* victims) -> u64 {
        std::size_t i = avail[ai];
        u64 p = t.prime_at(i);
        auto [rb, re] = t.residues_at(i);
        u64 sp = (m % p + p - rb[0] % p) % p;
        u64 cnt = 0;
        for (u64 mm : rem) {
            u64 r = (mm % p + p - sp) % p;
            for (const u64* a = rb; a != re; ++a)
                if (r == *a % p) {
                    ++cnt;
                    if (victims) victims->push_back(mm);
                    break;
                }
        }
        return cnt;
    };
    auto apply = [&](std::size_t ai, u64 m) {
        std::size_t i = avail[ai];
        u64 p = t.prime_at(i);
        auto [rb, re] = t.residues_at(i);
        u64 sp = (m % p + p - rb[0] % p) % p;
        st.assign(i, sp, 3);
        used[ai] = 1;
        ++res.primes_used;
        res.matches.emplace_back(m, p);
        std::vector<u64> keep;
        keep.reserve(rem.size());
        for (u64 mm : rem) {
            u64 r = (mm % p + p - sp) % p;
            bool killed = false;
            for (const u64* a = rb; a != re; ++a)
                if (r == *a % p) {
                    killed = true;
                    break;
                }
            if (!killed) keep.push_back(mm);
        }
        rem = std::move(keep);
    };
    if (mode == CleanupMode::FirstFit) {
        std::size_t next = 0;
        while (!rem.empty()) {
            while (next < avail.size() && used[next]) ++next;
            if (next >= avail.size()) break;
            apply(next, rem.front());
        }
    } else {
        while (!rem.empty()) {
            u64 best_k = 0;
            std::size_t best_ai = avail.size();
            u64 best_m = 0;
            for (std::size_t ai = 0; ai < avail.size(); ++ai) {
                if (used[ai]) continue;
                for (u64 m : rem) {
                    u64 k = kills_of(ai, m, nullptr);
                    if (k > best_k) {
                        best_k = k;
                        best_ai = ai;
                        best_m = m;
                    }
                }
            }
            if (best_ai == avail.size()) break;
            apply(best_ai, best_m);
        }
    }
    res.leftovers = std::move(rem);
    return res;
}

// --- certificate -----------------------------------------------------------

GapCertificate assemble_certificate(const ShiftState& st, const IntValuedPoly& f, u64 y_target) {
    const SieveTable& t = st.table();
    const ScaleParams& sc = st.scale();
    GapCertificate cert;
    cert.poly_text = f.text();
    cert.x = sc.x;
    cert.y = y_target;
    cert.params = sc.params;
    cert.surrogate = sc.surrogate;
    cert.z = sc.z;
    // smallest-prime witness per offset, primes ascending; p | t cannot witness
    std::vector<u64> witness(y_target + 1, 0);
    u64 found = 0;
    const mpz_class& tden = f.denominator();
    for (std::size_t i = 0; i < t.prime_count() && found < y_target; ++i) {
        if (!st.assigned(i) || t.residue_count(i) == 0) continue;
        u64 p = t.prime_at(i);
        if (p > sc.x) break;
        if (mpz_fdiv_ui(tden.get_mpz_t(), p) == 0) continue;
        auto [rb, re] = t.residues_at(i);
        for (const u64* a = rb; a != re; ++a) {
            u64 r = (st.shift(i) + *a) % p;
            for (u64 m = (r == 0 ? p : r); m <= y_target; m += p)
                if (!witness[m]) {
                    witness[m] = p;
                    ++found;
                }
        }
    }
    for (u64 m = 1; m <= y_target; ++m)
        if (!witness[m]) throw UncoveredOffset(m);
    // used primes, ascending, with shifts
    std::vector<u64> used_sorted;
    {
        std::vector<u64> u(witness.begin() + 1, witness.end());
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        used_sorted = std::move(u);
    }
    mpz_class n0 = 0, modulus = 1;
    for (u64 p : used_sorted) {
        auto idx = t.index_of(p);
        u64 sp = st.shift(*idx);
        cert.shifts.emplace_back(p, sp);
        // CRT: n0 == -s_p (mod p)
        mpz_class target((unsigned long)((p - sp % p) % p));
        mpz_class pz((unsigned long)p);
        mpz_class minv;
        if (!mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), pz.get_mpz_t()))
            throw std::logic_error("CRT moduli not coprime");
        mpz_class k = ((target - n0) % pz + pz) % pz * minv % pz;
        n0 += modulus * k;
        modulus *= pz;
    }
    // lift until n0 >= 1, past the monotonicity bound, and f(n0+1) > x
    const auto& prim = f.primitive_coeffs();
    int d = f.degree();
    mpz_class bound = 1;
    for (int i = 0; i < d; ++i) {
        mpz_class q = abs(prim[i]) / prim[d] + 1;
        if (q > bound) bound = q;
        if (i >= 1) {
            mpz_class qd = abs(prim[i] * i) / (prim[d] * d) + 1;
            if (qd > bound) bound = qd;
        }
    }
    bound += 1;
    while (n0 < 1 || n0 + 1 <= bound || f(n0 + 1) <= (long)sc.x) n0 += modulus;
    cert.n0 = n0;
    for (u64 m = 1; m <= y_target; ++m) cert.witnesses.emplace_back(m, witness[m]);
    return cert;
}

std::string certificate_to_json(const GapCertificate& cert) {
    json j;
    j["poly"] = cert.poly_text;
    j["x"] = cert.x;
    j["y"] = cert.y;
    j["n0"] = cert.n0.get_str();
    json shifts = json::array();
    for (auto& [p, s] : cert.shifts) shifts.push_back({p, s});
    j["shifts"] = shifts;
    json wit = json::array();
    for (auto& [m, p] : cert.witnesses) wit.push_back({m, p});
    j["witnesses"] = wit;
    j["meta"] = {{"seed", cert.seed},
                 {"mode", cert.mode},
                 {"cleanup", cert.cleanup},
                 {"attempt", cert.attempt},
                 {"surrogate", cert.surrogate},
                 {"z", cert.z},
                 {"delta", cert.params.delta},
                 {"xi", cert.params.xi},
                 {"K", cert.params.K},
                 {"M", cert.params.M},
                 {"eps", cert.params.eps},
                 {"version", "polygap 0.1.0"}};
    return j.dump(2);
}

GapCertificate certificate_from_json(const std::string& text) {
    json j = json::parse(text);
    GapCertificate cert;
    cert.poly_text = j.at("poly").get<std::string>();
    cert.x = j.at("x").get<u64>();
    cert.y = j.at("y").get<u64>();
    cert.n0 = mpz_class(j.at("n0").get<std::string>());
    for (auto& e : j.at("shifts")) cert.shifts.emplace_back(e[0].get<u64>(), e[1].get<u64>());
    for (auto& e : j.at("witnesses")) cert.witnesses.emplace_back(e[0].get<u64>(), e[1].get<u64>());
    if (j.contains("meta")) {
        const auto& m = j["meta"];
        cert.seed = m.value("seed", 0ULL);
        cert.mode = m.value("mode", "");
        cert.cleanup = m.value("cleanup", "");
        cert.attempt = m.value("attempt", 0ULL);
        cert.surrogate = m.value("surrogate", false);
        cert.z = m.value("z", 0ULL);
        cert.params.delta = m.value("delta", 0.0);
        cert.params.xi = m.value("xi", 0.0);
        cert.params.K = m.value("K", 0LL);
        cert.params.M = m.value("M", 0.0);
        cert.params.eps = m.value("eps", 0.0);
    }
    return cert;
}

FindGapResult find_gap(const IntValuedPoly& f, const SieveTable& table, const ScaleParams& scale,
                       const FindGapOptions& opts) {
    FindGapResult res;
    PrimeBlocks blocks = build_blocks(scale, table);
    u64 min_y = opts.min_y ? opts.min_y : scale.x;
    if (min_y > scale.y) return res;  // nothing in [min_y, y] to certify
    for (u64 attempt = 0; attempt < opts.attempts; ++attempt) {
        ++res.attempts_used;
        u64 aseed = derive_stream(opts.seed, attempt);
        ShiftState st = stage_uniform(scale, table, aseed);
        stage_greedy(st, blocks, opts.mode, aseed);
        assign_leftover_random(st, aseed);
        std::vector<u64> residual = residual_in_range(st, scale.y);
        res.best_residual = std::min<u64>(res.best_residual, residual.size());
        auto finish = [&](ShiftState& trial, u64 y_final) {
            GapCertificate cert = assemble_certificate(trial, f, y_final);
            cert.seed = opts.seed;
            cert.mode = opts.mode == GreedyMode::MaxCover ? "maxcover" : "sampled";
            cert.cleanup = opts.cleanup == CleanupMode::MaxKill ? "max-kill" : "first-fit";
            cert.attempt = attempt;
            res.cert = std::move(cert);
        };
        std::vector<u64> targets{scale.y};
        if (min_y < scale.y) targets.push_back(min_y);
        for (u64 y_target : targets) {
            std::vector<u64> r2;
            for (u64 m : residual)
                if (m <= y_target) r2.push_back(m);
            ShiftState trial = st;  // cleanup mutates shifts
            CleanupResult cr = stage_cleanup(trial, r2, opts.cleanup);
            res.last_leftovers = cr.leftovers.size();
            if (cr.leftovers.empty()) {
                finish(trial, y_target);
                return res;
            }
            // leftovers all beyond some y' >= min_y still certify [1, y']
            u64 first_left = cr.leftovers.front();
            if (first_left - 1 >= min_y) {
                finish(trial, first_left - 1);
                return res;
            }
        }
    }
    return res;
}

}  // namespace polygap
