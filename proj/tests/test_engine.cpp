#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "polygap/engine.hpp"
#include "polygap/verify.hpp"

using namespace polygap;

namespace {

SieveTable table_for(const char* text, u64 limit) {
    auto f = IntValuedPoly::parse(text);
    PolynomialSieveSource src(f);
    return SieveTable::build(src, limit);
}

AdmissibleParams desk_params() {
    AdmissibleParams p;
    p.delta = 0.0011;
    p.xi = 1.25;
    p.K = 2;
    p.M = 6.5;
    p.eps = 0.05;
    return p;
}

}  // namespace

TEST_CASE("derived scales follow the stated formulas") {
    auto p = desk_params();
    auto s = derive_scales(1000000, p);
    double lx = std::log(1e6);
    CHECK(s.y == (u64)std::ceil(1e6 * std::pow(lx, p.delta)));
    CHECK(s.z == (u64)(s.y * std::log(lx) / std::sqrt(lx)));
    CHECK(s.y >= s.x);
    for (double H : s.scales) {
        CHECK(H >= s.h_lo);
        CHECK(H <= s.h_hi);
        // H is a power of xi
        double j = std::log(H) / std::log(p.xi);
        CHECK(std::abs(j - std::round(j)) < 1e-9);
    }
    CHECK_THROWS_AS(derive_scales(50, p), ScaleTooSmall);
    // the derived scale set is empty at desk sizes; strict mode objects
    CHECK(derive_scales(1000000, p).scales_empty);
    CHECK_THROWS_AS(derive_scales(1000000, p, 100, true), ScaleTooSmall);
}

TEST_CASE("surrogate overrides re-derive the scale set and are flagged") {
    auto s = derive_scales_with(10000, desk_params(), std::nullopt, 500);
    CHECK(s.surrogate);
    CHECK(s.z == 500);
    CHECK(!s.scales.empty());
    CHECK(s.stage1_bound() == 500);
}

TEST_CASE("all-zero shifts leave exactly the rough numbers") {
    auto t = table_for("binom:[0,1]", 200);
    auto s = derive_scales_with(100, desk_params(), 50, 7);
    auto st = inject_shifts(s, t, {{2, 0}, {3, 0}, {5, 0}, {7, 0}});
    std::vector<u64> surv;
    for (u64 m = 1; m <= 50; ++m)
        if (st.in_S((long long)m)) surv.push_back(m);
    CHECK(surv == std::vector<u64>{1, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47});
}

TEST_CASE("averaging the survivor count over all joint shifts gives sigma * y exactly") {
    auto t = table_for("poly:[1,0,1]", 1200);
    auto s = derive_scales_with(1000, desk_params(), 10, 5);
    long long total = 0;
    for (u64 b = 0; b < 30; ++b) {
        auto st = inject_shifts(s, t, {{2, b % 2}, {3, b % 3}, {5, b % 5}});
        for (u64 m = 1; m <= 10; ++m)
            if (st.in_S((long long)m)) ++total;
    }
    CHECK(total == 90);  // mean 3.0 = sigma y with sigma = 0.3
}

TEST_CASE("stage-1 shifts are uniform per prime and reproducible") {
    auto t = table_for("poly:[1,0,1]", 1000);
    auto s = derive_scales_with(1000, desk_params(), std::nullopt, 100);
    auto st1 = stage_uniform(s, t, 42);
    auto st2 = stage_uniform(s, t, 42);
    for (std::size_t i = 0; i < t.prime_count(); ++i) {
        CHECK(st1.assigned(i) == (t.prime_at(i) <= 100));
        if (st1.assigned(i)) {
            CHECK(st1.shift(i) == st2.shift(i));
            CHECK(st1.shift(i) < t.prime_at(i));
        }
    }
    // mean survivor density over seeds tracks sigma
    double sigma = st1.sigma().get_d();
    double acc = 0;
    int seeds = 60;
    for (int sd = 0; sd < seeds; ++sd) {
        auto st = stage_uniform(s, t, 1000 + sd);
        u64 c = 0;
        for (u64 m = 1; m <= s.y; ++m)
            if (st.in_S((long long)m)) ++c;
        acc += (double)c / (double)s.y;
    }
    CHECK(acc / seeds == doctest::Approx(sigma).epsilon(0.15));
}

TEST_CASE("S = S1 cap S2 pointwise for every scale") {
    auto t = table_for("poly:[1,0,1]", 10000);
    auto s = derive_scales_with(10000, desk_params(), std::nullopt, 500);
    REQUIRE(!s.scales.empty());
    auto st = stage_uniform(s, t, 7);
    for (double H : s.scales) {
        const auto& c = st.hcache(H);
        for (long long n = st.survivors().lo() + 1; n <= st.survivors().hi(); ++n)
            if ((c.S1.get(n) && c.S2.get(n)) != st.survivors().get(n)) {
                REQUIRE(false);
            }
        CHECK(std::abs(c.sigma1 * c.sigma2 - st.sigma().get_d()) < 1e-12);
    }
}

TEST_CASE("lambda agrees with a direct evaluation of its definition") {
    auto t = table_for("poly:[1,0,1]", 10000);
    auto s = derive_scales_with(10000, desk_params(), std::nullopt, 500);
    auto st = stage_uniform(s, t, 11);
    auto blocks = build_blocks(s, t);
    REQUIRE(!blocks.blocks.empty());
    Rng rng(99);
    int checked = 0;
    for (const auto& blk : blocks.blocks) {
        if (blk.primes.empty()) continue;
        const auto& c = st.hcache(blk.H);
        const BlockPrime& bp = blk.primes[rng.below(blk.primes.size())];
        for (int k = 0; k < 25; ++k) {
            long long n = s.window_lo() + 1 + (long long)rng.below((u64)((s.sample_hi() - s.window_lo())));
            // direct: AP members, S1 via per-prime divisibility, containment in S2
            long long J = (long long)std::floor(s.params.K * blk.H);
            int members = 0;
            bool contained = true;
            for (u64 a : bp.roots)
                for (long long h = 1; h <= J; ++h) {
                    long long v = n + (long long)a + h * (long long)bp.q;
                    bool s1 = true, s2 = true;
                    for (std::size_t i = 0; i < t.prime_count(); ++i) {
                        if (st.stage_of(i) != 1) continue;
                        u64 p = t.prime_at(i);
                        auto [rb, re] = t.residues_at(i);
                        long long r = (v - (long long)st.shift(i)) % (long long)p;
                        if (r < 0) r += p;
                        bool hit = false;
                        for (const u64* x = rb; x != re; ++x)
                            if ((u64)r == *x) hit = true;
                        if (hit) (p <= c.s1_bound ? s1 : s2) = false;
                    }
                    if (s1) {
                        ++members;
                        if (!s2) contained = false;
                    }
                }
            double expect = contained ? std::pow(c.sigma2, -members) : 0.0;
            double got = lambda_weight(st, blk.H, bp, n);
            CHECK(got == doctest::Approx(expect).epsilon(1e-9));
            ++checked;
        }
        if (checked >= 75) break;
    }
    CHECK(checked >= 50);
}

TEST_CASE("lambda row sums are exactly (K+2)y in the degenerate case") {
    auto t = table_for("poly:[1,0,1]", 2000);
    // z small enough that (H^M, z] holds no primes: sigma2 = 1, lambda = 1
    auto s = derive_scales_with(2000, desk_params(), std::nullopt, 40);
    auto st = stage_uniform(s, t, 3);
    auto blocks = build_blocks(s, t);
    REQUIRE(!blocks.blocks.empty());
    const auto& blk = blocks.blocks.front();
    REQUIRE(!blk.primes.empty());
    const auto& c = st.hcache(blk.H);
    REQUIRE(c.sigma2 == 1.0);
    double row = lambda_row_sum(st, blk.H, blk.primes[0]);
    CHECK(row == doctest::Approx((double)(s.params.K + 2) * (double)s.y));
}

TEST_CASE("maxcover greedy makes monotone progress with disjoint e_iq") {
    auto t = table_for("poly:[1,0,1]", 10000);
    auto s = derive_scales_with(10000, desk_params(), std::nullopt, 500);
    auto st = stage_uniform(s, t, 5);
    auto blocks = build_blocks(s, t);
    auto out = stage_greedy(st, blocks, GreedyMode::MaxCover, 5);
    std::size_t covered_total = 0;
    for (auto& pick : out.picks) {
        std::set<u64> seen;
        std::size_t sz = 0;
        for (auto& e : pick.e_iq) {
            for (u64 v : e) {
                CHECK(!seen.count(v));
                seen.insert(v);
            }
            sz += e.size();
        }
        CHECK(sz == pick.covered);
        // |e_q| <= nu K H_q
        CHECK((double)sz <= (double)pick.e_iq.size() * s.params.K * pick.H + 1e-9);
        covered_total += sz;
    }
    CHECK(covered_total + out.uncovered.size() == out.initial_V);
    // stage-2 only touches primes in (z, x/2]
    for (auto& pick : out.picks) {
        CHECK(pick.q > s.z);
        CHECK(pick.q <= s.x / 2);
    }
}

TEST_CASE("baseline uses a subset of the progressions") {
    auto t = table_for("poly:[1,0,1]", 10000);
    auto s = derive_scales_with(10000, desk_params(), std::nullopt, 500);
    auto blocks = build_blocks(s, t);
    auto st1 = stage_uniform(s, t, 9);
    auto multi = stage_greedy(st1, blocks, GreedyMode::MaxCover, 9);
    auto st2 = stage_uniform(s, t, 9);
    auto single = baseline_single_residue(st2, blocks, GreedyMode::MaxCover, 9);
    for (auto& pick : single.picks) CHECK(pick.e_iq.size() == 1);
    CHECK(multi.uncovered.size() <= single.uncovered.size());
    // identity system: single and multi coincide (nu = 1)
    auto tid = table_for("binom:[0,1]", 10000);
    auto sid = derive_scales_with(10000, desk_params(), std::nullopt, 500);
    auto bid = build_blocks(sid, tid);
    auto stid1 = stage_uniform(sid, tid, 4);
    auto a = stage_greedy(stid1, bid, GreedyMode::MaxCover, 4);
    auto stid2 = stage_uniform(sid, tid, 4);
    auto b = baseline_single_residue(stid2, bid, GreedyMode::MaxCover, 4);
    CHECK(a.uncovered == b.uncovered);
}

TEST_CASE("sampled mode is reproducible") {
    auto t = table_for("poly:[1,0,1]", 4000);
    auto s = derive_scales_with(4000, desk_params(), std::nullopt, 300);
    auto blocks = build_blocks(s, t);
    auto st1 = stage_uniform(s, t, 21);
    auto o1 = stage_greedy(st1, blocks, GreedyMode::Sampled, 21);
    auto st2 = stage_uniform(s, t, 21);
    auto o2 = stage_greedy(st2, blocks, GreedyMode::Sampled, 21);
    REQUIRE(o1.picks.size() == o2.picks.size());
    for (std::size_t i = 0; i < o1.picks.size(); ++i) CHECK(o1.picks[i].n_q == o2.picks[i].n_q);
}

TEST_CASE("sampled picks follow the lambda distribution") {
    auto t = table_for("poly:[1,0,1]", 2000);
    auto s = derive_scales_with(2000, desk_params(), std::nullopt, 400);
    auto blocks = build_blocks(s, t);
    // isolate one prime from a nondegenerate block
    PrimeBlocks one;
    for (auto& blk : blocks.blocks) {
        if (blk.primes.empty()) continue;
        auto probe = stage_uniform(s, t, 77);
        if (probe.hcache(blk.H).sigma2 >= 1.0) continue;
        Block b = blk;
        b.primes.resize(1);
        one.blocks.push_back(b);
        one.total_primes = 1;
        break;
    }
    REQUIRE(one.total_primes == 1);
    const Block& blk = one.blocks[0];
    auto st0 = stage_uniform(s, t, 77);
    // lambda-weighted mean and variance of n over the window
    double wsum = 0, mean = 0, m2 = 0;
    for (long long n = s.window_lo() + 1; n <= s.sample_hi(); ++n) {
        double w = lambda_weight(st0, blk.H, blk.primes[0], n);
        wsum += w;
        mean += w * (double)n;
        m2 += w * (double)n * (double)n;
    }
    REQUIRE(wsum > 0);
    mean /= wsum;
    m2 = m2 / wsum - mean * mean;
    int draws = 400;
    double acc = 0;
    for (int k = 0; k < draws; ++k) {
        ShiftState st = st0;
        auto out = stage_greedy(st, one, GreedyMode::Sampled, 1000 + k);
        REQUIRE(out.picks.size() == 1);
        acc += (double)out.picks[0].n_q;
    }
    double emp = acc / draws;
    double tol = 4.0 * std::sqrt(m2 / draws);
    CHECK(std::abs(emp - mean) <= tol);
}

TEST_CASE("cleanup disciplines") {
    auto t = table_for("binom:[0,1]", 1000);
    auto s = derive_scales_with(1000, desk_params(), std::nullopt, 300);
    auto st = stage_uniform(s, t, 1);
    // empty residual: nothing happens
    auto cr = stage_cleanup(st, {});
    CHECK(cr.matches.empty());
    CHECK(cr.leftovers.empty());
    // single element: s_p = (m - a_1) mod p and the element dies
    auto st2 = stage_uniform(s, t, 1);
    auto cr2 = stage_cleanup(st2, {777});
    REQUIRE(cr2.matches.size() == 1);
    CHECK(cr2.leftovers.empty());
    auto [m, p] = cr2.matches[0];
    CHECK(m == 777);
    auto idx = t.index_of(p);
    CHECK(p > s.x / 2);
    CHECK(st2.stage_of(*idx) == 3);
    auto [rb, re] = t.residues_at(*idx);
    CHECK((777 - (long long)st2.shift(*idx) - (long long)*rb) % (long long)p == 0);
    // more residual elements than primes: leftovers surface
    std::vector<u64> huge;
    for (u64 m2 = 1; m2 <= 900; ++m2) huge.push_back(m2);
    auto st3 = stage_uniform(s, t, 1);
    auto cr3 = stage_cleanup(st3, huge);
    CHECK(!cr3.leftovers.empty());
    CHECK(cr3.primes_used == cr3.primes_available);
}

TEST_CASE("miniature certificate matches the worked example") {
    auto t = table_for("binom:[0,1]", 5);
    AdmissibleParams p = desk_params();
    auto s = derive_scales_with(5, p, 4, 5);
    // shifts s2=1, s3=2, s5=4 cover [1,4]
    auto st = inject_shifts(s, t, {{2, 1}, {3, 2}, {5, 4}});
    auto f = IntValuedPoly::parse("binom:[0,1]");
    auto cert = assemble_certificate(st, f, 4);
    CHECK(cert.n0 == 31);
    REQUIRE(cert.witnesses.size() == 4);
    CHECK(cert.witnesses[0] == std::pair<u64, u64>{1, 2});
    CHECK(cert.witnesses[1] == std::pair<u64, u64>{2, 3});
    CHECK(cert.witnesses[2] == std::pair<u64, u64>{3, 2});
    CHECK(cert.witnesses[3] == std::pair<u64, u64>{4, 5});
    auto rep = verify_certificate(cert);
    CHECK(rep.pass);

    // tampering is caught
    auto bad = cert;
    bad.witnesses[2].second = 3;
    CHECK(!verify_certificate(bad).pass);
    auto bad2 = cert;
    bad2.n0 += 1;
    CHECK(!verify_certificate(bad2).pass);
    auto bad3 = cert;
    bad3.n0 = 1;  // CRT-consistent shifts but f(n0+m) too small
    CHECK(!verify_certificate(bad3).pass);
    auto bad4 = cert;
    bad4.witnesses[1].first = 1;  // duplicate offset, offset 2 uncovered
    CHECK(!verify_certificate(bad4).pass);
    auto bad5 = cert;
    bad5.shifts[0].second = (bad5.shifts[0].second + 1) % bad5.shifts[0].first;
    CHECK(!verify_certificate(bad5).pass);
    auto bad6 = cert;
    bad6.witnesses[3].second = 4;  // composite witness
    CHECK(!verify_certificate(bad6).pass);
    auto bad7 = cert;
    bad7.y = 6;  // extends the range past the covered offsets
    CHECK(!verify_certificate(bad7).pass);

    // uncovered offset refuses assembly
    auto st2 = inject_shifts(s, t, {{2, 1}, {3, 2}});
    CHECK_THROWS_AS(assemble_certificate(st2, f, 4), UncoveredOffset);
}

TEST_CASE("certificate JSON round-trips byte-identically") {
    auto f = IntValuedPoly::parse("binom:[0,1]");
    auto t = table_for("binom:[0,1]", 1000);
    auto s = derive_scales_with(1000, desk_params(), std::nullopt, 200);
    FindGapOptions opts;
    opts.seed = 3;
    opts.attempts = 20;
    auto r1 = find_gap(f, t, s, opts);
    auto r2 = find_gap(f, t, s, opts);
    REQUIRE(r1.cert.has_value());
    REQUIRE(r2.cert.has_value());
    std::string j1 = certificate_to_json(*r1.cert);
    std::string j2 = certificate_to_json(*r2.cert);
    CHECK(j1 == j2);
    auto back = certificate_from_json(j1);
    CHECK(certificate_to_json(back) == j1);
    CHECK(verify_certificate(back).pass);
}

TEST_CASE("x^2+1 miniature at x = 20 certifies a short prefix") {
    // exhaustive search over all joint shifts shows [1,12] cannot be covered
    // with the four usable primes {2, 5, 13, 17}, so the target is y <= 11
    auto f = IntValuedPoly::parse("poly:[1,0,1]");
    auto t = table_for("poly:[1,0,1]", 20);
    auto s = derive_scales(20, desk_params(), 2);
    FindGapOptions opts;
    opts.seed = 1;
    opts.attempts = 4000;
    opts.cleanup = CleanupMode::MaxKill;
    opts.min_y = 10;
    auto res = find_gap(f, t, s, opts);
    REQUIRE(res.cert.has_value());
    CHECK(res.cert->y >= 10);
    CHECK(res.cert->y <= 11);
    auto rep = verify_certificate(*res.cert);
    CHECK(rep.pass);
    // independent recomputation of the advertised divisibility
    for (auto& [m, p] : res.cert->witnesses) {
        mpz_class v = (res.cert->n0 + m) * (res.cert->n0 + m) + 1;
        CHECK(mpz_divisible_ui_p(v.get_mpz_t(), p));
        CHECK(v > (long)p);
    }
}

TEST_CASE("full pipeline respects the stage prime ranges") {
    auto t = table_for("poly:[1,0,1]", 200);
    auto s = derive_scales_with(200, desk_params(), std::nullopt, 13);
    auto st = stage_uniform(s, t, 1);
    auto blocks = build_blocks(s, t);
    stage_greedy(st, blocks, GreedyMode::MaxCover, 1);
    assign_leftover_random(st, 1);
    auto residual = residual_in_range(st, s.y);
    stage_cleanup(st, residual, CleanupMode::MaxKill);
    for (std::size_t i = 0; i < t.prime_count(); ++i) {
        if (!st.assigned(i)) continue;
        u64 p = t.prime_at(i);
        switch (st.stage_of(i)) {
            case 1: CHECK(p <= s.stage1_bound()); break;
            case 2:
                CHECK(p > s.z);
                CHECK(p <= s.x / 2);
                break;
            case 3:
                CHECK(p > s.x / 2);
                CHECK(p <= s.x);
                break;
            default: CHECK(false);
        }
    }
}
