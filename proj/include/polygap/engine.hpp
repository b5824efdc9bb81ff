#pragma once

// Three-stage construction of a shift b with (S_x + b) having no element in
// [1, y]: uniform random shifts for small primes, a greedy multi-residue
// stage over mid-range primes grouped into scale blocks, and a clean-up
// matching over large primes. Output is an independently verifiable
// certificate: n0 plus one prime witness per offset.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polygap/constants.hpp"
#include "polygap/poly.hpp"
#include "polygap/sieve_table.hpp"
#include "polygap/util.hpp"

namespace polygap {

struct ScaleTooSmall : std::runtime_error {
    explicit ScaleTooSmall(const std::string& w) : std::runtime_error(w) {}
};
struct UncoveredOffset : std::runtime_error {
    u64 offset;
    explicit UncoveredOffset(u64 m)
        : std::runtime_error("offset " + std::to_string(m) + " has no witness"), offset(m) {}
};

struct ScaleParams {
    u64 x = 0;
    u64 y = 0;  // ceil(x (log x)^delta) unless overridden
    u64 z = 0;  // floor(y loglog x / sqrt(log x)) unless overridden
    AdmissibleParams params;
    bool surrogate = false;       // y or z overridden
    std::vector<double> scales;   // the set of scales, descending
    double h_lo = 0, h_hi = 0;    // 2y/x and y/(xi z)
    bool scales_empty = false;    // no power of xi fits the bounds

    u64 stage1_bound() const { return std::min(z, x / 2); }
    long long window_lo() const { return -(long long)(params.K + 1) * (long long)y; }
    long long window_hi() const { return (long long)(params.K + 2) * (long long)y; }
    long long sample_hi() const { return (long long)y; }  // n ranges over (window_lo, y]
};

ScaleParams derive_scales(u64 x, const AdmissibleParams& params, u64 x_min = 100,
                          bool strict = false);
ScaleParams derive_scales_with(u64 x, const AdmissibleParams& params, std::optional<u64> y_override,
                               std::optional<u64> z_override);

struct BlockPrime {
    u64 q = 0;
    std::vector<u64> roots;  // a_{i,q} in [1, q], ascending
};

struct Block {
    double H = 0;
    int nu = 0;
    bool clamped = false;  // q fell outside every scale range; H clamped
    std::vector<BlockPrime> primes;
    double asymptotic_ratio = 0;  // |Q| / (rho_nu (1-1/xi) y / (H log x))
};

struct PrimeBlocks {
    std::vector<Block> blocks;  // descending H, then ascending nu
    u64 total_primes = 0;
};

PrimeBlocks build_blocks(const ScaleParams& scale, const SieveTable& table);

class ShiftState {
  public:
    ShiftState(const ScaleParams& scale, const SieveTable& table);

    const ScaleParams& scale() const { return scale_; }
    const SieveTable& table() const { return *table_; }

    bool assigned(std::size_t pi) const { return stage_[pi] != 0; }
    u64 shift(std::size_t pi) const { return (u64)shift_[pi]; }
    int stage_of(std::size_t pi) const { return stage_[pi]; }
    void assign(std::size_t pi, u64 s, int stage);

    // stage-1 survivor set over (window_lo, window_hi]
    const BitWindow& survivors() const { return S_; }
    bool in_S(long long n) const { return S_.contains(n) && S_.get(n); }
    // membership by direct divisibility against assigned primes <= bound
    bool survives_direct(long long n, u64 prime_bound, int max_stage) const;

    mpf_class sigma() const;  // product over assigned stage-1 primes

    struct HCache {
        u64 s1_bound = 0;      // min(floor(H^M), stage1 bound)
        double sigma1 = 0, sigma2 = 0;
        BitWindow S1, S2;
        std::vector<double> inv_sigma2_pow;  // sigma2^-k
    };
    const HCache& hcache(double H) const;

    // exposes the sieve used to build S (also used by tests via injection)
    void rebuild_survivors();

  private:
    const SieveTable* table_;
    ScaleParams scale_;
    std::vector<long long> shift_;
    std::vector<std::int8_t> stage_;
    BitWindow S_;
    mutable std::map<double, HCache> hcache_;
};

// stage 1: s_p uniform in [0, p) independently for p <= min(z, x/2)
ShiftState stage_uniform(const ScaleParams& scale, const SieveTable& table, u64 seed);
// test hook: explicit shifts (pairs p -> s_p); S sieved from exactly these
ShiftState inject_shifts(const ScaleParams& scale, const SieveTable& table,
                         const std::vector<std::pair<u64, u64>>& forced);

// lambda(H; q, n) per the weight definition; q given by block prime (roots
// in [1, q]); zero outside the window contract
double lambda_weight(const ShiftState& st, double H, const BlockPrime& bp, long long n);
// sum of lambda(H; q, n) over window_lo < n <= y
double lambda_row_sum(const ShiftState& st, double H, const BlockPrime& bp);

enum class GreedyMode { Sampled, MaxCover };

struct GreedyPick {
    u64 q = 0;
    double H = 0;
    long long n_q = 0;
    std::vector<std::vector<u64>> e_iq;  // per root index, covered elements
    std::size_t covered = 0;
    bool degenerate = false;  // all-zero weights (sampled mode)
};

struct GreedyOutcome {
    std::vector<GreedyPick> picks;
    std::vector<u64> uncovered;  // V after the stage, ascending
    std::size_t initial_V = 0;
    u64 degenerate_events = 0;
};

GreedyOutcome stage_greedy(ShiftState& st, const PrimeBlocks& blocks, GreedyMode mode, u64 seed);
// comparison baseline: progressions use only a_{1,q}
GreedyOutcome baseline_single_residue(ShiftState& st, const PrimeBlocks& blocks, GreedyMode mode,
                                      u64 seed);

// unassigned usable primes in (stage1_bound, x/2] get uniform random shifts
void assign_leftover_random(ShiftState& st, u64 seed);

// survivors of [1, y_target] under every assigned prime <= x/2
std::vector<u64> residual_in_range(const ShiftState& st, u64 y_target);

enum class CleanupMode { FirstFit, MaxKill };

struct CleanupResult {
    std::vector<std::pair<u64, u64>> matches;  // (m, q) in match order
    std::vector<u64> leftovers;                // residual elements left uncovered
    u64 primes_available = 0;
    u64 primes_used = 0;
};

// matches residual elements to distinct primes in (max(z, x/2), x] with
// |I_p| >= 1, setting s_p = (m - a_{1,p}) mod p; first-fit (ascending m,
// next unused prime) or coverage-greedy (max-kill) discipline
CleanupResult stage_cleanup(ShiftState& st, const std::vector<u64>& residual,
                            CleanupMode mode = CleanupMode::FirstFit);

struct GapCertificate {
    std::string poly_text;
    u64 x = 0;
    u64 y = 0;
    mpz_class n0;
    std::vector<std::pair<u64, u64>> shifts;     // (p, s_p), used primes only
    std::vector<std::pair<u64, u64>> witnesses;  // (m, p_m), m = 1..y
    // provenance
    u64 seed = 0;
    std::string mode;
    std::string cleanup;
    AdmissibleParams params;
    bool surrogate = false;
    u64 attempt = 0;
    u64 z = 0;
};

GapCertificate assemble_certificate(const ShiftState& st, const IntValuedPoly& f, u64 y_target);

std::string certificate_to_json(const GapCertificate& cert);
GapCertificate certificate_from_json(const std::string& json_text);

struct FindGapOptions {
    GreedyMode mode = GreedyMode::MaxCover;
    CleanupMode cleanup = CleanupMode::FirstFit;
    u64 seed = 0;
    u64 attempts = 1000;
    u64 min_y = 0;  // 0: require y >= x
};

struct FindGapResult {
    std::optional<GapCertificate> cert;
    u64 attempts_used = 0;
    u64 best_residual = ~u64(0);  // smallest residual seen after stage 2
    u64 last_leftovers = 0;
};

FindGapResult find_gap(const IntValuedPoly& f, const SieveTable& table, const ScaleParams& scale,
                       const FindGapOptions& opts);

}  // namespace polygap
