#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace polygap {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// --- deterministic RNG -------------------------------------------------
//
// One master seed; per-object streams derived as hash(seed, tag) so that
// scheduling and thread count cannot change results.

inline u64 splitmix64(u64& state) {
    state += 0x9e3779b97f4a7c15ULL;
    u64 z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    u64 state;
    explicit Rng(u64 seed) : state(seed) {}
    u64 next() { return splitmix64(state); }
    // uniform in [0, n), n > 0, by rejection
    u64 below(u64 n) {
        u64 lim = ~u64(0) - ~u64(0) % n;
        u64 v;
        do { v = next(); } while (v >= lim);
        return v % n;
    }
    double unit() { return (next() >> 11) * 0x1.0p-53; }
};

inline u64 derive_stream(u64 seed, u64 tag) {
    u64 s = seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
    splitmix64(s);
    return s;
}

// --- 64-bit modular arithmetic -----------------------------------------

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// deterministic Miller-Rabin for 64-bit n
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = powmod(a % n, d, n);
        if (x <= 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

// --- prime sieve --------------------------------------------------------

// all primes <= limit, ascending
std::vector<u64> primes_upto(u64 limit);

// pi(x) from a sorted prime vector (x <= back())
std::size_t count_upto(const std::vector<u64>& primes, u64 x);

// --- bit vector over a signed integer window ----------------------------
//
// Window (lo, hi]; index n maps to n - lo - 1.

class BitWindow {
  public:
    BitWindow() : lo_(0), hi_(0) {}
    BitWindow(long long lo, long long hi)
        : lo_(lo), hi_(hi), bits_((size(hi - lo) + 63) / 64, ~u64(0)) {}

    long long lo() const { return lo_; }
    long long hi() const { return hi_; }
    long long count() const { return hi_ - lo_; }
    bool contains(long long n) const { return n > lo_ && n <= hi_; }

    bool get(long long n) const {
        u64 i = (u64)(n - lo_ - 1);
        return (bits_[i >> 6] >> (i & 63)) & 1;
    }
    void clear(long long n) {
        u64 i = (u64)(n - lo_ - 1);
        bits_[i >> 6] &= ~(u64(1) << (i & 63));
    }
    void set(long long n) {
        u64 i = (u64)(n - lo_ - 1);
        bits_[i >> 6] |= u64(1) << (i & 63);
    }
    void fill() { std::fill(bits_.begin(), bits_.end(), ~u64(0)); }

    // AND-merge another window of identical shape
    void intersect(const BitWindow& other) {
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= other.bits_[i];
    }

  private:
    static std::size_t size(long long n) { return n > 0 ? (std::size_t)n : 0; }
    long long lo_, hi_;
    std::vector<u64> bits_;
};

// --- tiny parallel-for --------------------------------------------------
//
// Splits [0, n) into contiguous chunks, one thread each. The callback gets
// (chunk_index, begin, end); deterministic merges are the caller's job.

inline void parallel_chunks(std::size_t n, unsigned threads,
                            const std::function<void(unsigned, std::size_t, std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        fn(0, 0, n);
        return;
    }
    unsigned nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        std::size_t b = t * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, t, b, e] { fn(t, b, e); });
    }
    for (auto& th : pool) th.join();
}

inline unsigned default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

}  // namespace polygap
