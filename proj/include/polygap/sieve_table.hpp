#pragma once

// Polynomial sieving system: for each prime p, the residue set
// I_p = { n mod p : ft(n) = 0 (mod p) }, taken empty when the congruence
// is not well defined on residues (p | t) or when every residue would be a
// root. Flat storage: primes, per-prime offsets, packed sorted residues.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polygap/poly.hpp"
#include "polygap/util.hpp"

namespace polygap {

struct CompositeModulus : std::invalid_argument {
    CompositeModulus() : std::invalid_argument("modulus is not prime") {}
};
struct ResourceLimit : std::runtime_error {
    explicit ResourceLimit(const std::string& w) : std::runtime_error(w) {}
};

// abstract sieving system; only the polynomial implementation ships
class SieveSource {
  public:
    virtual ~SieveSource() = default;
    virtual std::vector<u64> residues(u64 p) const = 0;
    virtual int size_bound() const = 0;  // B with |I_p| <= B
    virtual std::string text() const = 0;
};

class PolynomialSieveSource final : public SieveSource {
  public:
    explicit PolynomialSieveSource(IntValuedPoly f) : f_(std::move(f)) {}
    std::vector<u64> residues(u64 p) const override;
    int size_bound() const override { return f_.degree(); }
    std::string text() const override { return f_.text(); }
    const IntValuedPoly& poly() const { return f_; }

  private:
    IntValuedPoly f_;
};

// exact root set of ft mod p; direct scan below the threshold, gcd with
// x^p - x plus equal-degree splitting above. p must be prime.
std::vector<u64> residues_for_prime(const IntValuedPoly& f, u64 p);
// the two paths, exposed for the oracle tests
std::vector<u64> residues_scan(const IntValuedPoly& f, u64 p);
std::vector<u64> residues_gcd(const IntValuedPoly& f, u64 p);

inline constexpr u64 kScanThreshold = 1ULL << 16;

class SieveTable {
  public:
    u64 limit() const { return limit_; }
    int bound() const { return B_; }  // max |I_p| observed
    const std::string& source_text() const { return source_text_; }
    std::size_t prime_count() const { return primes_.size(); }
    const std::vector<u64>& primes() const { return primes_; }

    u64 prime_at(std::size_t i) const { return primes_[i]; }
    // residues of the i-th prime, sorted
    std::pair<const u64*, const u64*> residues_at(std::size_t i) const {
        return {residues_.data() + offsets_[i], residues_.data() + offsets_[i + 1]};
    }
    int residue_count(std::size_t i) const { return (int)(offsets_[i + 1] - offsets_[i]); }
    // index of prime p, if p <= limit and prime
    std::optional<std::size_t> index_of(u64 p) const;

    static SieveTable build(const SieveSource& src, u64 limit, unsigned threads = 1,
                            u64 memory_cap_bytes = u64(1) << 33);

    // binary cache: magic "PGSV1", polynomial text, limit, then per-prime
    // records (p: 8-byte LE, count: 1 byte, residues: 8-byte LE each)
    void save(const std::string& path) const;
    static std::optional<SieveTable> load(const std::string& path, const std::string& poly_text,
                                          u64 limit);

  private:
    u64 limit_ = 0;
    int B_ = 0;
    std::string source_text_;
    std::vector<u64> primes_;
    std::vector<u64> offsets_;
    std::vector<u64> residues_;
};

struct DensityClass {
    int nu = 0;
    u64 count = 0;
    bool kept = false;   // count >= log x
    double rho_nu = 0;   // count / pi(x), kept classes only
};

struct DensityReport {
    u64 x = 0;
    u64 pi_x = 0;
    std::vector<DensityClass> classes;  // nu = 1..B
    double rho_hat = 0;                 // sum of kept rho_nu
    double weighted_sum = 0;            // sum nu * rho_nu over kept classes
};

DensityReport density_estimate(const SieveTable& table, u64 x);

struct MertensReport {
    u64 z = 0;
    mpf_class sigma;       // >= 30 significant digits
    std::string sigma_str;
    double c1_estimate = 0;  // sigma(z) * log z
};

MertensReport mertens_sigma(const SieveTable& table, u64 z);
// product of (1 - |I_p|/p) over lo < p <= hi
mpf_class sigma_range(const SieveTable& table, u64 lo, u64 hi);

inline constexpr int kMertensPrecisionBits = 256;

std::string mpf_to_string(const mpf_class& v, int digits = 30);

}  // namespace polygap
