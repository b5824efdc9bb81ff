#include "polygap/util.hpp"

#include <algorithm>
#include <cmath>

namespace polygap {

std::vector<u64> primes_upto(u64 limit) {
    std::vector<u64> primes;
    if (limit < 2) return primes;
    std::vector<std::uint8_t> sieve(limit + 1, 1);
    sieve[0] = sieve[1] = 0;
    for (u64 i = 2; i * i <= limit; ++i)
        if (sieve[i])
            for (u64 j = i * i; j <= limit; j += i) sieve[j] = 0;
    primes.reserve(limit > 10 ? (std::size_t)(1.2 * limit / std::log((double)limit)) : 8);
    for (u64 i = 2; i <= limit; ++i)
        if (sieve[i]) primes.push_back(i);
    return primes;
}

std::size_t count_upto(const std::vector<u64>& primes, u64 x) {
    return std::upper_bound(primes.begin(), primes.end(), x) - primes.begin();
}

}  // namespace polygap
