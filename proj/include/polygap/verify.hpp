#pragma once

// Independent certificate checker. Trusts nothing: recomputes ft(n0+m)
// exactly for every offset, checks primality of each witness, divisibility,
// magnitude, and CRT consistency of n0 with the recorded shifts. Shares only
// the data model (polynomial parsing, certificate JSON) with the engine.

#include <string>
#include <vector>

#include "polygap/engine.hpp"

namespace polygap {

struct VerifyReport {
    bool pass = true;
    std::vector<std::string> failures;
    u64 offsets_checked = 0;

    void fail(const std::string& why) {
        pass = false;
        if (failures.size() < 32) failures.push_back(why);
    }
};

VerifyReport verify_certificate(const GapCertificate& cert);

}  // namespace polygap
