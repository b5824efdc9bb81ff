#pragma once

// Explicit constants of the construction: C(rho) from its sup definition,
// the clean-up constant C2 and its per-class main values C_{2,nu}, and the
// admissibility box for engine parameters.

#include <stdexcept>
#include <string>
#include <vector>

namespace polygap {

struct NonpositiveRho : std::invalid_argument {
    NonpositiveRho() : std::invalid_argument("rho must be positive") {}
};
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& w) : std::invalid_argument(w) {}
};

// g(delta) = 6 * 10^(2 delta) / log(1/(2 delta)), increasing on (0, 1/2)
double crho_g(double delta);

// C(rho) = sup{ delta > 0 : g(delta) < rho }, by bisection to 1e-9
double crho(double rho);

// C2 = K(1 - 1/xi) / ((K+2) M log xi) * log(1/(2 delta))
double c2(long long K, double xi, double M, double delta);

// C_{2,nu} main value: rho_nu * C2
double c2nu_prediction(double rho_nu, long long K, double xi, double M, double delta);

struct AdmissibleParams {
    double delta = 0.0011;
    double xi = 1.25;
    long long K = 2;
    double M = 6.5;
    double eps = 0.05;
};

struct AdmissibilityReport {
    bool pass = true;
    std::vector<std::string> violations;
    double c1_inv = 0;   // 1/C(1)
    double c2_value = 0;
};

// validates delta in (1/10^3, C(1)), 6 < M <= 7, xi > 1, 0 < eps < (M-6)/7,
// and 10^(2 delta) <= C2 <= 100
AdmissibilityReport check_admissible(const AdmissibleParams& p);

}  // namespace polygap
