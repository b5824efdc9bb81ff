#include "polygap/constants.hpp"

#include <cmath>

namespace polygap {

double crho_g(double delta) {
    if (delta <= 0 || delta >= 0.5) throw DomainError("g(delta) needs delta in (0, 1/2)");
    return 6.0 * std::pow(10.0, 2.0 * delta) / std::log(1.0 / (2.0 * delta));
}

double crho(double rho) {
    if (rho <= 0) throw NonpositiveRho();
    // g is increasing on (0, 1/2) with g(0+) = 0 and g(1/2-) = +inf, so the
    // sup is the unique crossing
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (crho_g(mid) < rho ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double c2(long long K, double xi, double M, double delta) {
    if (K < 1) throw DomainError("c2: K >= 1 required");
    if (xi <= 1) throw DomainError("c2: xi > 1 required");
    if (M <= 0) throw DomainError("c2: M > 0 required");
    if (delta <= 0 || delta >= 0.5) throw DomainError("c2: delta in (0, 1/2) required");
    return (double)K * (1.0 - 1.0 / xi) / ((double)(K + 2) * M * std::log(xi)) *
           std::log(1.0 / (2.0 * delta));
}

double c2nu_prediction(double rho_nu, long long K, double xi, double M, double delta) {
    if (rho_nu < 0) throw DomainError("c2nu: rho_nu >= 0 required");
    if (rho_nu == 0) return 0;
    return rho_nu * c2(K, xi, M, delta);
}

AdmissibilityReport check_admissible(const AdmissibleParams& p) {
    AdmissibilityReport rep;
    double c1 = crho(1.0);
    rep.c1_inv = 1.0 / c1;
    auto fail = [&](const std::string& why) {
        rep.pass = false;
        rep.violations.push_back(why);
    };
    if (!(p.delta > 1e-3)) fail("delta <= 1/10^3");
    if (!(p.delta < c1)) fail("delta >= C(1)");
    if (!(p.M > 6)) fail("M <= 6");
    if (!(p.M <= 7)) fail("M > 7");
    if (!(p.xi > 1)) fail("xi <= 1");
    if (!(p.K >= 1)) fail("K < 1");
    if (!(p.eps > 0)) fail("eps <= 0");
    if (!(p.eps < (p.M - 6) / 7)) fail("eps >= (M-6)/7");
    if (p.delta > 0 && p.delta < 0.5 && p.xi > 1 && p.M > 0 && p.K >= 1) {
        rep.c2_value = c2(p.K, p.xi, p.M, p.delta);
        if (!(rep.c2_value >= std::pow(10.0, 2.0 * p.delta))) fail("C2 < 10^(2 delta)");
        if (!(rep.c2_value <= 100.0)) fail("C2 > 100");
    }
    return rep;
}

}  // namespace polygap
