#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cmalab {

/// Which of the three exponent regimes applies, by the position of
/// alpha/(2+alpha) relative to the critical exponents gamma_0 > gamma_n:
///   BelowGamma0:      alpha/(2+alpha) >= gamma_0, every beta < gamma_0 reachable
///   AlphaRatio:       gamma_n <= alpha/(2+alpha) < gamma_0, beta = alpha/(2+alpha)
///   AlphaHalfOrGamma: alpha/(2+alpha) < gamma_n, beta = min(alpha/2, gamma')
enum class BudgetRegime { BelowGamma0, AlphaRatio, AlphaHalfOrGamma };

inline const char* to_string(BudgetRegime r) {
    switch (r) {
        case BudgetRegime::BelowGamma0: return "below-gamma0";
        case BudgetRegime::AlphaRatio: return "alpha-ratio";
        case BudgetRegime::AlphaHalfOrGamma: return "alpha-half-or-gamma-prime";
    }
    return "?";
}

/// Exponent bookkeeping: from the boundary-data exponent alpha, the
/// integrability p and dimension n, with chosen stability exponents
/// gamma, gamma' < gamma_n and gamma'' < gamma_0, derive
///   beta   = max{ min(gamma'', alpha/(2+alpha)), min(alpha/2, gamma') }
///   alpha' = min{ beta, (1+beta) gamma }.
struct HolderBudget {
    double alpha = 0.0;
    double p = 0.0, pstar = 0.0;
    int n = 1;
    double gamma0 = 0.0, gamma_n = 0.0;
    double gamma = 0.0, gamma_prime = 0.0, gamma_dblprime = 0.0;
    double beta = 0.0;
    double alpha_prime = 0.0;
    BudgetRegime regime = BudgetRegime::AlphaRatio;
};

inline HolderBudget budget(double alpha, double p, int n, double gamma, double gamma_prime,
                           double gamma_dblprime) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("budget: alpha must lie in (0, 1]");
    if (!(p > 1.0)) throw std::invalid_argument("budget: p must exceed 1");
    if (n < 1) throw std::invalid_argument("budget: n must be a positive integer");
    HolderBudget b;
    b.alpha = alpha;
    b.p = p;
    b.pstar = p / (p - 1.0);
    b.n = n;
    b.gamma0 = 1.0 / (b.pstar + 1.0);
    b.gamma_n = 1.0 / (n * b.pstar + 1.0);
    // the admissible intervals are open; endpoints are rejected
    if (!(gamma > 0.0 && gamma < b.gamma_n))
        throw std::invalid_argument("budget: gamma must lie in the open interval (0, gamma_n)");
    if (!(gamma_prime > 0.0 && gamma_prime < b.gamma_n))
        throw std::invalid_argument("budget: gamma' must lie in the open interval (0, gamma_n)");
    if (!(gamma_dblprime > 0.0 && gamma_dblprime < b.gamma0))
        throw std::invalid_argument("budget: gamma'' must lie in the open interval (0, gamma_0)");
    b.gamma = gamma;
    b.gamma_prime = gamma_prime;
    b.gamma_dblprime = gamma_dblprime;
    const double a_ratio = alpha / (2.0 + alpha);
    b.beta = std::max(std::min(gamma_dblprime, a_ratio), std::min(0.5 * alpha, gamma_prime));
    b.alpha_prime = std::min(b.beta, (1.0 + b.beta) * gamma);
    if (a_ratio >= b.gamma0)
        b.regime = BudgetRegime::BelowGamma0;
    else if (a_ratio >= b.gamma_n)
        b.regime = BudgetRegime::AlphaRatio;
    else
        b.regime = BudgetRegime::AlphaHalfOrGamma;
    return b;
}

}  // namespace cmalab
