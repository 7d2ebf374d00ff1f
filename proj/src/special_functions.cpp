#include "qnet/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace qnet {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kFpMin = 1e-300;

// Series expansion of P(a, x), best for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Lentz continued fraction for Q(a, x), best for x >= a + 1.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double log_gamma(double x) {
    // Lanczos, g = 7, 9 coefficients.
    static constexpr double kG = 7.0;
    static constexpr double kCoeff[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

    if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        constexpr double kPi = 3.141592653589793238462643383279;
        return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    }

    x -= 1.0;
    double a = kCoeff[0];
    for (int i = 1; i < 9; ++i) a += kCoeff[i] / (x + i);
    const double t = x + kG + 0.5;
    constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;
    return kHalfLogTwoPi + (x + 0.5) * std::log(t) - t + std::log(a);
}

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double std_normal_cdf(double x) {
    if (x == 0.0) return 0.5;
    // Phi(x) = erfc(-x / sqrt(2)) / 2 and erfc(z) = Q(1/2, z^2) for z >= 0.
    const double half_tail = 0.5 * gamma_q(0.5, 0.5 * x * x);
    return x < 0.0 ? half_tail : 1.0 - half_tail;
}

double two_sided_normal_p(double z) {
    return 2.0 * std_normal_cdf(-std::fabs(z));
}

double chi_square_sf(double x, int k) {
    if (k < 1) throw std::domain_error("chi_square_sf: requires k >= 1");
    if (x < 0.0) throw std::domain_error("chi_square_sf: requires x >= 0");
    return gamma_q(0.5 * k, 0.5 * x);
}

}  // namespace qnet
