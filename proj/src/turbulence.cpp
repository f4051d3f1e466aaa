#include "fsolink/turbulence.hpp"

#include <cmath>
#include <stdexcept>

namespace fsolink {

TurbulenceRegime::TurbulenceRegime(double alpha_, double beta_)
    : alpha(alpha_), beta(beta_) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("TurbulenceRegime: alpha and beta must be > 0");
}

double sample_gamma_gamma(const TurbulenceRegime& regime, Rng& rng) {
    const double x = rng.gamma(regime.alpha) / regime.alpha;
    const double y = rng.gamma(regime.beta) / regime.beta;
    return x * y;
}

double gamma_gamma_pdf(const TurbulenceRegime& regime, double intensity) {
    if (!(intensity > 0.0))
        throw std::domain_error("gamma_gamma_pdf: intensity must be > 0");
    const double a = regime.alpha;
    const double b = regime.beta;
    const double log_coeff = std::log(2.0) + 0.5 * (a + b) * std::log(a * b) -
                             std::lgamma(a) - std::lgamma(b);
    const double log_power = (0.5 * (a + b) - 1.0) * std::log(intensity);
    const double bessel = std::cyl_bessel_k(std::abs(a - b),
                                            2.0 * std::sqrt(a * b * intensity));
    return std::exp(log_coeff + log_power) * bessel;
}

double scintillation_index(const TurbulenceRegime& regime) {
    return (1.0 + 1.0 / regime.alpha) * (1.0 + 1.0 / regime.beta) - 1.0;
}

namespace {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split
// (Numerical Recipes style). Good to ~1e-12 here; only feeds the tail bound.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series for P(a,x), return 1 - P
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a,x)
    const double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace

double gamma_gamma_tail_bound(const TurbulenceRegime& regime, double t) {
    if (!(t > 0.0)) return 1.0;
    const double r = std::sqrt(t);
    return gamma_q(regime.alpha, regime.alpha * r) +
           gamma_q(regime.beta, regime.beta * r);
}

double intensity_cap(const TurbulenceRegime& regime, double tail_mass) {
    double t = 1.0;
    while (gamma_gamma_tail_bound(regime, t) >= tail_mass) {
        t *= 2.0;
        if (t > 1e12)
            throw std::runtime_error("intensity_cap: no finite cap found");
    }
    // tighten by bisection on [t/2, t]
    double lo = t / 2.0, hi = t;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_gamma_tail_bound(regime, mid) >= tail_mass)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

ChannelMatrix::ChannelMatrix(int users, int rx, int tx)
    : n_users(users), n_rx(rx), n_tx(tx) {
    if (users < 1 || rx < 1 || tx < 1)
        throw std::invalid_argument("ChannelMatrix: all counts must be >= 1");
    gains.assign(static_cast<std::size_t>(users) * rx * tx, 0.0);
}

ChannelMatrix draw_channel(int n_users, int n_rx, int n_tx,
                           const TurbulenceRegime& regime, Rng& rng) {
    ChannelMatrix m(n_users, n_rx, n_tx);
    for (auto& g : m.gains) g = sample_gamma_gamma(regime, rng);
    return m;
}

}  // namespace fsolink
