#include "fsolink/channel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsolink {

namespace {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGlWeight[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
    0.1294849661688697};

}  // namespace

GammaGammaCdf::GammaGammaCdf(const TurbulenceRegime& regime, double i_max,
                             int intervals) {
    if (!(i_max > 0.0) || intervals < 8)
        throw std::invalid_argument("GammaGammaCdf: bad grid");
    // Mass below x0 is bounded by C x0^min(alpha,beta), negligible at 1e-10.
    const double x0 = 1e-10;
    x_.resize(intervals + 1);
    f_.resize(intervals + 1);
    const double log_lo = std::log(x0);
    const double log_hi = std::log(i_max);
    for (int k = 0; k <= intervals; ++k)
        x_[k] = std::exp(log_lo + (log_hi - log_lo) * k / intervals);
    x_.back() = i_max;
    f_[0] = 0.0;
    for (int k = 0; k < intervals; ++k) {
        const double a = x_[k], b = x_[k + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double acc = 0.0;
        for (int q = 0; q < 7; ++q)
            acc += kGlWeight[q] * gamma_gamma_pdf(regime, mid + half * kGlNode[q]);
        f_[k + 1] = f_[k] + acc * half;
    }
}

double GammaGammaCdf::operator()(double intensity) const {
    if (intensity <= x_.front()) return 0.0;
    if (intensity >= x_.back()) return f_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), intensity);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double t = (intensity - x_[k]) / (x_[k + 1] - x_[k]);
    return f_[k] + t * (f_[k + 1] - f_[k]);
}

double ks_statistic(std::vector<double>& samples, const GammaGammaCdf& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double ks_critical_1pct(std::int64_t n) {
    // c(alpha) = sqrt(-ln(alpha/2)/2), alpha = 0.01
    return 1.6276236115189504 / std::sqrt(static_cast<double>(n));
}

ChannelStatsReport compute_channel_stats(const TurbulenceRegime& regime,
                                         std::int64_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("compute_channel_stats: n too small");
    ChannelStatsReport rep;
    rep.alpha = regime.alpha;
    rep.beta = regime.beta;
    rep.samples = n;
    rep.scintillation_analytic = scintillation_index(regime);
    rep.cap = intensity_cap(regime, 1e-6);

    Rng rng = derive_stream(seed, 0x57A75u);
    std::vector<double> samples(static_cast<std::size_t>(n));
    double sum = 0.0, sum2 = 0.0;
    for (auto& s : samples) {
        s = sample_gamma_gamma(regime, rng);
        sum += s;
        sum2 += s * s;
    }
    rep.mean = sum / static_cast<double>(n);
    const double m2 = sum2 / static_cast<double>(n);
    rep.scintillation = m2 / (rep.mean * rep.mean) - 1.0;

    const GammaGammaCdf cdf(regime, rep.cap);
    rep.pdf_integral = cdf.total_mass();
    rep.ks_stat = ks_statistic(samples, cdf);
    rep.ks_critical = ks_critical_1pct(n);
    return rep;
}

}  // namespace fsolink
