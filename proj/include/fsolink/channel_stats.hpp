#pragma once

#include <cstdint>
#include <vector>

#include "fsolink/turbulence.hpp"

namespace fsolink {

// Numeric CDF of the Gamma-Gamma density on a log-spaced grid,
// Gauss-Legendre per interval. Linear interpolation between nodes.
class GammaGammaCdf {
public:
    GammaGammaCdf(const TurbulenceRegime& regime, double i_max, int intervals = 6000);

    double operator()(double intensity) const;
    double i_max() const { return x_.back(); }
    double total_mass() const { return f_.back(); }

private:
    std::vector<double> x_;
    std::vector<double> f_;
};

// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
// (sorted in place) and the model CDF.
double ks_statistic(std::vector<double>& samples, const GammaGammaCdf& cdf);

// Asymptotic two-sided KS critical value at significance level 0.01.
double ks_critical_1pct(std::int64_t n);

struct ChannelStatsReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::int64_t samples = 0;
    double mean = 0.0;
    double scintillation = 0.0;
    double scintillation_analytic = 0.0;
    double ks_stat = 0.0;
    double ks_critical = 0.0;
    double pdf_integral = 0.0;  // over (0, intensity cap]
    double cap = 0.0;           // cap with tail bound < 1e-6
};

// Draws `n` intensities and cross-validates the sampler against the pdf:
// moments, KS distance, and pdf normalization over (0, cap].
ChannelStatsReport compute_channel_stats(const TurbulenceRegime& regime,
                                         std::int64_t n, std::uint64_t seed);

}  // namespace fsolink
