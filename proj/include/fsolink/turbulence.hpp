#pragma once

#include <span>
#include <vector>

#include "fsolink/rng.hpp"

namespace fsolink {

// Gamma-Gamma turbulence strength: alpha large-scale and beta small-scale
// effective eddy counts. Intensities are normalized to unit mean, so Es/N0
// is comparable across regimes.
struct TurbulenceRegime {
    double alpha;
    double beta;

    TurbulenceRegime(double alpha_, double beta_);

    static TurbulenceRegime strong() { return {4.2, 1.4}; }
    static TurbulenceRegime moderate() { return {4.0, 1.9}; }
    static TurbulenceRegime weak() { return {11.6, 10.1}; }
};

// One intensity draw I = X*Y, X ~ Gamma(alpha, 1/alpha), Y ~ Gamma(beta, 1/beta).
// E[I] = 1, E[I^2] = (1+1/alpha)(1+1/beta).
double sample_gamma_gamma(const TurbulenceRegime& regime, Rng& rng);

// Density in the Bessel-K closed form
//   f(I) = 2 (ab)^((a+b)/2) / (G(a) G(b)) * I^((a+b)/2 - 1) * K_{a-b}(2 sqrt(ab I)).
// Throws std::domain_error for intensity <= 0.
double gamma_gamma_pdf(const TurbulenceRegime& regime, double intensity);

// (1 + 1/alpha)(1 + 1/beta) - 1
double scintillation_index(const TurbulenceRegime& regime);

// Upper bound on P(I > t) from the product construction:
// I > t implies X > sqrt(t) or Y > sqrt(t).
double gamma_gamma_tail_bound(const TurbulenceRegime& regime, double t);

// Smallest cap (within a factor ~2) whose tail bound is below tail_mass.
double intensity_cap(const TurbulenceRegime& regime, double tail_mass);

// Per-slot intensity gains for every (user, rx aperture, tx aperture) link,
// drawn independently.
struct ChannelMatrix {
    int n_users = 0;
    int n_rx = 0;
    int n_tx = 0;
    std::vector<double> gains;  // [user][rx][tx] row-major

    ChannelMatrix() = default;
    ChannelMatrix(int users, int rx, int tx);

    double& at(int user, int rx, int tx) {
        return gains[(static_cast<std::size_t>(user) * n_rx + rx) * n_tx + tx];
    }
    double at(int user, int rx, int tx) const {
        return gains[(static_cast<std::size_t>(user) * n_rx + rx) * n_tx + tx];
    }

    // N_r x N_t slice for one user, row-major by rx aperture.
    std::span<const double> user_gains(int user) const {
        return {gains.data() + static_cast<std::size_t>(user) * n_rx * n_tx,
                static_cast<std::size_t>(n_rx) * n_tx};
    }

    double row_sum(int user, int rx) const {
        double s = 0.0;
        for (int j = 0; j < n_tx; ++j) s += at(user, rx, j);
        return s;
    }
    double total(int user) const {
        double s = 0.0;
        for (int i = 0; i < n_rx; ++i) s += row_sum(user, i);
        return s;
    }
};

ChannelMatrix draw_channel(int n_users, int n_rx, int n_tx,
                           const TurbulenceRegime& regime, Rng& rng);

}  // namespace fsolink
