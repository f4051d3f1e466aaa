#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fsolink/modem.hpp"
#include "fsolink/rng.hpp"
#include "fsolink/turbulence.hpp"

namespace fsolink {

enum class Combiner { egc, sc };

struct LinkConfig {
    double conversion_gain = 1.0;  // photodetector responsivity, one constant
    int n_tx = 1;
    int n_rx = 1;
    int n_users = 1;
    double noise_variance = 1.0;  // total complex-noise variance N0; 0 = noiseless

    void validate() const;
};

using ReceivedVector = std::vector<std::complex<double>>;

// One circularly symmetric complex Gaussian draw per aperture,
// total variance `variance` each.
ReceivedVector draw_noise(int n_rx, double variance, Rng& rng);

// y_i = (conversion_gain / N_t) * (sum_j I_{i,j}) * x, no noise. The 1/N_t
// split keeps total transmit energy independent of the aperture count.
ReceivedVector transmit_noiseless(std::complex<double> x,
                                  std::span<const double> user_gains,
                                  const LinkConfig& cfg);

ReceivedVector transmit(std::complex<double> x, std::span<const double> user_gains,
                        const LinkConfig& cfg, Rng& rng);

// Element-wise sum of all users' noiseless contributions plus one shared
// noise vector. Throws on mismatched lengths.
ReceivedVector superpose_interference(std::span<const ReceivedVector> noiseless,
                                      const ReceivedVector& noise);

// Plain sum of the aperture samples. Throws on an empty vector.
std::complex<double> egc_combine(const ReceivedVector& y);

struct ScSelection {
    int aperture;
    std::complex<double> sample;
};

// Aperture with the largest squared gain-row sum; ties to the lowest index.
ScSelection sc_select(const ReceivedVector& y, std::span<const double> user_gains,
                      int n_tx);

// Scalar gain multiplying the symbol in the combined observation.
double egc_effective_gain(std::span<const double> user_gains, const LinkConfig& cfg);
double sc_effective_gain(std::span<const double> gains_row, const LinkConfig& cfg);

// Nearest scaled constellation point: argmin_m |y - g * x_m|^2, lowest index wins.
int ml_detect(std::complex<double> y, double effective_gain, const Constellation& c);

int ml_detect_egc(std::complex<double> y, std::span<const double> user_gains,
                  const LinkConfig& cfg, const Constellation& c);

int ml_detect_sc(std::complex<double> y_selected, std::span<const double> gains_row,
                 const LinkConfig& cfg, const Constellation& c);

// Second-moment gain estimate over a block of combined samples, assuming unit
// symbol energy: sqrt(max(mean|y|^2 - noise_variance, 0)). The caller passes
// the noise variance of the combined observation (N_r * sigma^2 after EGC).
// Throws for blocks shorter than 2.
double blind_gain_estimate(std::span<const std::complex<double>> block,
                           double noise_variance);
double blind_gain_estimate(std::span<const std::complex<double>> block,
                           const LinkConfig& cfg);

// User with the largest post-combining effective gain; ties to lowest index.
int allocate_best_user(const ChannelMatrix& channel, Combiner combiner,
                       const LinkConfig& cfg);

}  // namespace fsolink
