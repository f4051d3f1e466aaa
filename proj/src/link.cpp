#include "fsolink/link.hpp"

#include <cmath>
#include <stdexcept>

namespace fsolink {

void LinkConfig::validate() const {
    if (!(conversion_gain > 0.0))
        throw std::invalid_argument("LinkConfig: conversion_gain must be > 0");
    if (noise_variance < 0.0 || !std::isfinite(noise_variance))
        throw std::invalid_argument("LinkConfig: noise_variance must be >= 0");
    if (n_tx < 1 || n_rx < 1 || n_users < 1)
        throw std::invalid_argument("LinkConfig: counts must be >= 1");
}

ReceivedVector draw_noise(int n_rx, double variance, Rng& rng) {
    ReceivedVector n(static_cast<std::size_t>(n_rx));
    for (auto& v : n) v = rng.complex_normal(variance);
    return n;
}

ReceivedVector transmit_noiseless(std::complex<double> x,
                                  std::span<const double> user_gains,
                                  const LinkConfig& cfg) {
    if (user_gains.size() != static_cast<std::size_t>(cfg.n_rx) * cfg.n_tx)
        throw std::invalid_argument("transmit: gain slice does not match N_r x N_t");
    ReceivedVector y(static_cast<std::size_t>(cfg.n_rx));
    const double split = cfg.conversion_gain / static_cast<double>(cfg.n_tx);
    for (int i = 0; i < cfg.n_rx; ++i) {
        double row = 0.0;
        for (int j = 0; j < cfg.n_tx; ++j)
            row += user_gains[static_cast<std::size_t>(i) * cfg.n_tx + j];
        y[static_cast<std::size_t>(i)] = split * row * x;
    }
    return y;
}

ReceivedVector transmit(std::complex<double> x, std::span<const double> user_gains,
                        const LinkConfig& cfg, Rng& rng) {
    ReceivedVector y = transmit_noiseless(x, user_gains, cfg);
    for (auto& v : y) v += rng.complex_normal(cfg.noise_variance);
    return y;
}

ReceivedVector superpose_interference(std::span<const ReceivedVector> noiseless,
                                      const ReceivedVector& noise) {
    if (noiseless.empty())
        throw std::invalid_argument("superpose_interference: no users");
    ReceivedVector y = noise;
    for (const auto& contrib : noiseless) {
        if (contrib.size() != y.size())
            throw std::invalid_argument("superpose_interference: mismatched lengths");
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += contrib[i];
    }
    return y;
}

std::complex<double> egc_combine(const ReceivedVector& y) {
    if (y.empty()) throw std::invalid_argument("egc_combine: empty vector");
    std::complex<double> s = 0.0;
    for (const auto& v : y) s += v;
    return s;
}

ScSelection sc_select(const ReceivedVector& y, std::span<const double> user_gains,
                      int n_tx) {
    const int n_rx = static_cast<int>(y.size());
    if (n_rx < 1) throw std::invalid_argument("sc_select: empty vector");
    if (user_gains.size() != static_cast<std::size_t>(n_rx) * n_tx)
        throw std::invalid_argument("sc_select: gain slice does not match");
    int best = 0;
    double best_metric = -1.0;
    for (int i = 0; i < n_rx; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_tx; ++j)
            row += user_gains[static_cast<std::size_t>(i) * n_tx + j];
        const double metric = row * row;
        if (metric > best_metric) {
            best_metric = metric;
            best = i;
        }
    }
    return {best, y[static_cast<std::size_t>(best)]};
}

double egc_effective_gain(std::span<const double> user_gains, const LinkConfig& cfg) {
    double s = 0.0;
    for (const double g : user_gains) s += g;
    return cfg.conversion_gain / static_cast<double>(cfg.n_tx) * s;
}

double sc_effective_gain(std::span<const double> gains_row, const LinkConfig& cfg) {
    double s = 0.0;
    for (const double g : gains_row) s += g;
    return cfg.conversion_gain / static_cast<double>(cfg.n_tx) * s;
}

int ml_detect(std::complex<double> y, double effective_gain, const Constellation& c) {
    if (c.points.empty()) throw std::invalid_argument("ml_detect: empty constellation");
    int best = 0;
    double best_d = std::norm(y - effective_gain * c.points[0]);
    for (int m = 1; m < c.order; ++m) {
        const double d = std::norm(y - effective_gain * c.points[static_cast<std::size_t>(m)]);
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

int ml_detect_egc(std::complex<double> y, std::span<const double> user_gains,
                  const LinkConfig& cfg, const Constellation& c) {
    return ml_detect(y, egc_effective_gain(user_gains, cfg), c);
}

int ml_detect_sc(std::complex<double> y_selected, std::span<const double> gains_row,
                 const LinkConfig& cfg, const Constellation& c) {
    return ml_detect(y_selected, sc_effective_gain(gains_row, cfg), c);
}

double blind_gain_estimate(std::span<const std::complex<double>> block,
                           double noise_variance) {
    if (block.size() < 2)
        throw std::invalid_argument("blind_gain_estimate: block too short");
    double m2 = 0.0;
    for (const auto& y : block) m2 += std::norm(y);
    m2 /= static_cast<double>(block.size());
    return std::sqrt(std::max(m2 - noise_variance, 0.0));
}

double blind_gain_estimate(std::span<const std::complex<double>> block,
                           const LinkConfig& cfg) {
    return blind_gain_estimate(block, cfg.noise_variance);
}

int allocate_best_user(const ChannelMatrix& channel, Combiner combiner,
                       const LinkConfig& cfg) {
    if (channel.n_users < 1)
        throw std::invalid_argument("allocate_best_user: no users");
    const double split = cfg.conversion_gain / static_cast<double>(cfg.n_tx);
    int best = 0;
    double best_gain = -1.0;
    for (int u = 0; u < channel.n_users; ++u) {
        double g = 0.0;
        if (combiner == Combiner::egc) {
            g = split * channel.total(u);
        } else {
            for (int i = 0; i < channel.n_rx; ++i)
                g = std::max(g, split * channel.row_sum(u, i));
        }
        if (g > best_gain) {
            best_gain = g;
            best = u;
        }
    }
    return best;
}

}  // namespace fsolink
