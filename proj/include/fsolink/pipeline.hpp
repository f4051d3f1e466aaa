#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fsolink/link.hpp"
#include "fsolink/mlp.hpp"
#include "fsolink/modem.hpp"
#include "fsolink/rng.hpp"
#include "fsolink/turbulence.hpp"

namespace fsolink {

enum class UserMode { single_user, multiuser_allocation, multiuser_interference };

enum class DetectorKind { qam_ml_perfect, qam_ml_blind, qam_dnn, end_to_end_dnn };

struct ScenarioSpec {
    UserMode user_mode = UserMode::single_user;
    int n_users = 1;
    Combiner combiner = Combiner::egc;
    int n_tx = 1;
    int n_rx = 1;
    TurbulenceRegime regime = TurbulenceRegime::strong();
    bool turbulence_enabled = true;
    int modulation_order = 16;
    DetectorKind detector = DetectorKind::qam_ml_perfect;
    double conversion_gain = 1.0;

    void validate() const;
    LinkConfig link_config(double noise_variance) const;
};

struct TrainConfig {
    int batch_size = 64;
    int samples_per_batch_ratio = 4;
    int iterations = 1000;
    double learning_rate = 0.005;
    double train_es_n0_db = 15.0;
    std::uint64_t seed = 1;
    int hidden_layers = 4;
    int hidden_width = 40;

    void validate() const;
    std::vector<int> receiver_dims(int order) const;     // 2 -> hidden -> M
    std::vector<int> transmitter_dims(int order) const;  // M -> hidden -> 2
};

struct LossReport {
    std::vector<double> mean_batch_loss;  // one entry per iteration
};

// N0 = 10^(-dB/10) with Es = 1.
double noise_variance_from_es_n0_db(double es_n0_db);

std::vector<int> draw_symbols(int n_users, int order, Rng& rng);

// All randomness of one slot: per-user symbols, one channel draw, per-aperture
// noise at the given variance.
struct SlotDraw {
    std::vector<int> symbols;
    ChannelMatrix channel;
    ReceivedVector noise;
    double noise_variance = 0.0;
};

SlotDraw draw_slot(const ScenarioSpec& spec, double noise_variance, Rng& rng);

// The scalar entering the detector plus everything the baselines may know
// about the slot. user_gains[u] is the gain multiplying user u's point in the
// combined observation; silent users carry 0.
struct CombinedSlot {
    std::complex<double> observation;
    int target_user = 0;
    std::vector<double> user_gains;
    double noise_variance = 0.0;  // variance of the combined noise

    double target_gain() const {
        return user_gains[static_cast<std::size_t>(target_user)];
    }
};

// Deterministic composition: transmit active users through the drawn channel,
// superpose, combine per the scenario. Active users: user 0 (single),
// the best-channel user (allocation), or everyone (interference).
CombinedSlot combine_slot(const ScenarioSpec& spec, const SlotDraw& draw,
                          std::span<const std::complex<double>> user_points);

// One fresh slot end to end: draws channel and noise, modulates the given
// per-user symbols, combines.
CombinedSlot simulate_slot(const ScenarioSpec& spec, std::span<const int> symbols,
                           const Constellation& constellation, double noise_variance,
                           Rng& rng);

struct ReceiverTraining {
    MlpParams receiver;
    LossReport loss;
};

// Receiver-only detector: the network sees only (Re y, Im y) and never any
// channel gain. Labels are the target user's symbols.
ReceiverTraining train_receiver_dnn(const ScenarioSpec& spec, const TrainConfig& cfg);

struct EndToEndTraining {
    MlpParams transmitter;
    MlpParams receiver;
    LossReport loss;
    Constellation constellation;  // transmitter outputs after final normalization
};

// Joint constellation shaping + detection. All users share one transmitter.
// Gradients reach the transmitter through the per-example drawn gain; the
// gain itself is never a network input.
EndToEndTraining train_end_to_end(const ScenarioSpec& spec, const TrainConfig& cfg);

// One batch of the joint objective on fixed slot draws. Exposed so the full
// transmitter gradient (through energy renormalization and the channel) can
// be finite-difference checked.
struct E2eBatch {
    double mean_loss = 0.0;
    Gradients tx_grads;
    Gradients rx_grads;
    std::vector<std::complex<double>> constellation;
};

E2eBatch e2e_batch(const ScenarioSpec& spec, const MlpParams& tx, const MlpParams& rx,
                   std::span<const SlotDraw> slots);

struct SerPoint {
    double es_n0_db = 0.0;
    std::int64_t trials = 0;
    std::int64_t errors = 0;
    double ser = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct SerCurve {
    std::vector<SerPoint> points;
};

// 95% Wilson score interval; well-behaved at zero observed errors.
std::pair<double, double> wilson_interval(std::int64_t errors, std::int64_t trials);

struct DetectorModels {
    const MlpParams* receiver = nullptr;
    const Constellation* tx_constellation = nullptr;
};

// Monte Carlo SER over the Es/N0 grid. Trials are independent and derive
// their streams from (seed, grid index, trial index), so the result is
// byte-identical for any thread count. The blind baseline estimates its gain
// from a 1000-sample block sharing the trial's channel realization.
SerCurve evaluate_ser(const ScenarioSpec& spec, const DetectorModels& models,
                      std::span<const double> es_n0_grid_db, std::int64_t trials,
                      std::uint64_t seed, int threads = 0);

}  // namespace fsolink
