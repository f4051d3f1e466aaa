#include "fsolink/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <tuple>

#include "fsolink/errors.hpp"

namespace fsolink {

namespace {

constexpr int kBlindBlockSize = 1000;

// Substream tags so the independent random consumers of one run never collide.
constexpr std::uint64_t kTagTxInit = 0x7831;
constexpr std::uint64_t kTagRxInit = 0x5278;
constexpr std::uint64_t kTagTrainData = 0xDA7A;

ChannelMatrix slot_channel(const ScenarioSpec& spec, Rng& rng) {
    if (spec.turbulence_enabled)
        return draw_channel(spec.n_users, spec.n_rx, spec.n_tx, spec.regime, rng);
    ChannelMatrix ch(spec.n_users, spec.n_rx, spec.n_tx);
    std::fill(ch.gains.begin(), ch.gains.end(), 1.0);
    return ch;
}

std::vector<int> active_users(const ScenarioSpec& spec, const SlotDraw& draw,
                              const LinkConfig& cfg, int* target_out) {
    switch (spec.user_mode) {
        case UserMode::single_user:
            *target_out = 0;
            return {0};
        case UserMode::multiuser_allocation: {
            int best = allocate_best_user(draw.channel, spec.combiner, cfg);
            *target_out = best;
            return {best};
        }
        case UserMode::multiuser_interference: {
            *target_out = 0;
            std::vector<int> all(static_cast<std::size_t>(spec.n_users));
            for (int u = 0; u < spec.n_users; ++u) all[static_cast<std::size_t>(u)] = u;
            return all;
        }
    }
    throw ConfigError("unknown user mode");
}

}  // namespace

void ScenarioSpec::validate() const {
    if (n_tx < 1 || n_rx < 1)
        throw ConfigError("aperture counts must be at least 1");
    if (n_users < 1) throw ConfigError("user count must be at least 1");
    if (user_mode == UserMode::single_user && n_users != 1)
        throw ConfigError("single-user mode requires exactly one user");
    if (user_mode != UserMode::single_user && n_users < 2)
        throw ConfigError("multiuser modes require at least two users");
    if (modulation_order < 2)
        throw ConfigError("modulation order must be at least 2");
    if (!(conversion_gain > 0.0) || !std::isfinite(conversion_gain))
        throw ConfigError("conversion gain must be positive and finite");
}

LinkConfig ScenarioSpec::link_config(double noise_variance) const {
    LinkConfig cfg;
    cfg.conversion_gain = conversion_gain;
    cfg.n_tx = n_tx;
    cfg.n_rx = n_rx;
    cfg.n_users = n_users;
    cfg.noise_variance = noise_variance;
    cfg.validate();
    return cfg;
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (samples_per_batch_ratio < 1)
        throw ConfigError("samples-per-batch ratio must be at least 1");
    if (iterations < 1) throw ConfigError("iteration count must be at least 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learning rate must be positive and finite");
    if (!std::isfinite(train_es_n0_db))
        throw ConfigError("training Es/N0 must be finite");
    if (hidden_layers < 0) throw ConfigError("hidden layer count must be >= 0");
    if (hidden_layers > 0 && hidden_width < 1)
        throw ConfigError("hidden width must be at least 1");
}

std::vector<int> TrainConfig::receiver_dims(int order) const {
    std::vector<int> dims;
    dims.push_back(2);
    for (int l = 0; l < hidden_layers; ++l) dims.push_back(hidden_width);
    dims.push_back(order);
    return dims;
}

std::vector<int> TrainConfig::transmitter_dims(int order) const {
    std::vector<int> dims;
    dims.push_back(order);
    for (int l = 0; l < hidden_layers; ++l) dims.push_back(hidden_width);
    dims.push_back(2);
    return dims;
}

double noise_variance_from_es_n0_db(double es_n0_db) {
    return std::pow(10.0, -es_n0_db / 10.0);
}

std::vector<int> draw_symbols(int n_users, int order, Rng& rng) {
    std::vector<int> symbols(static_cast<std::size_t>(n_users));
    for (auto& s : symbols) s = rng.below(order);
    return symbols;
}

SlotDraw draw_slot(const ScenarioSpec& spec, double noise_variance, Rng& rng) {
    SlotDraw draw;
    draw.symbols = draw_symbols(spec.n_users, spec.modulation_order, rng);
    draw.channel = slot_channel(spec, rng);
    draw.noise = draw_noise(spec.n_rx, noise_variance, rng);
    draw.noise_variance = noise_variance;
    return draw;
}

CombinedSlot combine_slot(const ScenarioSpec& spec, const SlotDraw& draw,
                          std::span<const std::complex<double>> user_points) {
    if (static_cast<int>(user_points.size()) != spec.n_users)
        throw ConfigError("one constellation point per user expected");
    if (draw.channel.n_users != spec.n_users || draw.channel.n_rx != spec.n_rx ||
        draw.channel.n_tx != spec.n_tx)
        throw ConfigError("channel draw does not match the scenario dimensions");

    const LinkConfig cfg = spec.link_config(draw.noise_variance);
    CombinedSlot out;
    std::vector<int> active = active_users(spec, draw, cfg, &out.target_user);

    std::vector<ReceivedVector> contributions;
    contributions.reserve(active.size());
    for (int u : active)
        contributions.push_back(transmit_noiseless(
            user_points[static_cast<std::size_t>(u)], draw.channel.user_gains(u), cfg));
    const ReceivedVector y = superpose_interference(contributions, draw.noise);

    out.user_gains.assign(static_cast<std::size_t>(spec.n_users), 0.0);
    if (spec.combiner == Combiner::egc) {
        out.observation = egc_combine(y);
        for (int u : active)
            out.user_gains[static_cast<std::size_t>(u)] =
                egc_effective_gain(draw.channel.user_gains(u), cfg);
        out.noise_variance = spec.n_rx * draw.noise_variance;
    } else {
        const ScSelection sel =
            sc_select(y, draw.channel.user_gains(out.target_user), spec.n_tx);
        out.observation = sel.sample;
        for (int u : active) {
            const auto row = draw.channel.user_gains(u).subspan(
                static_cast<std::size_t>(sel.aperture) * spec.n_tx,
                static_cast<std::size_t>(spec.n_tx));
            out.user_gains[static_cast<std::size_t>(u)] = sc_effective_gain(row, cfg);
        }
        out.noise_variance = draw.noise_variance;
    }
    return out;
}

CombinedSlot simulate_slot(const ScenarioSpec& spec, std::span<const int> symbols,
                           const Constellation& constellation, double noise_variance,
                           Rng& rng) {
    if (static_cast<int>(symbols.size()) != spec.n_users)
        throw ConfigError("one symbol per user expected");
    SlotDraw draw;
    draw.symbols.assign(symbols.begin(), symbols.end());
    draw.channel = slot_channel(spec, rng);
    draw.noise = draw_noise(spec.n_rx, noise_variance, rng);
    draw.noise_variance = noise_variance;

    std::vector<std::complex<double>> points(static_cast<std::size_t>(spec.n_users));
    for (int u = 0; u < spec.n_users; ++u)
        points[static_cast<std::size_t>(u)] =
            modulate(symbols[static_cast<std::size_t>(u)], constellation);
    return combine_slot(spec, draw, points);
}

ReceiverTraining train_receiver_dnn(const ScenarioSpec& spec, const TrainConfig& cfg) {
    spec.validate();
    cfg.validate();
    if (spec.detector != DetectorKind::qam_dnn)
        throw ConfigError("receiver training applies to the qam_dnn detector");

    const int order = spec.modulation_order;
    const Constellation qam = qam_constellation(order);
    const double noise_variance = noise_variance_from_es_n0_db(cfg.train_es_n0_db);

    Rng init_rng = derive_stream(cfg.seed, kTagRxInit);
    ReceiverTraining result;
    result.receiver = MlpParams::he_uniform(cfg.receiver_dims(order), init_rng);
    AdamState adam = AdamState::zeros_like(result.receiver);
    Rng data_rng = derive_stream(cfg.seed, kTagTrainData);

    const int batch = cfg.batch_size;
    const int ratio = cfg.samples_per_batch_ratio;
    std::vector<double> input(2);
    for (int it = 0; it < cfg.iterations; ++it) {
        double iteration_loss = 0.0;
        for (int b = 0; b < ratio; ++b) {
            Gradients grads = Gradients::zeros_like(result.receiver);
            double batch_loss = 0.0;
            for (int k = 0; k < batch; ++k) {
                std::vector<int> symbols = draw_symbols(spec.n_users, order, data_rng);
                const CombinedSlot slot =
                    simulate_slot(spec, symbols, qam, noise_variance, data_rng);
                input[0] = slot.observation.real();
                input[1] = slot.observation.imag();
                ForwardCache cache;
                const std::vector<double> logits =
                    forward(result.receiver, input, &cache);
                const SceResult sce = softmax_cross_entropy(
                    logits,
                    one_hot(symbols[static_cast<std::size_t>(slot.target_user)], order));
                batch_loss += sce.loss / batch;
                const BackwardResult bp = backward(result.receiver, cache, sce.grad);
                grads.add_scaled(bp.grads, 1.0 / batch);
            }
            if (!std::isfinite(batch_loss))
                throw DivergenceError("receiver training loss became non-finite", it);
            adam_step(result.receiver, grads, adam, cfg.learning_rate);
            iteration_loss += batch_loss / ratio;
        }
        result.loss.mean_batch_loss.push_back(iteration_loss);
    }
    return result;
}

E2eBatch e2e_batch(const ScenarioSpec& spec, const MlpParams& tx, const MlpParams& rx,
                   std::span<const SlotDraw> slots) {
    const int order = spec.modulation_order;
    if (tx.dims.front() != order || tx.dims.back() != 2)
        throw ConfigError("transmitter network must map one-hot symbols to I/Q");
    if (rx.dims.front() != 2 || rx.dims.back() != order)
        throw ConfigError("receiver network must map I/Q to symbol scores");
    if (slots.empty()) throw ConfigError("empty batch");

    E2eBatch out;
    out.tx_grads = Gradients::zeros_like(tx);
    out.rx_grads = Gradients::zeros_like(rx);

    // Raw transmitter outputs p_m for every symbol, then shared energy
    // renormalization x_m = s p_m with s = sqrt(M / sum |p|^2).
    std::vector<ForwardCache> tx_caches(static_cast<std::size_t>(order));
    std::vector<std::complex<double>> raw(static_cast<std::size_t>(order));
    double total_energy = 0.0;
    for (int m = 0; m < order; ++m) {
        const std::vector<double> hot = one_hot(m, order).dense();
        const std::vector<double> iq =
            forward(tx, hot, &tx_caches[static_cast<std::size_t>(m)]);
        raw[static_cast<std::size_t>(m)] = {iq[0], iq[1]};
        total_energy += std::norm(raw[static_cast<std::size_t>(m)]);
    }
    if (!(total_energy > 0.0) || !std::isfinite(total_energy)) {
        out.mean_loss = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const double scale = std::sqrt(order / total_energy);
    out.constellation.resize(static_cast<std::size_t>(order));
    for (int m = 0; m < order; ++m)
        out.constellation[static_cast<std::size_t>(m)] =
            scale * raw[static_cast<std::size_t>(m)];

    // dLoss/dx_m accumulated over the batch; every active user's share flows
    // back through its own drawn gain.
    std::vector<std::complex<double>> point_grad(static_cast<std::size_t>(order));
    const double inv_k = 1.0 / static_cast<double>(slots.size());
    std::vector<std::complex<double>> points(static_cast<std::size_t>(spec.n_users));
    std::vector<double> input(2);
    for (const SlotDraw& draw : slots) {
        for (int u = 0; u < spec.n_users; ++u)
            points[static_cast<std::size_t>(u)] =
                out.constellation[static_cast<std::size_t>(
                    draw.symbols[static_cast<std::size_t>(u)])];
        const CombinedSlot slot = combine_slot(spec, draw, points);
        input[0] = slot.observation.real();
        input[1] = slot.observation.imag();
        ForwardCache cache;
        const std::vector<double> logits = forward(rx, input, &cache);
        const SceResult sce = softmax_cross_entropy(
            logits,
            one_hot(draw.symbols[static_cast<std::size_t>(slot.target_user)], order));
        out.mean_loss += sce.loss * inv_k;
        const BackwardResult bp = backward(rx, cache, sce.grad);
        out.rx_grads.add_scaled(bp.grads, inv_k);
        const std::complex<double> obs_grad = {bp.input_grad[0], bp.input_grad[1]};
        for (int u = 0; u < spec.n_users; ++u) {
            const double g = slot.user_gains[static_cast<std::size_t>(u)];
            if (g != 0.0)
                point_grad[static_cast<std::size_t>(
                    draw.symbols[static_cast<std::size_t>(u)])] += g * inv_k * obs_grad;
        }
    }

    // Through the normalization: dL/dp_m = s (A_m - p_m <A, p> / E_tot)
    // where A_m = dL/dx_m.
    double inner = 0.0;
    for (int m = 0; m < order; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        inner += point_grad[mi].real() * raw[mi].real() +
                 point_grad[mi].imag() * raw[mi].imag();
    }
    std::vector<double> iq_grad(2);
    for (int m = 0; m < order; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const std::complex<double> gp =
            scale * (point_grad[mi] - raw[mi] * (inner / total_energy));
        iq_grad[0] = gp.real();
        iq_grad[1] = gp.imag();
        const BackwardResult bp = backward(tx, tx_caches[mi], iq_grad);
        out.tx_grads.add_scaled(bp.grads, 1.0);
    }
    return out;
}

namespace {

// Classical layout the transmitter starts from: Gray QAM when M is a perfect
// square, otherwise a PSK ring. Unit average energy either way.
std::vector<std::complex<double>> classical_layout(int order) {
    const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
    if (side >= 2 && side * side == order) return qam_constellation(order).points;
    std::vector<std::complex<double>> ring(static_cast<std::size_t>(order));
    for (int m = 0; m < order; ++m) {
        const double phase = 2.0 * M_PI * m / order;
        ring[static_cast<std::size_t>(m)] = {std::cos(phase), std::sin(phase)};
    }
    return ring;
}

// Short supervised fit of the transmitter to the classical layout. Keeps the
// joint phase's budget and data untouched; it only replaces the random
// starting constellation with a sane one, which the joint phase then shapes.
void prefit_transmitter(MlpParams& tx, int order) {
    const std::vector<std::complex<double>> targets = classical_layout(order);
    AdamState adam = AdamState::zeros_like(tx);
    std::vector<double> out_grad(2);
    for (int step = 0; step < 500; ++step) {
        Gradients grads = Gradients::zeros_like(tx);
        for (int m = 0; m < order; ++m) {
            ForwardCache cache;
            const std::vector<double> iq = forward(tx, one_hot(m, order).dense(), &cache);
            const auto& t = targets[static_cast<std::size_t>(m)];
            out_grad[0] = 2.0 / order * (iq[0] - t.real());
            out_grad[1] = 2.0 / order * (iq[1] - t.imag());
            grads.add_scaled(backward(tx, cache, out_grad).grads, 1.0);
        }
        adam_step(tx, grads, adam, 0.01);
    }
}

}  // namespace

EndToEndTraining train_end_to_end(const ScenarioSpec& spec, const TrainConfig& cfg) {
    spec.validate();
    cfg.validate();
    if (spec.detector != DetectorKind::end_to_end_dnn)
        throw ConfigError("joint training applies to the end_to_end_dnn detector");

    const int order = spec.modulation_order;
    const double noise_variance = noise_variance_from_es_n0_db(cfg.train_es_n0_db);

    Rng tx_init = derive_stream(cfg.seed, kTagTxInit);
    Rng rx_init = derive_stream(cfg.seed, kTagRxInit);
    EndToEndTraining result;
    result.transmitter = MlpParams::he_uniform(cfg.transmitter_dims(order), tx_init);
    prefit_transmitter(result.transmitter, order);
    result.receiver = MlpParams::he_uniform(cfg.receiver_dims(order), rx_init);
    AdamState tx_adam = AdamState::zeros_like(result.transmitter);
    AdamState rx_adam = AdamState::zeros_like(result.receiver);
    Rng data_rng = derive_stream(cfg.seed, kTagTrainData);

    // Schedule inside the configured budget: the receiver first settles
    // against the fixed classical layout, the constellation is shaped
    // jointly in a middle window, then the receiver refits to the final
    // shape. Keeps the moving-target window from costing receiver quality.
    const int shape_start = 2 * cfg.iterations / 5;
    const int shape_end = 3 * cfg.iterations / 5;
    std::vector<SlotDraw> batch_draws(static_cast<std::size_t>(cfg.batch_size));
    for (int it = 0; it < cfg.iterations; ++it) {
        double iteration_loss = 0.0;
        for (int b = 0; b < cfg.samples_per_batch_ratio; ++b) {
            for (auto& draw : batch_draws)
                draw = draw_slot(spec, noise_variance, data_rng);
            const E2eBatch step =
                e2e_batch(spec, result.transmitter, result.receiver, batch_draws);
            if (!std::isfinite(step.mean_loss))
                throw DivergenceError("joint training loss became non-finite", it);
            if (it >= shape_start && it < shape_end)
                adam_step(result.transmitter, step.tx_grads, tx_adam,
                          cfg.learning_rate);
            adam_step(result.receiver, step.rx_grads, rx_adam, cfg.learning_rate);
            iteration_loss += step.mean_loss / cfg.samples_per_batch_ratio;
        }
        result.loss.mean_batch_loss.push_back(iteration_loss);
    }

    // Final constellation from the trained transmitter (the loop's copy
    // predates the last optimizer step).
    std::vector<std::complex<double>> raw(static_cast<std::size_t>(order));
    for (int m = 0; m < order; ++m) {
        const std::vector<double> iq =
            forward(result.transmitter, one_hot(m, order).dense());
        raw[static_cast<std::size_t>(m)] = {iq[0], iq[1]};
    }
    result.constellation = normalize_constellation(std::move(raw));
    return result;
}

std::pair<double, double> wilson_interval(std::int64_t errors, std::int64_t trials) {
    if (trials < 1) throw ConfigError("interval needs at least one trial");
    if (errors < 0 || errors > trials)
        throw ConfigError("error count out of range");
    constexpr double z = 1.959963984540054;  // two-sided 95%
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

void check_models(const ScenarioSpec& spec, const DetectorModels& models) {
    const bool wants_rx = spec.detector == DetectorKind::qam_dnn ||
                          spec.detector == DetectorKind::end_to_end_dnn;
    if (wants_rx != (models.receiver != nullptr))
        throw ConfigError(wants_rx ? "detector requires a receiver model"
                                   : "classical detector takes no receiver model");
    const bool wants_tx = spec.detector == DetectorKind::end_to_end_dnn;
    if (wants_tx != (models.tx_constellation != nullptr))
        throw ConfigError(wants_tx
                              ? "end-to-end detector requires its learned constellation"
                              : "only the end-to-end detector takes a constellation");
    if (models.receiver) {
        models.receiver->validate();
        if (models.receiver->dims.front() != 2 ||
            models.receiver->dims.back() != spec.modulation_order)
            throw ConfigError("receiver model shape does not match the scenario");
    }
    if (models.tx_constellation &&
        models.tx_constellation->order != spec.modulation_order)
        throw ConfigError("constellation order does not match the scenario");
}

}  // namespace

SerCurve evaluate_ser(const ScenarioSpec& spec, const DetectorModels& models,
                      std::span<const double> es_n0_grid_db, std::int64_t trials,
                      std::uint64_t seed, int threads) {
    spec.validate();
    check_models(spec, models);
    if (es_n0_grid_db.empty()) throw ConfigError("empty Es/N0 grid");
    for (double db : es_n0_grid_db)
        if (!std::isfinite(db)) throw ConfigError("Es/N0 grid must be finite");
    if (trials < 1) throw ConfigError("need at least one trial per point");

    const bool uses_qam = spec.detector != DetectorKind::end_to_end_dnn;
    const Constellation qam =
        uses_qam ? qam_constellation(spec.modulation_order) : Constellation{};
    const Constellation& points_in_use =
        uses_qam ? qam : *models.tx_constellation;

    int n_threads = threads > 0
                        ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(
        std::min<std::int64_t>(n_threads, trials));

    SerCurve curve;
    for (std::size_t gi = 0; gi < es_n0_grid_db.size(); ++gi) {
        const double noise_variance = noise_variance_from_es_n0_db(es_n0_grid_db[gi]);
        std::vector<std::int64_t> partial(static_cast<std::size_t>(n_threads), 0);
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_threads));

        auto worker = [&](int tid) {
            try {
                std::vector<std::complex<double>> points(
                    static_cast<std::size_t>(spec.n_users));
                std::vector<std::complex<double>> block;
                std::vector<double> input(2);
                std::int64_t errors = 0;
                for (std::int64_t t = tid; t < trials; t += n_threads) {
                    Rng rng = derive_stream(seed, static_cast<std::uint64_t>(gi),
                                            static_cast<std::uint64_t>(t));
                    const SlotDraw draw = draw_slot(spec, noise_variance, rng);
                    for (int u = 0; u < spec.n_users; ++u)
                        points[static_cast<std::size_t>(u)] = modulate(
                            draw.symbols[static_cast<std::size_t>(u)], points_in_use);
                    const CombinedSlot slot = combine_slot(spec, draw, points);

                    int detected = 0;
                    switch (spec.detector) {
                        case DetectorKind::qam_ml_perfect:
                            detected = ml_detect(slot.observation, slot.target_gain(), qam);
                            break;
                        case DetectorKind::qam_ml_blind: {
                            // Pilot-free estimation block over the same channel
                            // realization as the data slot.
                            block.clear();
                            block.reserve(kBlindBlockSize);
                            for (int i = 0; i < kBlindBlockSize; ++i) {
                                std::complex<double> sample =
                                    rng.complex_normal(slot.noise_variance);
                                for (int u = 0; u < spec.n_users; ++u) {
                                    const double g =
                                        slot.user_gains[static_cast<std::size_t>(u)];
                                    if (g != 0.0)
                                        sample += g * modulate(
                                                          rng.below(spec.modulation_order),
                                                          points_in_use);
                                }
                                block.push_back(sample);
                            }
                            const double est =
                                blind_gain_estimate(block, slot.noise_variance);
                            detected = ml_detect(slot.observation, est, qam);
                            break;
                        }
                        case DetectorKind::qam_dnn:
                        case DetectorKind::end_to_end_dnn: {
                            input[0] = slot.observation.real();
                            input[1] = slot.observation.imag();
                            const std::vector<double> logits =
                                forward(*models.receiver, input);
                            detected = static_cast<int>(std::distance(
                                logits.begin(),
                                std::max_element(logits.begin(), logits.end())));
                            break;
                        }
                    }
                    if (detected !=
                        draw.symbols[static_cast<std::size_t>(slot.target_user)])
                        ++errors;
                }
                partial[static_cast<std::size_t>(tid)] = errors;
            } catch (...) {
                failures[static_cast<std::size_t>(tid)] = std::current_exception();
            }
        };

        if (n_threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(n_threads));
            for (int tid = 0; tid < n_threads; ++tid) pool.emplace_back(worker, tid);
            for (auto& th : pool) th.join();
        }
        for (const auto& failure : failures)
            if (failure) std::rethrow_exception(failure);

        SerPoint point;
        point.es_n0_db = es_n0_grid_db[gi];
        point.trials = trials;
        point.errors = 0;
        for (std::int64_t part : partial) point.errors += part;
        point.ser = static_cast<double>(point.errors) / static_cast<double>(trials);
        std::tie(point.ci_low, point.ci_high) =
            wilson_interval(point.errors, point.trials);
        curve.points.push_back(point);
    }
    return curve;
}

}  // namespace fsolink
