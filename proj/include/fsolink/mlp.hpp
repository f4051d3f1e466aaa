#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "fsolink/modem.hpp"
#include "fsolink/rng.hpp"

namespace fsolink {

// Feed-forward network: affine + ReLU on hidden layers, linear output.
// weights[l] is dims[l+1] x dims[l], row-major; biases[l] has dims[l+1].
struct MlpParams {
    std::vector<int> dims;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int layer_count() const { return static_cast<int>(weights.size()); }
    std::size_t parameter_count() const;
    void validate() const;

    // He-style uniform init, +-sqrt(6 / fan_in), zero biases.
    static MlpParams he_uniform(std::vector<int> dims, Rng& rng);
};

// Post-activation values a_0 (input) .. a_L (logits), enough for backward.
struct ForwardCache {
    std::vector<std::vector<double>> activations;
};

std::vector<double> forward(const MlpParams& params, std::span<const double> input,
                            ForwardCache* cache = nullptr);

struct SceResult {
    double loss;
    std::vector<double> grad;  // softmax(logits) - onehot
};

SceResult softmax_cross_entropy(std::span<const double> logits, const OneHot& target);

// Parameter gradients with the same shapes as MlpParams.
struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const MlpParams& params);
    void add_scaled(const Gradients& other, double scale);
    void scale(double s);
};

struct BackwardResult {
    Gradients grads;
    std::vector<double> input_grad;  // dLoss/dInput, length dims[0]
};

// Exact gradients of the scalar loss whose logit-gradient is `output_grad`,
// using the cache of the matching forward call.
BackwardResult backward(const MlpParams& params, const ForwardCache& cache,
                        std::span<const double> output_grad);

struct AdamState {
    std::vector<std::vector<double>> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;
    long t = 0;

    static AdamState zeros_like(const MlpParams& params);
};

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8, bias correction.
void adam_step(MlpParams& params, const Gradients& grads, AdamState& state,
               double learning_rate);

// Worst relative discrepancy between backward() and central finite
// differences of the softmax cross-entropy loss, over all parameters.
double gradient_check(const MlpParams& params, std::span<const double> input,
                      const OneHot& target);

// Line-oriented text format, tag "FSOMLP 1", 17 significant digits.
// Round-trips values exactly at double precision.
void save_params(const MlpParams& params, const std::filesystem::path& destination);
MlpParams load_params(const std::filesystem::path& source);

}  // namespace fsolink
