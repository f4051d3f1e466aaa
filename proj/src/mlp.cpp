#include "fsolink/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fsolink/errors.hpp"

namespace fsolink {

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

void MlpParams::validate() const {
    if (dims.empty()) throw std::invalid_argument("MlpParams: empty dims");
    for (const int d : dims)
        if (d < 1) throw std::invalid_argument("MlpParams: layer dim must be >= 1");
    const std::size_t layers = dims.size() - 1;
    if (weights.size() != layers || biases.size() != layers)
        throw std::invalid_argument("MlpParams: layer count mismatch");
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t rows = static_cast<std::size_t>(dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(dims[l]);
        if (weights[l].size() != rows * cols || biases[l].size() != rows)
            throw std::invalid_argument("MlpParams: shape mismatch at layer " +
                                        std::to_string(l));
        for (const double v : weights[l])
            if (!std::isfinite(v)) throw std::invalid_argument("MlpParams: non-finite weight");
        for (const double v : biases[l])
            if (!std::isfinite(v)) throw std::invalid_argument("MlpParams: non-finite bias");
    }
}

MlpParams MlpParams::he_uniform(std::vector<int> dims, Rng& rng) {
    MlpParams p;
    p.dims = std::move(dims);
    if (p.dims.empty()) throw std::invalid_argument("MlpParams: empty dims");
    for (std::size_t l = 0; l + 1 < p.dims.size(); ++l) {
        const int fan_in = p.dims[l];
        const int fan_out = p.dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
        for (auto& v : w) v = bound * (2.0 * rng.uniform() - 1.0);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
    }
    return p;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> input,
                            ForwardCache* cache) {
    if (input.size() != static_cast<std::size_t>(params.dims.front()))
        throw std::invalid_argument("forward: input length does not match dims[0]");
    std::vector<double> a(input.begin(), input.end());
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(a);
    }
    const int layers = params.layer_count();
    for (int l = 0; l < layers; ++l) {
        const std::size_t rows = static_cast<std::size_t>(params.dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(params.dims[l]);
        const double* w = params.weights[static_cast<std::size_t>(l)].data();
        std::vector<double> z(rows);
        for (std::size_t o = 0; o < rows; ++o) {
            double acc = params.biases[static_cast<std::size_t>(l)][o];
            const double* row = w + o * cols;
            for (std::size_t i = 0; i < cols; ++i) acc += row[i] * a[i];
            z[o] = acc;
        }
        if (l + 1 < layers)
            for (auto& v : z) v = v > 0.0 ? v : 0.0;
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

SceResult softmax_cross_entropy(std::span<const double> logits, const OneHot& target) {
    if (logits.size() != static_cast<std::size_t>(target.length))
        throw std::invalid_argument("softmax_cross_entropy: length mismatch");
    double mx = logits[0];
    for (const double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (const double v : logits) sum += std::exp(v - mx);
    const double lse = mx + std::log(sum);
    SceResult r;
    r.loss = lse - logits[static_cast<std::size_t>(target.hot_index)];
    r.grad.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i)
        r.grad[i] = std::exp(logits[i] - lse) -
                    (static_cast<int>(i) == target.hot_index ? 1.0 : 0.0);
    return r;
}

Gradients Gradients::zeros_like(const MlpParams& params) {
    Gradients g;
    for (const auto& w : params.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void Gradients::add_scaled(const Gradients& other, double s) {
    if (other.weights.size() != weights.size())
        throw std::invalid_argument("Gradients: shape mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i)
            weights[l][i] += s * other.weights[l][i];
        for (std::size_t i = 0; i < biases[l].size(); ++i)
            biases[l][i] += s * other.biases[l][i];
    }
}

void Gradients::scale(double s) {
    for (auto& w : weights)
        for (auto& v : w) v *= s;
    for (auto& b : biases)
        for (auto& v : b) v *= s;
}

BackwardResult backward(const MlpParams& params, const ForwardCache& cache,
                        std::span<const double> output_grad) {
    const int layers = params.layer_count();
    if (cache.activations.size() != static_cast<std::size_t>(layers) + 1)
        throw std::invalid_argument("backward: cache does not match network depth");
    for (int l = 0; l <= layers; ++l)
        if (cache.activations[static_cast<std::size_t>(l)].size() !=
            static_cast<std::size_t>(params.dims[static_cast<std::size_t>(l)]))
            throw std::invalid_argument("backward: cache does not match layer dims");
    if (output_grad.size() != static_cast<std::size_t>(params.dims.back()))
        throw std::invalid_argument("backward: output gradient length mismatch");

    BackwardResult r;
    r.grads = Gradients::zeros_like(params);
    std::vector<double> delta(output_grad.begin(), output_grad.end());
    for (int l = layers - 1; l >= 0; --l) {
        const std::size_t rows = static_cast<std::size_t>(params.dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(params.dims[l]);
        const auto& a_prev = cache.activations[static_cast<std::size_t>(l)];
        auto& gw = r.grads.weights[static_cast<std::size_t>(l)];
        auto& gb = r.grads.biases[static_cast<std::size_t>(l)];
        for (std::size_t o = 0; o < rows; ++o) {
            const double d = delta[o];
            gb[o] = d;
            double* row = gw.data() + o * cols;
            for (std::size_t i = 0; i < cols; ++i) row[i] = d * a_prev[i];
        }
        std::vector<double> prev(cols, 0.0);
        const double* w = params.weights[static_cast<std::size_t>(l)].data();
        for (std::size_t o = 0; o < rows; ++o) {
            const double d = delta[o];
            const double* row = w + o * cols;
            for (std::size_t i = 0; i < cols; ++i) prev[i] += row[i] * d;
        }
        if (l > 0) {
            // a_prev is post-ReLU for hidden layers; mask dead units
            for (std::size_t i = 0; i < cols; ++i)
                if (!(a_prev[i] > 0.0)) prev[i] = 0.0;
        }
        delta = std::move(prev);
    }
    r.input_grad = std::move(delta);
    return r;
}

AdamState AdamState::zeros_like(const MlpParams& params) {
    AdamState s;
    for (const auto& w : params.weights) {
        s.m_weights.emplace_back(w.size(), 0.0);
        s.v_weights.emplace_back(w.size(), 0.0);
    }
    for (const auto& b : params.biases) {
        s.m_biases.emplace_back(b.size(), 0.0);
        s.v_biases.emplace_back(b.size(), 0.0);
    }
    return s;
}

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

void adam_update(std::vector<double>& theta, const std::vector<double>& g,
                 std::vector<double>& m, std::vector<double>& v, double lr,
                 double bc1, double bc2) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
}

}  // namespace

void adam_step(MlpParams& params, const Gradients& grads, AdamState& state,
               double learning_rate) {
    if (grads.weights.size() != params.weights.size() ||
        state.m_weights.size() != params.weights.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        if (grads.weights[l].size() != params.weights[l].size() ||
            grads.biases[l].size() != params.biases[l].size())
            throw std::invalid_argument("adam_step: shape mismatch at layer " +
                                        std::to_string(l));
        adam_update(params.weights[l], grads.weights[l], state.m_weights[l],
                    state.v_weights[l], learning_rate, bc1, bc2);
        adam_update(params.biases[l], grads.biases[l], state.m_biases[l],
                    state.v_biases[l], learning_rate, bc1, bc2);
    }
}

namespace {

double loss_at(const MlpParams& params, std::span<const double> input,
               const OneHot& target) {
    const auto logits = forward(params, input);
    return softmax_cross_entropy(logits, target).loss;
}

double rel_err(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / denom;
}

}  // namespace

double gradient_check(const MlpParams& params, std::span<const double> input,
                      const OneHot& target) {
    ForwardCache cache;
    const auto logits = forward(params, input, &cache);
    const auto sce = softmax_cross_entropy(logits, target);
    const auto bp = backward(params, cache, sce.grad);

    const double h = 1e-5;
    double worst = 0.0;
    MlpParams probe = params;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].size(); ++i) {
            const double orig = probe.weights[l][i];
            probe.weights[l][i] = orig + h;
            const double fp = loss_at(probe, input, target);
            probe.weights[l][i] = orig - h;
            const double fm = loss_at(probe, input, target);
            probe.weights[l][i] = orig;
            worst = std::max(worst, rel_err(bp.grads.weights[l][i], (fp - fm) / (2 * h)));
        }
        for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
            const double orig = probe.biases[l][i];
            probe.biases[l][i] = orig + h;
            const double fp = loss_at(probe, input, target);
            probe.biases[l][i] = orig - h;
            const double fm = loss_at(probe, input, target);
            probe.biases[l][i] = orig;
            worst = std::max(worst, rel_err(bp.grads.biases[l][i], (fp - fm) / (2 * h)));
        }
    }
    return worst;
}

void save_params(const MlpParams& params, const std::filesystem::path& destination) {
    params.validate();
    std::ostringstream out;
    out << "FSOMLP 1\n";
    for (std::size_t i = 0; i < params.dims.size(); ++i)
        out << (i ? " " : "") << params.dims[i];
    out << "\n";
    char buf[40];
    auto emit_row = [&](const double* row, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << (i ? " " : "") << buf;
        }
        out << "\n";
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const std::size_t rows = static_cast<std::size_t>(params.dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(params.dims[l]);
        for (std::size_t o = 0; o < rows; ++o)
            emit_row(params.weights[l].data() + o * cols, cols);
        emit_row(params.biases[l].data(), rows);
    }

    const auto parent = destination.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    const auto tmp = destination.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("save_params: cannot open " + tmp);
        f << out.str();
        if (!f) throw IoError("save_params: write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, destination, ec);
    if (ec) throw IoError("save_params: rename failed: " + ec.message());
}

namespace {

std::vector<double> parse_value_line(std::istream& in, std::size_t expected,
                                     const std::string& context) {
    std::string line;
    if (!std::getline(in, line))
        throw ModelFileMalformed("model file truncated at " + context);
    std::istringstream ls(line);
    std::vector<double> values;
    values.reserve(expected);
    double v;
    while (ls >> v) values.push_back(v);
    std::string trailing;
    if (ls.clear(), ls >> trailing)
        throw ModelFileMalformed("model file: non-numeric token at " + context);
    if (values.size() != expected)
        throw ModelFileShapeError("model file: expected " + std::to_string(expected) +
                                  " values at " + context + ", got " +
                                  std::to_string(values.size()));
    return values;
}

}  // namespace

MlpParams load_params(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw IoError("load_params: cannot open " + source.string());

    std::string header;
    if (!std::getline(in, header)) throw ModelFileMalformed("model file: empty");
    std::istringstream hs(header);
    std::string tag;
    int version = 0;
    if (!(hs >> tag >> version) || tag != "FSOMLP")
        throw ModelFileMalformed("model file: bad header '" + header + "'");
    if (version != 1)
        throw ModelFileVersionMismatch("model file: unsupported version " +
                                       std::to_string(version));

    std::string dims_line;
    if (!std::getline(in, dims_line))
        throw ModelFileMalformed("model file: missing dims line");
    std::istringstream ds(dims_line);
    MlpParams p;
    int d;
    while (ds >> d) {
        if (d < 1) throw ModelFileShapeError("model file: non-positive layer dim");
        p.dims.push_back(d);
    }
    if (p.dims.empty()) throw ModelFileMalformed("model file: no dims");

    for (std::size_t l = 0; l + 1 < p.dims.size(); ++l) {
        const std::size_t rows = static_cast<std::size_t>(p.dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(p.dims[l]);
        std::vector<double> w;
        w.reserve(rows * cols);
        for (std::size_t o = 0; o < rows; ++o) {
            const auto row = parse_value_line(
                in, cols, "layer " + std::to_string(l) + " row " + std::to_string(o));
            w.insert(w.end(), row.begin(), row.end());
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(
            parse_value_line(in, rows, "layer " + std::to_string(l) + " bias"));
    }
    std::string leftover;
    while (std::getline(in, leftover))
        if (!leftover.empty())
            throw ModelFileMalformed("model file: trailing content");
    p.validate();
    return p;
}

}  // namespace fsolink
