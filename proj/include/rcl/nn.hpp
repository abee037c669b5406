// Minimal dense feed-forward classifier engine: ReLU hidden layers, identity
// output layer, softmax cross-entropy loss, Adam updates. Exposes per-sample
// losses and per-sample last-layer gradients, which is what the selection and
// gradient-decomposition machinery consumes.
//
// Everything is 64-bit float and deterministic for a fixed seed.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcl/matrix.hpp"
#include "rcl/rng.hpp"

namespace rcl {

struct Layer {
    Matrix weight;             // fan_out x fan_in
    std::vector<double> bias;  // fan_out
};

struct NetworkParams {
    std::vector<Layer> layers;  // hidden layers use ReLU, output layer is identity

    int input_dim() const { return static_cast<int>(layers.front().weight.cols); }
    int output_dim() const { return static_cast<int>(layers.back().weight.rows); }

    bool operator==(const NetworkParams&) const = default;
};

// Gradients and Adam moments share the parameter layout.
using Gradients = std::vector<Layer>;

struct AdamParams {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct OptimizerState {
    Gradients m;  // first moments, shaped like the network
    Gradients v;  // second moments
    std::uint64_t step = 0;
    AdamParams hyper;
};

struct ForwardCache {
    // activations[0] is the input batch; activations[i] is layer i's output
    // after its activation. activations.back() holds the logits.
    std::vector<Matrix> activations;

    const Matrix& logits() const { return activations.back(); }
};

using LossVector = std::vector<double>;  // per-sample, all entries >= 0

namespace detail {

inline Gradients zeros_like(const NetworkParams& net) {
    Gradients g;
    g.reserve(net.layers.size());
    for (const Layer& l : net.layers) {
        g.push_back({Matrix(l.weight.rows, l.weight.cols), std::vector<double>(l.bias.size(), 0.0)});
    }
    return g;
}

inline bool all_finite(const Gradients& g) {
    for (const Layer& l : g) {
        for (double x : l.weight.data)
            if (!std::isfinite(x)) return false;
        for (double x : l.bias)
            if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace detail

// Builds the MLP for the given layer sizes (first entry = feature dim, last =
// class count). Weights are drawn from U(-1/sqrt(fan_in), +1/sqrt(fan_in)),
// biases start at zero. Bit-reproducible for a fixed seed.
inline NetworkParams init_network(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("init_network: need at least [input_dim, class_count]");
    }
    for (int s : layer_sizes) {
        if (s <= 0) {
            throw std::invalid_argument("init_network: layer sizes must be positive, got " +
                                        std::to_string(s));
        }
    }
    Rng rng(seed);
    NetworkParams net;
    net.layers.reserve(layer_sizes.size() - 1);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const auto fan_in = static_cast<std::size_t>(layer_sizes[l]);
        const auto fan_out = static_cast<std::size_t>(layer_sizes[l + 1]);
        Layer layer{Matrix(fan_out, fan_in), std::vector<double>(fan_out, 0.0)};
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& w : layer.weight.data) {
            w = (2.0 * rng.unit() - 1.0) * scale;
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

inline OptimizerState init_optimizer(const NetworkParams& net, AdamParams hyper) {
    return OptimizerState{detail::zeros_like(net), detail::zeros_like(net), 0, hyper};
}

inline ForwardCache forward(const NetworkParams& net, const Matrix& features) {
    if (features.cols != net.layers.front().weight.cols) {
        throw std::invalid_argument("forward: feature dim " + std::to_string(features.cols) +
                                    " != network input dim " +
                                    std::to_string(net.layers.front().weight.cols));
    }
    ForwardCache cache;
    cache.activations.reserve(net.layers.size() + 1);
    cache.activations.push_back(features);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const Matrix& in = cache.activations.back();
        const bool is_output = (l + 1 == net.layers.size());
        Matrix out(in.rows, layer.weight.rows);
        for (std::size_t j = 0; j < in.rows; ++j) {
            for (std::size_t o = 0; o < layer.weight.rows; ++o) {
                double z = layer.bias[o];
                const double* wrow = layer.weight.data.data() + o * layer.weight.cols;
                const double* arow = in.data.data() + j * in.cols;
                for (std::size_t i = 0; i < layer.weight.cols; ++i) z += wrow[i] * arow[i];
                out(j, o) = is_output ? z : (z > 0.0 ? z : 0.0);
            }
        }
        cache.activations.push_back(std::move(out));
    }
    return cache;
}

// Row softmax with max subtraction.
inline Matrix softmax_probs(const Matrix& logits) {
    Matrix probs(logits.rows, logits.cols);
    for (std::size_t j = 0; j < logits.rows; ++j) {
        double mx = logits(j, 0);
        for (std::size_t c = 1; c < logits.cols; ++c) mx = std::max(mx, logits(j, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols; ++c) {
            probs(j, c) = std::exp(logits(j, c) - mx);
            sum += probs(j, c);
        }
        for (std::size_t c = 0; c < logits.cols; ++c) probs(j, c) /= sum;
    }
    return probs;
}

// Softmax cross-entropy per sample: -log softmax(logits_j)[label_j].
inline LossVector per_sample_loss(const Matrix& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows) {
        throw std::invalid_argument("per_sample_loss: label count != batch size");
    }
    LossVector loss(logits.rows);
    for (std::size_t j = 0; j < logits.rows; ++j) {
        const int y = labels[j];
        if (y < 0 || static_cast<std::size_t>(y) >= logits.cols) {
            throw std::invalid_argument("per_sample_loss: label " + std::to_string(y) +
                                        " out of range [0, " + std::to_string(logits.cols) + ")");
        }
        double mx = logits(j, 0);
        for (std::size_t c = 1; c < logits.cols; ++c) mx = std::max(mx, logits(j, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols; ++c) sum += std::exp(logits(j, c) - mx);
        const double l = (mx + std::log(sum)) - logits(j, static_cast<std::size_t>(y));
        loss[j] = l > 0.0 ? l : 0.0;  // clamp -0.0 / rounding at saturation
    }
    return loss;
}

// Gradient of (1/n_sel) * sum_j weight_j * loss_j, where n_sel counts nonzero
// weights (mean over selected samples). With normalize_by_batch the divisor is
// the batch size instead, so shrinking selections scale the step down.
// Zero-weight samples contribute nothing; all-zero weights give zero gradients.
inline Gradients backward(const NetworkParams& net, const ForwardCache& cache,
                          const std::vector<int>& labels, const std::vector<double>& sample_weights,
                          bool normalize_by_batch = false) {
    const Matrix& logits = cache.logits();
    const std::size_t n = logits.rows;
    if (sample_weights.size() != n || labels.size() != n) {
        throw std::invalid_argument("backward: weights/labels length != batch size");
    }
    Gradients grads = detail::zeros_like(net);
    std::size_t n_sel = 0;
    for (double w : sample_weights)
        if (w != 0.0) ++n_sel;
    if (n_sel == 0) return grads;
    const double denom = normalize_by_batch ? static_cast<double>(n) : static_cast<double>(n_sel);

    Matrix probs = softmax_probs(logits);
    Matrix delta(n, logits.cols);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = sample_weights[j] / denom;
        for (std::size_t c = 0; c < logits.cols; ++c) {
            const double target = (static_cast<std::size_t>(labels[j]) == c) ? 1.0 : 0.0;
            delta(j, c) = w * (probs(j, c) - target);
        }
    }

    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const Layer& layer = net.layers[l];
        const Matrix& in = cache.activations[l];
        Layer& g = grads[l];
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t o = 0; o < layer.weight.rows; ++o) {
                const double d = delta(j, o);
                if (d == 0.0) continue;
                g.bias[o] += d;
                double* grow = g.weight.data.data() + o * layer.weight.cols;
                const double* arow = in.data.data() + j * in.cols;
                for (std::size_t i = 0; i < layer.weight.cols; ++i) grow[i] += d * arow[i];
            }
        }
        if (l == 0) break;
        Matrix prev_delta(n, layer.weight.cols);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < layer.weight.cols; ++i) {
                double s = 0.0;
                for (std::size_t o = 0; o < layer.weight.rows; ++o) {
                    s += delta(j, o) * layer.weight(o, i);
                }
                // ReLU backward: activation > 0 iff pre-activation > 0
                prev_delta(j, i) = (in(j, i) > 0.0) ? s : 0.0;
            }
        }
        delta = std::move(prev_delta);
    }
    return grads;
}

inline std::size_t last_layer_param_count(const NetworkParams& net) {
    const Layer& last = net.layers.back();
    return last.weight.rows * last.weight.cols + last.bias.size();
}

// Row j = gradient of loss_j w.r.t. the final layer's weights and bias,
// flattened [W row-major | bias]. Rows are raw per-sample gradients: the mean
// of all rows equals the last-layer block of backward() with unit weights.
inline Matrix last_layer_per_sample_grads(const NetworkParams& net, const ForwardCache& cache,
                                          const std::vector<int>& labels) {
    const Matrix& logits = cache.logits();
    const Matrix& in = cache.activations[cache.activations.size() - 2];
    const std::size_t n = logits.rows;
    const std::size_t classes = logits.cols;
    const std::size_t fan_in = in.cols;
    Matrix probs = softmax_probs(logits);
    Matrix rows(n, classes * fan_in + classes);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < classes; ++c) {
            const double d = probs(j, c) - ((static_cast<std::size_t>(labels[j]) == c) ? 1.0 : 0.0);
            for (std::size_t i = 0; i < fan_in; ++i) {
                rows(j, c * fan_in + i) = d * in(j, i);
            }
            rows(j, classes * fan_in + c) = d;
        }
    }
    return rows;
}

// Standard bias-corrected Adam update, in place. Rejects non-finite gradients.
inline void adam_step(NetworkParams& net, OptimizerState& state, const Gradients& grads) {
    if (grads.size() != net.layers.size()) {
        throw std::invalid_argument("adam_step: gradient layer count mismatch");
    }
    for (std::size_t l = 0; l < grads.size(); ++l) {
        if (!grads[l].weight.same_shape(net.layers[l].weight) ||
            grads[l].bias.size() != net.layers[l].bias.size()) {
            throw std::invalid_argument("adam_step: gradient shape mismatch at layer " +
                                        std::to_string(l));
        }
    }
    if (!detail::all_finite(grads)) {
        throw std::invalid_argument("adam_step: non-finite gradient input");
    }
    state.step += 1;
    const AdamParams& h = state.hyper;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
    auto update = [&](double& p, double& m, double& v, double g) {
        m = h.beta1 * m + (1.0 - h.beta1) * g;
        v = h.beta2 * v + (1.0 - h.beta2) * g * g;
        p -= h.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + h.epsilon);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        for (std::size_t i = 0; i < layer.weight.data.size(); ++i) {
            update(layer.weight.data[i], state.m[l].weight.data[i], state.v[l].weight.data[i],
                   grads[l].weight.data[i]);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            update(layer.bias[i], state.m[l].bias[i], state.v[l].bias[i], grads[l].bias[i]);
        }
    }
    for (const Layer& layer : net.layers) {
        for (double x : layer.weight.data)
            if (!std::isfinite(x)) throw std::runtime_error("adam_step: parameters became non-finite");
        for (double x : layer.bias)
            if (!std::isfinite(x)) throw std::runtime_error("adam_step: parameters became non-finite");
    }
}

// Argmax class per row, ties broken toward the smallest class id.
inline std::vector<int> predict(const NetworkParams& net, const Matrix& features) {
    ForwardCache cache = forward(net, features);
    const Matrix& logits = cache.logits();
    std::vector<int> out(logits.rows);
    for (std::size_t j = 0; j < logits.rows; ++j) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < logits.cols; ++c) {
            if (logits(j, c) > logits(j, best)) best = c;
        }
        out[j] = static_cast<int>(best);
    }
    return out;
}

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

// --- parameter snapshots -----------------------------------------------
// Flat binary layout (little-endian):
//   bytes 0..7   magic "RCLNET1\0"
//   u64          number of layer sizes S (= layer count + 1)
//   S x u64      layer sizes [input_dim, hidden..., class_count]
//   per layer    weight doubles row-major (fan_out x fan_in), then bias doubles

inline constexpr char kNetMagic[8] = {'R', 'C', 'L', 'N', 'E', 'T', '1', '\0'};

inline void save_network(const NetworkParams& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_network: cannot open " + path);
    out.write(kNetMagic, 8);
    std::vector<std::uint64_t> sizes;
    sizes.push_back(net.layers.front().weight.cols);
    for (const Layer& l : net.layers) sizes.push_back(l.weight.rows);
    const std::uint64_t count = sizes.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(sizes.data()),
              static_cast<std::streamsize>(sizes.size() * sizeof(std::uint64_t)));
    for (const Layer& l : net.layers) {
        out.write(reinterpret_cast<const char*>(l.weight.data.data()),
                  static_cast<std::streamsize>(l.weight.data.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(l.bias.data()),
                  static_cast<std::streamsize>(l.bias.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("save_network: write failed for " + path);
}

inline NetworkParams load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_network: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kNetMagic, 8) != 0) {
        throw std::runtime_error("load_network: bad magic in " + path);
    }
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in || count < 2 || count > 1024) throw std::runtime_error("load_network: bad header");
    std::vector<std::uint64_t> sizes(count);
    in.read(reinterpret_cast<char*>(sizes.data()),
            static_cast<std::streamsize>(count * sizeof(std::uint64_t)));
    NetworkParams net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer{Matrix(sizes[l + 1], sizes[l]), std::vector<double>(sizes[l + 1], 0.0)};
        in.read(reinterpret_cast<char*>(layer.weight.data.data()),
                static_cast<std::streamsize>(layer.weight.data.size() * sizeof(double)));
        in.read(reinterpret_cast<char*>(layer.bias.data()),
                static_cast<std::streamsize>(layer.bias.size() * sizeof(double)));
        net.layers.push_back(std::move(layer));
    }
    if (!in) throw std::runtime_error("load_network: truncated file " + path);
    return net;
}

}  // namespace rcl
