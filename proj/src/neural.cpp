#include "rtslab/neural.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace rtslab::nn {

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    const std::size_t n =
        std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    data_.assign(n, fill);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

MlpParams MlpParams::zeros(const std::vector<std::size_t>& sizes) {
    if (sizes.size() < 2) throw ShapeError("an MLP needs at least input and output widths");
    MlpParams p;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        if (sizes[i] == 0 || sizes[i + 1] == 0) throw ShapeError("layer width must be positive");
        p.layers.push_back({Tensor({sizes[i], sizes[i + 1]}), Tensor({sizes[i + 1]})});
    }
    return p;
}

MlpParams MlpParams::init(const std::vector<std::size_t>& sizes, Rng& rng, double output_scale) {
    MlpParams p = zeros(sizes);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        auto& layer = p.layers[l];
        double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs()));
        if (l + 1 == p.layers.size()) bound *= output_scale;
        for (auto& w : layer.weight.values()) w = rng.uniform(-bound, bound);
    }
    return p;
}

std::vector<std::size_t> MlpParams::sizes() const {
    std::vector<std::size_t> s;
    if (layers.empty()) return s;
    s.push_back(layers.front().inputs());
    for (const auto& l : layers) s.push_back(l.outputs());
    return s;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

std::vector<Tensor*> MlpParams::tensors() {
    std::vector<Tensor*> out;
    for (auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<const Tensor*> MlpParams::tensors() const {
    std::vector<const Tensor*> out;
    for (const auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

bool MlpParams::all_finite() const {
    for (const Tensor* t : tensors()) {
        for (double v : t->values()) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

void MlpParams::set_zero() {
    for (Tensor* t : tensors()) t->fill(0.0);
}

NonFiniteError::NonFiniteError(const std::string& where, std::size_t layer)
    : std::runtime_error("non-finite value in " + where + " at layer " + std::to_string(layer)),
      layer_(layer) {}

MlpCache forward(const MlpParams& params, std::span<const double> input) {
    if (params.layers.empty()) throw ShapeError("empty network");
    if (input.size() != params.input_size()) {
        throw ShapeError("input width " + std::to_string(input.size()) + " != expected " +
                         std::to_string(params.input_size()));
    }
    MlpCache cache;
    cache.activations.reserve(params.layers.size() + 1);
    cache.activations.emplace_back(input.begin(), input.end());

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        const std::size_t n_in = layer.inputs();
        const std::size_t n_out = layer.outputs();
        const std::vector<double>& x = cache.activations.back();
        std::vector<double> y(layer.bias.data(), layer.bias.data() + n_out);
        const double* w = layer.weight.data();
        for (std::size_t i = 0; i < n_in; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            const double* row = w + i * n_out;
            for (std::size_t j = 0; j < n_out; ++j) y[j] += xi * row[j];
        }
        // Checked before the ReLU, which would map NaN to zero.
        for (double v : y) {
            if (!std::isfinite(v)) throw NonFiniteError("forward pass", l);
        }
        if (l + 1 < params.layers.size()) {
            for (auto& v : y) v = v > 0.0 ? v : 0.0;
        }
        cache.activations.push_back(std::move(y));
    }
    return cache;
}

void backward(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_output,
              MlpParams& grads) {
    if (grad_output.size() != params.output_size()) throw ShapeError("output gradient width");
    if (grads.sizes() != params.sizes()) throw ShapeError("gradient buffer shape");

    std::vector<double> delta(grad_output.begin(), grad_output.end());
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        auto& g = grads.layers[l];
        const std::size_t n_in = layer.inputs();
        const std::size_t n_out = layer.outputs();
        const std::vector<double>& x = cache.activations[l];

        for (double d : delta) {
            if (!std::isfinite(d)) throw NonFiniteError("backward pass", l);
        }
        for (std::size_t j = 0; j < n_out; ++j) g.bias[j] += delta[j];

        double* gw = g.weight.data();
        for (std::size_t i = 0; i < n_in; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            double* row = gw + i * n_out;
            for (std::size_t j = 0; j < n_out; ++j) row[j] += xi * delta[j];
        }
        if (l == 0) break;

        // Propagate through the weights and the ReLU of the previous layer.
        std::vector<double> prev(n_in, 0.0);
        const double* w = layer.weight.data();
        for (std::size_t i = 0; i < n_in; ++i) {
            if (x[i] <= 0.0) continue;
            const double* row = w + i * n_out;
            double acc = 0.0;
            for (std::size_t j = 0; j < n_out; ++j) acc += row[j] * delta[j];
            prev[i] = acc;
        }
        delta = std::move(prev);
    }
}

HeadLayout HeadLayout::global(int width, int height) { return {{width, height, 4, 4}}; }

HeadLayout HeadLayout::local() { return {{4, 4}}; }

int HeadLayout::total() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

std::vector<HeadDistribution> head_distributions(std::span<const double> logits,
                                                 const HeadLayout& layout) {
    if (logits.size() != static_cast<std::size_t>(layout.total())) {
        throw ShapeError("logit width does not match head layout");
    }
    std::vector<HeadDistribution> heads;
    heads.reserve(layout.sizes.size());
    std::size_t offset = 0;
    for (int size : layout.sizes) {
        const auto n = static_cast<std::size_t>(size);
        auto z = logits.subspan(offset, n);
        offset += n;

        const double max = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - max);
        const double log_sum = std::log(sum);

        HeadDistribution h;
        h.probs.resize(n);
        h.log_probs.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            h.log_probs[k] = z[k] - max - log_sum;
            h.probs[k] = std::exp(h.log_probs[k]);
            if (h.probs[k] > 0.0) h.entropy -= h.probs[k] * h.log_probs[k];
        }
        heads.push_back(std::move(h));
    }
    return heads;
}

double total_entropy(const std::vector<HeadDistribution>& heads) {
    double h = 0.0;
    for (const auto& d : heads) h += d.entropy;
    return h;
}

double joint_log_prob(const std::vector<HeadDistribution>& heads, std::span<const int> indices) {
    if (indices.size() != heads.size()) throw ShapeError("one index per head required");
    double lp = 0.0;
    for (std::size_t k = 0; k < heads.size(); ++k) {
        const int idx = indices[k];
        if (idx < 0 || static_cast<std::size_t>(idx) >= heads[k].probs.size()) {
            throw std::out_of_range("head index out of range");
        }
        lp += heads[k].log_probs[static_cast<std::size_t>(idx)];
    }
    return lp;
}

std::vector<int> sample_heads(const std::vector<HeadDistribution>& heads, Rng& rng) {
    std::vector<int> out;
    out.reserve(heads.size());
    for (const auto& h : heads) {
        const double u = rng.uniform();
        double cdf = 0.0;
        int pick = static_cast<int>(h.probs.size()) - 1;
        for (std::size_t k = 0; k < h.probs.size(); ++k) {
            cdf += h.probs[k];
            if (u < cdf) {
                pick = static_cast<int>(k);
                break;
            }
        }
        out.push_back(pick);
    }
    return out;
}

std::vector<double> policy_logit_grad(const std::vector<HeadDistribution>& heads,
                                      std::span<const int> indices, double advantage,
                                      double entropy_coef) {
    if (indices.size() != heads.size()) throw ShapeError("one index per head required");
    std::vector<double> grad;
    for (std::size_t k = 0; k < heads.size(); ++k) {
        const auto& h = heads[k];
        for (std::size_t j = 0; j < h.probs.size(); ++j) {
            const double p = h.probs[j];
            const double onehot = static_cast<int>(j) == indices[k] ? 1.0 : 0.0;
            // d(-A log p_i)/dz_j = -A (1[i=j] - p_j)
            // d(-eta H)/dz_j     = eta p_j (log p_j + H)
            double g = -advantage * (onehot - p);
            if (p > 0.0) g += entropy_coef * p * (h.log_probs[j] + h.entropy);
            grad.push_back(g);
        }
    }
    return grad;
}

AdamState AdamState::for_params(const std::vector<const Tensor*>& params, double lr) {
    AdamState s;
    s.lr = lr;
    for (const Tensor* p : params) {
        s.m.emplace_back(p->shape());
        s.v.emplace_back(p->shape());
    }
    return s;
}

double global_norm(const std::vector<const Tensor*>& grads) {
    double sq = 0.0;
    for (const Tensor* g : grads) {
        for (double v : g->values()) sq += v * v;
    }
    return std::sqrt(sq);
}

ClipReport clip_by_global_norm(const std::vector<Tensor*>& grads, double max_norm) {
    ClipReport r;
    r.norm = global_norm(std::vector<const Tensor*>(grads.begin(), grads.end()));
    if (r.norm > max_norm) {
        r.scale = max_norm / r.norm;
        for (Tensor* g : grads) {
            for (auto& v : g->values()) v *= r.scale;
        }
    }
    return r;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& opt) {
    if (params.size() != grads.size() || params.size() != opt.m.size()) {
        throw ShapeError("optimizer state does not match parameters");
    }
    ++opt.step;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        Tensor& p = *params[t];
        const Tensor& g = *grads[t];
        Tensor& m = opt.m[t];
        Tensor& v = opt.v[t];
        if (p.size() != g.size() || p.size() != m.size()) throw ShapeError("tensor size mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * g[i];
            v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
        }
    }
}

ClipReport clip_and_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
                         AdamState& opt, double max_norm) {
    const ClipReport r = clip_by_global_norm(grads, max_norm);
    adam_step(params, std::vector<const Tensor*>(grads.begin(), grads.end()), opt);
    return r;
}

}  // namespace rtslab::nn
