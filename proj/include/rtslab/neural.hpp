#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtslab/random.hpp"

namespace rtslab::nn {

// Dense row-major buffer of 64-bit floats.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    void fill(double v);

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Weight is stored [in][out] so one-hot inputs touch contiguous rows.
struct DenseLayer {
    Tensor weight;
    Tensor bias;

    std::size_t inputs() const { return weight.shape()[0]; }
    std::size_t outputs() const { return weight.shape()[1]; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Fully connected net: ReLU between layers, linear output.
struct MlpParams {
    std::vector<DenseLayer> layers;

    // All-zero parameters for the layer widths {input, hidden..., output}.
    static MlpParams zeros(const std::vector<std::size_t>& sizes);
    // Hidden layers U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the output layer's
    // bound is further multiplied by output_scale. Biases start at zero.
    static MlpParams init(const std::vector<std::size_t>& sizes, Rng& rng, double output_scale);

    std::vector<std::size_t> sizes() const;
    std::size_t input_size() const { return layers.front().inputs(); }
    std::size_t output_size() const { return layers.back().outputs(); }
    std::size_t parameter_count() const;

    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;

    bool all_finite() const;
    void set_zero();

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& where, std::size_t layer);
    std::size_t layer() const { return layer_; }

private:
    std::size_t layer_;
};

// activations[0] is the input, activations[i] the post-ReLU output of layer
// i-1, and activations.back() the linear output.
struct MlpCache {
    std::vector<std::vector<double>> activations;

    std::span<const double> output() const { return activations.back(); }
};

MlpCache forward(const MlpParams& params, std::span<const double> input);

// Accumulates d(loss)/d(params) into grads given d(loss)/d(output).
void backward(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_output,
              MlpParams& grads);

// --- Categorical heads ---

struct HeadLayout {
    std::vector<int> sizes;

    // (x, y, action type, action parameter)
    static HeadLayout global(int width, int height);
    // (action type, action parameter)
    static HeadLayout local();

    int total() const;

    friend bool operator==(const HeadLayout&, const HeadLayout&) = default;
};

struct HeadDistribution {
    std::vector<double> probs;
    std::vector<double> log_probs;
    double entropy = 0.0;
};

std::vector<HeadDistribution> head_distributions(std::span<const double> logits,
                                                 const HeadLayout& layout);

// Sum of per-head entropies.
double total_entropy(const std::vector<HeadDistribution>& heads);

// Sum of per-head log-probabilities of the chosen indices.
double joint_log_prob(const std::vector<HeadDistribution>& heads, std::span<const int> indices);

// Inverse-CDF draw per head, one uniform per head in head order.
std::vector<int> sample_heads(const std::vector<HeadDistribution>& heads, Rng& rng);

// Gradient w.r.t. the concatenated logits of
//   -advantage * joint_log_prob(indices) - entropy_coef * total_entropy.
std::vector<double> policy_logit_grad(const std::vector<HeadDistribution>& heads,
                                      std::span<const int> indices, double advantage,
                                      double entropy_coef);

// --- Optimizer ---

struct AdamState {
    double lr = 0.0007;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;

    static AdamState for_params(const std::vector<const Tensor*>& params, double lr);

    friend bool operator==(const AdamState&, const AdamState&) = default;
};

double global_norm(const std::vector<const Tensor*>& grads);

struct ClipReport {
    double norm = 0.0;   // before clipping
    double scale = 1.0;  // factor applied to every gradient
};

// Scales grads in place to at most max_norm global L2 norm.
ClipReport clip_by_global_norm(const std::vector<Tensor*>& grads, double max_norm);

// Bias-corrected adaptive-moment update.
void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& opt);

// Clip at max_norm, then one Adam update. grads are modified in place.
ClipReport clip_and_step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
                         AdamState& opt, double max_norm);

}  // namespace rtslab::nn
