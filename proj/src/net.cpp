#include "scrape/net.hpp"

#include <cmath>
#include <stdexcept>

namespace scrape {

Mlp Mlp::make(const std::vector<int>& layer_sizes, SplitMix64& rng,
              double last_layer_scale) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("Mlp: need >= 2 layers");
    Mlp net;
    for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        int in = layer_sizes[l], out = layer_sizes[l + 1];
        double scale = std::sqrt(1.0 / in);
        if (l + 2 == layer_sizes.size()) scale *= last_layer_scale;
        Eigen::MatrixXd W(out, in);
        for (int i = 0; i < out; ++i)
            for (int j = 0; j < in; ++j) W(i, j) = scale * rng.gaussian();
        net.weights.push_back(std::move(W));
        net.biases.push_back(Eigen::VectorXd::Zero(out));
    }
    return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h = x;
    for (size_t l = 0; l < weights.size(); ++l) {
        h = weights[l] * h + biases[l];
        if (l + 1 < weights.size()) h = h.array().tanh();
    }
    return h;
}

Eigen::VectorXd Mlp::forward_cached(const Eigen::VectorXd& x, Cache& cache) const {
    cache.activations.clear();
    cache.activations.push_back(x);
    Eigen::VectorXd h = x;
    for (size_t l = 0; l < weights.size(); ++l) {
        h = weights[l] * h + biases[l];
        if (l + 1 < weights.size()) h = h.array().tanh();
        cache.activations.push_back(h);
    }
    return h;
}

void Mlp::backward(const Cache& cache, const Eigen::VectorXd& dout, Mlp& grad) const {
    Eigen::VectorXd delta = dout;
    for (int l = static_cast<int>(weights.size()) - 1; l >= 0; --l) {
        grad.weights[l].noalias() += delta * cache.activations[l].transpose();
        grad.biases[l] += delta;
        if (l > 0) {
            // through tanh of the previous hidden layer
            Eigen::ArrayXd a = cache.activations[l].array();
            delta = (weights[l].transpose() * delta).array() * (1.0 - a * a);
        }
    }
}

Mlp Mlp::zeros_like(const Mlp& other) {
    Mlp z;
    for (size_t l = 0; l < other.weights.size(); ++l) {
        z.weights.push_back(Eigen::MatrixXd::Zero(other.weights[l].rows(),
                                                  other.weights[l].cols()));
        z.biases.push_back(Eigen::VectorXd::Zero(other.biases[l].size()));
    }
    return z;
}

int Mlp::param_count() const {
    int n = 0;
    for (size_t l = 0; l < weights.size(); ++l)
        n += static_cast<int>(weights[l].size() + biases[l].size());
    return n;
}

void Mlp::flatten_into(Eigen::Ref<Eigen::VectorXd> out) const {
    int k = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        for (int i = 0; i < weights[l].rows(); ++i)
            for (int j = 0; j < weights[l].cols(); ++j) out[k++] = weights[l](i, j);
        for (int i = 0; i < biases[l].size(); ++i) out[k++] = biases[l][i];
    }
}

void Mlp::unflatten_from(const Eigen::Ref<const Eigen::VectorXd>& in) {
    int k = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
        for (int i = 0; i < weights[l].rows(); ++i)
            for (int j = 0; j < weights[l].cols(); ++j) weights[l](i, j) = in[k++];
        for (int i = 0; i < biases[l].size(); ++i) biases[l][i] = in[k++];
    }
}

void Adam::step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad) {
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params -= (lr / bc1) * m.cwiseQuotient(
                  ((v / bc2).cwiseSqrt().array() + eps).matrix());
}

}  // namespace scrape
