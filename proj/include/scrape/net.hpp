#pragma once
#include <Eigen/Dense>
#include <vector>

#include "scrape/rng.hpp"

namespace scrape {

// Fully connected tanh network with a linear output layer. Training-side
// gradients are computed by hand so the whole learner stays dependency-free
// and finite-difference checkable.
struct Mlp {
    std::vector<Eigen::MatrixXd> weights;   // weights[l]: (out, in)
    std::vector<Eigen::VectorXd> biases;

    // Scaled-Gaussian init, final layer shrunk so initial outputs are near 0.
    static Mlp make(const std::vector<int>& layer_sizes, SplitMix64& rng,
                    double last_layer_scale = 0.01);

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

    struct Cache {
        std::vector<Eigen::VectorXd> activations;   // activations[0] = input
    };
    Eigen::VectorXd forward_cached(const Eigen::VectorXd& x, Cache& cache) const;

    // Accumulates dL/dparams into grad given dL/doutput; grad must be
    // zero-initialized with the same shapes (see zeros_like).
    void backward(const Cache& cache, const Eigen::VectorXd& dout, Mlp& grad) const;

    static Mlp zeros_like(const Mlp& other);

    int param_count() const;
    void flatten_into(Eigen::Ref<Eigen::VectorXd> out) const;
    void unflatten_from(const Eigen::Ref<const Eigen::VectorXd>& in);
};

// First-order adaptive-moment optimizer with bias correction.
struct Adam {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    Eigen::VectorXd m, v;
    long t = 0;

    explicit Adam(int n, double lr_ = 3e-4)
        : lr(lr_), m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}

    void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad);
};

}  // namespace scrape
