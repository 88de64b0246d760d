#pragma once
#include <Eigen/Dense>
#include <string>

#include "scrape/net.hpp"

namespace scrape {

// Diagonal-Gaussian policy with a tanh squash onto [-1, 1]^3 and a learned
// state-independent log standard deviation.
struct GaussianPolicy {
    Mlp net;                            // obs -> 3 pre-squash means
    Eigen::Vector3d log_std = Eigen::Vector3d::Constant(-0.5);

    static GaussianPolicy make(int obs_dim, SplitMix64& rng,
                               int hidden = 64);

    struct Sample {
        Eigen::Vector3d u;          // pre-squash draw
        Eigen::Vector3d action;     // tanh(u), in [-1, 1]^3
        double log_prob = 0.0;      // includes the squash correction
        double value = 0.0;         // filled by the caller
    };

    // Stochastic draw; aborts via exception on a non-finite network output.
    Sample act(const Eigen::VectorXd& obs, SplitMix64& rng) const;

    // Deterministic mode used at evaluation: action = tanh(mean).
    Eigen::Vector3d act_deterministic(const Eigen::VectorXd& obs) const;

    // Exact log-density of a stored pre-squash draw under the current
    // parameters (tanh correction included).
    double log_prob(const Eigen::VectorXd& obs, const Eigen::Vector3d& u) const;

    // Pre-squash Gaussian entropy (state independent).
    double entropy() const;
};

struct ValueNet {
    Mlp net;   // obs -> scalar
    static ValueNet make(int obs_dim, SplitMix64& rng, int hidden = 64);
    double value(const Eigen::VectorXd& obs) const { return net.forward(obs)[0]; }
};

// Checkpoint file: magic "SCRP", version u16, layer count u32, per-layer
// (rows, cols) u32 pairs with row-major little-endian f64 payloads, the
// log_std values, then an FNV-1a 64-bit checksum of all payload bytes.
void save_checkpoint(const std::string& path, const GaussianPolicy& policy,
                     const ValueNet& value);
void load_checkpoint(const std::string& path, GaussianPolicy& policy,
                     ValueNet& value);

}  // namespace scrape
