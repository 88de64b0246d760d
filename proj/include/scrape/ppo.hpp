#pragma once
#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scrape/env.hpp"
#include "scrape/policy.hpp"

namespace scrape {

struct PpoConfig {
    double clip_epsilon = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double learning_rate = 3e-4;
    int epochs_per_update = 10;
    int minibatch_size = 64;
    int rollout_steps = 2048;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
    double max_grad_norm = 0.5;
    int total_updates = 200;
    int num_envs = 8;
    int workers = 1;                 // >1 enables OpenMP rollout collection
    uint64_t policy_seed = 1;
    int checkpoint_interval = 0;     // 0: final checkpoint only
    std::string out_dir;

    void validate() const;
};

struct RolloutBuffer {
    int capacity = 0;
    std::vector<Eigen::VectorXd> observations;
    std::vector<Eigen::Vector3d> actions_raw;   // pre-squash draws
    std::vector<double> log_probs;
    std::vector<double> values;
    std::vector<double> rewards;
    std::vector<uint8_t> dones;
    std::vector<double> advantages;
    std::vector<double> returns;

    explicit RolloutBuffer(int cap);
    void clear();
    int size() const { return static_cast<int>(rewards.size()); }
};

// Standard GAE recursion; `last_value` bootstraps past the final entry.
// returns = advantages + values.
void gae_advantages(const std::vector<double>& rewards,
                    const std::vector<double>& values,
                    const std::vector<uint8_t>& dones, double last_value,
                    double gamma, double lambda,
                    std::vector<double>& advantages, std::vector<double>& returns);

struct LossStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
};

// One PPO update over the filled buffer: clipped surrogate, value MSE,
// entropy bonus, global-norm gradient clipping, Adam. Advantages are
// normalized in place per update.
LossStats ppo_update(GaussianPolicy& policy, ValueNet& value, RolloutBuffer& buffer,
                     const PpoConfig& config, Adam& policy_opt, Adam& value_opt,
                     SplitMix64& rng);

// Full analytic gradient of the clipped loss at the current parameters,
// exposed for the finite-difference oracle in the tests: returns
// (d loss / d [policy params, log_std, value params]) and the scalar loss.
std::pair<double, Eigen::VectorXd> ppo_loss_gradient(
    const GaussianPolicy& policy, const ValueNet& value,
    const RolloutBuffer& buffer, const std::vector<int>& indices,
    const PpoConfig& config);

// Any environment exposing the ScrapeEnv step/reset surface can train.
class TrainEnv {
  public:
    virtual ~TrainEnv() = default;
    virtual Observation reset(uint64_t seed) = 0;
    virtual ScrapeEnv::StepOut step(const Action& a) = 0;
    virtual const EnvConfig& config() const = 0;
    virtual bool active() const = 0;
    virtual double episode_return() const = 0;
    virtual double removed_fraction_now() const = 0;
};

class ScrapeTrainEnv : public TrainEnv {
  public:
    explicit ScrapeTrainEnv(const EnvConfig& cfg) : env_(cfg) {}
    Observation reset(uint64_t seed) override { return env_.reset(seed); }
    ScrapeEnv::StepOut step(const Action& a) override { return env_.step(a); }
    const EnvConfig& config() const override { return env_.config(); }
    bool active() const override { return env_.active(); }
    double episode_return() const override { return env_.episode_return(); }
    double removed_fraction_now() const override {
        return removed_fraction(env_.profile());
    }
  private:
    ScrapeEnv env_;
};

using EnvFactory = std::function<std::unique_ptr<TrainEnv>(int env_index)>;

struct LearningCurveRow {
    int update = 0;
    double mean_return = 0.0;
    double mean_removed_fraction = 0.0;
    double mean_wrench = 0.0;
    LossStats losses;
};

struct TrainResult {
    GaussianPolicy policy;
    ValueNet value;
    std::vector<LearningCurveRow> curve;
};

// Alternating rollout/update loop. Rollouts fan out across env instances
// (OpenMP when workers > 1); the learner is strictly serial. Per-env seeds
// are fixed up front, so the merged buffer layout is identical in serial
// and parallel modes.
TrainResult train(const EnvFactory& factory, const PpoConfig& config);

// Fixed-wrench baseline: 4 N press, constant scraping torque, linear
// descent over the horizon from window top to window bottom, then hold.
// With final_sweep, the last 20% of the horizon sweeps back upward.
Action fixed_wrench_policy(int t, const EnvConfig& cfg, bool final_sweep = false);

// Relative success: score expressed as a percentage of a reference upper
// bound (human operator in the original metric, oracle sweep here).
inline double relative_success(double score, double reference) {
    return reference > 0.0 ? 100.0 * score / reference : 0.0;
}

}  // namespace scrape
