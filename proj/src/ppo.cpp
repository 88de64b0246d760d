#include "scrape/ppo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace scrape {

void PpoConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("PpoConfig: gamma must be in [0, 1)");
    if (clip_epsilon <= 0.0)
        throw std::invalid_argument("PpoConfig: clip_epsilon must be > 0");
    if (rollout_steps % num_envs != 0)
        throw std::invalid_argument("PpoConfig: rollout_steps must divide by num_envs");
    if (minibatch_size < 1 || epochs_per_update < 1 || total_updates < 0)
        throw std::invalid_argument("PpoConfig: bad loop sizes");
}

RolloutBuffer::RolloutBuffer(int cap) : capacity(cap) {
    observations.reserve(cap);
    actions_raw.reserve(cap);
    log_probs.reserve(cap);
    values.reserve(cap);
    rewards.reserve(cap);
    dones.reserve(cap);
}

void RolloutBuffer::clear() {
    observations.clear();
    actions_raw.clear();
    log_probs.clear();
    values.clear();
    rewards.clear();
    dones.clear();
    advantages.clear();
    returns.clear();
}

void gae_advantages(const std::vector<double>& rewards,
                    const std::vector<double>& values,
                    const std::vector<uint8_t>& dones, double last_value,
                    double gamma, double lambda,
                    std::vector<double>& advantages, std::vector<double>& returns) {
    const size_t n = rewards.size();
    if (values.size() != n || dones.size() != n)
        throw std::invalid_argument("gae_advantages: length mismatch");
    advantages.assign(n, 0.0);
    returns.assign(n, 0.0);
    double acc = 0.0;
    for (size_t i = n; i-- > 0;) {
        double not_done = dones[i] ? 0.0 : 1.0;
        double next_v = (i + 1 < n) ? values[i + 1] : last_value;
        double delta = rewards[i] + gamma * next_v * not_done - values[i];
        acc = delta + gamma * lambda * not_done * acc;
        advantages[i] = acc;
        returns[i] = advantages[i] + values[i];
    }
}

namespace {

int policy_param_count(const GaussianPolicy& p) { return p.net.param_count() + 3; }

void get_params(const GaussianPolicy& p, const ValueNet& v, Eigen::VectorXd& out) {
    int np = p.net.param_count(), nv = v.net.param_count();
    out.resize(np + 3 + nv);
    p.net.flatten_into(out.head(np));
    out.segment(np, 3) = p.log_std;
    v.net.flatten_into(out.tail(nv));
}

void set_params(GaussianPolicy& p, ValueNet& v, const Eigen::VectorXd& in) {
    int np = p.net.param_count(), nv = v.net.param_count();
    p.net.unflatten_from(in.head(np));
    p.log_std = in.segment(np, 3);
    v.net.unflatten_from(in.tail(nv));
}

}  // namespace

std::pair<double, Eigen::VectorXd> ppo_loss_gradient(
    const GaussianPolicy& policy, const ValueNet& value,
    const RolloutBuffer& buffer, const std::vector<int>& indices,
    const PpoConfig& config) {
    const double inv_n = 1.0 / static_cast<double>(indices.size());
    Mlp pgrad = Mlp::zeros_like(policy.net);
    Mlp vgrad = Mlp::zeros_like(value.net);
    Eigen::Vector3d logstd_grad = Eigen::Vector3d::Zero();
    double loss = 0.0;

    Mlp::Cache cache;
    for (int idx : indices) {
        const Eigen::VectorXd& obs = buffer.observations[idx];
        const Eigen::Vector3d& u = buffer.actions_raw[idx];
        const double adv = buffer.advantages[idx];
        const double ret = buffer.returns[idx];
        const double lp_old = buffer.log_probs[idx];

        // --- clipped surrogate ---
        Eigen::Vector3d mean = policy.net.forward_cached(obs, cache);
        double lp_new = 0.0;
        Eigen::Vector3d dlp_dmean, dlp_dlogstd;
        for (int i = 0; i < 3; ++i) {
            double sigma = std::exp(policy.log_std[i]);
            double z = (u[i] - mean[i]) / sigma;
            lp_new += -0.5 * z * z - policy.log_std[i] - 0.9189385332046727;
            double a = std::tanh(u[i]);
            lp_new -= std::log(1.0 - a * a + 1e-8);
            dlp_dmean[i] = z / sigma;
            dlp_dlogstd[i] = z * z - 1.0;
        }
        double ratio = std::exp(lp_new - lp_old);
        double clipped = std::clamp(ratio, 1.0 - config.clip_epsilon,
                                    1.0 + config.clip_epsilon);
        double l_un = ratio * adv;
        double l_cl = clipped * adv;
        loss += -std::min(l_un, l_cl) * inv_n;
        if (l_un <= l_cl) {
            // unclipped branch active: d(-ratio*A)/dtheta = -A * ratio * dlogpi
            double c = -adv * ratio * inv_n;
            policy.net.backward(cache, c * dlp_dmean, pgrad);
            logstd_grad += c * dlp_dlogstd;
        }
        // clipped-and-binding branch contributes zero gradient

        if (!std::isfinite(loss))
            throw std::runtime_error("ppo_loss_gradient: non-finite policy loss");

        // --- value loss ---
        Mlp::Cache vcache;
        double v_pred = value.net.forward_cached(obs, vcache)[0];
        loss += config.value_coef * 0.5 * (v_pred - ret) * (v_pred - ret) * inv_n;
        Eigen::VectorXd vd(1);
        vd[0] = config.value_coef * (v_pred - ret) * inv_n;
        value.net.backward(vcache, vd, vgrad);
    }

    // --- entropy bonus (state independent) ---
    loss -= config.entropy_coef * policy.entropy();
    logstd_grad.array() -= config.entropy_coef;

    int np = policy.net.param_count(), nv = value.net.param_count();
    Eigen::VectorXd grad(np + 3 + nv);
    pgrad.flatten_into(grad.head(np));
    grad.segment(np, 3) = logstd_grad;
    vgrad.flatten_into(grad.tail(nv));
    return {loss, grad};
}

LossStats ppo_update(GaussianPolicy& policy, ValueNet& value, RolloutBuffer& buffer,
                     const PpoConfig& config, Adam& policy_opt, Adam& value_opt,
                     SplitMix64& rng) {
    const int n = buffer.size();
    if (n == 0) throw std::logic_error("ppo_update: empty buffer");

    // normalize advantages to zero mean / unit variance per update
    double mu = std::accumulate(buffer.advantages.begin(), buffer.advantages.end(), 0.0) / n;
    double var = 0.0;
    for (double a : buffer.advantages) var += (a - mu) * (a - mu);
    double sd = std::sqrt(var / n) + 1e-8;
    for (double& a : buffer.advantages) a = (a - mu) / sd;

    const int np = policy_param_count(policy);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    LossStats stats;
    int batches = 0;
    for (int epoch = 0; epoch < config.epochs_per_update; ++epoch) {
        // Fisher-Yates with the learner rng keeps shuffles reproducible
        for (int i = n - 1; i > 0; --i) {
            int j = static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }
        for (int start = 0; start + config.minibatch_size <= n;
             start += config.minibatch_size) {
            std::vector<int> mb(order.begin() + start,
                                order.begin() + start + config.minibatch_size);
            auto [loss, grad] = ppo_loss_gradient(policy, value, buffer, mb, config);
            if (!std::isfinite(loss) || !grad.allFinite())
                throw std::runtime_error("ppo_update: non-finite loss/gradient");

            double gnorm = grad.norm();
            if (gnorm > config.max_grad_norm) grad *= config.max_grad_norm / gnorm;

            Eigen::VectorXd params;
            get_params(policy, value, params);
            Eigen::VectorXd pslice = params.head(np);
            Eigen::VectorXd vslice = params.tail(params.size() - np);
            policy_opt.step(pslice, grad.head(np));
            value_opt.step(vslice, grad.tail(grad.size() - np));
            params.head(np) = pslice;
            params.tail(params.size() - np) = vslice;
            set_params(policy, value, params);
            ++batches;
        }
    }

    // post-update diagnostics on the whole buffer
    double ploss = 0.0, vloss = 0.0, kl = 0.0, clipped = 0.0;
    for (int i = 0; i < n; ++i) {
        double lp = policy.log_prob(buffer.observations[i], buffer.actions_raw[i]);
        double ratio = std::exp(lp - buffer.log_probs[i]);
        double rc = std::clamp(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon);
        ploss += -std::min(ratio * buffer.advantages[i], rc * buffer.advantages[i]);
        kl += buffer.log_probs[i] - lp;
        if (std::abs(ratio - 1.0) > config.clip_epsilon) clipped += 1.0;
        double v = value.value(buffer.observations[i]);
        vloss += 0.5 * (v - buffer.returns[i]) * (v - buffer.returns[i]);
    }
    stats.policy_loss = ploss / n;
    stats.value_loss = vloss / n;
    stats.entropy = policy.entropy();
    stats.approx_kl = kl / n;
    stats.clip_fraction = clipped / n;
    (void)batches;
    return stats;
}

Action fixed_wrench_policy(int t, const EnvConfig& cfg, bool final_sweep) {
    Action a;
    a.f_x_cmd = 4.0;
    a.tau_y_cmd = 0.5;
    double top = cfg.geometry.window_z_max;
    double bottom = cfg.geometry.window_z_min;
    int horizon = cfg.horizon;
    if (!final_sweep) {
        double frac = std::clamp(static_cast<double>(t) / horizon, 0.0, 1.0);
        a.z_desired = top + frac * (bottom - top);
    } else {
        int down_end = (horizon * 4) / 5;
        if (t <= down_end) {
            double frac = std::clamp(static_cast<double>(t) / down_end, 0.0, 1.0);
            a.z_desired = top + frac * (bottom - top);
        } else {
            double frac = std::clamp(static_cast<double>(t - down_end) /
                                         (horizon - down_end), 0.0, 1.0);
            a.z_desired = bottom + frac * (top - bottom);
            a.f_x_cmd = 5.0;   // adjusted press on the upward sweep
        }
    }
    return a;
}

namespace {

struct EnvSlot {
    std::unique_ptr<TrainEnv> env;
    SplitMix64 action_rng{0};
    SplitMix64 seed_rng{0};
    Eigen::VectorXd obs;
    // per-slice storage
    std::vector<Eigen::VectorXd> observations;
    std::vector<Eigen::Vector3d> actions_raw;
    std::vector<double> log_probs, values, rewards;
    std::vector<uint8_t> dones;
    double last_value = 0.0;
    std::vector<double> ep_returns, ep_fractions;
    double wrench_accum = 0.0;
    int wrench_count = 0;
};

Eigen::VectorXd to_vec(const Observation& o) {
    Eigen::VectorXd v(kObsDim);
    for (int i = 0; i < kObsDim; ++i) v[i] = o.v[i];
    return v;
}

void collect_slice(EnvSlot& slot, const GaussianPolicy& policy, const ValueNet& value,
                   int steps) {
    slot.observations.clear();
    slot.actions_raw.clear();
    slot.log_probs.clear();
    slot.values.clear();
    slot.rewards.clear();
    slot.dones.clear();
    slot.ep_returns.clear();
    slot.ep_fractions.clear();
    slot.wrench_accum = 0.0;
    slot.wrench_count = 0;

    for (int t = 0; t < steps; ++t) {
        if (!slot.env->active())
            slot.obs = to_vec(slot.env->reset(slot.seed_rng.next()));

        GaussianPolicy::Sample s = policy.act(slot.obs, slot.action_rng);
        s.value = value.value(slot.obs);
        Action a = map_action({s.action[0], s.action[1], s.action[2]},
                              slot.env->config());

        double ret_before = slot.env->episode_return();
        ScrapeEnv::StepOut out = slot.env->step(a);
        (void)ret_before;

        slot.observations.push_back(slot.obs);
        slot.actions_raw.push_back(s.u);
        slot.log_probs.push_back(s.log_prob);
        slot.values.push_back(s.value);
        slot.rewards.push_back(out.reward.total);
        slot.dones.push_back(out.terminated || out.truncated ? 1 : 0);

        Eigen::VectorXd next = to_vec(out.obs);
        slot.wrench_accum += next.segment(7, 6).norm();
        ++slot.wrench_count;

        if (out.terminated || out.truncated) {
            slot.ep_returns.push_back(slot.env->episode_return());
            slot.ep_fractions.push_back(slot.env->removed_fraction_now());
        }
        slot.obs = next;
    }
    slot.last_value = slot.dones.back() ? 0.0 : value.value(slot.obs);
}

}  // namespace

TrainResult train(const EnvFactory& factory, const PpoConfig& config) {
    config.validate();

    SplitMix64 init_rng(config.policy_seed);
    TrainResult result{GaussianPolicy::make(kObsDim, init_rng),
                       ValueNet::make(kObsDim, init_rng),
                       {}};

    const int num_envs = config.num_envs;
    const int steps_per_env = config.rollout_steps / num_envs;

    std::vector<EnvSlot> slots(num_envs);
    for (int i = 0; i < num_envs; ++i) {
        slots[i].env = factory(i);
        SplitMix64 mix(config.policy_seed ^ (0x5eedull + i * 0x9e3779b97f4a7c15ull));
        slots[i].action_rng = SplitMix64(mix.next());
        slots[i].seed_rng = SplitMix64(mix.next());
        slots[i].obs = to_vec(slots[i].env->reset(slots[i].seed_rng.next()));
    }

    Adam policy_opt(policy_param_count(result.policy), config.learning_rate);
    Adam value_opt(result.value.net.param_count(), config.learning_rate);
    SplitMix64 learner_rng(config.policy_seed ^ 0xabcdef);

    RolloutBuffer buffer(config.rollout_steps);
    std::ofstream curve_file;
    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        curve_file.open(config.out_dir + "/learning_curve.csv");
        curve_file << "update,mean_return,mean_removed_fraction,mean_wrench,"
                      "policy_loss,value_loss,entropy\n";
    }

    double carry_return = 0.0, carry_fraction = 0.0;
    for (int update = 0; update < config.total_updates; ++update) {
        if (config.workers > 1) {
#pragma omp parallel for num_threads(config.workers) schedule(static)
            for (int i = 0; i < num_envs; ++i)
                collect_slice(slots[i], result.policy, result.value, steps_per_env);
        } else {
            for (int i = 0; i < num_envs; ++i)
                collect_slice(slots[i], result.policy, result.value, steps_per_env);
        }

        buffer.clear();
        double wrench_sum = 0.0;
        int wrench_count = 0;
        std::vector<double> ep_returns, ep_fractions;
        for (int i = 0; i < num_envs; ++i) {
            EnvSlot& s = slots[i];
            std::vector<double> adv, ret;
            gae_advantages(s.rewards, s.values, s.dones, s.last_value,
                           config.gamma, config.gae_lambda, adv, ret);
            for (int t = 0; t < steps_per_env; ++t) {
                buffer.observations.push_back(s.observations[t]);
                buffer.actions_raw.push_back(s.actions_raw[t]);
                buffer.log_probs.push_back(s.log_probs[t]);
                buffer.values.push_back(s.values[t]);
                buffer.rewards.push_back(s.rewards[t]);
                buffer.dones.push_back(s.dones[t]);
                buffer.advantages.push_back(adv[t]);
                buffer.returns.push_back(ret[t]);
            }
            wrench_sum += s.wrench_accum;
            wrench_count += s.wrench_count;
            ep_returns.insert(ep_returns.end(), s.ep_returns.begin(), s.ep_returns.end());
            ep_fractions.insert(ep_fractions.end(), s.ep_fractions.begin(),
                                s.ep_fractions.end());
        }

        LossStats stats = ppo_update(result.policy, result.value, buffer, config,
                                     policy_opt, value_opt, learner_rng);

        LearningCurveRow row;
        row.update = update + 1;
        if (!ep_returns.empty()) {
            carry_return = std::accumulate(ep_returns.begin(), ep_returns.end(), 0.0) /
                           ep_returns.size();
            carry_fraction = std::accumulate(ep_fractions.begin(), ep_fractions.end(),
                                             0.0) /
                             ep_fractions.size();
        }
        row.mean_return = carry_return;
        row.mean_removed_fraction = carry_fraction;
        row.mean_wrench = wrench_count ? wrench_sum / wrench_count : 0.0;
        row.losses = stats;
        result.curve.push_back(row);

        if (curve_file.is_open()) {
            curve_file << row.update << "," << row.mean_return << ","
                       << row.mean_removed_fraction << "," << row.mean_wrench << ","
                       << stats.policy_loss << "," << stats.value_loss << ","
                       << stats.entropy << "\n";
        }
        if (!config.out_dir.empty() && config.checkpoint_interval > 0 &&
            (update + 1) % config.checkpoint_interval == 0) {
            save_checkpoint(config.out_dir + "/checkpoint_" +
                                std::to_string(update + 1) + ".bin",
                            result.policy, result.value);
        }
    }

    if (!config.out_dir.empty())
        save_checkpoint(config.out_dir + "/checkpoint.bin", result.policy, result.value);
    return result;
}

}  // namespace scrape
