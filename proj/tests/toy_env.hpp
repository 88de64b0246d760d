#pragma once
#include <memory>

#include "scrape/ppo.hpp"

namespace scrape::testing {

// Minimal force-tracking task reusing the full observation layout: obs[7]
// holds the target in [-1, 1]; per-step reward is 1 minus the squared
// tracking error of the first action channel, so the closed-form optimum is
// horizon x 1 per episode.
class ToyForceEnv : public TrainEnv {
  public:
    ToyForceEnv() { cfg_.horizon = 8; }

    Observation reset(uint64_t seed) override {
        SplitMix64 rng(seed);
        target_ = rng.uniform(-0.8, 0.8);
        t_ = 0;
        active_ = true;
        return_ = 0.0;
        return observe();
    }

    ScrapeEnv::StepOut step(const Action& a) override {
        double cmd = 2.0 * a.f_x_cmd / cfg_.f_x_max - 1.0;  // undo the mapping
        double err = cmd - target_;
        ScrapeEnv::StepOut out;
        out.reward.total = 1.0 - err * err;
        return_ += out.reward.total;
        ++t_;
        out.truncated = (t_ >= cfg_.horizon);
        active_ = !out.truncated;
        out.obs = observe();
        return out;
    }

    const EnvConfig& config() const override { return cfg_; }
    bool active() const override { return active_; }
    double episode_return() const override { return return_; }
    double removed_fraction_now() const override { return 0.0; }

    static double optimum(const EnvConfig& cfg) {
        return static_cast<double>(cfg.horizon);
    }

  private:
    Observation observe() const {
        Observation o;
        o.v[7] = target_;
        o.v[0] = static_cast<double>(t_) / cfg_.horizon;
        return o;
    }
    EnvConfig cfg_;
    double target_ = 0.0;
    int t_ = 0;
    bool active_ = false;
    double return_ = 0.0;
};

inline EnvFactory toy_factory() {
    return [](int) -> std::unique_ptr<TrainEnv> {
        return std::make_unique<ToyForceEnv>();
    };
}

}  // namespace scrape::testing
