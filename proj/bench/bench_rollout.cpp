// Benchmark: rollout collection throughput, serial single-worker reference
// vs OpenMP fan-out across environment instances. Both modes must produce
// identical learning curves; the parallel path only changes wall time.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <memory>

#include "scrape/ppo.hpp"

using namespace scrape;
using Clock = std::chrono::steady_clock;

namespace {

double run_once(int workers, int updates, double* final_return) {
    EnvConfig env_cfg;
    env_cfg.horizon = 100;
    auto factory = [env_cfg](int) -> std::unique_ptr<TrainEnv> {
        return std::make_unique<ScrapeTrainEnv>(env_cfg);
    };
    PpoConfig cfg;
    cfg.rollout_steps = 1600;
    cfg.num_envs = 8;
    cfg.total_updates = updates;
    cfg.workers = workers;
    cfg.policy_seed = 7;

    auto t0 = Clock::now();
    TrainResult result = train(factory, cfg);
    auto t1 = Clock::now();
    *final_return = result.curve.empty() ? 0.0 : result.curve.back().mean_return;
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
    const int updates = 4;
    const int max_threads = omp_get_max_threads();
    std::printf("rollout benchmark: %d updates x 1600 steps, 8 envs\n", updates);

    double serial_return = 0.0;
    double serial = run_once(1, updates, &serial_return);
    std::printf("%8s  %10s  %8s  %s\n", "workers", "seconds", "speedup", "final_return");
    std::printf("%8d  %10.3f  %8.2f  %.6f\n", 1, serial, 1.0, serial_return);

    // Always run at least workers=2 so the parallel path is checked even on
    // a single-core machine (speedup will just be ~1 there).
    for (int w = 2; w <= std::min(8, std::max(2, max_threads)); w *= 2) {
        double ret = 0.0;
        double t = run_once(w, updates, &ret);
        std::printf("%8d  %10.3f  %8.2f  %.6f\n", w, t, serial / t, ret);
        if (ret != serial_return) {
            std::printf("MISMATCH: parallel run diverged from the serial reference\n");
            return 1;
        }
    }
    std::printf("all parallel runs match the serial reference bitwise\n");
    return 0;
}
