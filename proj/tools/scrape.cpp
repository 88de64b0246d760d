// Batch front end: train / eval / compare / perception-eval / render.
// Exit codes: 0 success, 2 usage or config error, 3 numerical failure,
// 4 I/O error.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "scrape/config.hpp"
#include "scrape/env.hpp"
#include "scrape/perception.hpp"
#include "scrape/ppo.hpp"

namespace scrape {
namespace {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Eigen::VectorXd to_vec(const Observation& o) {
    Eigen::VectorXd v(kObsDim);
    for (int i = 0; i < kObsDim; ++i) v[i] = o.v[i];
    return v;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

void write_run_artifacts(const RunConfig& cfg, int argc, char** argv) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text(cfg.out_dir + "/resolved_config.txt", serialize_config(cfg));
    std::ostringstream cmd;
    cmd << kFormatVersion << "\n";
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    cmd << "\n";
    write_text(cfg.out_dir + "/command.txt", cmd.str());
}

// ---------------------------------------------------------------- episodes

using ActionFn = std::function<Action(const Observation&, int step)>;

struct EpisodeResult {
    double removed = 0.0;
    double episode_return = 0.0;
    double mean_wrench = 0.0;
    bool success = false;
    std::vector<LogRow> log;
};

EpisodeResult run_episode(const EnvConfig& cfg, uint64_t profile_seed,
                          const ActionFn& act) {
    ScrapeEnv env(cfg);
    Observation obs = env.reset(profile_seed);
    EpisodeResult r;
    double wrench_sum = 0.0;
    int steps = 0;
    while (env.active()) {
        Action a = act(obs, steps);
        ScrapeEnv::StepOut out = env.step(a);
        if (out.dynamics_failure)
            throw NumericalError("episode aborted: joint dynamics diverged");
        obs = out.obs;
        Eigen::Map<const Eigen::Matrix<double, 6, 1>> w(obs.v.data() + 7);
        wrench_sum += w.norm();
        ++steps;
    }
    r.removed = removed_fraction(env.profile());
    r.episode_return = env.episode_return();
    r.mean_wrench = steps ? wrench_sum / steps : 0.0;
    r.success = r.removed >= 1.0 - 1e-12;
    r.log = env.log();
    return r;
}

ActionFn policy_action(const GaussianPolicy& policy, const EnvConfig& cfg) {
    return [&policy, &cfg](const Observation& o, int) {
        Eigen::Vector3d a = policy.act_deterministic(to_vec(o));
        return map_action({a[0], a[1], a[2]}, cfg);
    };
}

ActionFn baseline_action(const EnvConfig& cfg) {
    return [&cfg](const Observation&, int t) { return fixed_wrench_policy(t, cfg); };
}

// Upper-bound sweep for the relative-success denominator: the same scripted
// descent but pressing at the material's maximum dislodgement force.
ActionFn oracle_action(const EnvConfig& cfg) {
    return [&cfg](const Observation&, int t) {
        Action a = fixed_wrench_policy(t, cfg);
        a.f_x_cmd = cfg.f_x_max;
        return a;
    };
}

void load_agent(const std::string& path, GaussianPolicy& policy, ValueNet& value) {
    SplitMix64 rng(0);
    policy = GaussianPolicy::make(kObsDim, rng);
    value = ValueNet::make(kObsDim, rng);
    try {
        load_checkpoint(path, policy, value);
    } catch (const std::exception& e) {
        throw IoError("checkpoint " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------- commands

int cmd_train(RunConfig cfg, int updates_override, int argc, char** argv) {
    if (updates_override >= 0) cfg.ppo.total_updates = updates_override;
    cfg.ppo.out_dir = cfg.out_dir;
    write_run_artifacts(cfg, argc, argv);
    EnvConfig env_cfg = cfg.env;
    auto factory = [env_cfg](int) -> std::unique_ptr<TrainEnv> {
        return std::make_unique<ScrapeTrainEnv>(env_cfg);
    };
    TrainResult result = train(factory, cfg.ppo);
    std::cout << "training complete: " << result.curve.size() << " updates, "
              << "checkpoint written to " << cfg.out_dir << "/checkpoint.bin\n";
    if (!result.curve.empty())
        std::cout << "final mean return " << result.curve.back().mean_return
                  << ", removed fraction "
                  << result.curve.back().mean_removed_fraction << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint, int argc,
             char** argv) {
    write_run_artifacts(cfg, argc, argv);
    GaussianPolicy policy;
    ValueNet value;
    load_agent(checkpoint, policy, value);

    const int n = cfg.eval_episodes;
    std::vector<EpisodeResult> results(n);
#pragma omp parallel for num_threads(std::max(1, cfg.ppo.workers)) schedule(dynamic)
    for (int i = 0; i < n; ++i)
        results[i] = run_episode(cfg.env, cfg.eval_seed + i,
                                 policy_action(policy, cfg.env));

    std::ostringstream csv;
    csv << "seed,removed_fraction,success,return,mean_wrench\n";
    for (int i = 0; i < n; ++i) {
        const EpisodeResult& r = results[i];
        csv << cfg.eval_seed + i << "," << r.removed << "," << (r.success ? 1 : 0)
            << "," << r.episode_return << "," << r.mean_wrench << "\n";
    }
    write_text(cfg.out_dir + "/eval.csv", csv.str());

    if (n > 0) {
        // keep the first episode's step log around for the render command
        std::ostringstream log;
        log << ScrapeEnv::kLogHeader << "\n";
        for (const LogRow& row : results[0].log)
            log << row.step << "," << row.f_x_cmd << "," << row.tau_y_cmd << ","
                << row.z_desired << "," << row.F_x << "," << row.F_z << ","
                << row.T_y << "," << row.delta_m << "," << row.r_m << ","
                << row.r_e << "," << row.r_c << "," << row.total << ","
                << row.removed_fraction << "\n";
        write_text(cfg.out_dir + "/episode_log.csv", log.str());
        double mean = 0.0;
        for (const auto& r : results) mean += r.removed;
        std::cout << "eval: " << n << " episodes, mean removed fraction "
                  << mean / n << "\n";
    } else {
        std::cout << "eval: 0 episodes\n";
    }
    return 0;
}

double sign_test_p(int wins, int n) {
    // one-sided binomial tail at p = 0.5
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        double c = 1.0;
        for (int j = 0; j < k; ++j) c = c * (n - j) / (j + 1);
        p += c;
    }
    return p / std::pow(2.0, n);
}

int cmd_compare(const RunConfig& cfg, const std::string& checkpoint, int argc,
                char** argv) {
    write_run_artifacts(cfg, argc, argv);
    GaussianPolicy policy;
    ValueNet value;
    load_agent(checkpoint, policy, value);

    const int profiles = cfg.compare_profiles;
    const int episodes = cfg.episodes_per_profile;
    const int total = profiles * episodes;

    struct Row {
        uint64_t profile_seed = 0;
        int episode = 0;
        double policy_removed = 0, baseline_removed = 0, oracle_removed = 0;
    };
    std::vector<Row> rows(total);

#pragma omp parallel for num_threads(std::max(1, cfg.ppo.workers)) schedule(dynamic)
    for (int idx = 0; idx < total; ++idx) {
        int p = idx / episodes, e = idx % episodes;
        Row& row = rows[idx];
        row.profile_seed = cfg.compare_seed + p;
        row.episode = e;
        // per-episode domain randomization: redraw the joint-friction seed
        EnvConfig env_cfg = cfg.env;
        SplitMix64 mix(cfg.env.friction_seed ^
                       (0x7f4a7c15ull + 1000ull * p + static_cast<uint64_t>(e)));
        env_cfg.friction_seed = mix.next();
        row.policy_removed =
            run_episode(env_cfg, row.profile_seed, policy_action(policy, env_cfg))
                .removed;
        row.baseline_removed =
            run_episode(env_cfg, row.profile_seed, baseline_action(env_cfg)).removed;
        row.oracle_removed =
            run_episode(env_cfg, row.profile_seed, oracle_action(env_cfg)).removed;
    }

    std::ostringstream csv;
    csv << "profile_seed,episode,policy_removed,baseline_removed,oracle_removed,"
           "improvement\n";
    for (const Row& r : rows)
        csv << r.profile_seed << "," << r.episode << "," << r.policy_removed << ","
            << r.baseline_removed << "," << r.oracle_removed << ","
            << r.policy_removed - r.baseline_removed << "\n";
    write_text(cfg.out_dir + "/compare.csv", csv.str());

    std::ostringstream sum;
    sum << "profile_seed,policy_mean,baseline_mean,oracle_mean,improvement,"
           "s_rel_policy_pct,s_rel_baseline_pct\n";
    int wins = 0;
    double policy_all = 0, baseline_all = 0;
    for (int p = 0; p < profiles; ++p) {
        double pm = 0, bm = 0, om = 0;
        for (int e = 0; e < episodes; ++e) {
            const Row& r = rows[p * episodes + e];
            pm += r.policy_removed;
            bm += r.baseline_removed;
            om += r.oracle_removed;
        }
        pm /= episodes;
        bm /= episodes;
        om /= episodes;
        policy_all += pm;
        baseline_all += bm;
        if (pm > bm) ++wins;
        double srp = relative_success(pm, om);
        double srb = relative_success(bm, om);
        sum << cfg.compare_seed + p << "," << pm << "," << bm << "," << om << ","
            << pm - bm << "," << srp << "," << srb << "\n";
    }
    write_text(cfg.out_dir + "/compare_summary.csv", sum.str());

    double p_value = sign_test_p(wins, profiles);
    std::cout << "compare: policy mean " << policy_all / profiles
              << ", baseline mean " << baseline_all / profiles << ", improvement "
              << (policy_all - baseline_all) / profiles << "\n"
              << "sign test: " << wins << "/" << profiles
              << " profiles favor the policy, one-sided p = " << p_value << "\n";
    return 0;
}

SyntheticScene random_scene(const RunConfig& cfg, uint64_t seed, bool tool) {
    SyntheticScene scene;
    scene.geometry = cfg.env.geometry;
    scene.tool_present = tool;
    scene.depth_noise_std = cfg.perception.depth_noise_std;
    scene.artifact_rate = cfg.perception.artifact_rate;
    SplitMix64 rng(seed);
    int blobs = 2 + static_cast<int>(rng.below(3));
    for (int b = 0; b < blobs; ++b) {
        double cy = rng.uniform(-0.03, 0.03);
        double cz = rng.uniform(scene.geometry.window_z_min - 0.01,
                                scene.geometry.window_z_max + 0.05);
        for (int i = 0; i < 20; ++i)
            scene.particles.emplace_back(cy + 0.008 * rng.gaussian(),
                                         cz + 0.008 * rng.gaussian());
    }
    return scene;
}

int cmd_perception_eval(const RunConfig& cfg, int argc, char** argv) {
    write_run_artifacts(cfg, argc, argv);
    const int n = cfg.perception.n_scenes;
    struct Cond {
        const char* name;
        bool tool, filter;
    };
    const Cond conds[3] = {{"spatula", true, false},
                           {"no_spatula", false, false},
                           {"filtered_spatula", true, true}};

    std::ostringstream csv;
    csv << "condition,scene,accuracy,precision,recall,specificity,f1\n";
    std::array<MetricsReport, 3> mean{};
    std::vector<std::array<MetricsReport, 3>> per_scene(n);

#pragma omp parallel for num_threads(std::max(1, cfg.ppo.workers)) schedule(dynamic)
    for (int s = 0; s < n; ++s) {
        for (int c = 0; c < 3; ++c) {
            uint64_t seed = cfg.perception.render_seed + s;
            SyntheticScene scene = random_scene(cfg, seed, conds[c].tool);
            CameraModel cam =
                default_camera(scene.geometry, cfg.perception.width,
                               cfg.perception.height, cfg.perception.camera_standoff);
            RenderOutput out = render(scene, cam, cfg.perception.width,
                                      cfg.perception.height, seed ^ 0xfeed);
            std::vector<uint8_t> region(out.vial_mask.size(), 0);
            for (size_t i = 0; i < region.size(); ++i)
                region[i] = out.vial_mask[i] | out.tool_mask[i];
            PipelineParams pp;
            pp.depth_ratio = cfg.perception.depth_ratio;
            pp.filter_tool = conds[c].filter;
            pp.seed = seed ^ 0xbeef;
            std::vector<uint8_t> pred = predict_material_mask(out.frame, region, pp);
            per_scene[s][c] = evaluate(pred, out.material_mask);
        }
    }
    for (int s = 0; s < n; ++s) {
        for (int c = 0; c < 3; ++c) {
            const MetricsReport& m = per_scene[s][c];
            csv << conds[c].name << "," << s << "," << m.accuracy << ","
                << m.precision << "," << m.recall << "," << m.specificity << ","
                << m.f1 << "\n";
            mean[c].accuracy += m.accuracy / n;
            mean[c].precision += m.precision / n;
            mean[c].recall += m.recall / n;
            mean[c].specificity += m.specificity / n;
            mean[c].f1 += m.f1 / n;
        }
    }
    write_text(cfg.out_dir + "/perception_metrics.csv", csv.str());
    for (int c = 0; c < 3; ++c)
        std::cout << conds[c].name << ": precision " << mean[c].precision
                  << ", recall " << mean[c].recall << ", f1 " << mean[c].f1 << "\n";
    return 0;
}

// stable lateral spread for visualizing the planar particle column
double particle_y(size_t index, double half_width) {
    uint64_t h = (index + 1) * 0x9e3779b97f4a7c15ull;
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return (u - 0.5) * 1.6 * half_width;
}

int cmd_render(const RunConfig& cfg, const std::string& log_path,
               uint64_t profile_seed, int argc, char** argv) {
    write_run_artifacts(cfg, argc, argv);
    std::ifstream log(log_path);
    if (!log) throw IoError("render: cannot open log " + log_path);
    std::string header;
    std::getline(log, header);
    struct Cmd {
        double f_x, tau_y, z;
    };
    std::vector<Cmd> cmds;
    std::string line;
    while (std::getline(log, line)) {
        if (line.empty()) continue;
        Cmd c{};
        int step = 0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &step, &c.f_x, &c.tau_y,
                        &c.z) != 4)
            throw IoError("render: malformed log row: " + line);
        cmds.push_back(c);
    }

    ScrapeEnv env(cfg.env);
    env.reset(profile_seed);
    CameraModel cam = default_camera(cfg.env.geometry, cfg.perception.width,
                                     cfg.perception.height,
                                     cfg.perception.camera_standoff);

    auto snapshot = [&](int frame_idx) {
        SyntheticScene scene;
        scene.geometry = cfg.env.geometry;
        const auto& particles = env.profile().particles;
        for (size_t i = 0; i < particles.size(); ++i) {
            Eigen::Vector2d p(particle_y(i, scene.vial_half_width * 0.9),
                              particles[i].z);
            if (particles[i].attached)
                scene.particles.push_back(p);
            else
                scene.removed_particles.push_back(p);
        }
        RenderOutput out = render(scene, cam, cfg.perception.width,
                                  cfg.perception.height, cfg.perception.render_seed);
        char name[64];
        std::snprintf(name, sizeof name, "/frame_%06d", frame_idx);
        save_frame(cfg.out_dir + name, out.frame);
    };

    {
        std::ofstream snap(cfg.out_dir + "/profile_initial.txt");
        save_profile(env.profile(), snap);
    }
    snapshot(0);
    for (size_t i = 0; i < cmds.size(); ++i) {
        Action a{cmds[i].f_x, cmds[i].tau_y, cmds[i].z};
        ScrapeEnv::StepOut out = env.step(a);
        if (out.dynamics_failure)
            throw NumericalError("render: joint dynamics diverged during replay");
        snapshot(static_cast<int>(i) + 1);
        if (out.terminated || out.truncated) break;
    }
    {
        std::ofstream snap(cfg.out_dir + "/profile_final.txt");
        save_profile(env.profile(), snap);
    }
    std::cout << "render: wrote " << cmds.size() + 1 << " frames to " << cfg.out_dir
              << "\n";
    return 0;
}

}  // namespace
}  // namespace scrape

int main(int argc, char** argv) {
    using namespace scrape;

    CLI::App app{"Planar scraping laboratory"};
    app.require_subcommand(1);
    app.fallthrough();   // global flags may follow the verb

    std::string config_path, out_flag, checkpoint = "", log_path = "";
    uint64_t seed_flag = 0;
    int workers_flag = -1, updates_override = -1;
    uint64_t render_profile_seed = 0;

    app.add_option("--config", config_path, "key = value configuration file");
    auto* seed_opt = app.add_option("--seed", seed_flag,
                                    "override policy/eval/render seeds");
    app.add_option("--workers", workers_flag, "parallel rollout/episode workers");
    app.add_option("--out", out_flag, "output directory");

    auto* train_cmd = app.add_subcommand("train", "train the scraping policy");
    train_cmd->add_option("--updates", updates_override,
                          "override the number of policy updates");
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    eval_cmd->add_option("--checkpoint", checkpoint, "policy checkpoint file");
    eval_cmd->add_option("--episodes", updates_override, "number of episodes")
        ->type_name("INT");
    auto* compare_cmd =
        app.add_subcommand("compare", "policy vs fixed-wrench baseline");
    compare_cmd->add_option("--checkpoint", checkpoint, "policy checkpoint file");
    auto* percep_cmd =
        app.add_subcommand("perception-eval", "synthetic perception metrics");
    percep_cmd->add_option("--scenes", updates_override, "number of scenes")
        ->type_name("INT");
    auto* render_cmd = app.add_subcommand("render", "replay a log into frames");
    render_cmd->add_option("--log", log_path, "episode step log CSV")->required();
    auto* rps = render_cmd->add_option("--profile-seed", render_profile_seed,
                                       "material profile seed of the logged episode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            try {
                cfg = load_config(config_path);
            } catch (const IoError& e) {
                // a missing/unreadable config is a usage error
                throw ConfigError(e.what());
            }
        }
        if (seed_opt->count()) {
            cfg.ppo.policy_seed = seed_flag;
            cfg.eval_seed = seed_flag;
            cfg.compare_seed = seed_flag;
            cfg.perception.render_seed = seed_flag;
        }
        if (workers_flag >= 1) cfg.ppo.workers = workers_flag;
        if (!out_flag.empty()) cfg.out_dir = out_flag;
        if (checkpoint.empty()) checkpoint = cfg.out_dir + "/checkpoint.bin";

        if (train_cmd->parsed())
            return cmd_train(cfg, updates_override, argc, argv);
        if (eval_cmd->parsed()) {
            if (updates_override >= 0) cfg.eval_episodes = updates_override;
            return cmd_eval(cfg, checkpoint, argc, argv);
        }
        if (compare_cmd->parsed()) return cmd_compare(cfg, checkpoint, argc, argv);
        if (percep_cmd->parsed()) {
            if (updates_override >= 0) cfg.perception.n_scenes = updates_override;
            return cmd_perception_eval(cfg, argc, argv);
        }
        if (render_cmd->parsed()) {
            uint64_t ps = rps->count() ? render_profile_seed : cfg.eval_seed;
            return cmd_render(cfg, log_path, ps, argc, argv);
        }
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
