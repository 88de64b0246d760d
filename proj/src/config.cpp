#include "scrape/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace scrape {

namespace {

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    double d = parse_double(key, v);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("config: expected integer for '" + key + "': " + v);
    return i;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: expected unsigned integer for '" + key + "': " + v);
    return out;
}

std::string fmt_double(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

struct Binding {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

using Registry = std::map<std::string, Binding>;

const Registry& registry() {
    static const Registry reg = [] {
        Registry r;
        auto add_d = [&r](const std::string& key, auto ref) {
            r[key] = Binding{
                [ref](const RunConfig& c) {
                    return fmt_double(ref(const_cast<RunConfig&>(c)));
                },
                [ref](RunConfig& c, const std::string& k, const std::string& v) {
                    ref(c) = parse_double(k, v);
                }};
        };
        auto add_i = [&r](const std::string& key, auto ref) {
            r[key] = Binding{
                [ref](const RunConfig& c) {
                    return std::to_string(ref(const_cast<RunConfig&>(c)));
                },
                [ref](RunConfig& c, const std::string& k, const std::string& v) {
                    ref(c) = parse_int(k, v);
                }};
        };
        auto add_u = [&r](const std::string& key, auto ref) {
            r[key] = Binding{
                [ref](const RunConfig& c) {
                    return std::to_string(ref(const_cast<RunConfig&>(c)));
                },
                [ref](RunConfig& c, const std::string& k, const std::string& v) {
                    ref(c) = parse_u64(k, v);
                }};
        };
        auto add_s = [&r](const std::string& key, auto ref) {
            r[key] = Binding{
                [ref](const RunConfig& c) {
                    return ref(const_cast<RunConfig&>(c));
                },
                [ref](RunConfig& c, const std::string&, const std::string& v) {
                    ref(c) = v;
                }};
        };

        // arm geometry and inertia
        for (int i = 0; i < 4; ++i) {
            add_d("arm_l" + std::to_string(i + 1),
                  [i](RunConfig& c) -> double& { return c.env.arm.link_lengths[i]; });
            add_d("arm_m" + std::to_string(i + 1),
                  [i](RunConfig& c) -> double& { return c.env.arm.link_masses[i]; });
        }
        add_d("arm_gravity", [](RunConfig& c) -> double& { return c.env.arm.gravity; });

        // impedance gains
        add_d("stiffness_x", [](RunConfig& c) -> double& { return c.env.impedance.stiffness[0]; });
        add_d("stiffness_z", [](RunConfig& c) -> double& { return c.env.impedance.stiffness[1]; });
        add_d("stiffness_pitch", [](RunConfig& c) -> double& { return c.env.impedance.stiffness[2]; });
        add_d("damping_x", [](RunConfig& c) -> double& { return c.env.impedance.damping[0]; });
        add_d("damping_z", [](RunConfig& c) -> double& { return c.env.impedance.damping[1]; });
        add_d("damping_pitch", [](RunConfig& c) -> double& { return c.env.impedance.damping[2]; });
        add_d("nullspace_stiffness", [](RunConfig& c) -> double& { return c.env.impedance.nullspace_stiffness; });
        add_d("nullspace_damping", [](RunConfig& c) -> double& { return c.env.impedance.nullspace_damping; });

        // vial geometry and wall contact
        add_d("wall_x", [](RunConfig& c) -> double& { return c.env.geometry.wall_x; });
        add_d("window_z_min", [](RunConfig& c) -> double& { return c.env.geometry.window_z_min; });
        add_d("window_z_max", [](RunConfig& c) -> double& { return c.env.geometry.window_z_max; });
        add_d("bottom_z", [](RunConfig& c) -> double& { return c.env.geometry.bottom_z; });
        add_d("rim_z", [](RunConfig& c) -> double& { return c.env.geometry.rim_z; });
        add_d("wall_stiffness", [](RunConfig& c) -> double& { return c.env.wall.stiffness; });
        add_d("wall_damping", [](RunConfig& c) -> double& { return c.env.wall.damping; });
        add_d("wall_mu", [](RunConfig& c) -> double& { return c.env.wall.mu; });

        // environment / material / reward
        add_i("horizon", [](RunConfig& c) -> int& { return c.env.horizon; });
        add_i("policy_hz", [](RunConfig& c) -> int& { return c.env.policy_hz; });
        add_i("control_hz", [](RunConfig& c) -> int& { return c.env.control_hz; });
        add_i("physics_hz", [](RunConfig& c) -> int& { return c.env.physics_hz; });
        add_i("particle_count", [](RunConfig& c) -> int& { return c.env.particle_count; });
        add_d("f_min", [](RunConfig& c) -> double& { return c.env.f_min; });
        add_d("f_max", [](RunConfig& c) -> double& { return c.env.f_max; });
        add_d("capture_radius", [](RunConfig& c) -> double& { return c.env.capture_radius; });
        add_d("milestone_50_bonus", [](RunConfig& c) -> double& { return c.env.milestone_50_bonus; });
        add_d("milestone_90_bonus", [](RunConfig& c) -> double& { return c.env.milestone_90_bonus; });
        add_d("lambda_c", [](RunConfig& c) -> double& { return c.env.lambda_c; });
        add_d("reward_eps", [](RunConfig& c) -> double& { return c.env.reward_eps; });
        add_d("friction_min", [](RunConfig& c) -> double& { return c.env.friction_min; });
        add_d("friction_max", [](RunConfig& c) -> double& { return c.env.friction_max; });
        add_u("friction_seed", [](RunConfig& c) -> uint64_t& { return c.env.friction_seed; });
        add_u("cluster_seed", [](RunConfig& c) -> uint64_t& { return c.env.cluster_seed; });
        add_d("f_x_max", [](RunConfig& c) -> double& { return c.env.f_x_max; });
        add_d("tau_y_max", [](RunConfig& c) -> double& { return c.env.tau_y_max; });

        // agent hyperparameters
        add_d("clip_epsilon", [](RunConfig& c) -> double& { return c.ppo.clip_epsilon; });
        add_d("gamma", [](RunConfig& c) -> double& { return c.ppo.gamma; });
        add_d("gae_lambda", [](RunConfig& c) -> double& { return c.ppo.gae_lambda; });
        add_d("learning_rate", [](RunConfig& c) -> double& { return c.ppo.learning_rate; });
        add_i("epochs_per_update", [](RunConfig& c) -> int& { return c.ppo.epochs_per_update; });
        add_i("minibatch_size", [](RunConfig& c) -> int& { return c.ppo.minibatch_size; });
        add_i("rollout_steps", [](RunConfig& c) -> int& { return c.ppo.rollout_steps; });
        add_d("value_coef", [](RunConfig& c) -> double& { return c.ppo.value_coef; });
        add_d("entropy_coef", [](RunConfig& c) -> double& { return c.ppo.entropy_coef; });
        add_d("max_grad_norm", [](RunConfig& c) -> double& { return c.ppo.max_grad_norm; });
        add_i("total_updates", [](RunConfig& c) -> int& { return c.ppo.total_updates; });
        add_i("num_envs", [](RunConfig& c) -> int& { return c.ppo.num_envs; });
        add_i("workers", [](RunConfig& c) -> int& { return c.ppo.workers; });
        add_u("policy_seed", [](RunConfig& c) -> uint64_t& { return c.ppo.policy_seed; });
        add_i("checkpoint_interval", [](RunConfig& c) -> int& { return c.ppo.checkpoint_interval; });

        // perception
        add_i("percep_width", [](RunConfig& c) -> int& { return c.perception.width; });
        add_i("percep_height", [](RunConfig& c) -> int& { return c.perception.height; });
        add_d("camera_standoff", [](RunConfig& c) -> double& { return c.perception.camera_standoff; });
        add_d("depth_noise_std", [](RunConfig& c) -> double& { return c.perception.depth_noise_std; });
        add_d("artifact_rate", [](RunConfig& c) -> double& { return c.perception.artifact_rate; });
        add_d("depth_ratio", [](RunConfig& c) -> double& { return c.perception.depth_ratio; });
        add_d("roi_top_fraction", [](RunConfig& c) -> double& { return c.perception.roi.top; });
        add_d("roi_side_fraction", [](RunConfig& c) -> double& { return c.perception.roi.side; });
        add_i("n_scenes", [](RunConfig& c) -> int& { return c.perception.n_scenes; });
        add_u("render_seed", [](RunConfig& c) -> uint64_t& { return c.perception.render_seed; });

        // evaluation / comparison / output
        add_i("eval_episodes", [](RunConfig& c) -> int& { return c.eval_episodes; });
        add_u("eval_seed", [](RunConfig& c) -> uint64_t& { return c.eval_seed; });
        add_i("compare_profiles", [](RunConfig& c) -> int& { return c.compare_profiles; });
        add_i("episodes_per_profile", [](RunConfig& c) -> int& { return c.episodes_per_profile; });
        add_u("compare_seed", [](RunConfig& c) -> uint64_t& { return c.compare_seed; });
        add_s("out_dir", [](RunConfig& c) -> std::string& { return c.out_dir; });
        return r;
    }();
    return reg;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not key = value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = registry().find(key);
        if (it == registry().end())
            throw ConfigError("config: unknown key '" + key + "' (line " +
                              std::to_string(lineno) + ")");
        it->second.set(config, key, value);
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    out << "# " << kFormatVersion << " resolved configuration\n";
    for (const auto& [key, binding] : registry())
        out << key << " = " << binding.get(config) << "\n";
    return out.str();
}

}  // namespace scrape
