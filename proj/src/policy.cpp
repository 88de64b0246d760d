#include "scrape/policy.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace scrape {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;   // 0.5 * log(2*pi)
constexpr double kSquashEps = 1e-8;
}

GaussianPolicy GaussianPolicy::make(int obs_dim, SplitMix64& rng, int hidden) {
    GaussianPolicy p;
    p.net = Mlp::make({obs_dim, hidden, hidden, 3}, rng);
    return p;
}

ValueNet ValueNet::make(int obs_dim, SplitMix64& rng, int hidden) {
    ValueNet v;
    v.net = Mlp::make({obs_dim, hidden, hidden, 1}, rng, 1.0);
    return v;
}

GaussianPolicy::Sample GaussianPolicy::act(const Eigen::VectorXd& obs,
                                           SplitMix64& rng) const {
    Eigen::Vector3d mean = net.forward(obs);
    if (!mean.allFinite())
        throw std::runtime_error("GaussianPolicy::act: non-finite network output");
    Sample s;
    for (int i = 0; i < 3; ++i) {
        double sigma = std::exp(log_std[i]);
        s.u[i] = mean[i] + sigma * rng.gaussian();
        s.action[i] = std::tanh(s.u[i]);
    }
    s.log_prob = log_prob(obs, s.u);
    return s;
}

Eigen::Vector3d GaussianPolicy::act_deterministic(const Eigen::VectorXd& obs) const {
    Eigen::Vector3d mean = net.forward(obs);
    if (!mean.allFinite())
        throw std::runtime_error("GaussianPolicy: non-finite network output");
    return mean.array().tanh();
}

double GaussianPolicy::log_prob(const Eigen::VectorXd& obs,
                                const Eigen::Vector3d& u) const {
    Eigen::Vector3d mean = net.forward(obs);
    double lp = 0.0;
    for (int i = 0; i < 3; ++i) {
        double sigma = std::exp(log_std[i]);
        double z = (u[i] - mean[i]) / sigma;
        lp += -0.5 * z * z - log_std[i] - kLogSqrt2Pi;
        double a = std::tanh(u[i]);
        lp -= std::log(1.0 - a * a + kSquashEps);
    }
    return lp;
}

double GaussianPolicy::entropy() const {
    double h = 0.0;
    for (int i = 0; i < 3; ++i) h += log_std[i] + kLogSqrt2Pi + 0.5;
    return h;
}

namespace {

uint64_t fnv1a(const std::vector<uint8_t>& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

struct Reader {
    const std::vector<uint8_t>& b;
    size_t pos = 0;
    uint32_t u32() {
        if (pos + 4 > b.size()) throw std::runtime_error("checkpoint: truncated");
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[pos++]) << (8 * i);
        return v;
    }
    double f64() {
        if (pos + 8 > b.size()) throw std::runtime_error("checkpoint: truncated");
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[pos++]) << (8 * i);
        double d;
        std::memcpy(&d, &v, 8);
        return d;
    }
};

void put_matrix(std::vector<uint8_t>& payload, const Eigen::MatrixXd& M) {
    put_u32(payload, static_cast<uint32_t>(M.rows()));
    put_u32(payload, static_cast<uint32_t>(M.cols()));
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) put_f64(payload, M(i, j));
}

Eigen::MatrixXd read_matrix(Reader& r) {
    uint32_t rows = r.u32(), cols = r.u32();
    if (rows > 1u << 20 || cols > 1u << 20)
        throw std::runtime_error("checkpoint: implausible layer shape");
    Eigen::MatrixXd M(rows, cols);
    for (uint32_t i = 0; i < rows; ++i)
        for (uint32_t j = 0; j < cols; ++j) M(i, j) = r.f64();
    return M;
}

}  // namespace

void save_checkpoint(const std::string& path, const GaussianPolicy& policy,
                     const ValueNet& value) {
    std::vector<uint8_t> payload;
    uint32_t layers = static_cast<uint32_t>(
        2 * (policy.net.weights.size() + value.net.weights.size()));
    put_u32(payload, layers);
    auto put_net = [&](const Mlp& n) {
        for (size_t l = 0; l < n.weights.size(); ++l) {
            put_matrix(payload, n.weights[l]);
            put_matrix(payload, n.biases[l]);
        }
    };
    put_net(policy.net);
    put_net(value.net);
    for (int i = 0; i < 3; ++i) put_f64(payload, policy.log_std[i]);

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    const char magic[4] = {'S', 'C', 'R', 'P'};
    uint16_t version = 1;
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(&version), 2);
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
    uint64_t sum = fnv1a(payload);
    for (int i = 0; i < 8; ++i) {
        char c = static_cast<char>(sum >> (8 * i));
        os.write(&c, 1);
    }
    if (!os) throw std::runtime_error("save_checkpoint: write failed");
}

void load_checkpoint(const std::string& path, GaussianPolicy& policy,
                     ValueNet& value) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::vector<uint8_t> all((std::istreambuf_iterator<char>(is)),
                             std::istreambuf_iterator<char>());
    if (all.size() < 14 || all[0] != 'S' || all[1] != 'C' || all[2] != 'R' ||
        all[3] != 'P')
        throw std::runtime_error("load_checkpoint: bad magic");
    uint16_t version = static_cast<uint16_t>(all[4] | (all[5] << 8));
    if (version != 1) throw std::runtime_error("load_checkpoint: unknown version");

    std::vector<uint8_t> payload(all.begin() + 6, all.end() - 8);
    uint64_t stored = 0;
    for (int i = 0; i < 8; ++i)
        stored |= static_cast<uint64_t>(all[all.size() - 8 + i]) << (8 * i);
    if (fnv1a(payload) != stored)
        throw std::runtime_error("load_checkpoint: checksum mismatch");

    Reader r{payload};
    uint32_t layers = r.u32();
    std::vector<Eigen::MatrixXd> mats;
    for (uint32_t l = 0; l < layers; ++l) mats.push_back(read_matrix(r));
    for (int i = 0; i < 3; ++i) policy.log_std[i] = r.f64();

    size_t np = policy.net.weights.size(), nv = value.net.weights.size();
    if (mats.size() != 2 * (np + nv))
        throw std::runtime_error("load_checkpoint: layer count mismatch");
    size_t k = 0;
    for (size_t l = 0; l < np; ++l) {
        policy.net.weights[l] = mats[k++];
        policy.net.biases[l] = mats[k++];
    }
    for (size_t l = 0; l < nv; ++l) {
        value.net.weights[l] = mats[k++];
        value.net.biases[l] = mats[k++];
    }
}

}  // namespace scrape
