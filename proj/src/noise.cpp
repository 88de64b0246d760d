#include "scrape/noise.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scrape/rng.hpp"

namespace scrape {

namespace {

// 8 unit gradients; diagonals normalized so every gradient has length 1.
constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kGradX[8] = {1, -1, 0, 0, kInvSqrt2, -kInvSqrt2, kInvSqrt2, -kInvSqrt2};
constexpr double kGradZ[8] = {0, 0, 1, -1, kInvSqrt2, kInvSqrt2, -kInvSqrt2, -kInvSqrt2};

// Max |value| of 2-D unit-gradient Perlin is sqrt(2)/2; rescale to [-1, 1].
constexpr double kRangeScale = 1.4142135623730951;

inline double lerp(double t, double a, double b) { return a + t * (b - a); }

inline double grad_dot(const PerlinField& f, int xi, int zi, double dx, double dz) {
    int h = f.permutation[(f.permutation[xi & 255] + (zi & 255)) & 255] & 7;
    return kGradX[h] * dx + kGradZ[h] * dz;
}

}  // namespace

PerlinField PerlinField::make(uint64_t seed, double frequency, int octaves,
                              double persistence) {
    if (octaves < 1) throw std::invalid_argument("octaves must be >= 1");
    if (persistence <= 0.0 || persistence > 1.0)
        throw std::invalid_argument("persistence must be in (0, 1]");
    PerlinField f;
    f.seed = seed;
    f.frequency = frequency;
    f.octaves = octaves;
    f.persistence = persistence;

    std::array<uint8_t, 256> table{};
    std::iota(table.begin(), table.end(), 0);
    SplitMix64 rng(seed);
    for (int i = 255; i > 0; --i) {
        int j = static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1));
        std::swap(table[i], table[j]);
    }
    for (int i = 0; i < 512; ++i) f.permutation[i] = table[i & 255];
    return f;
}

double fade(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("fade: t outside [0, 1]");
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

double perlin2(const PerlinField& field, double u, double v) {
    double fu = std::floor(u);
    double fv = std::floor(v);
    int xi = static_cast<int>(fu);
    int zi = static_cast<int>(fv);
    double du = u - fu;
    double dv = v - fv;

    double n00 = grad_dot(field, xi, zi, du, dv);
    double n10 = grad_dot(field, xi + 1, zi, du - 1.0, dv);
    double n01 = grad_dot(field, xi, zi + 1, du, dv - 1.0);
    double n11 = grad_dot(field, xi + 1, zi + 1, du - 1.0, dv - 1.0);

    double su = fade(du);
    double sv = fade(dv);
    return kRangeScale * lerp(sv, lerp(su, n00, n10), lerp(su, n01, n11));
}

double fractal2(const PerlinField& field, double u, double v) {
    double sum = 0.0;
    double amplitude = 1.0;
    double total_amplitude = 0.0;
    double freq = field.frequency;
    for (int o = 0; o < field.octaves; ++o) {
        sum += amplitude * perlin2(field, u * freq, v * freq);
        total_amplitude += amplitude;
        amplitude *= field.persistence;
        freq *= 2.0;
    }
    return sum / total_amplitude;
}

double sample_threshold(const PerlinField& field, double u, double v,
                        double f_min, double f_max) {
    if (!(f_min < f_max) || f_min <= 0.0)
        throw std::invalid_argument("sample_threshold: need 0 < f_min < f_max");
    double n = fractal2(field, u, v);
    return f_min + 0.5 * (n + 1.0) * (f_max - f_min);
}

}  // namespace scrape
