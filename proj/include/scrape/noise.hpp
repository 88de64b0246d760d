#pragma once
#include <array>
#include <cstdint>

namespace scrape {

// Seeded 2-D Perlin gradient noise. Values are exactly 0 at integer
// lattice points and scaled so the single-octave range is [-1, 1].
struct PerlinField {
    uint64_t seed = 0;
    double frequency = 8.0;      // cycles per unit length, applied by fractal2
    int octaves = 3;
    double persistence = 0.5;    // amplitude decay per octave, in (0, 1]
    std::array<uint8_t, 512> permutation{};  // seeded shuffle of 0..255, doubled

    static PerlinField make(uint64_t seed, double frequency = 8.0,
                            int octaves = 3, double persistence = 0.5);
};

// Slope bound for perlin2; dense gradient sampling measures a max of
// about 2.81, the constant keeps margin and is re-verified by the tests.
inline constexpr double kPerlinLipschitz = 3.5;

// Quintic smoothstep 6t^5 - 15t^4 + 10t^3; rejects t outside [0, 1].
double fade(double t);

// Single octave at the raw lattice scale (frequency not applied).
double perlin2(const PerlinField& field, double u, double v);

// Octave sum at field.frequency * 2^o, renormalized back into [-1, 1].
double fractal2(const PerlinField& field, double u, double v);

// Affine map of fractal2 onto a dislodgement-force interval [f_min, f_max].
double sample_threshold(const PerlinField& field, double u, double v,
                        double f_min, double f_max);

}  // namespace scrape
