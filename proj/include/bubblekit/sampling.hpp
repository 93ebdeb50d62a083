#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace bubblekit {

// Portable draws: the standard distributions are implementation-defined, so
// seeded runs would not reproduce across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 == 0.0) u1 = uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Eigen::VectorXd random_direction(std::mt19937_64& rng, int n) {
    Eigen::VectorXd v(n);
    do {
        for (int i = 0; i < n; ++i) v[i] = standard_normal(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

}  // namespace bubblekit
