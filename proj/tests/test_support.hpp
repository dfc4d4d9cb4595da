#pragma once

#include <cmath>
#include <random>

#include "ampere/vector3.hpp"

namespace ampere::testing {

inline constexpr std::uint64_t kSeed = 0x5eed'1234ULL;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector3 random_vector(std::mt19937_64& rng, double scale = 1.0) {
    return {uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
}

inline Vector3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector3 v;
    do v = {g(rng), g(rng), g(rng)};
    while (norm(v) < 1e-3);
    return normalized(v);
}

/// Proper rotation as three columns, from a random unit quaternion.
struct Rotation {
    Vector3 c0, c1, c2;
    Vector3 operator()(const Vector3& v) const { return v.x * c0 + v.y * c1 + v.z * c2; }
};

inline Rotation random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n, x /= n, y /= n, z /= n;
    return {{1 - 2 * (y * y + z * z), 2 * (x * y + w * z), 2 * (x * z - w * y)},
            {2 * (x * y - w * z), 1 - 2 * (x * x + z * z), 2 * (y * z + w * x)},
            {2 * (x * z + w * y), 2 * (y * z - w * x), 1 - 2 * (x * x + y * y)}};
}

inline double max_abs_diff(const Vector3& a, const Vector3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

}  // namespace ampere::testing
