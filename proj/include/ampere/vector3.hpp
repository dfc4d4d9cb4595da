#pragma once

#include <cmath>
#include <ostream>

namespace ampere {

/// A point or direction in R^3.
struct Vector3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vector3() = default;
    constexpr Vector3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vector3& operator+=(const Vector3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vector3& operator-=(const Vector3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vector3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    constexpr Vector3& operator/=(double s) { x /= s; y /= s; z /= s; return *this; }

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend constexpr bool operator==(const Vector3&, const Vector3&) = default;
};

constexpr Vector3 operator+(Vector3 a, const Vector3& b) { return a += b; }
constexpr Vector3 operator-(Vector3 a, const Vector3& b) { return a -= b; }
constexpr Vector3 operator-(const Vector3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vector3 operator*(Vector3 a, double s) { return a *= s; }
constexpr Vector3 operator*(double s, Vector3 a) { return a *= s; }
constexpr Vector3 operator/(Vector3 a, double s) { return a /= s; }

constexpr double dot(const Vector3& a, const Vector3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vector3 cross(const Vector3& a, const Vector3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vector3& a) { return std::sqrt(dot(a, a)); }
constexpr double norm2(const Vector3& a) { return dot(a, a); }

// Magnitude used by the adaptive integrators; overloaded so that scalar and
// vector integrands share one code path.
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Vector3& v) { return norm(v); }

inline bool is_finite(const Vector3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

inline Vector3 normalized(const Vector3& a) { return a / norm(a); }

inline std::ostream& operator<<(std::ostream& os, const Vector3& v) {
    return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

}  // namespace ampere
