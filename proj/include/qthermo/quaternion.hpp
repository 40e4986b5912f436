#pragma once

#include <cmath>

#include "qthermo/bloch.hpp"

namespace qthermo {

/// Unit quaternion representing a rotation; vectors transform as v' = q v q*.
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Quaternion identity() { return {}; }

    /// Rotation by `angle` about +y.
    static Quaternion about_y(double angle) {
        return {std::cos(0.5 * angle), 0.0, std::sin(0.5 * angle), 0.0};
    }

    /// Rotation by `angle` about +z.
    static Quaternion about_z(double angle) {
        return {std::cos(0.5 * angle), 0.0, 0.0, std::sin(0.5 * angle)};
    }

    Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    Quaternion conjugate() const { return {w, -x, -y, -z}; }
    Quaternion operator-() const { return {-w, -x, -y, -z}; }

    double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }

    BlochVector rotate(const BlochVector& v) const {
        // v' = v + 2 u x (u x v + w v), u = (x,y,z)
        const BlochVector u{x, y, z};
        const BlochVector t = u.cross(v) * 2.0;
        return v + t * w + u.cross(t);
    }

    /// Rotation by the inverse (conjugate) quaternion.
    BlochVector rotate_back(const BlochVector& v) const { return conjugate().rotate(v); }
};

}  // namespace qthermo
