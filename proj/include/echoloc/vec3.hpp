#pragma once

#include <cmath>
#include <iosfwd>

namespace echoloc {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }

    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? *this / n : Vec3{};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.dot(b); }
inline Vec3 cross(const Vec3& a, const Vec3& b) { return a.cross(b); }
inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Angle between two vectors in [0, pi]; robust against rounding at the ends.
inline double angle_between(const Vec3& a, const Vec3& b) {
    double d = a.norm() * b.norm();
    if (d <= 0.0) return 0.0;
    double c = a.dot(b) / d;
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}

// Rotate v about unit axis by angle (Rodrigues).
inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
    double c = std::cos(angle);
    double s = std::sin(angle);
    return v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c));
}

// Any unit vector perpendicular to a (itself assumed non-zero).
inline Vec3 any_perpendicular(const Vec3& a) {
    Vec3 ref = std::fabs(a.x) < 0.9 * a.norm() ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return a.cross(ref).normalized();
}

// Orientation quaternion carried with listener poses. Directions in this
// codebase are world-frame, so the quaternion is I/O payload only.
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Aabb {
    Vec3 lo{0, 0, 0};
    Vec3 hi{0, 0, 0};

    void expand(const Vec3& p) {
        lo.x = std::fmin(lo.x, p.x); lo.y = std::fmin(lo.y, p.y); lo.z = std::fmin(lo.z, p.z);
        hi.x = std::fmax(hi.x, p.x); hi.y = std::fmax(hi.y, p.y); hi.z = std::fmax(hi.z, p.z);
    }
    void expand(const Aabb& b) { expand(b.lo); expand(b.hi); }

    Vec3 center() const { return (lo + hi) * 0.5; }
    Vec3 extent() const { return hi - lo; }

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }

    Aabb inflated(double r) const {
        return {lo - Vec3{r, r, r}, hi + Vec3{r, r, r}};
    }
};

}  // namespace echoloc
