#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellipara {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

struct Vec3 {
    double x{}, y{}, z{};

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double s, Vec3 v) { return v *= s; }
inline Vec3 operator*(Vec3 v, double s) { return v *= s; }
inline Vec3 operator/(Vec3 v, double s) { return v *= (1.0 / s); }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : v;
}

// ---------------------------------------------------------------------------
// ComplexPoint: extended complex plane. Infinity is an explicit state so the
// images of poles never turn into NaN.
// ---------------------------------------------------------------------------

struct ComplexPoint {
    cplx value{0.0, 0.0};
    bool infinite = false;

    ComplexPoint() = default;
    ComplexPoint(double re, double im) : value(re, im) {}
    ComplexPoint(cplx z) : value(z) {}

    static ComplexPoint infinity() {
        ComplexPoint p;
        p.infinite = true;
        return p;
    }

    bool is_finite() const { return !infinite; }
};

inline bool approx_equal(const ComplexPoint& a, const ComplexPoint& b, double tol) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return std::abs(a.value - b.value) <= tol;
}

// ---------------------------------------------------------------------------
// EllipsoidRadii
// ---------------------------------------------------------------------------

struct EllipsoidRadii {
    double a = 1.0, b = 1.0, c = 1.0;

    EllipsoidRadii() = default;
    EllipsoidRadii(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
        if (a <= 0.0 || b <= 0.0 || c <= 0.0)
            throw std::invalid_argument("ellipsoid radii must be positive");
    }

    // Residual of the implicit equation at p; zero on the surface.
    double residual(const Vec3& p) const {
        return (p.x / a) * (p.x / a) + (p.y / b) * (p.y / b) + (p.z / c) * (p.z / c) - 1.0;
    }

    // Outward (non-unit) normal of the implicit surface at p.
    Vec3 outward_normal(const Vec3& p) const {
        return {p.x / (a * a), p.y / (b * b), p.z / (c * c)};
    }
};

enum class Pole { North, South };

// ---------------------------------------------------------------------------
// PlanarEmbedding: per-vertex complex coordinates sharing the source mesh's
// face list. At most one vertex may sit at infinity (the north pole vertex
// after the Mobius alignment).
// ---------------------------------------------------------------------------

struct PlanarEmbedding {
    std::vector<cplx> pos;
    int infinity_vertex = -1;  // -1 when every vertex is finite

    std::size_t size() const { return pos.size(); }
    bool is_infinite(int v) const { return v == infinity_vertex; }
};

// ---------------------------------------------------------------------------
// BeltramiField: per-face complex coefficient of a piecewise-linear map.
// Faces of orientation-reversing or degenerate maps are flagged inadmissible.
// ---------------------------------------------------------------------------

struct BeltramiField {
    std::vector<cplx> mu;
    std::vector<bool> admissible;  // |mu| < 1 and orientation-preserving

    std::size_t size() const { return mu.size(); }
};

}  // namespace ellipara
