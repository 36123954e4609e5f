#include "ellipara/projections.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ellipara {

ComplexPoint stereographic(const Vec3& p, Pole pole) {
    return ellip_stereographic(p, EllipsoidRadii{}, pole);
}

Vec3 inv_stereographic(const ComplexPoint& z, Pole pole) {
    return inv_ellip_stereographic(z, EllipsoidRadii{}, pole);
}

ComplexPoint pole_swap(const ComplexPoint& z) {
    if (z.infinite) return ComplexPoint(0.0, 0.0);
    double n2 = std::norm(z.value);
    if (n2 == 0.0) return ComplexPoint::infinity();
    return ComplexPoint(z.value / n2);
}

MobiusAlignment::MobiusAlignment(cplx z0_, cplx z1_, cplx z2_) : z0(z0_), z1(z1_), z2(z2_) {
    if (z0 == z1) throw std::invalid_argument("mobius alignment requires z0 != z1");
    theta = -std::arg((z2 - z0) / (z2 - z1));
    if (theta >= std::numbers::pi) theta -= 2.0 * std::numbers::pi;
}

ComplexPoint mobius_align(const ComplexPoint& z, const MobiusAlignment& m) {
    const cplx phase = std::polar(1.0, m.theta);
    if (z.infinite) return ComplexPoint(phase);
    if (z.value == m.z1) return ComplexPoint::infinity();
    return ComplexPoint(phase * (z.value - m.z0) / (z.value - m.z1));
}

ComplexPoint ellip_stereographic(const Vec3& p, const EllipsoidRadii& r, Pole pole) {
    const double s = (pole == Pole::North) ? 1.0 : -1.0;
    const double denom = 1.0 - s * p.z / r.c;
    if (denom == 0.0) return ComplexPoint::infinity();
    return ComplexPoint((p.x / r.a) / denom, (p.y / r.b) / denom);
}

Vec3 inv_ellip_stereographic(const ComplexPoint& z, const EllipsoidRadii& r, Pole pole) {
    const double s = (pole == Pole::North) ? 1.0 : -1.0;
    if (z.infinite) return {0.0, 0.0, s * r.c};
    const double x = z.value.real(), y = z.value.imag();
    const double n2 = x * x + y * y;
    // Evaluate in reciprocal form for very large |z| to avoid overflow.
    if (n2 > 1e16) {
        const double inv = 1.0 / n2;
        const double denom = inv + 1.0;
        return {2.0 * r.a * (x * inv) / denom, 2.0 * r.b * (y * inv) / denom,
                s * r.c * (1.0 - inv) / denom};
    }
    const double denom = 1.0 + n2;
    return {2.0 * r.a * x / denom, 2.0 * r.b * y / denom, s * r.c * (n2 - 1.0) / denom};
}

cplx mu_inv_ellip(cplx z, const EllipsoidRadii& r) {
    // The common (1+|z|^2)^4 denominator of E, F, G cancels in mu, so only
    // the numerators are evaluated. For very large |z| the point is pulled
    // back to |z| = 1e8; mu is continuous and flat at infinity.
    double x = z.real(), y = z.imag();
    const double n = std::hypot(x, y);
    if (n > 1e8) {
        x *= 1e8 / n;
        y *= 1e8 / n;
    }
    const double a2 = r.a * r.a, b2 = r.b * r.b, c2 = r.c * r.c;
    const double u = -x * x + y * y + 1.0;  // -(x^2) + y^2 + 1
    const double v = x * x - y * y + 1.0;
    const double xy = x * y;

    const double E = 4.0 * a2 * u * u + 16.0 * b2 * xy * xy + 16.0 * c2 * x * x;
    const double F = -8.0 * a2 * xy * u - 8.0 * b2 * xy * v + 16.0 * c2 * xy;
    const double G = 16.0 * a2 * xy * xy + 4.0 * b2 * v * v + 16.0 * c2 * y * y;

    const double det = std::max(E * G - F * F, 0.0);
    const double denom = E + G + 2.0 * std::sqrt(det);
    if (denom <= 0.0) return {0.0, 0.0};
    return cplx(E - G, 2.0 * F) / denom;
}

cplx face_mu_average(cplx m1, cplx m2, cplx m3) { return (m1 + m2 + m3) / 3.0; }

double ellipsoid_area(const EllipsoidRadii& r) {
    const double p = kThomsenP;
    const double s = (std::pow(r.a * r.b, p) + std::pow(r.b * r.c, p) + std::pow(r.c * r.a, p)) / 3.0;
    return 4.0 * std::numbers::pi * std::pow(s, 1.0 / p);
}

std::array<double, 3> ellipsoid_area_grad(const EllipsoidRadii& r) {
    const double p = kThomsenP;
    const double ap = std::pow(r.a, p), bp = std::pow(r.b, p), cp = std::pow(r.c, p);
    const double s = ap * bp + bp * cp + cp * ap;
    const double common = 4.0 * std::numbers::pi / std::pow(3.0, 1.0 / p) *
                          std::pow(s, 1.0 / p - 1.0);
    return {common * std::pow(r.a, p - 1.0) * (bp + cp),
            common * std::pow(r.b, p - 1.0) * (ap + cp),
            common * std::pow(r.c, p - 1.0) * (ap + bp)};
}

}  // namespace ellipara
