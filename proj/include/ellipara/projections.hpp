#pragma once
#include "ellipara/types.hpp"

namespace ellipara {

// ---------------------------------------------------------------------------
// Closed-form maps: stereographic projections, Mobius alignment, ellipsoidal
// stereographic projections, the analytic Beltrami coefficient of the inverse
// ellipsoidal projection, and the Thomsen ellipsoid area with derivatives.
// All pure functions.
// ---------------------------------------------------------------------------

// Exponent of the Knud Thomsen surface-area approximation.
inline constexpr double kThomsenP = 1.6075;

ComplexPoint stereographic(const Vec3& p, Pole pole);
Vec3 inv_stereographic(const ComplexPoint& z, Pole pole);

// z -> z / |z|^2, the composition of the two opposite-pole projections.
// Involution; 0 <-> infinity.
ComplexPoint pole_swap(const ComplexPoint& z);

// ---------------------------------------------------------------------------
// Mobius alignment g(z) = e^{i theta} (z - z0)/(z - z1):
// g(z0) = 0, g(z1) = infinity, g(z2) on the positive real axis.
// ---------------------------------------------------------------------------

struct MobiusAlignment {
    cplx z0, z1, z2;
    double theta = 0.0;

    MobiusAlignment(cplx z0_, cplx z1_, cplx z2_);
};

ComplexPoint mobius_align(const ComplexPoint& z, const MobiusAlignment& m);

// ---------------------------------------------------------------------------
// Ellipsoidal stereographic projections
// ---------------------------------------------------------------------------

ComplexPoint ellip_stereographic(const Vec3& p, const EllipsoidRadii& r, Pole pole);
Vec3 inv_ellip_stereographic(const ComplexPoint& z, const EllipsoidRadii& r, Pole pole);

// Analytic Beltrami coefficient of the inverse north-pole ellipsoidal
// projection at a finite z, via the first fundamental form. |mu| < 1; zero
// identically when a == b == c.
cplx mu_inv_ellip(cplx z, const EllipsoidRadii& r);

// Arithmetic mean of the three vertex values, the per-face coefficient fed
// to the LBS.
cplx face_mu_average(cplx m1, cplx m2, cplx m3);

// ---------------------------------------------------------------------------
// Thomsen area approximation and its gradient
// ---------------------------------------------------------------------------

double ellipsoid_area(const EllipsoidRadii& r);
std::array<double, 3> ellipsoid_area_grad(const EllipsoidRadii& r);

}  // namespace ellipara
