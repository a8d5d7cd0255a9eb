#pragma once

#include <utility>

#include "isct/types.hpp"

namespace isct {
namespace coords {

// Orthonormal frame attached to p, transverse to the excluded axis nu:
// theta = nu x p / |nu x p|, omega = p x theta / |p|.
struct Frame {
  Vec3 theta;
  Vec3 omega;
  Vec3 p;
};

// Complex momentum on the energy shell k.k = E (bilinear square).
struct ComplexMomentum {
  CVec3 k;
  double E = 0;

  Vec3 re() const { return k.real(); }
  Vec3 im() const { return k.imag(); }
};

// Throws "degenerate frame" when p is (numerically) parallel to nu.
Frame frame_of(const Vec3& p, const Vec3& nu);

// Chart map (lambda, p) -> k with k.k = E and p.p = 2 k.p.
ComplexMomentum k_from_lambda(cplx lambda, const Vec3& p, double E, const Frame& frame);

// Chart inverse: lambda = k.(theta + i omega) / sqrt(E - p^2/4).
cplx lambda_from_k(const ComplexMomentum& k, const Vec3& p, const Frame& frame);

// Closed forms for |Re k| and |Im k| as functions of (|lambda|, |p|, E).
double re_k_norm(cplx lambda, double p_norm, double E);
double im_k_norm(cplx lambda, double p_norm, double E);

// Point on the characteristic circle xi^2 + 2 k.xi = 0, parametrized by phi:
// xi = Re k (cos phi - 1) + kperp sin phi with kperp = Im k x Re k / |Im k|.
// Throws when Im k vanishes (lambda on the unit circle).
Vec3 xi_circle(cplx lambda, const Vec3& p, double E, double phi, const Frame& frame);
Vec3 k_perp(const ComplexMomentum& k);

// Chart coordinates of the two shifted points appearing under the circle
// integral: z1 = lambda(k, -xi), z2 = lambda(k + xi, p + xi). Throws
// "arg off chart" when either target point has a degenerate frame or lies
// outside the ball |q| < 2 sqrt(E).
std::pair<cplx, cplx> z1_z2(cplx lambda, const Vec3& p, double E, double phi, const Vec3& nu);

// Boundary directions gamma(+-) = +- p x (k - p/2) / (|p| |k - p/2|) for a
// real momentum on the circle |lambda| = 1.
std::pair<Vec3, Vec3> gamma_pm(cplx lambda, const Vec3& p, double E, const Frame& frame);

// Angle psi with p = -xi(psi): sin(psi/2) = |p| / (2 |Re k|) with the sign
// fixed by p . kperp.
double psi_of(const ComplexMomentum& k, const Vec3& p);

}  // namespace coords
}  // namespace isct
