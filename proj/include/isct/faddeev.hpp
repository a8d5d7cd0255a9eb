#pragma once

#include "isct/config.hpp"
#include "isct/coords.hpp"
#include "isct/fields.hpp"

namespace isct {
namespace faddeev {

// Generalized amplitude restricted to one (gamma, k): h(l) on the sphere.
struct FaddeevSlice {
  Vec3 k;
  Vec3 gamma;
  VectorXcd h;
  int iterations = 0;
  double last_increment = 0;
  double contraction_estimate = 0;
};

// (B U)(l) = (pi i / sqrt(E)) int U(m) chi((m - k).gamma) f(m, l) dm over the
// sphere, chi the unit step (0 at 0).
VectorXcd apply_B_gamma(const ScatteringData& f, const Vec3& gamma, const Vec3& k,
                        const VectorXcd& U);

// Solves h = f(k, .) + B h by successive approximations (the truncated
// series sums). Throws "Faddeev divergence" when increments grow for three
// consecutive steps.
FaddeevSlice solve_h_gamma(const ScatteringData& f, const Vec3& gamma, const Vec3& k,
                           const RunConfig& cfg);

// Boundary values on the circle: k = k(lambda, p, E) is real, the two
// directions gamma(+-) select the two one-sided limits, and the slice is
// read off at l = k - p (on the sphere by p.p = 2 k.p).
std::pair<cplx, cplx> H_pm_on_T(const ScatteringData& f, cplx lambda, const Vec3& p,
                                const RunConfig& cfg, const coords::Frame& frame);

// Fills both boundary matrices over circle nodes x p nodes.
BoundaryData boundary_values(const ScatteringData& f, std::shared_ptr<const LambdaGrid> lg,
                             std::shared_ptr<const PGrid> pg, const RunConfig& cfg);

// Piecewise-linear forward-cone taper: multiplies f by
// u(|k - l|, 2 tau0 sqrt(E), 2 tau sqrt(E)).
ScatteringData taper_f(const ScatteringData& f, double tau0, double tau);

double taper_u(double s, double s1, double s2);

}  // namespace faddeev
}  // namespace isct
