#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isct/fields.hpp"
#include "isct/potentials.hpp"

namespace isct {
namespace verify {

// Kernel moment integrals
//   A = int (1 - cos phi) dphi / ((1 + 2r|sin(phi/2)|)^a (1 + 2r|sin((phi-psi)/2)|)^b)
//   B = same with |sin phi| in the numerator
// over [-pi, pi], plus their closed-form four-part majorants in
// rho = 2 r |sin(psi/2)|.
struct KernelMomentReport {
  double A = 0, B = 0;
  double A_bound = 0, B_bound = 0;  // sums of the four closed-form parts
  double A_margin = 0, B_margin = 0;
  bool pass = false;
};

KernelMomentReport lemma12_check(double r, double psi, double a, double b,
                                 double quad_tol = 1e-10);

double kernel_moment_A(double r, double psi, double a, double b, double quad_tol = 1e-10);
double kernel_moment_B(double r, double psi, double a, double b, double quad_tol = 1e-10);

// The four subinterval pieces (split at psi/2, psi, 3 psi/2) used by the
// per-piece weighted bounds.
struct KernelMomentParts {
  double A[4];
  double B[4];
};
KernelMomentParts kernel_moment_parts(double r, double psi, double a, double b,
                                      double quad_tol = 1e-10);

// Weighted per-piece inequalities at a chart point: r and psi derived from
// (|lambda|, rho, E), z = (1 - tau^2) / (4 tau^2).
struct ChartBoundReport {
  double lhs[8];
  double rhs[8];
  double min_margin = 0;
  bool pass = false;
};

ChartBoundReport lemma13_check(cplx lambda, double rho, double E, double tau, double a, double b,
                               double quad_tol = 1e-10);

// Contour-plus-area reconstruction identity on the unit disk for test
// functions with known d/d(conj zeta): u = conj(zeta) and u = |zeta|^2,
// plus a holomorphic control.
struct CauchyGreenReport {
  double defect_holomorphic = 0;
  double defect_conj = 0;
  double defect_abs2 = 0;
  double defect_conj_refined = 0;  // at twice the resolution
  bool pass = false;
};

CauchyGreenReport cauchy_green_check(int n_contour = 256, int n_radial = 48);

// Empirical contraction surrogates: the paper-exact pieces (r2 formula) are
// separated from the measured ones (all the hatted ratios).
struct DiagnosticsReport {
  double eta_hat = 0;     // contraction of the complex-momentum iteration
  double delta1_hat = 0;  // weighted sup contraction of the boundary operator
  double delta2_hat = 0;  // Hoelder-seminorm analogue
  double N_hat = 0;       // weighted data norm standing in for the class bound
  double r1 = 0;          // surrogate radius
  double r2 = 0;          // exact formula with surrogate inputs
  bool contraction_ok = false;
};

DiagnosticsReport diagnostics_report(const ScatteringData& f, const AnalyticPotential* pot,
                                     const RunConfig& cfg);

}  // namespace verify
}  // namespace isct
