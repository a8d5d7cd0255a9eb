#pragma once

#include <memory>
#include <vector>

#include "isct/config.hpp"
#include "isct/coords.hpp"
#include "isct/fields.hpp"
#include "isct/potentials.hpp"

namespace isct {
namespace forward {

struct LsReport {
  int iterations = 0;
  double last_residual = 0;
  double contraction_estimate = 0;  // ratio of consecutive increment norms
  double reciprocity_defect = 0;    // max |f(k,l) - f(-k,-l)| over node pairs
};

// Discretized on-shell system: product nodes (radial rings then the shell
// ring), quadrature factors with the principal-value and half-residue
// pieces folded in, and the integral operator over them. Exposed so tests
// can address single operator applications and explicit series terms.
struct LsSystem {
  SphereGrid sphere;
  AnalyticPotential pot;
  std::vector<Vec3> pos;
  std::vector<cplx> qweight;
  int shell_offset = 0;

  int size() const { return static_cast<int>(pos.size()); }
  // Columns indexed by the sphere's k-nodes: rhs(m, c) = vhat(k_c - pos_m).
  MatrixXcd make_rhs() const;
  // out(l, c) = sum_m qweight(m) vhat(pos_m - pos_l) U(m, c).
  MatrixXcd apply(const MatrixXcd& U) const;
  // Restriction of a product-grid table to the shell ring, transposed to
  // the (k-node, l-node) layout.
  MatrixXcd shell(const MatrixXcd& U) const;
};

LsSystem make_ls_system(const AnalyticPotential& pot, const SphereGrid& grid, double r_max,
                        int n_panel, int pts_per_panel, double pv_scale = 1.0);

// Solves the on-shell scattering equation by successive approximations on a
// radial x spherical product grid; the -i0 rule is realized as a mirrored
// principal-value radial quadrature plus the analytic half-residue shell
// term. Throws "LS divergence" past the iteration cap.
ScatteringData solve_f_LS(const AnalyticPotential& pot, const SphereGrid& grid,
                          const RunConfig& cfg, LsReport* report = nullptr);

// Same solver with explicit radial-resolution control, for convergence
// studies. pv_scale halves the PV window when 0.5, etc.
ScatteringData solve_f_LS_resolved(const AnalyticPotential& pot, const SphereGrid& grid,
                                   const RunConfig& cfg, int n_panel, int pts_per_panel,
                                   double pv_scale, LsReport* report = nullptr);

// Truncation radius for kernels built from this potential's transform.
double default_r_max(const AnalyticPotential& pot, double E);

// Faddeev extension at a complex momentum: solution of
//   H(k, p) = vhat(p) - int vhat(p + xi) H(k, -xi) / (xi^2 + 2 k.xi) dxi
// on an offset cube lattice, iterated by successive approximations with the
// integral applied as an FFT convolution.
struct HComplexSolution {
  CVec3 k;
  double E = 0;
  int n = 0;          // lattice points per axis
  double L = 0;       // half-width of the cube in lattice coordinates
  double h = 0;       // lattice spacing in lattice coordinates
  Vec3 origin;        // first site per axis, in lattice coordinates
  // Lattice coordinates w = frame q / scale with rows e1 along Re k and e3
  // along Im k, scale = |Re k| / sqrt(E). The kernel's singular circle is
  // then frozen relative to the lattice and the discretized operator
  // depends on k only through smooth scalars, so chart derivatives of the
  // solution stay clean.
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
  double scale = 1.0;
  // Correction field H - vhat on the lattice; the leading term is added
  // back analytically at evaluation so it carries no lattice error.
  std::vector<cplx> values;  // n^3, index (ix*n+iy)*n+iz
  AnalyticPotential pot;
  int iterations = 0;
  double last_residual = 0;
  double contraction_estimate = 0;

  // vhat(q) plus the interpolated correction (0 outside the cube).
  cplx eval(const Vec3& q) const;
};

struct HGridSpec {
  int n = 32;
  double L = -1;          // <0: derive from the potential and E
  int neumann_terms = -1; // >= 0: iterate exactly that many applications
};

HComplexSolution solve_H_complex(const AnalyticPotential& pot, const coords::ComplexMomentum& k,
                                 const RunConfig& cfg, const HGridSpec& spec = {});

// Convenience: H(k, p) at selected points.
std::vector<cplx> solve_H_complex_at(const AnalyticPotential& pot,
                                     const coords::ComplexMomentum& k,
                                     const std::vector<Vec3>& p_list, const RunConfig& cfg,
                                     const HGridSpec& spec = {});

// Caches complex-momentum solves keyed by k so repeated chart evaluations
// near the same momentum reuse one solve.
class HOracle {
 public:
  HOracle(AnalyticPotential pot, RunConfig cfg, HGridSpec spec = {});

  // H at the chart point (lambda, p); solves at k(lambda, p, E) on demand.
  cplx at_chart(cplx lambda, const Vec3& p) const;
  // H(k, q) for an explicit momentum.
  cplx at(const coords::ComplexMomentum& k, const Vec3& q) const;
  const HComplexSolution& solution_for(const coords::ComplexMomentum& k) const;
  int solve_count() const { return static_cast<int>(cache_.size()); }
  double measured_contraction() const;  // largest ratio seen across solves

  const RunConfig& config() const { return cfg_; }

 private:
  AnalyticPotential pot_;
  RunConfig cfg_;
  HGridSpec spec_;
  mutable std::vector<std::pair<CVec3, std::shared_ptr<HComplexSolution>>> cache_;
};

}  // namespace forward
}  // namespace isct
