#pragma once

#include "isct/dbar.hpp"
#include "isct/potentials.hpp"

namespace isct {
namespace extract {

struct VhatPair {
  VectorXcd plus;   // limit of the solved field toward lambda = 0
  VectorXcd minus;  // limit toward lambda = infinity
};

// Transform limits: contour mean of the boundary data against d zeta / zeta
// minus (plus) the area integral of the solved field's quadratic form with
// kernel 1/zeta over the disk (exterior).
VhatPair vhat_pm(const dbar::DbarState& state, const BoundaryData& bd,
                 const dbar::BracketEngine& engine, const dbar::MOperator& op);

// Weighted sup distance between the two limits; a data-driven error proxy.
double consistency_gap(const VectorXcd& vp, const VectorXcd& vm, const PGrid& grid, double mu0);

struct Reconstruction {
  std::vector<Vec3> x_nodes;
  std::vector<double> v_appr;
  double max_imag = 0;
  double tail_bound = 0;  // analytic out-of-band mass when a potential is given
};

// Band-limited inversion of the averaged limits on a cubic x lattice at the
// band's Nyquist spacing.
Reconstruction reconstruct_v(const VectorXcd& vhat_avg, const PGrid& grid, const RunConfig& cfg,
                             const AnalyticPotential* reference = nullptr);

std::vector<Vec3> default_x_grid(const RunConfig& cfg);

}  // namespace extract
}  // namespace isct
