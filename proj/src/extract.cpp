#include "isct/extract.hpp"

#include <cmath>
#include <stdexcept>

namespace isct {
namespace extract {

VhatPair vhat_pm(const dbar::DbarState& state, const BoundaryData& bd,
                 const dbar::BracketEngine& engine, const dbar::MOperator& op) {
  if (state.Htilde.values.size() == 0) throw std::runtime_error("vhat_pm: unsolved state");
  const LambdaGrid& lg = *bd.lambda;
  const int nc = static_cast<int>(lg.circle_nodes.size());
  const int np = bd.p->size();
  VhatPair out;
  out.plus = VectorXcd::Zero(np);
  out.minus = VectorXcd::Zero(np);
  // Contour means: (1/2 pi i) integral data d zeta / zeta = average over the
  // uniform circle nodes.
  for (int j = 0; j < np; ++j) {
    out.plus(j) = bd.plus.col(j).sum() / static_cast<double>(nc);
    out.minus(j) = bd.minus.col(j).sum() / static_cast<double>(nc);
  }
  const MatrixXcd bracket = engine.bracket_field(state.Htilde);
  out.plus += (op.k0_plus.transpose() * bracket).transpose();
  out.minus += (op.k0_minus.transpose() * bracket).transpose();
  return out;
}

double consistency_gap(const VectorXcd& vp, const VectorXcd& vm, const PGrid& grid, double mu0) {
  return weighted_sup_norm_p(vp - vm, grid, mu0);
}

std::vector<Vec3> default_x_grid(const RunConfig& cfg) {
  const double band = 2.0 * cfg.tau * std::sqrt(cfg.E);
  const double hx = pi / band;  // Nyquist spacing of the band limit
  std::vector<Vec3> xs;
  const int n = cfg.n_x;
  const double lo = -0.5 * (n - 1) * hx;
  xs.reserve(static_cast<size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        xs.emplace_back(lo + hx * i, lo + hx * j, lo + hx * k);
  return xs;
}

Reconstruction reconstruct_v(const VectorXcd& vhat_avg, const PGrid& grid, const RunConfig& cfg,
                             const AnalyticPotential* reference) {
  Reconstruction rec;
  rec.x_nodes = default_x_grid(cfg);
  IftResult ift = band_limited_ift(vhat_avg, grid, rec.x_nodes);
  rec.v_appr = std::move(ift.values);
  rec.max_imag = ift.max_imag;
  if (reference) rec.tail_bound = vhat_tail_mass(*reference, grid.ball_radius);
  return rec;
}

}  // namespace extract
}  // namespace isct
