#include "isct/faddeev.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "isct/parallel.hpp"

namespace isct {
namespace faddeev {

VectorXcd apply_B_gamma(const ScatteringData& f, const Vec3& gamma, const Vec3& k,
                        const VectorXcd& U) {
  const SphereGrid& g = f.grid;
  const int n = g.size();
  if (U.size() != n) throw std::invalid_argument("apply_B_gamma: size mismatch");
  const cplx factor = iu * pi / g.radius;
  // Masked integration over m, then contraction with f(m, l).
  VectorXcd masked(n);
  for (int m = 0; m < n; ++m) {
    const double s = (g.nodes[m] - k).dot(gamma);
    masked(m) = (s > 0.0) ? factor * g.weights[m] * U(m) : cplx(0, 0);
  }
  return f.f.transpose() * masked;
}

FaddeevSlice solve_h_gamma(const ScatteringData& f, const Vec3& gamma, const Vec3& k,
                           const RunConfig& cfg) {
  FaddeevSlice slice;
  slice.k = k;
  slice.gamma = gamma;
  // The data row f(k, .): exact at grid nodes, interpolated across rows for
  // chart momenta between them. The operator itself only sees k through the
  // step mask, which reduces to chi(m.gamma) since gamma.k = 0.
  const SphereGrid& g = f.grid;
  const VectorXcd fk = g.interpolate_rows(f.f, k);
  VectorXcd h = fk;
  double prev_inc = -1.0;
  int growth_streak = 0;
  for (int it = 0;; ++it) {
    if (it >= cfg.fp_max_iter) {
      std::ostringstream msg;
      msg << "Faddeev divergence: increment " << slice.last_increment << " after " << it
          << " iterations";
      throw std::runtime_error(msg.str());
    }
    VectorXcd next = fk + apply_B_gamma(f, gamma, k, h);
    const double inc = (next - h).cwiseAbs().maxCoeff();
    if (prev_inc > 0) {
      slice.contraction_estimate = inc / prev_inc;
      growth_streak = (inc >= prev_inc) ? growth_streak + 1 : 0;
      if (growth_streak >= 3) {
        std::ostringstream msg;
        msg << "Faddeev divergence: increment ratio " << slice.contraction_estimate << " >= 1";
        throw std::runtime_error(msg.str());
      }
    }
    prev_inc = inc;
    slice.last_increment = inc;
    h = std::move(next);
    slice.iterations = it + 1;
    if (inc < cfg.fp_tol) break;
  }
  slice.h = std::move(h);
  return slice;
}

std::pair<cplx, cplx> H_pm_on_T(const ScatteringData& f, cplx lambda, const Vec3& p,
                                const RunConfig& cfg, const coords::Frame& frame) {
  const double E = f.E;
  const coords::ComplexMomentum km = coords::k_from_lambda(lambda, p, E, frame);
  const Vec3 k = km.re();
  const Vec3 l = k - p;  // on shell: |k - p|^2 = E by p.p = 2 k.p
  const SphereGrid& g = f.grid;
  if (std::abs(l.squaredNorm() - E) > 1e-6 * E)
    throw std::runtime_error("H_pm_on_T: l off shell");
  auto [gp, gm] = coords::gamma_pm(lambda, p, E, frame);
  const FaddeevSlice sp = solve_h_gamma(f, gp, k, cfg);
  const FaddeevSlice sm = solve_h_gamma(f, gm, k, cfg);
  return {g.interpolate(sp.h, l), g.interpolate(sm.h, l)};
}

BoundaryData boundary_values(const ScatteringData& f, std::shared_ptr<const LambdaGrid> lg,
                             std::shared_ptr<const PGrid> pg, const RunConfig& cfg) {
  BoundaryData bd(lg, pg);
  const int nc = static_cast<int>(lg->circle_nodes.size());
  const int np = pg->size();
  parallel_for(np, [&](int jp) {
    const Vec3 p = pg->nodes[jp];
    const coords::Frame frame = coords::frame_of(p, cfg.nu);
    for (int ic = 0; ic < nc; ++ic) {
      auto [hp, hm] = H_pm_on_T(f, lg->circle_nodes[ic], p, cfg, frame);
      bd.plus(ic, jp) = hp;
      bd.minus(ic, jp) = hm;
    }
  });
  return bd;
}

double taper_u(double s, double s1, double s2) {
  if (s <= s1) return 1.0;
  if (s >= s2) return 0.0;
  return (s2 - s) / (s2 - s1);
}

ScatteringData taper_f(const ScatteringData& f, double tau0, double tau) {
  if (!(tau0 > 0 && tau0 < tau)) throw std::invalid_argument("taper: need 0 < tau0 < tau");
  const double rs = std::sqrt(f.E);
  ScatteringData out = f;
  const int n = f.grid.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.f(i, j) *= taper_u((f.grid.nodes[i] - f.grid.nodes[j]).norm(), 2.0 * tau0 * rs,
                             2.0 * tau * rs);
  return out;
}

}  // namespace faddeev
}  // namespace isct
