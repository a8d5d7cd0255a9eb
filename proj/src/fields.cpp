#include "isct/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace isct {

namespace {

void require_finite(const cplx& v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw std::runtime_error("corrupt field");
}

}  // namespace

cplx ComplexField2D::eval(cplx z, const Vec3& q) const {
  if (q.norm() >= p->ball_radius) return 0.0;
  // Tensor rule: bilinear taps in (log |lambda|, arg lambda), then a shared
  // trilinear stencil in p. Everything inlined; this runs inside the
  // bracket quadrature.
  int lam_idx[4];
  double lam_w[4];
  int ntap = 0;
  {
    const double r = std::abs(z);
    if (r == 0.0) throw std::runtime_error("field eval at lambda = 0");
    const bool inner = r < 1.0;
    const std::vector<double>& radii = inner ? lambda->inner_radii : lambda->outer_radii;
    const int base = inner ? 0 : lambda->n_inner;
    const int n_radial = lambda->n_radial, n_angle = lambda->n_angle;
    const double lr = std::log(r);
    int m0 = 0;
    while (m0 + 1 < n_radial && std::log(radii[m0 + 1]) < lr) ++m0;
    const int m1 = std::min(m0 + 1, n_radial - 1);
    double tr = 0.0;
    if (m1 != m0) {
      tr = (lr - std::log(radii[m0])) / (std::log(radii[m1]) - std::log(radii[m0]));
      tr = std::min(1.0, std::max(0.0, tr));
    }
    double th = std::arg(z);
    if (th < 0) th += 2.0 * pi;
    const double dth = 2.0 * pi / n_angle;
    int j0 = static_cast<int>(std::floor(th / dth)) % n_angle;
    const int j1 = (j0 + 1) % n_angle;
    const double tt = th / dth - std::floor(th / dth);
    lam_idx[ntap] = base + m0 * n_angle + j0; lam_w[ntap++] = (1 - tr) * (1 - tt);
    lam_idx[ntap] = base + m0 * n_angle + j1; lam_w[ntap++] = (1 - tr) * tt;
    if (m1 != m0) {
      lam_idx[ntap] = base + m1 * n_angle + j0; lam_w[ntap++] = tr * (1 - tt);
      lam_idx[ntap] = base + m1 * n_angle + j1; lam_w[ntap++] = tr * tt;
    }
  }
  const PGrid& pg = *p;
  const double fx = (q(0) - pg.origin) / pg.h, fy = (q(1) - pg.origin) / pg.h,
               fz = (q(2) - pg.origin) / pg.h;
  const int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy)),
            iz = static_cast<int>(std::floor(fz));
  const double tx = fx - ix, ty = fy - iy, tz = fz - iz;
  cplx acc = 0.0;
  for (int dx = 0; dx <= 1; ++dx)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dz = 0; dz <= 1; ++dz) {
        const double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) * (dz ? tz : 1 - tz);
        if (w == 0.0) continue;
        const int cx = ix + dx, cy = iy + dy, cz = iz + dz;
        if (cx < 0 || cy < 0 || cz < 0 || cx >= pg.n_axis || cy >= pg.n_axis || cz >= pg.n_axis)
          continue;  // corner outside the box reads as 0
        const int node = pg.lattice_to_node[pg.lattice_index(cx, cy, cz)];
        cplx vl = 0.0;
        for (int t = 0; t < ntap; ++t) vl += lam_w[t] * values(lam_idx[t], node);
        acc += w * vl;
      }
  return acc;
}

double weighted_sup_norm_p(const VectorXcd& w, const PGrid& grid, double mu0) {
  if (w.size() != grid.size()) throw std::invalid_argument("norm: size mismatch");
  double best = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    require_finite(w(i));
    best = std::max(best, std::pow(1.0 + grid.nodes[i].norm(), mu0) * std::abs(w(i)));
  }
  return best;
}

double triple_norm(const ComplexField2D& U, double mu) {
  double best = 0.0;
  for (int j = 0; j < U.p->size(); ++j) {
    const double wj = std::pow(1.0 + U.p->nodes[j].norm(), mu);
    for (int i = 0; i < U.lambda->n_area(); ++i) {
      require_finite(U.values(i, j));
      best = std::max(best, wj * std::abs(U.values(i, j)));
    }
  }
  return best;
}

double sup_norm_ME(const ScatteringData& data, double mu) {
  double best = 0.0;
  const int n = data.grid.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      require_finite(data.f(i, j));
      const double d2 = (data.grid.nodes[i] - data.grid.nodes[j]).squaredNorm();
      best = std::max(best, std::pow(1.0 + d2, 0.5 * mu) * std::abs(data.f(i, j)));
    }
  return best;
}

}  // namespace isct
