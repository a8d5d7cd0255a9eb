#include "isct/grids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isct/quadrature.hpp"

namespace isct {

SphereGrid::SphereGrid(double E_, int n_polar_) : E(E_), radius(std::sqrt(E_)),
                                                  n_polar(n_polar_), n_azimuth(n_polar_) {
  if (n_polar < 2) throw std::invalid_argument("sphere grid: n_polar < 2");
  std::vector<double> ct, wt;
  gauss_legendre(n_polar, ct, wt);  // cos(theta) in [-1, 1]
  nodes.reserve(static_cast<size_t>(n_polar) * n_azimuth);
  weights.reserve(nodes.capacity());
  const double dphi = 2.0 * pi / n_azimuth;
  for (int i = 0; i < n_polar; ++i) {
    const double c = ct[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
    ring_cos.push_back(c);
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = dphi * j;
      nodes.emplace_back(radius * s * std::cos(phi), radius * s * std::sin(phi), radius * c);
      weights.push_back(E * wt[i] * dphi);
    }
  }
}

int SphereGrid::antipode(int i) const {
  const int ip = i / n_azimuth, ia = i % n_azimuth;
  // GL cosines are symmetric; azimuth shifts by pi when the count is even.
  const int ip2 = n_polar - 1 - ip;
  const int ia2 = (ia + n_azimuth / 2) % n_azimuth;
  if (n_azimuth % 2 == 0) return index(ip2, ia2);
  // Odd azimuth count: fall back to nearest node.
  const Vec3 target = -nodes[i];
  int best = 0;
  double bd = std::numeric_limits<double>::max();
  for (int j = 0; j < size(); ++j) {
    double d = (nodes[j] - target).squaredNorm();
    if (d < bd) { bd = d; best = j; }
  }
  return best;
}

SphereGrid::Taps SphereGrid::taps(const Vec3& direction) const {
  const double rn = direction.norm();
  if (rn == 0) throw std::runtime_error("sphere interpolation at zero vector");
  const double c = std::clamp(direction(2) / rn, -1.0, 1.0);
  double phi = std::atan2(direction(1), direction(0));
  if (phi < 0) phi += 2.0 * pi;

  int i0 = 0;
  while (i0 + 1 < n_polar && ring_cos[i0 + 1] < c) ++i0;
  const int i1 = std::min(i0 + 1, n_polar - 1);
  double tc = 0.0;
  if (i1 != i0)
    tc = std::clamp((c - ring_cos[i0]) / (ring_cos[i1] - ring_cos[i0]), 0.0, 1.0);

  const double dphi = 2.0 * pi / n_azimuth;
  const int j0 = static_cast<int>(std::floor(phi / dphi)) % n_azimuth;
  const int j1 = (j0 + 1) % n_azimuth;
  const double tp = phi / dphi - std::floor(phi / dphi);

  Taps t;
  t.idx[0] = index(i0, j0); t.w[0] = (1 - tc) * (1 - tp);
  t.idx[1] = index(i0, j1); t.w[1] = (1 - tc) * tp;
  t.idx[2] = index(i1, j0); t.w[2] = tc * (1 - tp);
  t.idx[3] = index(i1, j1); t.w[3] = tc * tp;
  return t;
}

cplx SphereGrid::interpolate(const VectorXcd& values, const Vec3& l) const {
  const Taps t = taps(l);
  cplx acc = 0.0;
  for (int i = 0; i < 4; ++i) acc += t.w[i] * values(t.idx[i]);
  return acc;
}

VectorXcd SphereGrid::interpolate_rows(const MatrixXcd& table, const Vec3& k) const {
  const Taps t = taps(k);
  VectorXcd row = VectorXcd::Zero(table.cols());
  for (int i = 0; i < 4; ++i)
    if (t.w[i] != 0.0) row += t.w[i] * table.row(t.idx[i]).transpose();
  return row;
}

PGrid::PGrid(const RunConfig& cfg)
    : PGrid(2.0 * cfg.tau * std::sqrt(cfg.E), cfg.tube_radius(), cfg.nu, cfg.n_p) {}

PGrid::PGrid(double ball_radius_, double tube_radius_, const Vec3& nu_, int n_axis_)
    : ball_radius(ball_radius_), tube_radius(tube_radius_), nu(nu_.normalized()), n_axis(n_axis_) {
  if (n_axis < 2) throw std::invalid_argument("p grid: n_axis < 2");
  h = 2.0 * ball_radius / n_axis;
  origin = -ball_radius + 0.5 * h;  // offset lattice, no node at |p| = 0
  const int n3 = n_axis * n_axis * n_axis;
  lattice_to_node.assign(n3, -1);
  lattice_is_node.assign(n3, false);
  for (int ix = 0; ix < n_axis; ++ix)
    for (int iy = 0; iy < n_axis; ++iy)
      for (int iz = 0; iz < n_axis; ++iz) {
        const Vec3 p(origin + h * ix, origin + h * iy, origin + h * iz);
        const double axial = p.dot(nu);
        const double off_axis = (p - axial * nu).norm();
        if (p.norm() < ball_radius && off_axis > tube_radius) {
          const int id = static_cast<int>(nodes.size());
          lattice_to_node[lattice_index(ix, iy, iz)] = id;
          lattice_is_node[lattice_index(ix, iy, iz)] = true;
          nodes.push_back(p);
          weights.push_back(h * h * h);
        }
      }
  if (nodes.empty()) throw std::runtime_error("p grid: empty");
  // Redirect removed lattice sites inside the ball to the nearest kept node.
  for (int ix = 0; ix < n_axis; ++ix)
    for (int iy = 0; iy < n_axis; ++iy)
      for (int iz = 0; iz < n_axis; ++iz) {
        const int li = lattice_index(ix, iy, iz);
        if (lattice_to_node[li] >= 0) continue;
        const Vec3 p(origin + h * ix, origin + h * iy, origin + h * iz);
        int best = -1;
        double bd = std::numeric_limits<double>::max();
        for (int id = 0; id < size(); ++id) {
          double d = (nodes[id] - p).squaredNorm();
          if (d < bd) { bd = d; best = id; }
        }
        lattice_to_node[li] = best;
      }
}

cplx PGrid::interpolate(const VectorXcd& values, const Vec3& p) const {
  if (p.norm() >= ball_radius) return 0.0;
  double fx = (p(0) - origin) / h, fy = (p(1) - origin) / h, fz = (p(2) - origin) / h;
  int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy)),
      iz = static_cast<int>(std::floor(fz));
  double tx = fx - ix, ty = fy - iy, tz = fz - iz;
  auto corner = [&](int cx, int cy, int cz) -> cplx {
    if (cx < 0 || cy < 0 || cz < 0 || cx >= n_axis || cy >= n_axis || cz >= n_axis) return 0.0;
    return values(lattice_to_node[lattice_index(cx, cy, cz)]);
  };
  cplx acc = 0.0;
  for (int dx = 0; dx <= 1; ++dx)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dz = 0; dz <= 1; ++dz) {
        const double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) * (dz ? tz : 1 - tz);
        if (w != 0.0) acc += w * corner(ix + dx, iy + dy, iz + dz);
      }
  return acc;
}

LambdaGrid::LambdaGrid(const RunConfig& cfg)
    : LambdaGrid(cfg.n_lambda_circle, cfg.n_lambda_radial, 0.05, 20.0, 0.02) {}

LambdaGrid::LambdaGrid(int n_circle, int n_radial_, double lambda_min_, double lambda_max_,
                       double eps_T_)
    : lambda_min(lambda_min_), lambda_max(lambda_max_), eps_T(eps_T_),
      n_angle(n_circle), n_radial(n_radial_) {
  if (n_circle < 4 || n_radial < 2) throw std::invalid_argument("lambda grid: too coarse");
  circle_nodes.reserve(n_circle);
  for (int j = 0; j < n_circle; ++j) {
    const double th = 2.0 * pi * j / n_circle;
    circle_nodes.push_back(std::polar(1.0, th));
  }
  const double dth = 2.0 * pi / n_angle;
  auto add_ring = [&](double r_lo, double r_hi) {
    const double r_mid = 0.5 * (r_lo + r_hi);
    const double cell_area = 0.5 * (r_hi * r_hi - r_lo * r_lo) * dth;
    for (int j = 0; j < n_angle; ++j) {
      const double th0 = dth * j - 0.5 * dth, th1 = dth * j + 0.5 * dth;
      const cplx node = std::polar(r_mid, dth * j);
      // Complex second moment of the annular sector about its node,
      // avg((zeta - c)^2) = avg(zeta^2) - 2 c avg(zeta) + c^2, closed form.
      const cplx e2 = (std::polar(1.0, 2.0 * th1) - std::polar(1.0, 2.0 * th0)) / (2.0 * iu);
      const cplx e1 = (std::polar(1.0, th1) - std::polar(1.0, th0)) / iu;
      const cplx avg_z2 = (std::pow(r_hi, 4) - std::pow(r_lo, 4)) / 4.0 * e2 / cell_area;
      const cplx avg_z = (std::pow(r_hi, 3) - std::pow(r_lo, 3)) / 3.0 * e1 / cell_area;
      area_nodes.push_back(node);
      area_weights.push_back(cell_area);
      cell_moment2.push_back(avg_z2 - 2.0 * node * avg_z + node * node);
    }
  };
  // Inner rings: uniform radial cells over [lambda_min, 1 - eps_T].
  const double ri0 = lambda_min, ri1 = 1.0 - eps_T;
  const double dr_in = (ri1 - ri0) / n_radial;
  for (int m = 0; m < n_radial; ++m) {
    add_ring(ri0 + m * dr_in, ri0 + (m + 1) * dr_in);
    inner_radii.push_back(ri0 + (m + 0.5) * dr_in);
  }
  n_inner = n_radial * n_angle;
  // Outer rings: geometric radial cells over [1 + eps_T, lambda_max].
  const double ro0 = 1.0 + eps_T, ro1 = lambda_max;
  const double q = std::pow(ro1 / ro0, 1.0 / n_radial);
  for (int m = 0; m < n_radial; ++m) {
    const double lo = ro0 * std::pow(q, m), hi = ro0 * std::pow(q, m + 1);
    add_ring(lo, hi);
    outer_radii.push_back(0.5 * (lo + hi));
  }
}

cplx LambdaGrid::interpolate(const VectorXcd& values, cplx z) const {
  const double r = std::abs(z);
  if (r == 0.0) throw std::runtime_error("lambda interpolation at 0");
  const bool inner = r < 1.0;
  const std::vector<double>& radii = inner ? inner_radii : outer_radii;
  const int base = inner ? 0 : n_inner;
  // Bracket in log radius, clamped to the component's rings.
  const double lr = std::log(r);
  int m0 = 0;
  while (m0 + 1 < n_radial && std::log(radii[m0 + 1]) < lr) ++m0;
  int m1 = std::min(m0 + 1, n_radial - 1);
  double tr = 0.0;
  if (m1 != m0) {
    tr = (lr - std::log(radii[m0])) / (std::log(radii[m1]) - std::log(radii[m0]));
    tr = std::clamp(tr, 0.0, 1.0);
  }
  double th = std::arg(z);
  if (th < 0) th += 2.0 * pi;
  const double dth = 2.0 * pi / n_angle;
  int j0 = static_cast<int>(std::floor(th / dth)) % n_angle;
  int j1 = (j0 + 1) % n_angle;
  double tt = th / dth - std::floor(th / dth);
  auto v = [&](int m, int j) { return values(base + m * n_angle + j); };
  return (1 - tr) * ((1 - tt) * v(m0, j0) + tt * v(m0, j1)) +
         tr * ((1 - tt) * v(m1, j0) + tt * v(m1, j1));
}

RadialGrid3D::RadialGrid3D(double E_, double r_max_, int n_panel, int pts_per_panel)
    : E(E_), r_max(r_max_) {
  const double rs = std::sqrt(E);
  pv_halfwidth = 0.5 * rs;
  if (r_max <= rs + pv_halfwidth) throw std::invalid_argument("radial grid: r_max too small");
  std::vector<double> xs, ws;
  auto add_panels = [&](double a, double b, int panels) {
    for (int p = 0; p < panels; ++p) {
      const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
      gauss_legendre_ab(pts_per_panel, lo, hi, xs, ws);
      for (int i = 0; i < pts_per_panel; ++i) {
        radii.push_back(xs[i]);
        radial_weights.push_back(ws[i]);
      }
    }
  };
  add_panels(0.0, rs - pv_halfwidth, n_panel);
  // PV window: GL nodes in the offset t, mirrored about sqrt(E).
  gauss_legendre_ab(pts_per_panel * n_panel, 0.0, pv_halfwidth, xs, ws);
  for (size_t i = 0; i < xs.size(); ++i) {
    radii.push_back(rs - xs[i]);
    radial_weights.push_back(ws[i]);
    radii.push_back(rs + xs[i]);
    radial_weights.push_back(ws[i]);
  }
  add_panels(rs + pv_halfwidth, r_max, n_panel);
}

}  // namespace isct
