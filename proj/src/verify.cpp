#include "isct/verify.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "isct/dbar.hpp"
#include "isct/faddeev.hpp"
#include "isct/forward.hpp"
#include "isct/quadrature.hpp"

namespace isct {
namespace verify {

namespace {

double w1(double r, double psi, double a, double b, double phi) {
  return (1.0 - std::cos(phi)) /
         (std::pow(1.0 + 2.0 * r * std::abs(std::sin(0.5 * phi)), a) *
          std::pow(1.0 + 2.0 * r * std::abs(std::sin(0.5 * (phi - psi))), b));
}

double w2(double r, double psi, double a, double b, double phi) {
  return std::abs(std::sin(phi)) /
         (std::pow(1.0 + 2.0 * r * std::abs(std::sin(0.5 * phi)), a) *
          std::pow(1.0 + 2.0 * r * std::abs(std::sin(0.5 * (phi - psi))), b));
}

}  // namespace

double kernel_moment_A(double r, double psi, double a, double b, double quad_tol) {
  auto f = [&](double phi) { return w1(r, psi, a, b, phi); };
  return adaptive_integrate_split(f, -pi, pi, {0.0, psi}, quad_tol);
}

double kernel_moment_B(double r, double psi, double a, double b, double quad_tol) {
  auto f = [&](double phi) { return w2(r, psi, a, b, phi); };
  return adaptive_integrate_split(f, -pi, pi, {0.0, psi}, quad_tol);
}

KernelMomentParts kernel_moment_parts(double r, double psi, double a, double b, double quad_tol) {
  const double ps = std::abs(psi);
  KernelMomentParts parts{};
  auto f1 = [&](double phi) { return w1(r, ps, a, b, phi); };
  auto f2 = [&](double phi) { return w2(r, ps, a, b, phi); };
  const double cut3 = std::min(1.5 * ps, pi);
  const double marks[5] = {0.0, 0.5 * ps, ps, cut3, pi};
  for (int j = 0; j < 4; ++j) {
    const double lo = std::min(marks[j], pi), hi = std::min(marks[j + 1], pi);
    parts.A[j] = hi > lo ? 2.0 * adaptive_integrate(f1, lo, hi, quad_tol) : 0.0;
    parts.B[j] = hi > lo ? 2.0 * adaptive_integrate(f2, lo, hi, quad_tol) : 0.0;
  }
  return parts;
}

KernelMomentReport lemma12_check(double r, double psi, double a, double b, double quad_tol) {
  if (r < 0 || a < 2 || b < 2) throw std::invalid_argument("kernel moments: out of range");
  KernelMomentReport rep;
  rep.A = kernel_moment_A(r, psi, a, b, quad_tol);
  rep.B = kernel_moment_B(r, psi, a, b, quad_tol);

  const double t = 2.0 * std::abs(std::sin(0.5 * psi));  // rho / r, finite at r = 0
  const double rho = r * t;
  const double da = std::pow(1.0 + 0.5 * rho, a);
  const double db = std::pow(1.0 + 0.5 * rho, b);
  const double d1 = std::pow(1.0 + rho, a);

  double a1 = t * t * t / 6.0;
  if (r > 0) a1 = std::min(a1, rho / (r * r * r));
  a1 /= db;
  const double a2 = t * t * t / (da * (1.0 + 0.5 * rho));
  const double a3 = 4.0 * t * t * t / (d1 * (1.0 + 0.5 * rho));
  const double a4 = (3.0 / (1.0 + r * r) + 2.0 * pi / std::pow(1.0 + std::sqrt(2.0) * r, a)) / db;
  rep.A_bound = a1 + a2 + a3 + a4;

  double b1 = 0.5 * t * t;
  if (r > 0) b1 = std::min(b1, std::sqrt(2.0) * rho / (r * r));
  b1 /= db;
  const double b2 = 2.0 * t * t / (da * (1.0 + 0.5 * rho));
  const double b3 = 4.0 * t * t / (d1 * (1.0 + 0.5 * rho));
  const double b4 = (5.0 / (1.0 + r) + 3.0 / std::pow(1.0 + std::sqrt(2.0) * r, a)) / db;
  rep.B_bound = b1 + b2 + b3 + b4;

  rep.A_margin = rep.A_bound - rep.A;
  rep.B_margin = rep.B_bound - rep.B;
  rep.pass = rep.A_margin > -10.0 * quad_tol && rep.B_margin > -10.0 * quad_tol;
  return rep;
}

ChartBoundReport lemma13_check(cplx lambda, double rho, double E, double tau, double a, double b,
                               double quad_tol) {
  const double al = std::abs(lambda);
  if (al == 0.0) throw std::invalid_argument("lambda must be nonzero");
  if (rho < 0 || rho > 2.0 * tau * std::sqrt(E)) throw std::invalid_argument("rho out of band");
  const double s_rho = std::sqrt(E - 0.25 * rho * rho);
  const double t_l = al + 1.0 / al;
  const double r = 0.5 * std::sqrt(s_rho * s_rho * t_l * t_l + rho * rho);
  const double psi = 2.0 * std::asin(std::min(1.0, rho / (2.0 * r)));
  const double z = (1.0 - tau * tau) / (4.0 * tau * tau);

  const KernelMomentParts parts = kernel_moment_parts(r, psi, a, b, quad_tol);
  const double l2p1 = al * al + 1.0;
  const double pre_a = s_rho * l2p1 / (al * al);

  ChartBoundReport rep;
  const double da = std::pow(1.0 + 0.5 * rho, a);
  const double db = std::pow(1.0 + 0.5 * rho, b);
  const double d1 = std::pow(1.0 + rho, a);
  for (int j = 0; j < 4; ++j) rep.lhs[j] = pre_a * parts.A[j];
  for (int j = 0; j < 4; ++j) rep.lhs[4 + j] = rho * parts.B[j] / al;
  rep.rhs[0] = 4.0 * al / (l2p1 * l2p1 * z * db);
  rep.rhs[1] = 16.0 * al / (l2p1 * l2p1 * z * da);
  rep.rhs[2] = 64.0 * al / (l2p1 * l2p1 * z * d1);
  rep.rhs[3] = 4.0 * std::sqrt(2.0) * (3.0 + pi) /
               (l2p1 * std::sqrt(E) * std::min(1.0, 2.0 * std::sqrt(z)) * db);
  rep.rhs[4] = 4.0 * std::sqrt(2.0) * al / (l2p1 * l2p1 * z * db);
  rep.rhs[5] = 16.0 * al / (l2p1 * l2p1 * z * da);
  rep.rhs[6] = 32.0 * al / (l2p1 * l2p1 * z * d1);
  rep.rhs[7] = 15.0 / (l2p1 * std::sqrt(z) * db);

  rep.min_margin = rep.rhs[0] - rep.lhs[0];
  for (int j = 0; j < 8; ++j) rep.min_margin = std::min(rep.min_margin, rep.rhs[j] - rep.lhs[j]);
  rep.pass = rep.min_margin > -10.0 * quad_tol;
  return rep;
}

namespace {

// Contour + area reconstruction of u(lambda) on the unit disk from samples
// of u on the circle and of du/d(conj zeta) on a polar grid.
struct DiskRule {
  std::vector<cplx> contour;
  std::vector<cplx> cells;
  std::vector<double> areas;
  std::vector<cplx> moment2;
  int n_contour;

  DiskRule(int nc, int nr) : n_contour(nc) {
    for (int j = 0; j < nc; ++j) contour.push_back(std::polar(1.0, 2.0 * pi * j / nc));
    const int nang = 2 * nr;
    const double dth = 2.0 * pi / nang;
    for (int m = 0; m < nr; ++m) {
      const double lo = static_cast<double>(m) / nr, hi = static_cast<double>(m + 1) / nr;
      const double area = 0.5 * (hi * hi - lo * lo) * dth;
      for (int j = 0; j < nang; ++j) {
        const double th0 = dth * j - 0.5 * dth, th1 = dth * j + 0.5 * dth;
        const cplx node = std::polar(0.5 * (lo + hi), dth * j);
        const cplx e2 = (std::polar(1.0, 2.0 * th1) - std::polar(1.0, 2.0 * th0)) / cplx(0, 2);
        const cplx e1 = (std::polar(1.0, th1) - std::polar(1.0, th0)) / cplx(0, 1);
        const cplx avg_z2 = (std::pow(hi, 4) - std::pow(lo, 4)) / 4.0 * e2 / area;
        const cplx avg_z = (std::pow(hi, 3) - std::pow(lo, 3)) / 3.0 * e1 / area;
        cells.push_back(node);
        areas.push_back(area);
        moment2.push_back(avg_z2 - 2.0 * node * avg_z + node * node);
      }
    }
  }

  template <typename Fu, typename Fd>
  cplx reconstruct(Fu u, Fd dbar_u, cplx lambda) const {
    cplx acc = 0.0;
    const double dth = 2.0 * pi / n_contour;
    for (const cplx& z : contour) acc += u(z) * z / (z - lambda) * (dth / (2.0 * pi));
    for (size_t i = 0; i < cells.size(); ++i) {
      const cplx c = cells[i];
      const double rho = std::sqrt(areas[i] / pi);
      const double d = std::abs(lambda - c);
      cplx cell;
      if (d <= rho)
        cell = -pi * std::conj(lambda - c);
      else if (d <= 2.0 * rho)
        cell = areas[i] / (c - lambda);
      else
        cell = areas[i] / (c - lambda) + areas[i] * moment2[i] / std::pow(c - lambda, 3);
      acc += -(1.0 / pi) * dbar_u(c) * cell;
    }
    return acc;
  }
};

}  // namespace

CauchyGreenReport cauchy_green_check(int n_contour, int n_radial) {
  CauchyGreenReport rep;
  // Defects averaged over a ring of interior samples; the average smooths
  // the phase of the samples relative to the cells so refinement ratios
  // are stable.
  std::vector<cplx> samples = {cplx(0.0, 0.0)};
  for (int j = 0; j < 12; ++j) samples.push_back(std::polar(0.55, 2.0 * pi * (j + 0.3) / 12));
  auto defects = [&](int nc, int nr) {
    DiskRule rule(nc, nr);
    double dh = 0, dc = 0, d2 = 0, dq = 0;
    for (const cplx& lam : samples) {
      dh = std::max(dh, std::abs(rule.reconstruct([](cplx z) { return z * z; },
                                                  [](cplx) { return cplx(0, 0); }, lam) -
                                 lam * lam));
      dc += std::abs(rule.reconstruct([](cplx z) { return std::conj(z); },
                                      [](cplx) { return cplx(1, 0); }, lam) -
                     std::conj(lam));
      d2 += std::abs(rule.reconstruct([](cplx z) { return std::norm(z); },
                                      [](cplx z) { return z; }, lam) -
                     std::norm(lam));
      // Non-holomorphic derivative: u = conj(z)^2/2, du/d(conj z) = conj(z).
      dq += std::abs(rule.reconstruct(
                [](cplx z) { return 0.5 * std::conj(z) * std::conj(z); },
                [](cplx z) { return std::conj(z); }, lam) -
            0.5 * std::conj(lam) * std::conj(lam));
    }
    const double inv = 1.0 / samples.size();
    return std::array<double, 4>{dh, dc * inv, d2 * inv, dq * inv};
  };
  auto coarse = defects(n_contour, n_radial);
  auto fine = defects(2 * n_contour, 2 * n_radial);
  rep.defect_holomorphic = coarse[0];
  rep.defect_conj = coarse[1];
  rep.defect_abs2 = coarse[2];
  rep.defect_conj_refined = fine[3];
  const double dq_coarse = coarse[3];
  // The contour part is spectrally exact; the area part carries the cell
  // rule's near-singular truncation, which must halve under refinement.
  rep.pass = rep.defect_holomorphic < 1e-8 && rep.defect_conj < 1e-2 &&
             rep.defect_abs2 < 1e-2 && rep.defect_conj_refined <= 0.6 * dq_coarse;
  return rep;
}

DiagnosticsReport diagnostics_report(const ScatteringData& f, const AnalyticPotential* pot,
                                     const RunConfig& cfg) {
  DiagnosticsReport rep;
  rep.N_hat = sup_norm_ME(f, cfg.mu);

  // Boundary-operator contraction surrogate on the weighted test function.
  const SphereGrid& g = f.grid;
  const int n = g.size();
  const int step = std::max(1, n / 6);
  for (int ik = 0; ik < n; ik += step) {
    const Vec3 k = g.nodes[ik];
    Vec3 seed = std::abs(k(2)) < 0.9 * g.radius ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
    const Vec3 g1 = k.cross(seed).normalized();
    const Vec3 g2 = k.cross(g1).normalized();
    for (const Vec3& gamma : {g1, g2}) {
      VectorXcd u(n);
      for (int l = 0; l < n; ++l)
        u(l) = std::pow(1.0 + (k - g.nodes[l]).squaredNorm(), -0.5 * cfg.mu);
      const VectorXcd Bu = faddeev::apply_B_gamma(f, gamma, k, u);
      double sup = 0, holder = 0;
      for (int l = 0; l < n; ++l)
        sup = std::max(sup,
                       std::pow(1.0 + (k - g.nodes[l]).squaredNorm(), 0.5 * cfg.mu) * std::abs(Bu(l)));
      // Hoelder seminorm over azimuth-neighbor pairs.
      for (int ip = 0; ip < g.n_polar; ++ip)
        for (int ia = 0; ia < g.n_azimuth; ++ia) {
          const int l0 = g.index(ip, ia), l1 = g.index(ip, (ia + 1) % g.n_azimuth);
          const double dist = (g.nodes[l0] - g.nodes[l1]).norm();
          if (dist > 1.0 || dist == 0.0) continue;
          holder = std::max(holder, std::pow(1.0 + (k - g.nodes[l0]).squaredNorm(), 0.5 * cfg.mu) *
                                        std::abs(Bu(l0) - Bu(l1)) / std::pow(dist, cfg.alpha));
        }
      rep.delta1_hat = std::max(rep.delta1_hat, sup);
      rep.delta2_hat = std::max(rep.delta2_hat, holder);
    }
  }

  if (pot) {
    // Contraction of the complex-momentum iteration at a mid-sized |Im k|.
    const double rs = std::sqrt(cfg.E);
    const double b = 0.4 * rs;
    coords::ComplexMomentum km;
    km.E = cfg.E;
    km.k = CVec3(cplx(std::sqrt(cfg.E + b * b), 0), cplx(0, b), cplx(0, 0));
    RunConfig local = cfg;
    local.ls_max_iter = std::max(cfg.ls_max_iter, 12);
    try {
      forward::HComplexSolution sol = forward::solve_H_complex(*pot, km, local, {24, -1});
      rep.eta_hat = sol.contraction_estimate;
    } catch (const std::runtime_error&) {
      rep.eta_hat = 1.0;  // divergence: flag as non-contracting
    }
  } else {
    rep.eta_hat = rep.delta1_hat;
  }

  if (rep.eta_hat < 1.0) {
    rep.r2 = std::pow(2.0, 0.5 * cfg.mu) * rep.N_hat / (1.0 - rep.eta_hat);
    const double z = (1.0 - cfg.tau * cfg.tau) / (4.0 * cfg.tau * cfg.tau);
    const double c4_tilde = (1.0 / std::sqrt(z)) * (1.0 + 1.0 / std::sqrt(z)) +
                            1.0 / (std::sqrt(cfg.E) * std::min(1.0, 2.0 * std::sqrt(z)));
    LambdaGrid lg(32, 8, 0.05, 20.0, 0.02);
    const double c5 = dbar::c5_quadrature(lg);
    const double band = std::pow(1.0 + 2.0 * cfg.tau * std::sqrt(cfg.E), cfg.mu - cfg.mu0);
    rep.r1 = 2.0 * (std::pow(2.0, 0.5 * cfg.mu) * rep.N_hat +
                    3.0 * c5 * c4_tilde * std::pow(2.0, cfg.mu) * rep.N_hat * rep.N_hat /
                        ((1.0 - rep.eta_hat) * (1.0 - rep.eta_hat) * band));
  } else {
    rep.r1 = rep.r2 = -1.0;
  }
  rep.contraction_ok = rep.eta_hat < 1.0 && rep.delta1_hat < 1.0;
  return rep;
}

}  // namespace verify
}  // namespace isct
