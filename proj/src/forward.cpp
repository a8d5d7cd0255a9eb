#include "isct/forward.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fft3.hpp"
#include "isct/parallel.hpp"
#include "isct/quadrature.hpp"

namespace isct {
namespace forward {

double default_r_max(const AnalyticPotential& pot, double E) {
  // Past sqrt(E) + ~9/width the transform kernel is below 1e-8 relative.
  double reach = 0.0;
  for (const auto& t : pot.terms)
    reach = std::max(reach, t.center.norm() + 9.0 / t.width);
  return std::sqrt(E) + reach + 1.0;
}

LsSystem make_ls_system(const AnalyticPotential& pot, const SphereGrid& sphere, double r_max,
                        int n_panel, int pts_per_panel, double pv_scale) {
  LsSystem sys;
  sys.sphere = sphere;
  sys.pot = pot;
  const double E = sphere.E;
  const double rs = sphere.radius;
  const double d = 0.5 * rs * pv_scale;

  std::vector<double> radii, rweights, xs, ws;
  auto add_panels = [&](double a, double b, int panels) {
    for (int p = 0; p < panels; ++p) {
      const double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
      gauss_legendre_ab(pts_per_panel, lo, hi, xs, ws);
      for (int i = 0; i < pts_per_panel; ++i) {
        radii.push_back(xs[i]);
        rweights.push_back(ws[i]);
      }
    }
  };
  add_panels(0.0, rs - d, n_panel);
  // Mirrored pairs about the shell radius realize the principal value.
  gauss_legendre_ab(pts_per_panel * n_panel, 0.0, d, xs, ws);
  for (size_t i = 0; i < xs.size(); ++i) {
    radii.push_back(rs - xs[i]);
    rweights.push_back(ws[i]);
    radii.push_back(rs + xs[i]);
    rweights.push_back(ws[i]);
  }
  add_panels(rs + d, r_max, n_panel);

  const int ns = sphere.size();
  sys.pos.reserve((radii.size() + 1) * ns);
  sys.qweight.reserve(sys.pos.capacity());
  for (size_t ir = 0; ir < radii.size(); ++ir) {
    const double r = radii[ir];
    const double pv = rweights[ir] * r * r / (r * r - E);
    for (int is = 0; is < ns; ++is) {
      sys.pos.push_back((r / rs) * sphere.nodes[is]);
      sys.qweight.push_back(pv * sphere.weights[is] / E);
    }
  }
  sys.shell_offset = static_cast<int>(sys.pos.size());
  const cplx shell_factor = iu * pi / (2.0 * rs);
  for (int is = 0; is < ns; ++is) {
    sys.pos.push_back(sphere.nodes[is]);
    sys.qweight.push_back(shell_factor * sphere.weights[is]);
  }
  return sys;
}

MatrixXcd LsSystem::make_rhs() const {
  const int N = size();
  const int nk = sphere.size();
  MatrixXcd rhs(N, nk);
  for (int c = 0; c < nk; ++c)
    for (int m = 0; m < N; ++m) rhs(m, c) = vhat_eval(pot, sphere.nodes[c] - pos[m]);
  return rhs;
}

MatrixXcd LsSystem::apply(const MatrixXcd& U) const {
  const int N = size();
  const int block = 256;
  MatrixXcd out(N, U.cols());
  MatrixXcd K(block, N);
  for (int lo = 0; lo < N; lo += block) {
    const int rows = std::min(block, N - lo);
    parallel_for(rows, [&](int rr) {
      const int l = lo + rr;
      for (int m = 0; m < N; ++m) K(rr, m) = qweight[m] * vhat_eval(pot, pos[m] - pos[l]);
    });
    out.middleRows(lo, rows).noalias() = K.topRows(rows) * U;
  }
  return out;
}

MatrixXcd LsSystem::shell(const MatrixXcd& U) const {
  const int nk = sphere.size();
  MatrixXcd f(nk, nk);
  for (int c = 0; c < static_cast<int>(U.cols()); ++c)
    for (int j = 0; j < nk; ++j) f(c, j) = U(shell_offset + j, c);
  return f;
}

ScatteringData solve_f_LS_resolved(const AnalyticPotential& pot, const SphereGrid& grid,
                                   const RunConfig& cfg, int n_panel, int pts_per_panel,
                                   double pv_scale, LsReport* report) {
  const LsSystem sys =
      make_ls_system(pot, grid, default_r_max(pot, grid.E), n_panel, pts_per_panel, pv_scale);
  const MatrixXcd rhs = sys.make_rhs();
  MatrixXcd U = rhs;
  double prev_inc = -1.0, contraction = 0.0, inc = 0.0;
  int it = 0;
  for (;; ++it) {
    if (it >= cfg.ls_max_iter) {
      std::ostringstream msg;
      msg << "LS divergence: residual " << inc << " after " << it << " iterations";
      throw std::runtime_error(msg.str());
    }
    MatrixXcd next = rhs - sys.apply(U);
    inc = (next - U).cwiseAbs().maxCoeff();
    if (prev_inc > 0) contraction = inc / prev_inc;
    prev_inc = inc;
    U = std::move(next);
    if (inc < cfg.ls_tol) break;
  }

  ScatteringData data(grid);
  data.f = sys.shell(U);
  if (report) {
    report->iterations = it + 1;
    report->last_residual = inc;
    report->contraction_estimate = contraction;
    double defect = 0.0;
    const int nk = grid.size();
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j)
        defect = std::max(defect,
                          std::abs(data.f(i, j) - data.f(grid.antipode(i), grid.antipode(j))));
    report->reciprocity_defect = defect;
  }
  return data;
}

ScatteringData solve_f_LS(const AnalyticPotential& pot, const SphereGrid& grid,
                          const RunConfig& cfg, LsReport* report) {
  return solve_f_LS_resolved(pot, grid, cfg, 2, 7, 1.0, report);
}

cplx HComplexSolution::eval(const Vec3& q) const {
  const Vec3 w = (frame * q) / scale;
  const cplx lead = vhat_eval(pot, q);
  const double fx = (w(0) - origin(0)) / h, fy = (w(1) - origin(1)) / h,
               fz = (w(2) - origin(2)) / h;
  const int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy)),
            iz = static_cast<int>(std::floor(fz));
  const double tx = fx - ix, ty = fy - iy, tz = fz - iz;
  cplx acc = 0.0;
  for (int dx = 0; dx <= 1; ++dx)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dz = 0; dz <= 1; ++dz) {
        const int cx = ix + dx, cy = iy + dy, cz = iz + dz;
        if (cx < 0 || cy < 0 || cz < 0 || cx >= n || cy >= n || cz >= n) continue;
        const double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) * (dz ? tz : 1 - tz);
        acc += w * values[(static_cast<size_t>(cx) * n + cy) * n + cz];
      }
  return lead + acc;
}

HComplexSolution solve_H_complex(const AnalyticPotential& pot, const coords::ComplexMomentum& km,
                                 const RunConfig& cfg, const HGridSpec& spec) {
  if (km.im().norm() == 0.0) throw std::runtime_error("Im k = 0: kernel singular on R^3");
  HComplexSolution sol;
  sol.k = km.k;
  sol.E = km.E;
  sol.n = spec.n;
  sol.pot = pot;
  double L = spec.L;
  if (L <= 0) {
    double reach = 0.0;
    for (const auto& t : pot.terms) reach = std::max(reach, t.center.norm() + 8.6 / t.width);
    L = std::max(reach, 1.1 * 2.0 * std::sqrt(km.E));
  }
  const int n = sol.n;
  const double r0 = km.re().norm();
  const double b_im = km.im().norm();
  const double scale = r0 / std::sqrt(km.E);
  sol.scale = scale;
  // The box is fixed in lattice units; its physical size scale * L only
  // grows with |Re k| (scale >= 1), so the requested coverage is kept.
  sol.L = L;
  sol.h = 2.0 * sol.L / n;
  sol.origin = Vec3::Constant(-sol.L + 0.5 * sol.h);  // offset lattice avoids q = 0
  {
    const Vec3 e1 = km.re() / r0;
    const Vec3 e3 = km.im() / b_im;
    const Vec3 e2 = e3.cross(e1);
    sol.frame.row(0) = e1;
    sol.frame.row(1) = e2;
    sol.frame.row(2) = e3;
  }
  const Eigen::Matrix3d to_world = scale * sol.frame.transpose();

  const size_t n3 = static_cast<size_t>(n) * n * n;
  std::vector<cplx> rhs(n3), invden(n3);
  std::array<std::vector<cplx>, 3> mom1;  // first moment of 1/den per cell
  for (auto& m : mom1) m.assign(n3, cplx(0, 0));
  // The kernel denominator vanishes on a circle. Cells near it take the
  // sub-sampled cell average of 1/den plus its first moment, so the lattice
  // quadrature stays accurate across the singular tube and, importantly,
  // smooth under small changes of k (stencil derivatives in the chart
  // variable probe exactly that smoothness). Both corrections blend back
  // into the plain midpoint rule away from the tube.
  // In lattice coordinates the denominator's zero set is the fixed circle
  // w3 = 0, |w - sqrt(E) e1| = sqrt(E); k enters only through the smooth
  // scalars scale and |Im k|.
  const double rsE = std::sqrt(km.E);
  auto den_at = [&](const Vec3& w) {
    return cplx(scale * scale * (w.squaredNorm() - 2.0 * rsE * w(0)),
                -2.0 * b_im * scale * w(2));
  };
  const Vec3 rek_w(rsE, 0, 0);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const Vec3 q = sol.origin + sol.h * Vec3(ix, iy, iz);
        const size_t id = (static_cast<size_t>(ix) * n + iy) * n + iz;
        rhs[id] = vhat_eval(pot, to_world * q);
        const cplx den = den_at(q);
        const double grad = 2.0 * scale * (scale * (q - rek_w).norm() + b_im);
        const double ratio = std::abs(den) / (sol.h * grad);
        if (ratio > 6.0) {
          invden[id] = 1.0 / den;
          continue;
        }
        const int nsub = ratio < 1.5 ? 17 : 7;
        const double hsub = sol.h / nsub;
        const double sub_floor = 1e-3 * hsub * 2.0 * scale * std::max(b_im, 1e-6);
        cplx acc = 0.0;
        CVec3 m1 = CVec3::Zero();
        for (int sx = 0; sx < nsub; ++sx)
          for (int sy = 0; sy < nsub; ++sy)
            for (int sz = 0; sz < nsub; ++sz) {
              const Vec3 d = hsub * Vec3(sx - 0.5 * (nsub - 1), sy - 0.5 * (nsub - 1),
                                         sz - 0.5 * (nsub - 1));
              const cplx ds = den_at(q + d);
              if (std::abs(ds) > sub_floor) {
                const cplx w = 1.0 / ds;
                acc += w;
                m1 += w * d.cast<cplx>();
              }
            }
        const double inv_cnt = 1.0 / (static_cast<double>(nsub) * nsub * nsub);
        const cplx averaged = acc * inv_cnt;
        const double t = std::clamp((ratio - 3.0) / 3.0, 0.0, 1.0);
        invden[id] = (std::abs(den) > 0 ? t / den : cplx(0, 0)) + (1.0 - t) * averaged;
        const double tm = std::clamp((6.0 - ratio) / 3.0, 0.0, 1.0);
        for (int c = 0; c < 3; ++c) mom1[c][id] = tm * m1(c) * inv_cnt;
      }

  // Convolution kernels vhat(h d) and its gradient on the doubled grid,
  // transformed once. The gradient kernels carry the first-moment terms.
  const int M = 2 * n;
  Fft3 fft(M);
  const size_t M3 = static_cast<size_t>(M) * M * M;
  std::vector<cplx> ker(M3, cplx(0, 0));
  std::array<std::vector<cplx>, 3> gker;
  for (auto& k : gker) k.assign(M3, cplx(0, 0));
  for (int dx = -(n - 1); dx <= n - 1; ++dx)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dz = -(n - 1); dz <= n - 1; ++dz) {
        const int jx = (dx + M) % M, jy = (dy + M) % M, jz = (dz + M) % M;
        const size_t id = (static_cast<size_t>(jx) * M + jy) * M + jz;
        const Vec3 d = to_world * (sol.h * Vec3(dx, dy, dz));
        ker[id] = vhat_eval(pot, d);
        const CVec3 gv = scale * (sol.frame.cast<cplx>() * vhat_grad(pot, d));
        for (int c = 0; c < 3; ++c) gker[c][id] = gv(c);
      }
  fft.forward(ker);
  for (auto& k : gker) fft.forward(k);

  std::vector<cplx> G = rhs, work(M3), acc_fourier(M3);
  const double hp = sol.h * scale;  // physical spacing
  const double vol = hp * hp * hp;
  const double inv2h = 1.0 / (2.0 * sol.h);
  double prev_inc = -1.0, inc = 0.0;
  const int iter_cap = spec.neumann_terms >= 0 ? spec.neumann_terms : cfg.ls_max_iter;
  auto lattice = [&](int ix, int iy, int iz) -> size_t {
    return (static_cast<size_t>(ix) * n + iy) * n + iz;
  };
  auto g_at = [&](int ix, int iy, int iz) -> cplx {
    if (ix < 0 || iy < 0 || iz < 0 || ix >= n || iy >= n || iz >= n) return 0.0;
    return G[lattice(ix, iy, iz)];
  };
  int it = 0;
  for (; it < iter_cap; ++it) {
    // Zeroth moment plus the grad-G part of the first-moment correction,
    // convolved against vhat.
    std::fill(work.begin(), work.end(), cplx(0, 0));
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          const size_t src = lattice(ix, iy, iz);
          cplx val = G[src] * invden[src];
          if (mom1[0][src] != cplx(0, 0) || mom1[1][src] != cplx(0, 0) ||
              mom1[2][src] != cplx(0, 0)) {
            const cplx gx = (g_at(ix + 1, iy, iz) - g_at(ix - 1, iy, iz)) * inv2h;
            const cplx gy = (g_at(ix, iy + 1, iz) - g_at(ix, iy - 1, iz)) * inv2h;
            const cplx gz = (g_at(ix, iy, iz + 1) - g_at(ix, iy, iz - 1)) * inv2h;
            val += gx * mom1[0][src] + gy * mom1[1][src] + gz * mom1[2][src];
          }
          work[(static_cast<size_t>(ix) * M + iy) * M + iz] = val;
        }
    fft.forward(work);
    for (size_t i = 0; i < M3; ++i) acc_fourier[i] = work[i] * ker[i];
    // G times the first moment, convolved against -grad vhat.
    for (int c = 0; c < 3; ++c) {
      std::fill(work.begin(), work.end(), cplx(0, 0));
      bool any = false;
      for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
          for (int iz = 0; iz < n; ++iz) {
            const size_t src = lattice(ix, iy, iz);
            const cplx v = G[src] * mom1[c][src];
            if (v != cplx(0, 0)) {
              work[(static_cast<size_t>(ix) * M + iy) * M + iz] = v;
              any = true;
            }
          }
      if (!any) continue;
      fft.forward(work);
      for (size_t i = 0; i < M3; ++i) acc_fourier[i] -= work[i] * gker[c][i];
    }
    fft.inverse(acc_fourier);
    inc = 0.0;
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const size_t src = (static_cast<size_t>(ix) * M + iy) * M;
        const size_t dst = (static_cast<size_t>(ix) * n + iy) * n;
        for (int iz = 0; iz < n; ++iz) {
          const cplx next = rhs[dst + iz] - vol * acc_fourier[src + iz];
          inc = std::max(inc, std::abs(next - G[dst + iz]));
          G[dst + iz] = next;
        }
      }
    if (prev_inc > 0) sol.contraction_estimate = inc / prev_inc;
    prev_inc = inc;
    if (spec.neumann_terms < 0 && inc < cfg.ls_tol) { ++it; break; }
  }
  if (spec.neumann_terms < 0 && inc >= cfg.ls_tol) {
    std::ostringstream msg;
    msg << "LS divergence (complex momentum): residual " << inc;
    throw std::runtime_error(msg.str());
  }
  sol.iterations = it;
  sol.last_residual = inc;
  for (size_t i = 0; i < n3; ++i) G[i] -= rhs[i];  // store the correction only
  sol.values = std::move(G);
  return sol;
}

std::vector<cplx> solve_H_complex_at(const AnalyticPotential& pot,
                                     const coords::ComplexMomentum& k,
                                     const std::vector<Vec3>& p_list, const RunConfig& cfg,
                                     const HGridSpec& spec) {
  const HComplexSolution sol = solve_H_complex(pot, k, cfg, spec);
  std::vector<cplx> out;
  out.reserve(p_list.size());
  for (const auto& p : p_list) out.push_back(sol.eval(p));
  return out;
}

HOracle::HOracle(AnalyticPotential pot, RunConfig cfg, HGridSpec spec)
    : pot_(std::move(pot)), cfg_(std::move(cfg)), spec_(spec) {}

const HComplexSolution& HOracle::solution_for(const coords::ComplexMomentum& km) const {
  for (const auto& [key, sol] : cache_)
    if ((key - km.k).norm() < 1e-12 * std::max(1.0, km.k.norm())) return *sol;
  auto sol = std::make_shared<HComplexSolution>(solve_H_complex(pot_, km, cfg_, spec_));
  cache_.emplace_back(km.k, sol);
  return *cache_.back().second;
}

cplx HOracle::at(const coords::ComplexMomentum& km, const Vec3& q) const {
  return solution_for(km).eval(q);
}

cplx HOracle::at_chart(cplx lambda, const Vec3& p) const {
  const coords::Frame fr = coords::frame_of(p, cfg_.nu);
  return at(coords::k_from_lambda(lambda, p, cfg_.E, fr), p);
}

double HOracle::measured_contraction() const {
  double q = 0.0;
  for (const auto& [key, sol] : cache_) q = std::max(q, sol->contraction_estimate);
  return q;
}

}  // namespace forward
}  // namespace isct
