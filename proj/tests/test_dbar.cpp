#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isct/dbar.hpp"

using namespace isct;
using namespace isct::dbar;

namespace {

RunConfig base_config() {
  RunConfig cfg;
  cfg.E = 4.0;
  cfg.tau = 0.45;
  cfg.n_sphere = 8;
  cfg.n_lambda_circle = 32;
  cfg.n_lambda_radial = 6;
  cfg.n_p = 6;
  cfg.fp_tol = 1e-12;
  return cfg;
}

struct Grids {
  std::shared_ptr<LambdaGrid> lg;
  std::shared_ptr<PGrid> pg;
};

Grids make_grids(const RunConfig& cfg) {
  return {std::make_shared<LambdaGrid>(cfg), std::make_shared<PGrid>(cfg)};
}

ComplexField2D random_field(const Grids& g, double scale, int seed) {
  ComplexField2D U(g.lg, g.pg);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int j = 0; j < g.pg->size(); ++j) {
    const double w = std::pow(1.0 + g.pg->nodes[j].norm(), -2.0);
    for (int i = 0; i < g.lg->n_area(); ++i)
      U.values(i, j) = scale * w * cplx(u(rng), u(rng));
  }
  return U;
}

// Momentum-variety function identically one, for closed-form circle
// integrals of the quadratic form's weight.
class OneEvaluator : public HEvaluator {
 public:
  cplx at_chart(cplx, const Vec3&) const override { return 1.0; }
  cplx at_momentum(const coords::ComplexMomentum&, const Vec3&) const override { return 1.0; }
};

}  // namespace

TEST_CASE("bracket basics") {
  RunConfig cfg = base_config();
  Grids g = make_grids(cfg);
  BracketEngine engine(cfg, g.lg, g.pg);
  const Vec3 p = g.pg->nodes[g.pg->size() / 3];

  SUBCASE("zero field annihilates the form") {
    ComplexField2D zero(g.lg, g.pg);
    ComplexField2D other = random_field(g, 1.0, 3);
    CHECK(std::abs(engine.eval(zero, other, cplx(0.4, 0.3), p)) == 0.0);
    CHECK(std::abs(engine.eval(other, zero, cplx(0.4, 0.3), p)) == 0.0);
  }
  SUBCASE("constant integrand reproduces the closed-form weight integral") {
    // With both factors forced to one and no cutoffs, the sine part drops
    // and the cosine part integrates to -2 pi.
    OneEvaluator one;
    for (const cplx lambda : {cplx(0.5, 0.3), cplx(1.4, -0.8)}) {
      const cplx got = bilinear_bracket_full(one, lambda, p, cfg.E, cfg.nu, 128);
      const double a2 = std::norm(lambda);
      const cplx expect = -(pi / 4.0) * std::sqrt(cfg.E - 0.25 * p.squaredNorm()) *
                          (a2 > 1 ? 1.0 : -1.0) * (a2 + 1.0) /
                          (std::conj(lambda) * std::abs(lambda)) * (-2.0 * pi);
      CHECK(std::abs(got - expect) < 1e-10 * std::abs(expect));
    }
  }
  SUBCASE("bilinearity and the difference identity") {
    ComplexField2D U1 = random_field(g, 1.0, 5);
    ComplexField2D U2 = random_field(g, 0.7, 6);
    const cplx lambda(0.62, -0.35);
    const cplx a(0.3, 1.1);
    ComplexField2D Ua = U1;
    Ua.values *= a;
    CHECK(std::abs(engine.eval(Ua, U2, lambda, p) - a * engine.eval(U1, U2, lambda, p)) < 1e-12);
    CHECK(std::abs(engine.eval(U2, Ua, lambda, p) - a * engine.eval(U2, U1, lambda, p)) < 1e-12);
    // (U1,U1) - (U2,U2) = (U1-U2, U1) + (U2, U1-U2)
    ComplexField2D D = U1;
    D.values -= U2.values;
    const cplx lhs = engine.eval(U1, U1, lambda, p) - engine.eval(U2, U2, lambda, p);
    const cplx rhs = engine.eval(D, U1, lambda, p) + engine.eval(U2, D, lambda, p);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  SUBCASE("decay in lambda") {
    ComplexField2D U = random_field(g, 1.0, 7);
    const double v1 = std::abs(engine.eval(U, U, cplx(1.6, 0.4), p));
    const double v2 = std::abs(engine.eval(U, U, cplx(6.0, 2.0), p));
    const double v3 = std::abs(engine.eval(U, U, cplx(14.0, 6.0), p));
    CHECK(v2 < v1);
    CHECK(v3 < v2);
  }
}

TEST_CASE("boundary transforms") {
  RunConfig cfg = base_config();
  Grids g = make_grids(cfg);
  BoundaryData bd(g.lg, g.pg);
  const int nc = static_cast<int>(g.lg->circle_nodes.size());

  SUBCASE("constants pass through both kernels") {
    const cplx c(0.8, -0.2);
    bd.plus.setConstant(c);
    bd.minus.setConstant(c);
    CHECK(std::abs(cauchy_boundary_h0(bd, cplx(0.3, 0.2), 0) - c) < 1e-12);
    // The exterior kernel's contour aliasing decays like |lambda|^{-n}.
    CHECK(std::abs(cauchy_boundary_h0(bd, cplx(1.7, -0.9), 0) - c) < 2e-8);
    CHECK(std::abs(boundary_limit_h0(bd, true, 5, 0, cfg.E) - c) < 1e-12);
    CHECK(std::abs(boundary_limit_h0(bd, false, 5, 0, cfg.E) - c) < 1e-12);
  }
  SUBCASE("monomials reproduce residue values") {
    for (int j = 0; j < nc; ++j) {
      const cplx z = g.lg->circle_nodes[j];
      bd.plus(j, 0) = z * z;
      bd.minus(j, 0) = 1.0 / z;
    }
    const cplx li(0.35, 0.2), lo(2.2, 1.1);
    CHECK(std::abs(cauchy_boundary_h0(bd, li, 0) - li * li) < 1e-12);
    CHECK(std::abs(cauchy_boundary_h0(bd, lo, 0) - 1.0 / lo) < 2e-8);
    const int jn = 3;
    const cplx zn = g.lg->circle_nodes[jn];
    CHECK(std::abs(boundary_limit_h0(bd, true, jn, 0, cfg.E) - zn * zn) < 1e-4);
    CHECK(std::abs(boundary_limit_h0(bd, false, jn, 0, cfg.E) - 1.0 / zn) < 1e-4);
  }
  SUBCASE("near-circle arguments are rejected") {
    CHECK_THROWS_WITH(cauchy_boundary_h0(bd, std::polar(1.001, 0.3), 0), "use boundary-limit op");
  }
  SUBCASE("interior evaluation converges to the one-sided limit") {
    for (int j = 0; j < nc; ++j) {
      const cplx z = g.lg->circle_nodes[j];
      bd.plus(j, 0) = z * z + 0.5 * z;
    }
    const int jn = 7;
    const cplx zn = g.lg->circle_nodes[jn];
    const cplx limit = boundary_limit_h0(bd, true, jn, 0, cfg.E);
    double prev = 1e9;
    for (double eps : {0.3, 0.15, 0.075}) {
      const double gap = std::abs(cauchy_boundary_h0(bd, (1.0 - eps) * zn, 0) - limit);
      CHECK(gap < prev);
      prev = gap;
    }
  }
}

TEST_CASE("cauchy data assembly matches the pointwise transform") {
  RunConfig cfg = base_config();
  Grids g = make_grids(cfg);
  BoundaryData bd(g.lg, g.pg);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int j = 0; j < g.pg->size(); ++j)
    for (int i = 0; i < static_cast<int>(g.lg->circle_nodes.size()); ++i) {
      bd.plus(i, j) = cplx(u(rng), u(rng));
      bd.minus(i, j) = cplx(u(rng), u(rng));
    }
  const ComplexField2D h0 = build_cauchy_data(bd);
  for (int i = 0; i < g.lg->n_area(); i += 23)
    for (int j = 0; j < g.pg->size(); j += 13)
      CHECK(std::abs(h0.values(i, j) - cauchy_boundary_h0(bd, g.lg->area_nodes[i], j)) < 1e-13);
}

TEST_CASE("magnitude cap") {
  RunConfig cfg = base_config();
  Grids g = make_grids(cfg);
  ComplexField2D under(g.lg, g.pg);
  const double N = 0.5;
  for (int j = 0; j < g.pg->size(); ++j)
    under.values.col(j).setConstant(0.9 * std::pow(2.0, 0.5 * cfg.mu) * N *
                                    std::pow(1.0 + g.pg->nodes[j].norm(), -cfg.mu));
  const ComplexField2D same = cap_h0(under, N, 0.1, 0.1, cfg.beta, cfg);
  CHECK((same.values - under.values).cwiseAbs().maxCoeff() == 0.0);

  ComplexField2D over = under;
  over.values *= cplx(3.0, 1.0) / std::abs(cplx(3.0, 1.0)) * 4.0;
  const ComplexField2D capped = cap_h0(over, N, 0.1, 0.1, cfg.beta, cfg);
  for (int j = 0; j < g.pg->size(); ++j) {
    const double bound =
        std::pow(2.0, 0.5 * cfg.mu) * N * std::pow(1.0 + g.pg->nodes[j].norm(), -cfg.mu);
    for (int i = 0; i < g.lg->n_area(); ++i) {
      CHECK(std::abs(capped.values(i, j)) == doctest::Approx(bound).epsilon(1e-12));
      // Phase preserved.
      const cplx a = capped.values(i, j) / std::abs(capped.values(i, j));
      const cplx b = over.values(i, j) / std::abs(over.values(i, j));
      CHECK(std::abs(a - b) < 1e-12);
    }
  }
  const ComplexField2D twice = cap_h0(capped, N, 0.1, 0.1, cfg.beta, cfg);
  CHECK((twice.values - capped.values).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("area transform of a constant quadratic form") {
  RunConfig cfg = base_config();
  // Closed forms: annular transforms with the grid's inner hole and rim.
  auto worst_error = [&](int n_radial) {
    RunConfig c2 = cfg;
    c2.n_lambda_radial = n_radial;
    Grids g = make_grids(c2);
    MOperator op(g.lg);
    const cplx gval(0.4, -0.7);
    MatrixXcd bracket = MatrixXcd::Constant(g.lg->n_area(), g.pg->size(), gval);
    ComplexField2D like(g.lg, g.pg);
    const ComplexField2D out = apply_M_from_bracket(op, bracket, like);
    const double r0 = g.lg->lambda_min;
    const double A = 1.0 + g.lg->eps_T;
    double worst = 0;
    for (int i = 0; i < g.lg->n_area(); ++i) {
      const cplx lam = g.lg->area_nodes[i];
      const double edge = g.lg->is_inner(i) ? r0 : A;
      const cplx expect = gval * (std::conj(lam) - edge * edge / lam);
      // Normalize by the local magnitude scale of the transform.
      worst = std::max(worst, std::abs(out.values(i, 0) - expect) /
                                  (std::abs(gval) * (1.0 + std::abs(lam))));
    }
    return worst;
  };
  const double coarse = worst_error(6);
  const double fine = worst_error(12);
  CHECK(coarse < 0.05);
  CHECK(fine < 0.7 * coarse);
}

TEST_CASE("fixed point") {
  RunConfig cfg = base_config();
  Grids g = make_grids(cfg);
  BracketEngine engine(cfg, g.lg, g.pg);
  MOperator op(g.lg);

  SUBCASE("zero data solves in one step") {
    ComplexField2D zero(g.lg, g.pg);
    const DbarState st = solve_fixed_point(zero, engine, op, cfg);
    CHECK(st.diagnostics.iterations == 1);
    CHECK(triple_norm(st.Htilde, cfg.mu0) == 0.0);
  }
  SUBCASE("first correction is quadratic in the data size") {
    std::vector<double> lx, ly;
    for (double s : {0.2, 0.1, 0.05}) {
      ComplexField2D h0 = random_field(g, s, 21);
      const DbarState st = solve_fixed_point(h0, engine, op, cfg);
      ComplexField2D diff = st.Htilde;
      diff.values -= h0.values;
      lx.push_back(std::log(s));
      ly.push_back(std::log(triple_norm(diff, cfg.mu0)));
    }
    const double slope =
        (ly.back() - ly.front()) / (lx.back() - lx.front());
    CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("lipschitz stability of the solution map") {
    ComplexField2D a = random_field(g, 0.25, 31);
    ComplexField2D b = a;
    ComplexField2D bump = random_field(g, 0.02, 32);
    b.values += bump.values;
    const DbarState sa = solve_fixed_point(a, engine, op, cfg);
    const DbarState sb = solve_fixed_point(b, engine, op, cfg);
    const double q =
        std::max(sa.diagnostics.contraction_estimate, sb.diagnostics.contraction_estimate);
    REQUIRE(q < 1.0);
    ComplexField2D dsol = sa.Htilde;
    dsol.values -= sb.Htilde.values;
    ComplexField2D ddata = a;
    ddata.values -= b.values;
    CHECK(triple_norm(dsol, cfg.mu0) <=
          (1.0 + 1e-9) / (1.0 - q) * triple_norm(ddata, cfg.mu0));
  }
}

TEST_CASE("area transform constant is finite and grid-stable") {
  LambdaGrid g1(32, 8, 0.05, 20.0, 0.02);
  LambdaGrid g2(64, 16, 0.05, 20.0, 0.02);
  const double c1 = c5_quadrature(g1);
  const double c2 = c5_quadrature(g2);
  CHECK(c1 > 0.5);
  CHECK(c1 < 5.0);
  CHECK(std::abs(c1 - c2) < 0.05 * c2);
}

TEST_CASE("derivative identity for the complex-momentum oracle") {
  RunConfig cfg = base_config();
  cfg.tau = 0.9;
  cfg.ls_tol = 1e-11;

  SUBCASE("zero potential is flat") {
    const AnalyticPotential zero = AnalyticPotential::gaussian(0.0, 1.0);
    forward::HOracle oracle(zero, cfg, {12, 6.0});
    OracleEvaluator ev(oracle);
    const ResidualSample rs = dbar_residual(ev, cplx(0.4, 0.4), Vec3(0.5, 0.2, 0.3), cfg, 0.05, 8);
    CHECK(std::abs(rs.lhs) == 0.0);
    CHECK(std::abs(rs.rhs) == 0.0);
  }
  SUBCASE("residual is a small fraction of both sides on a coarse case") {
    const AnalyticPotential pot = AnalyticPotential::gaussian(0.6, 1.5);
    forward::HOracle oracle(pot, cfg, {24, -1});
    OracleEvaluator ev(oracle);
    for (const auto& [lambda, p] :
         {std::pair<cplx, Vec3>{cplx(0.45, 0.45), Vec3(0.6, 0.3, 0.4)},
          std::pair<cplx, Vec3>{cplx(1.35, -0.55), Vec3(-0.4, 0.7, 0.2)}}) {
      const ResidualSample rs = dbar_residual(ev, lambda, p, cfg, 0.03, 16);
      const double scale = std::max(std::abs(rs.lhs), std::abs(rs.rhs));
      REQUIRE(scale > 0.0);
      CHECK(std::abs(rs.residual) < 0.15 * scale);
    }
  }
  SUBCASE("stencil may not straddle the circle") {
    const AnalyticPotential pot = AnalyticPotential::gaussian(0.3, 1.5);
    forward::HOracle oracle(pot, cfg, {12, 6.0});
    OracleEvaluator ev(oracle);
    CHECK_THROWS_AS(dbar_residual(ev, std::polar(1.01, 0.3), Vec3(0.5, 0.2, 0.3), cfg, 0.05, 8),
                    std::runtime_error);
  }
}
