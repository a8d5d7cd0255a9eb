#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isct/extract.hpp"

using namespace isct;
using namespace isct::extract;

namespace {

RunConfig base_config() {
  RunConfig cfg;
  cfg.E = 4.0;
  cfg.tau = 0.45;
  cfg.n_lambda_circle = 32;
  cfg.n_lambda_radial = 6;
  cfg.n_p = 6;
  cfg.n_x = 5;
  return cfg;
}

}  // namespace

TEST_CASE("transform limits") {
  RunConfig cfg = base_config();
  auto lg = std::make_shared<LambdaGrid>(cfg);
  auto pg = std::make_shared<PGrid>(cfg);
  dbar::BracketEngine engine(cfg, lg, pg);
  dbar::MOperator op(lg);
  BoundaryData bd(lg, pg);
  dbar::DbarState state;
  state.H0 = ComplexField2D(lg, pg);
  state.Htilde = ComplexField2D(lg, pg);

  SUBCASE("zero data gives zero limits") {
    const VhatPair v = vhat_pm(state, bd, engine, op);
    CHECK(v.plus.cwiseAbs().maxCoeff() == 0.0);
    CHECK(v.minus.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("constant boundary data with a vanishing quadratic term") {
    const cplx cp(0.7, 0.1), cm(0.2, -0.4);
    bd.plus.setConstant(cp);
    bd.minus.setConstant(cm);
    const VhatPair v = vhat_pm(state, bd, engine, op);
    for (int j = 0; j < pg->size(); ++j) {
      CHECK(std::abs(v.plus(j) - cp) < 1e-13);
      CHECK(std::abs(v.minus(j) - cm) < 1e-13);
    }
  }
  SUBCASE("unsolved state is rejected") {
    dbar::DbarState empty;
    CHECK_THROWS_AS(vhat_pm(empty, bd, engine, op), std::runtime_error);
  }
}

TEST_CASE("consistency gap") {
  RunConfig cfg = base_config();
  PGrid pg(cfg);
  VectorXcd a = VectorXcd::Zero(pg.size());
  for (int i = 0; i < pg.size(); ++i) a(i) = cplx(0.1 * i, -0.05 * i);
  CHECK(consistency_gap(a, a, pg, cfg.mu0) == 0.0);
  VectorXcd b = a;
  for (int i = 0; i < pg.size(); ++i) b(i) += std::pow(1.0 + pg.nodes[i].norm(), -cfg.mu0);
  CHECK(consistency_gap(a, b, pg, cfg.mu0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("real-space assembly") {
  RunConfig cfg = base_config();
  cfg.E = 9.0;
  cfg.tau = 0.8;
  cfg.n_p = 12;
  PGrid pg(cfg);

  SUBCASE("zero field and linearity") {
    const Reconstruction zero = reconstruct_v(VectorXcd::Zero(pg.size()), pg, cfg);
    for (double v : zero.v_appr) CHECK(v == 0.0);
    VectorXcd a(pg.size()), b(pg.size());
    for (int i = 0; i < pg.size(); ++i) {
      a(i) = cplx(std::sin(0.2 * i), std::cos(0.3 * i));
      b(i) = cplx(std::cos(0.15 * i), std::sin(0.12 * i));
    }
    const Reconstruction ra = reconstruct_v(a, pg, cfg);
    const Reconstruction rb = reconstruct_v(b, pg, cfg);
    const Reconstruction rab = reconstruct_v(a + b, pg, cfg);
    for (size_t i = 0; i < ra.v_appr.size(); ++i)
      CHECK(rab.v_appr[i] == doctest::Approx(ra.v_appr[i] + rb.v_appr[i]).epsilon(1e-12));
  }
  SUBCASE("band-limited recovery within the reported tail") {
    const AnalyticPotential pot = AnalyticPotential::gaussian(1.0, 1.8);
    VectorXcd samples(pg.size());
    for (int i = 0; i < pg.size(); ++i) samples(i) = vhat_eval(pot, pg.nodes[i]);
    const Reconstruction rec = reconstruct_v(samples, pg, cfg, &pot);
    CHECK(rec.tail_bound > 0.0);
    double worst = 0;
    for (size_t i = 0; i < rec.x_nodes.size(); ++i)
      worst = std::max(worst, std::abs(rec.v_appr[i] - pot.eval(rec.x_nodes[i])));
    // In-band lattice quadrature error plus the analytic out-of-band tail.
    CHECK(worst < rec.tail_bound + 0.03 * pot.eval(Vec3::Zero()));
  }
}
