#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isct/fields.hpp"
#include "isct/potentials.hpp"

using namespace isct;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.E = 4.0;
  cfg.tau = 0.45;
  cfg.n_sphere = 8;
  cfg.n_lambda_circle = 16;
  cfg.n_lambda_radial = 5;
  cfg.n_p = 6;
  return cfg;
}

}  // namespace

TEST_CASE("sphere grid reproduces the area and node radius") {
  const double E = 4.0;
  SphereGrid g(E, 12);
  double area = 0;
  for (double w : g.weights) area += w;
  CHECK(area == doctest::Approx(4.0 * pi * E).epsilon(1e-6));
  for (const Vec3& m : g.nodes) CHECK(std::abs(m.squaredNorm() - E) <= 1e-10 * E);
}

TEST_CASE("sphere quadrature error drops at the scheme's order on refinement") {
  // Smooth integrand exp(a.m / sqrt(E)); exact value 4 pi E sinh(|a|)/|a|.
  const double E = 2.0;
  const Vec3 a(0.3, -1.1, 0.7);
  const double exact = 4.0 * pi * E * std::sinh(a.norm()) / a.norm();
  auto quad = [&](int n) {
    SphereGrid g(E, n);
    double acc = 0;
    for (int i = 0; i < g.size(); ++i)
      acc += g.weights[i] * std::exp(a.dot(g.nodes[i]) / std::sqrt(E));
    return std::abs(acc - exact);
  };
  const double e1 = quad(6), e2 = quad(12);
  CHECK(e2 < e1 / 16.0);  // far better than 4th order for a smooth integrand
}

TEST_CASE("sphere antipode map is exact for even azimuth counts") {
  SphereGrid g(3.0, 8);
  for (int i = 0; i < g.size(); ++i)
    CHECK((g.nodes[g.antipode(i)] + g.nodes[i]).norm() < 1e-12);
}

TEST_CASE("p grid stays inside the ball and off the tube") {
  RunConfig cfg = small_config();
  PGrid g(cfg);
  const double R = 2.0 * cfg.tau * std::sqrt(cfg.E);
  CHECK(g.size() > 0);
  for (const Vec3& p : g.nodes) {
    CHECK(p.norm() < R);
    CHECK((p - p.dot(cfg.nu) * cfg.nu).norm() > cfg.tube_radius());
  }
}

TEST_CASE("lambda grid area weights integrate the disk component exactly") {
  LambdaGrid g(32, 8, 0.05, 20.0, 0.02);
  double area = 0;
  for (int i = 0; i < g.n_inner; ++i) area += g.area_weights[i];
  const double expect = pi * ((1.0 - 0.02) * (1.0 - 0.02) - 0.05 * 0.05);
  CHECK(area == doctest::Approx(expect).epsilon(1e-6));
  for (int i = 0; i < g.n_area(); ++i) {
    const double r = std::abs(g.area_nodes[i]);
    CHECK(std::abs(r - 1.0) > 0.019);
    CHECK(r > 0.0);
  }
}

TEST_CASE("weighted sup norm over p") {
  RunConfig cfg = small_config();
  PGrid g(cfg);
  const double mu0 = 2.0;

  SUBCASE("zero field") {
    VectorXcd w = VectorXcd::Zero(g.size());
    CHECK(weighted_sup_norm_p(w, g, mu0) == 0.0);
  }
  SUBCASE("weight cancels exactly") {
    VectorXcd w(g.size());
    for (int i = 0; i < g.size(); ++i) w(i) = std::pow(1.0 + g.nodes[i].norm(), -mu0);
    CHECK(weighted_sup_norm_p(w, g, mu0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("gaussian field against a direct scan") {
    VectorXcd w(g.size());
    for (int i = 0; i < g.size(); ++i) w(i) = std::exp(-g.nodes[i].squaredNorm());
    // Independent oracle: explicit scan over every node.
    double expect = 0;
    for (int i = 0; i < g.size(); ++i)
      expect = std::max(expect, std::pow(1.0 + g.nodes[i].norm(), mu0) *
                                    std::abs(std::exp(-g.nodes[i].squaredNorm())));
    CHECK(weighted_sup_norm_p(w, g, mu0) == doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("corrupt field rejected") {
    VectorXcd w = VectorXcd::Zero(g.size());
    w(0) = cplx(std::numeric_limits<double>::quiet_NaN(), 0);
    CHECK_THROWS_WITH(weighted_sup_norm_p(w, g, mu0), "corrupt field");
  }
}

TEST_CASE("triple norm") {
  RunConfig cfg = small_config();
  auto lg = std::make_shared<LambdaGrid>(cfg);
  auto pg = std::make_shared<PGrid>(cfg);
  ComplexField2D U(lg, pg);

  SUBCASE("zero and exact-cancellation fields") {
    CHECK(triple_norm(U, 3.0) == 0.0);
    for (int j = 0; j < pg->size(); ++j)
      U.values.col(j).setConstant(std::pow(1.0 + pg->nodes[j].norm(), -3.0));
    CHECK(triple_norm(U, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("random field against a double loop") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < U.values.rows(); ++i)
      for (int j = 0; j < U.values.cols(); ++j) U.values(i, j) = cplx(u(rng), u(rng));
    double expect = 0;
    for (int i = 0; i < U.values.rows(); ++i)
      for (int j = 0; j < U.values.cols(); ++j)
        expect = std::max(expect, std::pow(1.0 + pg->nodes[j].norm(), 2.5) *
                                      std::abs(U.values(i, j)));
    CHECK(triple_norm(U, 2.5) == doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("homogeneity and monotonicity") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < U.values.rows(); ++i)
      for (int j = 0; j < U.values.cols(); ++j) U.values(i, j) = cplx(u(rng), u(rng));
    const cplx c(0.7, -2.1);
    ComplexField2D V = U;
    V.values *= c;
    CHECK(triple_norm(V, 2.0) == doctest::Approx(std::abs(c) * triple_norm(U, 2.0)).epsilon(1e-12));
    CHECK(triple_norm(U, 3.0) >= triple_norm(U, 2.0));
  }
}

TEST_CASE("weighted sup norm over node pairs") {
  const double E = 4.0;
  SphereGrid g(E, 6);
  ScatteringData data(g);
  const double mu = 3.0;

  SUBCASE("zero data") { CHECK(sup_norm_ME(data, mu) == 0.0); }
  SUBCASE("weight cancels") {
    for (int i = 0; i < g.size(); ++i)
      for (int j = 0; j < g.size(); ++j)
        data.f(i, j) = std::pow(1.0 + (g.nodes[i] - g.nodes[j]).squaredNorm(), -0.5 * mu);
    CHECK(sup_norm_ME(data, mu) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("linearized gaussian data against a direct scan") {
    const AnalyticPotential pot = AnalyticPotential::gaussian(1.0, 1.0);
    data = born_f(pot, g);
    double expect = 0;
    for (int i = 0; i < g.size(); ++i)
      for (int j = 0; j < g.size(); ++j)
        expect = std::max(expect,
                          std::pow(1.0 + (g.nodes[i] - g.nodes[j]).squaredNorm(), 0.5 * mu) *
                              std::abs(vhat_eval(pot, g.nodes[i] - g.nodes[j])));
    CHECK(sup_norm_ME(data, mu) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("config validation and round trip") {
  RunConfig cfg = small_config();
  cfg.validate();
  const RunConfig back = RunConfig::from_json(cfg.to_json());
  CHECK(back.E == cfg.E);
  CHECK(back.n_p == cfg.n_p);
  CHECK(back.tube_radius() == doctest::Approx(cfg.tube_radius()));

  RunConfig bad = cfg;
  bad.tau = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.mu0 = 5.0;  // above mu
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.nu = Vec3(1, 1, 0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
