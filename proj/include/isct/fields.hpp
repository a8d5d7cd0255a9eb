#pragma once

#include <memory>

#include "isct/grids.hpp"
#include "isct/types.hpp"

namespace isct {

// Scattering amplitude sampled on node pairs of one sphere grid,
// f(i, j) = f(k_i, l_j).
struct ScatteringData {
  double E = 0;
  SphereGrid grid;
  MatrixXcd f;

  ScatteringData() = default;
  ScatteringData(const SphereGrid& g) : E(g.E), grid(g), f(MatrixXcd::Zero(g.size(), g.size())) {}
};

// Complex values indexed (lambda area node, p node).
struct ComplexField2D {
  std::shared_ptr<const LambdaGrid> lambda;
  std::shared_ptr<const PGrid> p;
  MatrixXcd values;  // n_area x n_p

  ComplexField2D() = default;
  ComplexField2D(std::shared_ptr<const LambdaGrid> lg, std::shared_ptr<const PGrid> pg)
      : lambda(std::move(lg)), p(std::move(pg)),
        values(MatrixXcd::Zero(lambda->n_area(), p->size())) {}

  // Bilinear in (log |lambda|, arg lambda), trilinear in p; zero outside the
  // p-ball, radius clamped within the disk component containing z.
  cplx eval(cplx z, const Vec3& q) const;
};

// Boundary values on T x PGrid, one matrix per side of the circle.
struct BoundaryData {
  std::shared_ptr<const LambdaGrid> lambda;
  std::shared_ptr<const PGrid> p;
  MatrixXcd plus;   // n_circle x n_p
  MatrixXcd minus;  // n_circle x n_p

  BoundaryData() = default;
  BoundaryData(std::shared_ptr<const LambdaGrid> lg, std::shared_ptr<const PGrid> pg)
      : lambda(std::move(lg)), p(std::move(pg)),
        plus(MatrixXcd::Zero(lambda->circle_nodes.size(), p->size())),
        minus(MatrixXcd::Zero(lambda->circle_nodes.size(), p->size())) {}
};

// sup over p-nodes of (1 + |p|)^mu0 |w(p)|. Throws on non-finite entries.
double weighted_sup_norm_p(const VectorXcd& w, const PGrid& grid, double mu0);

// sup over (lambda, p) nodes of (1 + |p|)^mu |U(lambda, p)|.
double triple_norm(const ComplexField2D& U, double mu);

// sup over node pairs of (1 + |k - l|^2)^(mu/2) |f(k, l)|.
double sup_norm_ME(const ScatteringData& data, double mu);

}  // namespace isct
