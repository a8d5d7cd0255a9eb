#pragma once

#include <memory>

#include "isct/config.hpp"
#include "isct/coords.hpp"
#include "isct/fields.hpp"
#include "isct/forward.hpp"

namespace isct {
namespace dbar {

// Quadrature engine for the quadratic circle-integral form
//   (U1, U2)(lambda, p) = -(pi/4) int W(lambda, p, phi)
//        U1(z1, -xi) U2(z2, p + xi) chi(xi) chi(p + xi) dphi,
// with the hard ball cutoffs at 2 tau sqrt(E). The integrand's support in
// phi collapses as |Re k| grows, so the rule integrates exactly over the
// support window (Gauss-Legendre) and falls back to a periodic trapezoid
// when the window covers most of the circle.
class BracketEngine {
 public:
  BracketEngine(const RunConfig& cfg, std::shared_ptr<const LambdaGrid> lg,
                std::shared_ptr<const PGrid> pg, int n_phi = 24);

  cplx eval(const ComplexField2D& U1, const ComplexField2D& U2, cplx lambda, const Vec3& p,
            long* skipped = nullptr) const;

  // bracket(U, U) at every (area node, p node); parallel over area nodes.
  MatrixXcd bracket_field(const ComplexField2D& U, long* skipped = nullptr) const;

  const RunConfig& config() const { return cfg_; }
  std::shared_ptr<const LambdaGrid> lambda_grid() const { return lg_; }
  std::shared_ptr<const PGrid> p_grid() const { return pg_; }

 private:
  RunConfig cfg_;
  std::shared_ptr<const LambdaGrid> lg_;
  std::shared_ptr<const PGrid> pg_;
  int n_phi_;
  std::vector<double> gl_nodes_, gl_weights_;  // base rule on [-1, 1]
  std::vector<coords::Frame> frames_;          // per p node
  std::vector<double> s_p_;                    // sqrt(E - p^2/4) per p node
};

// Single-pair bracket with cutoffs; frames are derived from cfg.nu.
cplx bilinear_bracket(const ComplexField2D& U1, const ComplexField2D& U2, cplx lambda,
                      const Vec3& p, const RunConfig& cfg, long* skipped = nullptr);

// Full-circle variant without the ball cutoffs, evaluated through an
// arbitrary function on the momentum variety.
class HEvaluator {
 public:
  virtual ~HEvaluator() = default;
  virtual cplx at_chart(cplx lambda, const Vec3& p) const = 0;
  virtual cplx at_momentum(const coords::ComplexMomentum& k, const Vec3& q) const = 0;
};

class OracleEvaluator : public HEvaluator {
 public:
  explicit OracleEvaluator(const forward::HOracle& oracle) : oracle_(oracle) {}
  cplx at_chart(cplx lambda, const Vec3& p) const override { return oracle_.at_chart(lambda, p); }
  cplx at_momentum(const coords::ComplexMomentum& k, const Vec3& q) const override {
    return oracle_.at(k, q);
  }

 private:
  const forward::HOracle& oracle_;
};

class FieldEvaluator : public HEvaluator {
 public:
  FieldEvaluator(const ComplexField2D& field, const Vec3& nu) : field_(field), nu_(nu) {}
  cplx at_chart(cplx lambda, const Vec3& p) const override { return field_.eval(lambda, p); }
  cplx at_momentum(const coords::ComplexMomentum& k, const Vec3& q) const override;

 private:
  const ComplexField2D& field_;
  Vec3 nu_;
};

cplx bilinear_bracket_full(const HEvaluator& H, cplx lambda, const Vec3& p, double E,
                           const Vec3& nu, int n_phi = 64, long* skipped = nullptr);

// Pure boundary (Cauchy) term of the integral representation, evaluated
// strictly inside the disk (from the plus data) or strictly outside (from
// the minus data). Throws "use boundary-limit op" within eps_T of the circle.
cplx cauchy_boundary_h0(const BoundaryData& bd, cplx lambda, int p_index);

// One-sided limit at a circle node: 1/2 data(lambda) plus the principal
// value contour integral, the singular arc |zeta - lambda| <= E^{-1/2}
// summed in antisymmetric pairs.
cplx boundary_limit_h0(const BoundaryData& bd, bool plus_side, int circle_index, int p_index,
                       double E);

// Cauchy data on every area node, circle quadrature applied as one matrix
// product per side.
ComplexField2D build_cauchy_data(const BoundaryData& bd);

// Magnitude cap: values above (2^(mu/2) N + c7 N^2 / ((1-eta)^2 (1-delta)
// E^(beta/2))) (1+|p|)^(-mu) are rescaled to that bound, preserving phase.
ComplexField2D cap_h0(const ComplexField2D& h0, double N, double eta, double delta, double beta,
                      const RunConfig& cfg);

// Area Cauchy transform of the bracket field: kernel 1/(zeta - lambda) over
// the disk component of lambda, with the partial-fraction form over the
// exterior. Cells are integrated by the equal-area-disk rule.
struct MOperator {
  std::shared_ptr<const LambdaGrid> lg;
  MatrixXcd K;            // n_area x n_area, block per component
  VectorXcd k0_plus;      // kernel 1/zeta over the inner cells
  VectorXcd k0_minus;     // kernel 1/zeta over the outer cells

  explicit MOperator(std::shared_ptr<const LambdaGrid> lg);
};

ComplexField2D apply_M_from_bracket(const MOperator& op, const MatrixXcd& bracket,
                                    const ComplexField2D& like);
ComplexField2D apply_M(const BracketEngine& engine, const MOperator& op, const ComplexField2D& U,
                       long* skipped = nullptr);

struct DbarDiagnostics {
  double contraction_estimate = 0;
  int iterations = 0;
  double residual = 0;
  double r1 = 0;
  double r2 = 0;
  long skipped_nodes = 0;
};

struct DbarState {
  ComplexField2D H0;
  ComplexField2D Htilde;
  DbarDiagnostics diagnostics;
};

// Successive approximations for Htilde = H0 + M(Htilde) from 0, tracked in
// the mu0-weighted sup norm. Throws "dbar divergence (radius condition
// violated)" when increments grow three times in a row.
DbarState solve_fixed_point(const ComplexField2D& H0, const BracketEngine& engine,
                            const MOperator& op, const RunConfig& cfg, double N_hat = 0,
                            double eta_hat = 0);

struct ResidualSample {
  cplx lhs;       // finite-difference d/d(conj lambda)
  cplx rhs;       // full-circle quadratic term
  cplx residual;  // lhs - rhs
};

ResidualSample dbar_residual(const HEvaluator& H, cplx lambda, const Vec3& p,
                             const RunConfig& cfg, double fd_step, int n_phi = 16);
// Field-backed overload; the stencil is the field's own interpolant.
ResidualSample dbar_residual(const ComplexField2D& H, cplx lambda, const Vec3& p,
                             const RunConfig& cfg, double fd_step, int n_phi = 16);

// sup over lambda in D+ of (1/pi) integral dA / ((1+|zeta|^2) |zeta-lambda|),
// by the grid's own cells (diagnostic constant of the area transform).
double c5_quadrature(const LambdaGrid& lg);

}  // namespace dbar
}  // namespace isct
